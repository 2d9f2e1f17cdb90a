// spectral.hpp — self-energies, Lamb shift / decay curves, emitter-photon bound states

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fwqed/dynamics.hpp"
#include "fwqed/effective.hpp"
#include "fwqed/lattice.hpp"
#include "fwqed/propagator.hpp"

namespace fwqed {

struct SelfEnergyResult {
    Complex z;
    Complex sigma;
    double lamb_shift;  // Re sigma
    double decay;       // -2 Im sigma
};

namespace detail {

inline SelfEnergyResult pack_self_energy(Complex z, Complex sigma) {
    return {z, sigma, sigma.real(), -2.0 * sigma.imag()};
}

template <typename F>
Complex refine_k_sum(F&& per_grid, int grid0, double tol, int max_doublings = 6) {
    int m = grid0;
    Complex prev = per_grid(m);
    for (int d = 0; d < max_doublings; ++d) {
        m *= 2;
        const Complex next = per_grid(m);
        if (std::abs(next - prev) < tol) return next;
        prev = next;
    }
    return prev;
}

}  // namespace detail

// Static SSH self-energy: Sigma(z) = (g^2/N) sum_k z / (z^2 - omega(k)^2),
// identical for either sublattice. The k-grid is doubled until 1e-8 stability.
inline SelfEnergyResult static_self_energy(const LatticeParams& p, Complex z, double g, int grid0 = 2001) {
    const Complex sigma = detail::refine_k_sum(
        [&](int m) {
            Complex sum = 0.0;
            for (const double k : k_grid(m)) {
                const double w = static_dispersion(p, k);
                sum += z / (z * z - w * w);
            }
            return g * g * sum / double(m);
        },
        grid0, 1e-8);
    return detail::pack_self_energy(z, sigma);
}

// Renormalized self-energy from the 8-row sideband table:
// Sigma_eff(z) = g^2/(2N) sum_{r,k} |F^alpha_{r,k}|^2 / (z - lambda_r).
inline SelfEnergyResult effective_self_energy(const LatticeParams& p, Complex z, double g,
                                              Sublattice alpha = Sublattice::A, int grid0 = 2001,
                                              Lambda7Convention conv = Lambda7Convention::Verbatim) {
    const Complex sigma = detail::refine_k_sum(
        [&](int m) {
            Complex sum = 0.0;
            for (const double k : k_grid(m)) {
                for (const FRow& row : f_table(p, k, alpha, conv))
                    sum += std::norm(row.F) / (z - row.lambda_r);
            }
            return g * g * sum / (2.0 * m);
        },
        grid0, 1e-8);
    return detail::pack_self_energy(z, sigma);
}

// i0+ prescription: evaluate at eta, eta/2, eta/4 and Richardson-extrapolate
// (quadratic model) to eta -> 0.
template <typename F>
Complex eta_extrapolate(F&& sigma_of_eta, double eta0 = 1e-3) {
    const Complex s1 = sigma_of_eta(eta0);
    const Complex s2 = sigma_of_eta(0.5 * eta0);
    const Complex s3 = sigma_of_eta(0.25 * eta0);
    Complex s = (8.0 * s3 - 6.0 * s2 + s1) / 3.0;
    // in a gap Im(sigma) -> 0 from below; the extrapolation may overshoot by
    // O(1e-9), which would read as a (unphysical) negative decay rate
    if (s.imag() > 0.0 && s.imag() < 1e-8) s = Complex(s.real(), 0.0);
    return s;
}

inline SelfEnergyResult static_self_energy_limit(const LatticeParams& p, double Delta, double g,
                                                 int grid0 = 2001, double eta0 = 1e-3) {
    const Complex sigma = eta_extrapolate(
        [&](double eta) { return static_self_energy(p, Complex(Delta, eta), g, grid0).sigma; }, eta0);
    return detail::pack_self_energy(Complex(Delta, 0.0), sigma);
}

inline SelfEnergyResult effective_self_energy_limit(const LatticeParams& p, double Delta, double g,
                                                    Sublattice alpha = Sublattice::A, int grid0 = 2001,
                                                    double eta0 = 1e-3,
                                                    Lambda7Convention conv = Lambda7Convention::Verbatim) {
    const Complex sigma = eta_extrapolate(
        [&](double eta) { return effective_self_energy(p, Complex(Delta, eta), g, alpha, grid0, conv).sigma; },
        eta0);
    return detail::pack_self_energy(Complex(Delta, 0.0), sigma);
}

struct BoundState {
    double energy = 0.0;                              // E_BS (static) or quasienergy (driven)
    Complex C_e;
    std::vector<Complex> C_a, C_b;                    // per cell, index j = 1..N (or -W..W for static)
    int j_offset = 0;                                 // cell label of index 0
    std::vector<std::pair<double, Eigen::VectorXcd>> time_samples;  // driven case: (t0, bath+emitter state)
};

// Static bound state of an A-coupled emitter: solve E = Delta + Re Sigma(E)
// by bisection in the enclosing gap, then Eqs. for C_{a,j}, C_{b,j} by k-sums.
// Returned photon amplitudes cover cells j in [-half_width, half_width]
// relative to the emitter cell.
inline BoundState static_bound_state(const LatticeParams& p, double Delta, double g, int half_width,
                                     int grid = 4001) {
    const double w_min = std::abs(p.J - p.Jp);
    const double w_max = p.J + p.Jp;
    double lo, hi;
    if (std::abs(Delta) < w_min) {
        lo = -w_min + 1e-6;
        hi = w_min - 1e-6;
    } else if (Delta > w_max) {
        lo = w_max + 1e-6;
        hi = std::max(Delta, w_max) + 1.0 + 10.0 * g * g;
    } else if (Delta < -w_max) {
        hi = -w_max - 1e-6;
        lo = std::min(Delta, -w_max) - 1.0 - 10.0 * g * g;
    } else {
        throw std::invalid_argument("static_bound_state: Delta lies inside a band");
    }
    auto mismatch = [&](double e) {
        return e - Delta - static_self_energy(p, Complex(e, 0.0), g, grid).sigma.real();
    };
    double flo = mismatch(lo), fhi = mismatch(hi);
    if (flo * fhi > 0.0) throw std::runtime_error("static_bound_state: no pole bracketed in the gap");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = mismatch(mid);
        if (std::abs(fm) < 1e-12 || hi - lo < 1e-14) break;
        if (flo * fm <= 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    const double e_bs = 0.5 * (lo + hi);

    BoundState bs;
    bs.energy = e_bs;
    bs.j_offset = -half_width;
    bs.C_a.resize(2 * half_width + 1);
    bs.C_b.resize(2 * half_width + 1);
    const auto ks = k_grid(grid);
    for (int idx = 0; idx <= 2 * half_width; ++idx) {
        const int j = idx - half_width;
        Complex ca = 0.0, cb = 0.0;
        for (const double k : ks) {
            const double w = static_dispersion(p, k);
            const double th = bloch_snapshot(p, k).theta_k;
            const Complex denom = e_bs * e_bs - w * w;
            ca += e_bs * std::exp(I * (k * j)) / denom;
            cb += w * std::exp(I * (k * j - th)) / denom;
        }
        bs.C_a[idx] = g * ca / double(grid);
        bs.C_b[idx] = g * cb / double(grid);
    }
    double norm2 = 1.0;
    for (int idx = 0; idx <= 2 * half_width; ++idx) norm2 += std::norm(bs.C_a[idx]) + std::norm(bs.C_b[idx]);
    const double norm = std::sqrt(norm2);
    bs.C_e = 1.0 / norm;
    for (auto& c : bs.C_a) c /= norm;
    for (auto& c : bs.C_b) c /= norm;
    return bs;
}

// Floquet bound state of the full light-matter problem: diagonalize the
// one-period propagator, pick the mode with maximal emitter weight whose
// quasienergy falls in the target gap, sample its profile over one period.
inline BoundState floquet_bound_state(const LatticeParams& p, const EmitterConfig& emitter,
                                      int steps = 256, int period_samples = 16, double gap_window = 0.25) {
    const std::vector<EmitterConfig> emitters{emitter};
    const double T = p.period();
    std::vector<double> fractions;
    for (int s = 0; s < period_samples; ++s) fractions.push_back(double(s) / period_samples);
    fractions.push_back(1.0);
    const auto provider = [&](double t) { return full_hamiltonian(p, emitters, t); };
    const auto shots = propagate_with_snapshots(provider, 0.0, T, steps, fractions);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(shots.back());

    const double target = fold_quasienergy(emitter.Delta, p.Omega);
    int best = -1;
    double best_weight = -1.0;
    const Eigen::Index dim = shots.back().rows();
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double eps = fold_quasienergy(-std::arg(solver.eigenvalues()(i)) / T, p.Omega);
        double dist = std::abs(eps - target);
        dist = std::min(dist, p.Omega - dist);  // quasi-energy is an angle
        if (dist > gap_window) continue;
        const double weight = std::norm(solver.eigenvectors()(0, i)) / solver.eigenvectors().col(i).squaredNorm();
        if (weight > best_weight) {
            best_weight = weight;
            best = static_cast<int>(i);
        }
    }
    if (best < 0) throw std::runtime_error("floquet_bound_state: no mode with emitter weight in the target gap");

    BoundState bs;
    bs.energy = fold_quasienergy(-std::arg(solver.eigenvalues()(best)) / T, p.Omega);
    const Eigen::VectorXcd phi0 = solver.eigenvectors().col(best).normalized();
    bs.C_e = phi0(0);
    bs.j_offset = 1;
    bs.C_a.resize(p.N);
    bs.C_b.resize(p.N);
    for (int j = 0; j < p.N; ++j) {
        bs.C_a[j] = phi0(1 + 2 * j);
        bs.C_b[j] = phi0(1 + 2 * j + 1);
    }
    for (int s = 0; s < period_samples; ++s) {
        const double t0 = fractions[s] * T;
        Eigen::VectorXcd phi = shots[s] * phi0;
        phi *= std::exp(I * bs.energy * t0);
        bs.time_samples.emplace_back(t0, phi.normalized());
    }
    return bs;
}

// Mean of the |amplitude| profiles over the sampled period.
struct AveragedProfile {
    std::vector<double> abs_a, abs_b;  // per cell
};

inline AveragedProfile time_averaged_bound_state(const BoundState& bs) {
    if (bs.time_samples.size() < 16)
        throw std::invalid_argument("time_averaged_bound_state: need >= 16 period samples");
    const int n_cells = static_cast<int>((bs.time_samples.front().second.size() - 1) / 2);
    AveragedProfile prof;
    prof.abs_a.assign(n_cells, 0.0);
    prof.abs_b.assign(n_cells, 0.0);
    for (const auto& [t0, v] : bs.time_samples) {
        for (int j = 0; j < n_cells; ++j) {
            prof.abs_a[j] += std::abs(v(1 + 2 * j));
            prof.abs_b[j] += std::abs(v(1 + 2 * j + 1));
        }
    }
    for (auto& x : prof.abs_a) x /= bs.time_samples.size();
    for (auto& x : prof.abs_b) x /= bs.time_samples.size();
    return prof;
}

}  // namespace fwqed
