// dynamics.hpp — exact single-excitation dynamics of emitters coupled to the driven bath

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fwqed/effective.hpp"
#include "fwqed/lattice.hpp"
#include "fwqed/propagator.hpp"

namespace fwqed {

struct EmitterConfig {
    double Delta = 0.0;                     // omega_n - omega_c
    int cell = 1;                           // j_n in 1..N
    Sublattice sublattice = Sublattice::A;
    double g = 0.0;                         // coupling strength

    void validate(const LatticeParams& p) const {
        if (g < 0.0) throw std::invalid_argument("EmitterConfig: g must be >= 0");
        if (cell < 1 || cell > p.N) throw std::invalid_argument("EmitterConfig: cell outside lattice");
    }
};

// State layout: emitters first (n = 0..Ne-1), then bath sites (a_1, b_1, ...).
// The bath block rotates at omega_c, so the cavity offset is subtracted and the
// emitters carry the detunings Delta_n.
inline Eigen::MatrixXcd full_hamiltonian(const LatticeParams& p, const std::vector<EmitterConfig>& emitters,
                                         double t) {
    const int ne = static_cast<int>(emitters.size());
    const int dim = ne + 2 * p.N;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    h.bottomRightCorner(2 * p.N, 2 * p.N) = real_space_hamiltonian(p, t);
    h.bottomRightCorner(2 * p.N, 2 * p.N).diagonal().array() -= p.omega_c;
    for (int n = 0; n < ne; ++n) {
        emitters[n].validate(p);
        for (int m = 0; m < n; ++m)
            if (emitters[m].cell == emitters[n].cell && emitters[m].sublattice == emitters[n].sublattice)
                throw std::invalid_argument("full_hamiltonian: duplicate emitter site+sublattice");
        h(n, n) = emitters[n].Delta;
        const int site = ne + site_index(emitters[n].cell, emitters[n].sublattice == Sublattice::B);
        h(n, site) = emitters[n].g;
        h(site, n) = emitters[n].g;
    }
    return h;
}

// H(t) = A + cos(Omega t) B in sparse form, for fast state stepping.
struct DrivenHamiltonian {
    Eigen::SparseMatrix<Complex> A;  // static part (emitters, detunings, J/J' bonds)
    Eigen::SparseMatrix<Complex> B;  // drive bond pattern (factor 2V included)
    double Omega = 0.0;
    int dim = 0;

    Eigen::VectorXcd apply(double t, const Eigen::VectorXcd& v) const {
        return A * v + std::cos(Omega * t) * (B * v);
    }
};

inline DrivenHamiltonian driven_hamiltonian(const LatticeParams& p, const std::vector<EmitterConfig>& emitters) {
    p.validate();
    const int ne = static_cast<int>(emitters.size());
    const int dim = ne + 2 * p.N;
    std::vector<Eigen::Triplet<Complex>> ta, tb;
    auto bond = [&](std::vector<Eigen::Triplet<Complex>>& out, int i, int j, double w) {
        out.emplace_back(i, j, w);
        out.emplace_back(j, i, w);
    };
    for (int j = 1; j <= p.N; ++j) {
        const int a = ne + site_index(j, false);
        const int b = ne + site_index(j, true);
        bond(ta, a, b, p.J);
        bond(tb, a, b, 2.0 * p.V);
        const bool wrap = (j == p.N);
        if (!wrap || p.boundary == Boundary::PBC) {
            const int a_next = ne + site_index(wrap ? 1 : j + 1, false);
            bond(ta, a_next, b, p.Jp);
            bond(tb, a_next, b, -2.0 * p.V);
        }
    }
    for (int n = 0; n < ne; ++n) {
        emitters[n].validate(p);
        ta.emplace_back(n, n, emitters[n].Delta);
        const int site = ne + site_index(emitters[n].cell, emitters[n].sublattice == Sublattice::B);
        bond(ta, n, site, emitters[n].g);
    }
    DrivenHamiltonian h;
    h.dim = dim;
    h.Omega = p.Omega;
    h.A.resize(dim, dim);
    h.B.resize(dim, dim);
    h.A.setFromTriplets(ta.begin(), ta.end());
    h.B.setFromTriplets(tb.begin(), tb.end());
    return h;
}

struct TrajectorySample {
    double t;
    std::vector<double> emitter_pop;  // |C_e|^2 per emitter
    Eigen::VectorXcd state;           // full amplitude vector (kept when requested)
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
};

namespace detail {

// v <- exp(-i H(t_mid) dt) v by converged Taylor on the vector.
inline void step_state(const DrivenHamiltonian& h, double t_mid, double dt, Eigen::VectorXcd& v) {
    Eigen::VectorXcd term = v;
    for (int n = 1; n < 48; ++n) {
        term = (Complex(0.0, -dt) / double(n)) * h.apply(t_mid, term);
        v += term;
        if (term.norm() < 1e-16 * v.norm()) break;
    }
}

}  // namespace detail

// Midpoint-exponential evolution of a normalized single-excitation state,
// sampled uniformly on [0, t_end]. Default sub-step: Omega dt = 2 pi / 256.
inline Trajectory evolve(const LatticeParams& p, const std::vector<EmitterConfig>& emitters,
                         const Eigen::VectorXcd& initial, double t_end, int samples,
                         int steps_per_period = 256, bool keep_states = false) {
    const DrivenHamiltonian h = driven_hamiltonian(p, emitters);
    if (initial.size() != h.dim) throw std::invalid_argument("evolve: initial state has wrong dimension");
    if (std::abs(initial.norm() - 1.0) > 1e-9) throw std::invalid_argument("evolve: initial state not normalized");
    if (samples < 2) throw std::invalid_argument("evolve: need at least 2 samples");
    const int ne = static_cast<int>(emitters.size());
    const double dt_target = p.period() / steps_per_period;

    Trajectory traj;
    traj.samples.reserve(samples);
    Eigen::VectorXcd v = initial;
    double t = 0.0;
    auto record = [&](double tv) {
        TrajectorySample s;
        s.t = tv;
        s.emitter_pop.resize(ne);
        for (int n = 0; n < ne; ++n) s.emitter_pop[n] = std::norm(v(n));
        if (keep_states) s.state = v;
        traj.samples.push_back(std::move(s));
    };
    record(0.0);
    for (int i = 1; i < samples; ++i) {
        const double t_next = t_end * i / (samples - 1);
        const double span = t_next - t;
        const int nsub = std::max(1, static_cast<int>(std::ceil(span / dt_target - 1e-12)));
        const double dt = span / nsub;
        for (int s = 0; s < nsub; ++s) {
            detail::step_state(h, t + (s + 0.5) * dt, dt, v);
        }
        t = t_next;
        const double drift = std::abs(v.norm() - 1.0);
        if (drift > 1e-6)
            throw std::runtime_error("evolve: norm drift " + std::to_string(drift) +
                                     " at t=" + std::to_string(t) + "; reduce the step size");
        record(t);
    }
    return traj;
}

// Stroboscopic evolution through the eigendecomposition of the one-period
// propagator of the full Hamiltonian: samples land on multiples of T, with no
// error accumulation beyond the single-period integration. Used for the very
// long horizons of the in-gap exchange dynamics.
class StroboscopicEvolver {
public:
    StroboscopicEvolver(const LatticeParams& p, const std::vector<EmitterConfig>& emitters,
                        int steps_per_period = 256)
        : T_(p.period()), ne_(static_cast<int>(emitters.size())) {
        const auto prop = propagate_period(
            [&](double t) { return full_hamiltonian(p, emitters, t); }, 0.0, T_, steps_per_period);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(prop.U);
        vecs_ = solver.eigenvectors();
        phases_ = solver.eigenvalues();
        inv_ = vecs_.inverse();
    }

    double period() const { return T_; }

    // State at t = n T.
    Eigen::VectorXcd at(const Eigen::VectorXcd& initial, long n_periods) const {
        Eigen::VectorXcd c = inv_ * initial;
        for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::pow(phases_(i), double(n_periods));
        return vecs_ * c;
    }

    Trajectory trajectory(const Eigen::VectorXcd& initial, double t_end, int samples) const {
        Trajectory traj;
        traj.samples.reserve(samples);
        const Eigen::VectorXcd c0 = inv_ * initial;
        for (int i = 0; i < samples; ++i) {
            const long n = std::lround(t_end * i / (samples - 1) / T_);
            Eigen::VectorXcd c = c0;
            for (Eigen::Index j = 0; j < c.size(); ++j) c(j) *= std::pow(phases_(j), double(n));
            const Eigen::VectorXcd v = vecs_ * c;
            TrajectorySample s;
            s.t = n * T_;
            s.emitter_pop.resize(ne_);
            for (int m = 0; m < ne_; ++m) s.emitter_pop[m] = std::norm(v(m));
            traj.samples.push_back(std::move(s));
        }
        return traj;
    }

private:
    double T_;
    int ne_;
    Eigen::MatrixXcd vecs_, inv_;
    Eigen::VectorXcd phases_;
};

// Initial state |e>_1 |g>_2 |vac>_B for a pair of emitters.
inline Eigen::VectorXcd excited_emitter_state(int dim, int which = 0) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    v(which) = 1.0;
    return v;
}

// Populations of two emitters, emitter 1 initially excited.
inline std::pair<std::vector<double>, std::vector<double>> exchange_trajectory(
    const LatticeParams& p, const EmitterConfig& e1, const EmitterConfig& e2, double t_end, int samples,
    std::vector<double>* times = nullptr, bool stroboscopic = false, int steps_per_period = 256) {
    const std::vector<EmitterConfig> emitters{e1, e2};
    const int dim = 2 + 2 * p.N;
    const Eigen::VectorXcd psi0 = excited_emitter_state(dim, 0);
    Trajectory traj;
    if (stroboscopic) {
        StroboscopicEvolver ev(p, emitters, steps_per_period);
        traj = ev.trajectory(psi0, t_end, samples);
    } else {
        traj = evolve(p, emitters, psi0, t_end, samples, steps_per_period);
    }
    std::vector<double> p1, p2;
    p1.reserve(traj.samples.size());
    p2.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
        p1.push_back(s.emitter_pop[0]);
        p2.push_back(s.emitter_pop[1]);
        if (times) times->push_back(s.t);
    }
    return {std::move(p1), std::move(p2)};
}

}  // namespace fwqed
