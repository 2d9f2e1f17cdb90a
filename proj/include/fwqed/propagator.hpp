// propagator.hpp — time-ordered unitaries via piecewise-constant midpoint exponentials

#pragma once

#include <algorithm>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fwqed/lattice.hpp"

namespace fwqed {

using HamiltonianProvider = std::function<Eigen::MatrixXcd(double)>;

struct Propagator {
    Eigen::MatrixXcd U;
    double t0 = 0.0;
    double T = 0.0;

    double unitarity_residual() const {
        const auto d = U.adjoint() * U - Eigen::MatrixXcd::Identity(U.rows(), U.cols());
        return d.cwiseAbs().maxCoeff();
    }
};

namespace detail {

// M <- exp(-i H dt) M through the converged Taylor series. Assumes ||H|| dt
// is moderate (sub-step sizes here keep it well below 1; scaling kicks in
// otherwise so the result is still the exact exponential to roundoff).
template <typename Mat>
void apply_exp_inplace(const Mat& h, double dt, Eigen::MatrixXcd& m) {
    const double norm1 = h.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    double step = dt;
    while (std::abs(step) * norm1 > 2.0 && squarings < 30) {
        step *= 0.5;
        ++squarings;
    }
    if (squarings == 0) {
        Eigen::MatrixXcd term = m;
        for (int n = 1; n < 64; ++n) {
            term = (Complex(0.0, -step) / double(n)) * (h * term).eval();
            m += term;
            if (term.cwiseAbs().maxCoeff() < 1e-17 * (m.cwiseAbs().maxCoeff() + 1e-300)) break;
        }
    } else {
        // square the sub-step propagator, then apply once
        Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(h.rows(), h.rows());
        Eigen::MatrixXcd term = u;
        for (int n = 1; n < 64; ++n) {
            term = (Complex(0.0, -step) / double(n)) * (h * term).eval();
            u += term;
            if (term.cwiseAbs().maxCoeff() < 1e-17 * (u.cwiseAbs().maxCoeff() + 1e-300)) break;
        }
        for (int s = 0; s < squarings; ++s) u = (u * u).eval();
        m = (u * m).eval();
    }
}

inline void check_hermitian(const Eigen::MatrixXcd& h, double t) {
    const double scale = h.cwiseAbs().maxCoeff() + 1.0;
    const double res = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (res > 1e-10 * scale)
        throw std::runtime_error("propagate_period: provider returned non-Hermitian matrix at t=" +
                                 std::to_string(t) + " (residual " + std::to_string(res) + ")");
}

}  // namespace detail

// U(t0 + T, t0) as an ordered product of exactly-unitary sub-step propagators,
// each the exponential of the Hermitian midpoint Hamiltonian (2nd order in dt).
inline Propagator propagate_period(const HamiltonianProvider& provider, double t0, double T, int steps) {
    if (steps < 1) throw std::invalid_argument("propagate_period: steps must be >= 1");
    const double dt = T / steps;
    Eigen::MatrixXcd h0 = provider(t0 + 0.5 * dt);
    detail::check_hermitian(h0, t0 + 0.5 * dt);
    const Eigen::Index dim = h0.rows();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    detail::apply_exp_inplace(h0, dt, u);
    for (int s = 1; s < steps; ++s) {
        const double tm = t0 + (s + 0.5) * dt;
        const Eigen::MatrixXcd h = provider(tm);
        detail::check_hermitian(h, tm);
        detail::apply_exp_inplace(h, dt, u);
    }
    return {std::move(u), t0, T};
}

// Same sweep, additionally recording the prefix propagators U(t0 + f T, t0) at
// the requested fractions f in [0, 1] (must be sorted ascending).
inline std::vector<Eigen::MatrixXcd> propagate_with_snapshots(const HamiltonianProvider& provider,
                                                              double t0, double T, int steps,
                                                              const std::vector<double>& fractions) {
    const double dt = T / steps;
    Eigen::MatrixXcd h0 = provider(t0 + 0.5 * dt);
    const Eigen::Index dim = h0.rows();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    std::vector<Eigen::MatrixXcd> shots;
    shots.reserve(fractions.size());
    std::size_t next = 0;
    while (next < fractions.size() && fractions[next] <= 0.0) shots.push_back(u), ++next;
    for (int s = 0; s < steps; ++s) {
        const double tm = t0 + (s + 0.5) * dt;
        const Eigen::MatrixXcd h = provider(tm);
        detail::check_hermitian(h, tm);
        detail::apply_exp_inplace(h, dt, u);
        const double f_done = double(s + 1) / steps;
        while (next < fractions.size() && fractions[next] <= f_done + 1e-12) shots.push_back(u), ++next;
    }
    while (next < fractions.size()) shots.push_back(u), ++next;
    return shots;
}

// Fold an energy into the first Floquet-Brillouin zone [center - Omega/2, center + Omega/2).
inline double fold_quasienergy(double eps, double omega, double center = 0.0) {
    const double x = eps - center;
    return center + x - omega * std::floor(x / omega + 0.5);
}

// Quasi-energies of a Propagator: -arg(eigenphase)/T folded about `center`.
inline std::vector<double> quasienergies(const Propagator& prop, double omega, double center = 0.0) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(prop.U, false);
    std::vector<double> eps(prop.U.rows());
    for (Eigen::Index i = 0; i < prop.U.rows(); ++i)
        eps[i] = fold_quasienergy(-std::arg(solver.eigenvalues()(i)) / prop.T, omega, center);
    std::sort(eps.begin(), eps.end());
    return eps;
}

}  // namespace fwqed
