// lattice.hpp — Driven SSH photonic bath: parameters, Bloch data, real-space Hamiltonian

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace fwqed {

using Complex = std::complex<double>;
inline constexpr Complex I{0.0, 1.0};
inline constexpr double pi = std::numbers::pi;

enum class Boundary { PBC, OBC };

// All energies in units of J (J = 1 internally), times in 1/J.
//
// omega_c defaults to 0: the number-conserving light-matter Hamiltonian makes a
// global cavity offset removable, so emitters carry detunings Delta_n instead.
struct LatticeParams {
    double J = 1.0;        // intra-cell hopping
    double Jp = 1.0;       // inter-cell hopping J'
    double V = 0.0;        // drive amplitude
    double Omega = 5.0;    // drive frequency
    double omega_c = 0.0;  // cavity offset
    int N = 2;             // unit cells
    Boundary boundary = Boundary::PBC;

    void validate() const {
        if (!(J > 0.0)) throw std::invalid_argument("LatticeParams: J must be > 0");
        if (Jp < 0.0) throw std::invalid_argument("LatticeParams: J' must be >= 0");
        if (V < 0.0) throw std::invalid_argument("LatticeParams: V must be >= 0");
        if (!(Omega > 0.0)) throw std::invalid_argument("LatticeParams: Omega must be > 0");
        if (N < 2) throw std::invalid_argument("LatticeParams: N must be >= 2");
    }

    double period() const { return 2.0 * pi / Omega; }
};

// J1(t) = J + 2V cos(Omega t), J2(t) = J' - 2V cos(Omega t)
struct Hoppings {
    double intra;
    double inter;
};

inline Hoppings hoppings_at(const LatticeParams& p, double t) {
    const double c = 2.0 * p.V * std::cos(p.Omega * t);
    return {p.J + c, p.Jp - c};
}

// omega(k) = sqrt(J^2 + J'^2 + 2 J J' cos k)
inline double static_dispersion(const LatticeParams& p, double k) {
    const double w2 = p.J * p.J + p.Jp * p.Jp + 2.0 * p.J * p.Jp * std::cos(k);
    return std::sqrt(std::max(w2, 0.0));
}

// Per-k scalars of the driven Bloch problem.
struct BlochSnapshot {
    double k;
    Complex h_k;     // J + J' e^{-ik} = omega(k) e^{i theta_k}
    Complex d_k;     // V (1 - e^{-ik}) = |d_k| e^{i beta_k}
    double theta_k;  // arg h_k
    double beta_k;   // arg d_k (limit pi/2 - k/2 where d_k vanishes)
    double z_k;      // 2|d_k|/Omega
};

inline BlochSnapshot bloch_snapshot(const LatticeParams& p, double k) {
    BlochSnapshot s;
    s.k = k;
    const Complex ph = std::exp(-I * k);
    s.h_k = p.J + p.Jp * ph;
    s.d_k = p.V * (1.0 - ph);
    s.theta_k = std::arg(s.h_k);
    s.beta_k = (std::abs(s.d_k) > 1e-14) ? std::arg(s.d_k) : 0.5 * pi - 0.5 * k;
    s.z_k = 2.0 * std::abs(s.d_k) / p.Omega;
    return s;
}

// 2x2 Bloch Hamiltonian at momentum k and time t, basis (a_k, b_k).
inline Eigen::Matrix2cd bloch_matrix(const LatticeParams& p, double k, double t) {
    const BlochSnapshot s = bloch_snapshot(p, k);
    const Complex off = s.h_k + 2.0 * s.d_k * std::cos(p.Omega * t);
    Eigen::Matrix2cd h;
    h << p.omega_c, off, std::conj(off), p.omega_c;
    return h;
}

// Site ordering (a_1, b_1, a_2, b_2, ...): sublattice extraction is a stride-2 slice.
inline int site_index(int cell, bool sublattice_b) { return 2 * (cell - 1) + (sublattice_b ? 1 : 0); }

// 2N x 2N real-space bath Hamiltonian at time t. PBC adds the wrap bond j=N -> 1.
inline Eigen::MatrixXcd real_space_hamiltonian(const LatticeParams& p, double t) {
    p.validate();
    const auto [j1, j2] = hoppings_at(p, t);
    const int dim = 2 * p.N;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    h.diagonal().setConstant(p.omega_c);
    for (int j = 1; j <= p.N; ++j) {
        const int a = site_index(j, false);
        const int b = site_index(j, true);
        h(a, b) = j1;  // a_j^dag b_j
        h(b, a) = j1;
        if (j < p.N) {
            const int a_next = site_index(j + 1, false);
            h(a_next, b) = j2;  // a_{j+1}^dag b_j
            h(b, a_next) = j2;
        }
    }
    if (p.boundary == Boundary::PBC) {
        const int a1 = site_index(1, false);
        const int bN = site_index(p.N, true);
        h(a1, bN) = j2;
        h(bN, a1) = j2;
    }
    return h;
}

// Uniform closed k-grid k_m = -pi + 2 pi m / M, m = 0..M-1 (trapezoid-friendly).
inline std::vector<double> k_grid(int M) {
    if (M < 2) throw std::invalid_argument("k_grid: need at least 2 points");
    std::vector<double> ks(M);
    for (int m = 0; m < M; ++m) ks[m] = -pi + 2.0 * pi * m / M;
    return ks;
}

}  // namespace fwqed
