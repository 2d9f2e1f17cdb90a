// interactions.hpp — photon-mediated dipole-dipole couplings, collective decays,
// the drive-bridged coupling for detuned emitters, and reduced two-level dynamics

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fwqed/effective.hpp"
#include "fwqed/lattice.hpp"
#include "fwqed/spectral.hpp"

namespace fwqed {

struct CouplingResult {
    Complex G;                  // coherent exchange rate G_nm
    Complex Gamma_collective;   // collective decay Gamma_nm
    int distance = 0;           // j_nm = j_n - j_m
    Sublattice alpha = Sublattice::A, beta = Sublattice::A;
};

namespace detail {

// Sigma_nm(z) = g^2/(2N) sum_{r,k} F^alpha_r F^beta_r* e^{i k j_nm} / (z - lambda_r)
inline Complex pair_self_energy(const LatticeParams& p, Complex z, double g, Sublattice alpha,
                                Sublattice beta, int j_nm, int grid, Lambda7Convention conv) {
    Complex sum = 0.0;
    for (const double k : k_grid(grid)) {
        const auto fa = f_table(p, k, alpha, conv);
        const auto fb = f_table(p, k, beta, conv);
        const Complex phase = std::exp(I * (k * j_nm));
        for (int r = 0; r < 8; ++r) sum += fa[r].F * std::conj(fb[r].F) * phase / (z - fa[r].lambda_r);
    }
    return g * g * sum / (2.0 * grid);
}

}  // namespace detail

// Equal-frequency coupling (Born-Markov case II). G and Gamma come from the
// Hermitian / anti-Hermitian split of the pair self-energies at Delta + i0+.
inline CouplingResult dipole_coupling(const LatticeParams& p, double Delta, double g, Sublattice alpha,
                                      Sublattice beta, int j_nm, int grid = 2001, double eta0 = 1e-3,
                                      Lambda7Convention conv = Lambda7Convention::Verbatim) {
    const Complex s_nm = eta_extrapolate(
        [&](double eta) { return detail::pair_self_energy(p, Complex(Delta, eta), g, alpha, beta, j_nm, grid, conv); },
        eta0);
    const Complex s_mn = eta_extrapolate(
        [&](double eta) { return detail::pair_self_energy(p, Complex(Delta, eta), g, beta, alpha, -j_nm, grid, conv); },
        eta0);
    CouplingResult res;
    res.G = 0.5 * (s_nm + std::conj(s_mn));
    res.Gamma_collective = I * (s_nm - std::conj(s_mn));
    res.distance = j_nm;
    res.alpha = alpha;
    res.beta = beta;
    return res;
}

// Drive-bridged coupling for |Delta_1 - Delta_2| = Omega (Born-Markov case III):
// G^Omega = g^2/(2N) sum_{k, r=1..6} F^alpha_{1,r} F^beta_{2,r+2}* e^{i k j_12} / (Delta_2 - lambda_{r+2}).
inline Complex dipole_coupling_detuned(const LatticeParams& p, double Delta1, double Delta2, double g,
                                       Sublattice alpha, Sublattice beta, int j_12, int grid = 2001,
                                       Lambda7Convention conv = Lambda7Convention::Verbatim) {
    if (std::abs(std::abs(Delta1 - Delta2) - p.Omega) > 1e-9)
        throw std::invalid_argument("dipole_coupling_detuned: requires |Delta1 - Delta2| = Omega");
    Complex sum = 0.0;
    for (const double k : k_grid(grid)) {
        const auto fa = f_table(p, k, alpha, conv);
        const auto fb = f_table(p, k, beta, conv);
        const Complex phase = std::exp(I * (k * j_12));
        for (int r = 0; r < 6; ++r)
            sum += fa[r].F * std::conj(fb[r + 2].F) * phase / (Delta2 - fb[r + 2].lambda_r);
    }
    return g * g * sum / (2.0 * grid);
}

// Populations of the reduced two-level model. For the equal-frequency case the
// phase factor is absent (Delta1 = Delta2, off-diagonal G). For the detuned case
// the explicit phase e^{i(Delta1-Delta2-Omega)t} is absorbed by a gauge rotation,
// leaving the constant Hamiltonian [[dw1 + (Delta1-Delta2-Omega), G], [G*, dw2]].
struct TwoEmitterModel {
    Complex G;
    double lamb1 = 0.0, lamb2 = 0.0;   // delta-omega_n Lamb shifts
    double phase_detuning = 0.0;       // Delta1 - Delta2 - Omega (0 for equal frequencies)
};

inline std::pair<std::vector<double>, std::vector<double>> effective_two_emitter_dynamics(
    const TwoEmitterModel& model, double t_end, int samples, std::vector<double>* times = nullptr) {
    const double d1 = model.lamb1 + model.phase_detuning;
    const double d2 = model.lamb2;
    const double mean = 0.5 * (d1 + d2);
    const double half_split = 0.5 * (d1 - d2);
    const double rabi = std::hypot(half_split, std::abs(model.G));  // generalized Rabi frequency
    std::vector<double> p1(samples), p2(samples);
    for (int i = 0; i < samples; ++i) {
        const double t = t_end * i / (samples - 1);
        // exp(-i (mean I + half_split sz + Re G sx ...) t) applied to (1, 0)
        const double ct = std::cos(rabi * t);
        const double st = (rabi > 0.0) ? std::sin(rabi * t) / rabi : t;
        const Complex c1 = ct - I * half_split * st;
        const Complex c2 = -I * std::conj(model.G) * st;
        (void)mean;  // global phase
        p1[i] = std::norm(c1);
        p2[i] = std::norm(c2);
        if (times) times->push_back(t);
    }
    return {std::move(p1), std::move(p2)};
}

// Born-Markov reduced descriptions.
//  - single emitter (case I): (Lamb shift, decay) from the effective self-energy;
//  - shared detuning (case II): full G and Gamma matrices over the emitter set.
struct MasterEquationRates {
    std::vector<double> lamb_shift;        // delta-omega_n
    Eigen::MatrixXcd G;                    // coherent couplings
    Eigen::MatrixXcd Gamma;                // collective decays
};

inline MasterEquationRates master_equation_rates(const LatticeParams& p,
                                                 const std::vector<EmitterConfig>& emitters, int grid = 2001,
                                                 double eta0 = 1e-3,
                                                 Lambda7Convention conv = Lambda7Convention::Verbatim) {
    const int ne = static_cast<int>(emitters.size());
    if (ne == 0) throw std::invalid_argument("master_equation_rates: need at least one emitter");
    const double Delta = emitters.front().Delta;
    for (const auto& e : emitters)
        if (ne > 1 && std::abs(e.Delta - Delta) > 1e-12)
            throw std::invalid_argument("master_equation_rates: case II requires a shared detuning");
    MasterEquationRates rates;
    rates.G.resize(ne, ne);
    rates.Gamma.resize(ne, ne);
    rates.lamb_shift.resize(ne);
    for (int n = 0; n < ne; ++n) {
        for (int m = 0; m < ne; ++m) {
            const auto c = dipole_coupling(p, Delta, emitters[n].g, emitters[n].sublattice,
                                           emitters[m].sublattice, emitters[n].cell - emitters[m].cell,
                                           grid, eta0, conv);
            rates.G(n, m) = c.G;
            rates.Gamma(n, m) = c.Gamma_collective;
        }
        rates.lamb_shift[n] = rates.G(n, n).real();
    }
    return rates;
}

}  // namespace fwqed
