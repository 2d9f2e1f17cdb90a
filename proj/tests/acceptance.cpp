// acceptance.cpp — end-to-end checks of the headline results, one verdict line each

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fwqed/floquet.hpp"
#include "fwqed/interactions.hpp"
#include "fwqed/runner.hpp"
#include "fwqed/spectral.hpp"

using namespace fwqed;

static int failures = 0;

static void report(int n, bool ok, const std::string& text) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", n, text.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

static double circ_dist(double a, double b, double period) {
    double d = std::abs(a - b);
    d -= period * std::floor(d / period + 0.5);
    return std::abs(d);
}

// 1. RWA quasi-energies track the exact ones across the zone.
static void criterion1() {
    LatticeParams p;
    p.Jp = 2.0;
    p.V = 0.2;
    p.Omega = 5.0;
    double worst = 0.0;
    for (const double k : k_grid(201)) {
        const auto [hi, lo] = quasienergies_bloch(p, k, 512);
        const auto [rp, rm] = rwa_quasienergies(p, k, -1);
        const double f1 = fold_quasienergy(rp, p.Omega);
        const double f2 = fold_quasienergy(rm, p.Omega);
        const double pairing = std::max(std::min(circ_dist(hi, f1, p.Omega), circ_dist(hi, f2, p.Omega)),
                                        std::min(circ_dist(lo, f1, p.Omega), circ_dist(lo, f2, p.Omega)));
        worst = std::max(worst, pairing);
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "rotating-frame vs exact quasi-energies, max deviation %.2e (tol 0.02)", worst);
    report(1, worst <= 0.02, buf);
}

// 2. Edge-state phase diagram consistent with both winding numbers.
static void criterion2() {
    LatticeParams p;
    p.V = 0.2;
    p.Omega = 5.0;
    p.N = 20;
    p.boundary = Boundary::OBC;
    const int points = 81;
    const double step = 4.0 / (points - 1);
    std::vector<int> pair0(points), pairpi(points), nu0(points, -99), nupi(points, -99);
    for (int i = 0; i < points; ++i) {
        p.Jp = i * step;
        if (p.Jp == 0.0) p.Jp = 1e-9;  // J' = 0 is a flat trivial chain; keep it valid
        const auto modes = quasienergy_spectrum_obc(p, 512, {0.0});
        // a bulk gap the grid cannot resolve makes edge detection undefined
        // (e.g. J' = 4 where the folded band touches the 0-gap center at k = 0)
        pair0[i] = bulk_half_gap(p, false) < 0.02
                       ? -1
                       : static_cast<int>(select_edge_modes(modes, p, false).size());
        pairpi[i] = bulk_half_gap(p, true) < 0.02
                        ? -1
                        : static_cast<int>(select_edge_modes(modes, p, true).size());
        try {
            nu0[i] = winding_0(p, 2001);
        } catch (const GapClosedError&) {
        }
        try {
            nupi[i] = winding_pi(p, 2001);
        } catch (const GapClosedError&) {
        }
    }
    auto near_boundary = [&](double jp, std::initializer_list<double> bounds) {
        for (double b : bounds)
            if (std::abs(jp - b) <= step + 1e-12) return true;
        return false;
    };
    bool ok = true;
    std::string detail;
    for (int i = 0; i < points; ++i) {
        const double jp = i * step;
        const bool expect0 = jp > 1.0;
        const bool expectpi = jp > 1.5 && jp < 3.5;
        if (pair0[i] >= 0 && (pair0[i] == 2) != expect0 && !near_boundary(jp, {1.0})) {
            ok = false;
            detail = "0-gap edge pair wrong at J'=" + std::to_string(jp);
            break;
        }
        if (pairpi[i] >= 0 && (pairpi[i] == 2) != expectpi && !near_boundary(jp, {1.5, 3.5})) {
            ok = false;
            detail = "pi-gap edge pair wrong at J'=" + std::to_string(jp);
            break;
        }
        // winding numbers, where defined, must agree with the edge content
        if (nu0[i] != -99 && nu0[i] != (expect0 ? 1 : 0) && !near_boundary(jp, {1.0})) {
            ok = false;
            detail = "winding_0 disagrees at J'=" + std::to_string(jp);
            break;
        }
        if (nupi[i] != -99 && nupi[i] != (expectpi ? 1 : 0) && !near_boundary(jp, {1.5, 3.5})) {
            ok = false;
            detail = "winding_pi disagrees at J'=" + std::to_string(jp);
            break;
        }
    }
    report(2, ok, ok ? "edge pairs and winding numbers agree across the J'/J sweep (81 points)"
                     : detail);
}

// 3. Effective self-energy: static reduction and decay windows.
static void criterion3() {
    LatticeParams p;
    p.Jp = 0.6;
    p.Omega = 2.5;
    p.V = 0.0;
    const double g = 0.1;

    double worst_rel = 0.0;
    for (int i = 0; i <= 40; ++i) {
        const double d = -5.0 + 0.25 * i;
        const auto st = static_self_energy_limit(p, d, g);
        const auto ef = effective_self_energy_limit(p, d, g);
        const double scale = std::max({std::abs(st.sigma), std::abs(ef.sigma), 1e-12});
        worst_rel = std::max(worst_rel, std::abs(st.sigma - ef.sigma) / scale);
    }
    const bool static_ok = worst_rel < 1e-6;

    p.V = 0.2;
    // sideband band edges from the lambda_r ladder over the zone
    std::vector<std::pair<double, double>> bands;
    {
        std::vector<std::vector<double>> per_row(8);
        for (const double k : k_grid(2001)) {
            const auto rows = f_table(p, k, Sublattice::A);
            for (int r = 0; r < 8; ++r) per_row[r].push_back(rows[r].lambda_r);
        }
        for (const auto& v : per_row) {
            const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
            bands.emplace_back(*lo, *hi);
        }
    }
    auto in_band = [&](double d, double margin) {
        for (const auto& [lo, hi] : bands)
            if (d > lo + margin && d < hi - margin) return true;
        return false;
    };
    auto near_band = [&](double d, double margin) {
        for (const auto& [lo, hi] : bands)
            if (d > lo - margin && d < hi + margin) return true;
        return false;
    };
    bool windows_ok = true;
    std::string detail;
    for (int i = 0; i <= 100; ++i) {
        const double d = -5.0 + 0.1 * i;
        const double gamma = effective_self_energy_limit(p, d, g).decay;
        if (in_band(d, 0.05) && gamma <= 1e-8) {
            windows_ok = false;
            detail = "no decay inside a band at Delta=" + std::to_string(d);
            break;
        }
        if (!near_band(d, 0.05) && std::abs(gamma) >= 1e-8) {
            windows_ok = false;
            detail = "leakage in a gap at Delta=" + std::to_string(d);
            break;
        }
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "self-energy static reduction (max rel dev %.1e) and decay windows %s", worst_rel,
                  windows_ok ? "clean" : detail.c_str());
    report(3, static_ok && windows_ok, buf);
}

// 4. Markovian decay and fractional decay.
static void criterion4() {
    LatticeParams p;
    p.Jp = 1.0;
    p.V = 0.2;
    p.Omega = 2.5;
    p.N = 200;
    EmitterConfig e{0.0, 100, Sublattice::A, 0.2};
    const double gamma = effective_self_energy_limit(p, e.Delta, e.g).decay;
    const double t_end = 3.0 / gamma;
    const auto traj = evolve(p, {e}, excited_emitter_state(1 + 2 * p.N), t_end, 61, 256);
    double worst = 0.0;
    for (const auto& s : traj.samples)
        worst = std::max(worst, std::abs(s.emitter_pop[0] - std::exp(-gamma * s.t)));
    const bool markov_ok = worst <= 0.05;

    p.Jp = 0.6;
    e.Delta = 0.5 * p.Omega;
    p.V = 0.4;
    const auto driven = evolve(p, {e}, excited_emitter_state(1 + 2 * p.N), 300.0, 61, 256);
    double plateau = 0.0;
    int tail = 0;
    for (const auto& s : driven.samples)
        if (s.t > 240.0) {
            plateau += s.emitter_pop[0];
            ++tail;
        }
    plateau /= tail;
    p.V = 0.0;
    const auto undriven = evolve(p, {e}, excited_emitter_state(1 + 2 * p.N), 300.0, 61, 256);
    const double leftover = undriven.samples.back().emitter_pop[0];
    char buf[220];
    std::snprintf(buf, sizeof(buf),
                  "Markov tracking dev %.3f (tol 0.05); fractional plateau %.3f (> 0.1) vs static "
                  "leftover %.2e (< 0.01)",
                  worst, plateau, leftover);
    report(4, markov_ok && plateau > 0.1 && leftover < 0.01, buf);
}

// 5. Gap-mediated exchange between two emitters.
static void criterion5() {
    LatticeParams p;
    p.Jp = 0.6;
    p.V = 0.1;
    p.Omega = 2.5;
    p.N = 40;
    EmitterConfig e1{0.0, 20, Sublattice::A, 0.03};
    EmitterConfig e2{0.0, 21, Sublattice::B, 0.03};
    const auto c = dipole_coupling(p, 0.0, e1.g, Sublattice::A, Sublattice::B, -1);
    const double g_abs = std::abs(c.G);
    const double t_end = 1.3 * pi / g_abs;
    std::vector<double> times;
    const auto [p1, p2] = exchange_trajectory(p, e1, e2, t_end, 2001, &times, true, 512);
    double max2 = 0.0;
    std::size_t imax = 0;
    for (std::size_t i = 0; i < p2.size(); ++i)
        if (p2[i] > max2) {
            max2 = p2[i];
            imax = i;
        }
    const double freq_exact = pi / times[imax];  // first transfer peak at t = pi / (2|G|)
    const double freq_dev = std::abs(freq_exact - 2.0 * g_abs) / (2.0 * g_abs);

    // same exchange in the pi-gap: both emitters at Delta = Omega/2
    EmitterConfig d1 = e1, d2 = e2;
    d1.Delta = d2.Delta = 0.5 * p.Omega;
    const auto cpi = dipole_coupling(p, d1.Delta, d1.g, Sublattice::A, Sublattice::B, -1);
    const double tpi = 1.3 * pi / std::abs(cpi.G);
    const auto [r1, r2] = exchange_trajectory(p, d1, d2, tpi, 1201, nullptr, true, 512);
    const double max2_pi = *std::max_element(r2.begin(), r2.end());

    // static control at the same detuning: Delta sits inside a band, so the
    // excitation leaks away instead of returning. The bath must be long enough
    // that no wavefront wraps around within the driven transfer time.
    LatticeParams ps = p;
    ps.V = 0.0;
    ps.N = 1700;
    EmitterConfig s1 = d1, s2 = d2;
    s1.cell = ps.N / 2;
    s2.cell = ps.N / 2 + 1;
    const double t_ctrl = 1.05 * pi / (2.0 * std::abs(cpi.G));
    const auto [q1, q2] = exchange_trajectory(ps, s1, s2, t_ctrl, 301, nullptr, false, 128);
    const double max2_diss = *std::max_element(q2.begin(), q2.end());

    char buf[260];
    std::snprintf(buf, sizeof(buf),
                  "0-gap transfer peak %.3f (> 0.95), frequency dev %.1f%% (tol 5%%); pi-gap "
                  "transfer peak %.3f (> 0.95); static control peak %.3f (< 0.3)",
                  max2, 100.0 * freq_dev, max2_pi, max2_diss);
    report(5, max2 > 0.95 && freq_dev < 0.05 && max2_pi > 0.95 && max2_diss < 0.3, buf);
}

// 6. Drive-bridged exchange between detuned emitters.
static void criterion6() {
    LatticeParams p;
    p.Jp = 0.6;
    p.V = 0.1;
    p.Omega = 2.5;
    p.N = 80;
    const double g = 0.03;
    const int steps = 256;

    auto overlay_gap = [&](const TwoEmitterModel& m, const std::vector<double>& times,
                           const std::vector<double>& p1, const std::vector<double>& p2,
                           double horizon) {
        const double d1 = m.lamb1 + m.phase_detuning;
        const double half = 0.5 * (d1 - m.lamb2);
        const double rabi = std::hypot(half, std::abs(m.G));
        double worst = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (times[i] > horizon) break;
            const double ct = std::cos(rabi * times[i]);
            const double st = rabi > 0 ? std::sin(rabi * times[i]) / rabi : times[i];
            const double e1 = std::norm(Complex(ct, -half * st));
            const double e2 = std::norm(m.G) * st * st;
            worst = std::max({worst, std::abs(p1[i] - e1), std::abs(p2[i] - e2)});
        }
        return worst;
    };

    // (b) pi-gap: Delta_1 = -Delta_2 = Omega/2
    EmitterConfig b1{0.5 * p.Omega, 40, Sublattice::A, g};
    EmitterConfig b2{-0.5 * p.Omega, 41, Sublattice::B, g};
    TwoEmitterModel mb;
    mb.G = dipole_coupling_detuned(p, b1.Delta, b2.Delta, g, b1.sublattice, b2.sublattice, -1);
    mb.lamb1 = effective_self_energy_limit(p, b1.Delta, g).lamb_shift;
    mb.lamb2 = effective_self_energy_limit(p, b2.Delta, g).lamb_shift;
    mb.phase_detuning = 0.0;
    const double tb = 3.0 * pi / std::abs(mb.G);
    std::vector<double> times_b;
    const auto [pb1, pb2] = exchange_trajectory(p, b1, b2, tb, 601, &times_b, true, steps);
    const double dev_b = overlay_gap(mb, times_b, pb1, pb2, tb);

    // (a) 0-gap: Delta_1 = Omega - Lamb shift at Omega, Delta_2 = 0
    const double shift = effective_self_energy_limit(p, p.Omega, g).lamb_shift;
    EmitterConfig a1{p.Omega - shift, 40, Sublattice::A, g};
    EmitterConfig a2{0.0, 41, Sublattice::B, g};
    TwoEmitterModel ma;
    ma.G = dipole_coupling_detuned(p, p.Omega, 0.0, g, a1.sublattice, a2.sublattice, -1);
    ma.lamb1 = effective_self_energy_limit(p, a1.Delta, g).lamb_shift;
    ma.lamb2 = 0.0;
    ma.phase_detuning = a1.Delta - a2.Delta - p.Omega;  // = -shift
    const double period_a = pi / std::hypot(0.5 * (ma.lamb1 + ma.phase_detuning), std::abs(ma.G));
    const double ta = 2.5 * period_a;
    std::vector<double> times_a;
    const auto [pa1, pa2] = exchange_trajectory(p, a1, a2, ta, 601, &times_a, true, steps);
    const double max2_a = *std::max_element(pa2.begin(), pa2.end());
    const double dev_a_first = overlay_gap(ma, times_a, pa1, pa2, period_a);
    const double dev_a_late = overlay_gap(ma, times_a, pa1, pa2, ta);

    // least-squares exchange frequency of the exact pi-gap run, to quantify the
    // drift of the leading-order analytic coupling
    double wb = std::abs(mb.G);
    {
        double best = 1e18;
        const double g0 = std::abs(mb.G);
        for (double w = 0.95 * g0; w <= 1.02 * g0; w += 1e-4 * g0) {
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < times_b.size(); ++i) {
                double s = std::sin(w * times_b[i]);
                s *= s;
                num += s * pb2[i];
                den += s * s;
            }
            const double amp = num / den;
            double sse = 0.0;
            for (std::size_t i = 0; i < times_b.size(); ++i) {
                const double s = std::sin(w * times_b[i]);
                const double r = pb2[i] - amp * s * s;
                sse += r * r;
            }
            if (sse < best) {
                best = sse;
                wb = w;
            }
        }
    }

    char buf[320];
    std::snprintf(buf, sizeof(buf),
                  "pi-gap overlay dev %.3f (tol 0.05; exact/analytic frequency ratio %.4f); 0-gap "
                  "peak %.3f (> 0.9), first-period overlay dev %.3f (tol 0.1), late-time drift %.3f "
                  "(reported only)",
                  dev_b, wb / std::abs(mb.G), max2_a, dev_a_first, dev_a_late);
    report(6, dev_b <= 0.05 && max2_a > 0.9 && dev_a_first <= 0.1, buf);
}

// 7. Cross-cutting property suite.
static void criterion7() {
    std::string detail;
    bool ok = true;

    LatticeParams p2;
    p2.Jp = 2.0;
    p2.V = 0.2;
    p2.Omega = 5.0;
    p2.N = 6;
    const auto prop =
        propagate_period([&](double t) { return real_space_hamiltonian(p2, t); }, 0.0, p2.period(), 512);
    if (prop.unitarity_residual() >= 1e-9) {
        ok = false;
        detail += " unitarity";
    }

    LatticeParams pd;
    pd.Jp = 0.6;
    pd.V = 0.2;
    pd.Omega = 2.5;
    pd.N = 20;
    EmitterConfig em{0.0, 10, Sublattice::A, 0.2};
    const auto traj = evolve(pd, {em}, excited_emitter_state(1 + 2 * pd.N), 60.0, 31, 256, true);
    for (const auto& s : traj.samples)
        if (std::abs(s.state.norm() - 1.0) >= 1e-9) {
            ok = false;
            detail += " norm";
            break;
        }

    try {
        (void)winding_0(p2, 2001);
        (void)winding_pi(p2, 2001);
    } catch (const std::exception&) {
        ok = false;
        detail += " winding";
    }

    LatticeParams pc;
    pc.Jp = 0.6;
    pc.V = 0.1;
    pc.Omega = 2.5;
    const auto gnm = dipole_coupling(pc, 0.0, 0.05, Sublattice::A, Sublattice::B, 2, 1001);
    const auto gmn = dipole_coupling(pc, 0.0, 0.05, Sublattice::B, Sublattice::A, -2, 1001);
    if (std::abs(gnm.G - std::conj(gmn.G)) >= 1e-12) {
        ok = false;
        detail += " G-hermiticity";
    }

    {
        LatticeParams ps = pc;
        ps.V = 0.0;
        ps.N = 200;
        const int W = 30;
        const auto bs = static_bound_state(ps, 0.0, 0.1, W);
        EmitterConfig e{0.0, ps.N / 2, Sublattice::A, 0.1};
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(full_hamiltonian(ps, {e}, 0.0));
        int best = 0;
        for (int i = 1; i < solver.eigenvalues().size(); ++i)
            if (std::norm(solver.eigenvectors()(0, i)) > std::norm(solver.eigenvectors()(0, best)))
                best = i;
        const Eigen::VectorXcd& v = solver.eigenvectors().col(best);
        Complex overlap = std::conj(bs.C_e) * v(0);
        double n2 = std::norm(bs.C_e);
        for (int idx = 0; idx <= 2 * W; ++idx) {
            const int cell = e.cell + idx - W;
            overlap += std::conj(bs.C_a[idx]) * v(1 + 2 * (cell - 1));
            overlap += std::conj(bs.C_b[idx]) * v(2 + 2 * (cell - 1));
            n2 += std::norm(bs.C_a[idx]) + std::norm(bs.C_b[idx]);
        }
        if (std::abs(overlap) / std::sqrt(n2) <= 0.999) {
            ok = false;
            detail += " bound-state-overlap";
        }
    }

    {
        Eigen::Matrix2cd tau;
        tau << 0.0, 1.0, 1.0, 0.0;
        for (const double k : k_grid(201)) {
            const auto h = rwa_bloch_matrix(p2, k);
            if ((tau * h + h * tau).norm() >= 1e-12) {
                ok = false;
                detail += " chiral";
                break;
            }
        }
    }

    double corr = 0.0;
    {
        LatticeParams pb = pc;
        pb.N = 60;
        EmitterConfig e{0.5 * pb.Omega, 30, Sublattice::A, 0.03};
        const auto bs = floquet_bound_state(pb, e, 256);
        const auto avg = time_averaged_bound_state(bs);
        std::vector<double> x, y;
        for (int d : {-5, -4, -3, -2, -1, 1, 2, 3, 4, 5}) {
            x.push_back(std::abs(dipole_coupling(pb, e.Delta, e.g, Sublattice::A, Sublattice::A, -d).G));
            x.push_back(std::abs(dipole_coupling(pb, e.Delta, e.g, Sublattice::A, Sublattice::B, -d).G));
            y.push_back(avg.abs_a[e.cell - 1 + d]);
            y.push_back(avg.abs_b[e.cell - 1 + d]);
        }
        const double n = static_cast<double>(x.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            mx += x[i] / n;
            my += y[i] / n;
        }
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
            syy += (y[i] - my) * (y[i] - my);
        }
        corr = sxy / std::sqrt(sxx * syy);
        if (corr <= 0.95) {
            ok = false;
            detail += " profile-correlation";
        }
    }

    char buf[220];
    std::snprintf(buf, sizeof(buf),
                  "property suite%s%s (bound-state/coupling profile correlation %.3f)",
                  ok ? ": all bounds hold" : " failed:", ok ? "" : detail.c_str(), corr);
    report(7, ok, buf);
}

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    return failures == 0 ? 0 : 1;
}
