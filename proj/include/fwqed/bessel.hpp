// bessel.hpp — Bessel functions J0, J1 by ascending series (arguments stay small here)

#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace fwqed {

// J_nu(x) for nu = 0, 1 via the ascending power series. Relative error < 1e-12
// on |x| <= 10, which covers every drive amplitude used in this project
// (z_k = 2|d_k|/Omega stays well below that).
inline double bessel_j(int nu, double x) {
    if (nu != 0 && nu != 1) throw std::invalid_argument("bessel_j: only orders 0 and 1 supported");
    const double sign = (nu == 1 && x < 0.0) ? -1.0 : 1.0;
    x = std::abs(x);
    if (x > 30.0) throw std::domain_error("bessel_j: argument out of supported range");
    const double q = 0.25 * x * x;
    double term = (nu == 0) ? 1.0 : 0.5 * x;
    double sum = term;
    for (int m = 1; m < 80; ++m) {
        term *= -q / (static_cast<double>(m) * (m + nu));
        sum += term;
        if (std::abs(term) < 1e-17 * (std::abs(sum) + 1e-300)) break;
    }
    return sign * sum;
}

inline double bessel_j0(double x) { return bessel_j(0, x); }
inline double bessel_j1(double x) { return bessel_j(1, x); }

}  // namespace fwqed
