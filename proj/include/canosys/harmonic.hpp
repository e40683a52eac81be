#pragma once

#include <cmath>
#include <complex>

#include "canosys/intervals.hpp"
#include "canosys/matrix.hpp"

namespace canosys {

/// Harmonic measure of S seen from w in the upper half plane:
/// (1/pi) sum_i [atan((b_i - x)/y) - atan((a_i - x)/y)] for w = x + iy.
/// For real w the Poisson kernel degenerates to the indicator of S
/// (1/2 at interval endpoints).
inline double harmonic_measure(Complex w, const IntervalSet& S) {
    const double x = w.real(), y = w.imag();
    if (y < 0.0) throw std::domain_error("harmonic_measure: Im w must be >= 0");
    if (y == 0.0) {
        if (S.contains(x)) return 1.0;
        if (S.is_endpoint(x)) return 0.5;
        return 0.0;
    }
    double acc = 0.0;
    for (const auto& [a, b] : S.intervals())
        acc += std::atan((b - x) / y) - std::atan((a - x) / y);
    return acc / M_PI;
}

/// gamma(w, z) = |w - z| / sqrt(Im w * Im z); contracts harmonic-measure
/// differences: |omega_w(S) - omega_z(S)| <= gamma(w, z).
inline double hyperbolic_distance(Complex w, Complex z) {
    if (!(w.imag() > 0.0) || !(z.imag() > 0.0))
        throw std::domain_error("hyperbolic_distance: both points need Im > 0");
    return std::abs(w - z) / std::sqrt(w.imag() * z.imag());
}

}  // namespace canosys
