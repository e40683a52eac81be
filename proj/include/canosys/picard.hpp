#pragma once

#include <cstddef>
#include <vector>

#include "canosys/errors.hpp"
#include "canosys/hamiltonian.hpp"
#include "canosys/matrix.hpp"

namespace canosys {

namespace detail {

using Poly = std::vector<Complex>;  // coefficients, c[j] * t^j, local variable

inline Poly antiderivative(const Poly& p) {
    Poly out(p.size() + 1, Complex{0.0});
    for (std::size_t j = 0; j < p.size(); ++j) out[j + 1] = p[j] / double(j + 1);
    return out;
}

inline Complex poly_eval(const Poly& p, double t) {
    Complex acc{0.0};
    for (std::size_t j = p.size(); j-- > 0;) acc = acc * t + p[j];
    return acc;
}

inline Poly poly_axpy(double a, const Poly& x, double b, const Poly& y) {
    Poly out(std::max(x.size(), y.size()), Complex{0.0});
    for (std::size_t j = 0; j < x.size(); ++j) out[j] += a * x[j];
    for (std::size_t j = 0; j < y.size(); ++j) out[j] += b * y[j];
    return out;
}

struct CellPoly {
    Poly p1, p2;
    double len = 0.0;
};

}  // namespace detail

/// Fixed point of the Picard map Tu(x) = u(0) - zJ int_0^x H(t) u(t) dt,
/// evaluated at x.  Iterates are exact piecewise polynomials per cell, so
/// this is an integration-error-free oracle for the closed-form propagator.
/// Only valid in the contraction regime (|z| * variation of H small); the
/// caller subdivides otherwise.
inline Vec2 picard_solve(const HalfLineHamiltonian& H, double x, Complex z,
                         const Vec2& u0, int max_iter = 64, double tol = 1e-12,
                         int degree_cap = 24) {
    if (x < 0.0) throw std::domain_error("picard_solve: x must be >= 0");
    if (x == 0.0) return u0;

    const std::vector<HamiltonianCell> cells = H.cells_on(0.0, x);
    std::vector<detail::CellPoly> w(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k)
        w[k] = {{u0.x}, {u0.y}, cells[k].length};

    double prev_diff = 0.0;
    int growth_streak = 0;
    for (int it = 0; it < max_iter; ++it) {
        std::vector<detail::CellPoly> next(cells.size());
        Complex prefix1{0.0}, prefix2{0.0};
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const PSDMatrix2& M = cells[k].matrix;
            const detail::Poly hw1 = detail::poly_axpy(M.a11, w[k].p1, M.a12, w[k].p2);
            const detail::Poly hw2 = detail::poly_axpy(M.a12, w[k].p1, M.a22, w[k].p2);
            detail::Poly I1 = detail::antiderivative(hw1);
            detail::Poly I2 = detail::antiderivative(hw2);
            // Tu = u0 - zJ * integral: components (u0_1 + z*I2, u0_2 - z*I1)
            detail::Poly n1(I2.size()), n2(I1.size());
            for (std::size_t j = 0; j < I2.size(); ++j) n1[j] = z * (I2[j]);
            for (std::size_t j = 0; j < I1.size(); ++j) n2[j] = -z * (I1[j]);
            n1[0] += u0.x + z * prefix2;
            n2[0] += u0.y - z * prefix1;
            prefix1 += detail::poly_eval(I1, cells[k].length);
            prefix2 += detail::poly_eval(I2, cells[k].length);
            next[k] = {std::move(n1), std::move(n2), cells[k].length};
        }

        // sup-norm of the update, sampled per cell
        double diff = 0.0;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            for (int s = 0; s <= 8; ++s) {
                const double t = cells[k].length * s / 8.0;
                diff = std::max(diff,
                                std::abs(detail::poly_eval(next[k].p1, t) -
                                         detail::poly_eval(w[k].p1, t)) +
                                    std::abs(detail::poly_eval(next[k].p2, t) -
                                             detail::poly_eval(w[k].p2, t)));
            }
        }
        w = std::move(next);
        if (diff <= tol) {
            const auto& last = w.back();
            return {detail::poly_eval(last.p1, last.len), detail::poly_eval(last.p2, last.len)};
        }
        if (it > 0 && diff > prev_diff) {
            if (++growth_streak >= 3)
                throw non_contraction_error(
                    "picard_solve: iteration diverging; subdivide [0, x] and chain solves");
        } else {
            growth_streak = 0;
        }
        prev_diff = diff;
        if (static_cast<int>(w.front().p1.size()) > degree_cap)
            throw non_contraction_error(
                "picard_solve: degree cap reached before convergence; subdivide [0, x]");
    }
    throw convergence_error("picard_solve: max_iter exceeded");
}

}  // namespace canosys
