#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>

#include "canosys/errors.hpp"
#include "canosys/hamiltonian.hpp"
#include "canosys/matrix.hpp"

namespace canosys {

namespace detail {

// cos(sqrt(s)) and sin(sqrt(s))/sqrt(s), entire in s, with a series branch
// near zero to avoid cancellation.
inline void cos_sinc_sqrt(Complex s, Complex& c, Complex& sc) {
    if (std::abs(s) < 1e-4) {
        Complex term{1.0};
        c = {1.0};
        sc = {1.0};
        // cos: sum (-s)^k/(2k)!, sinc: sum (-s)^k/(2k+1)!
        Complex pow{1.0};
        double fact2k = 1.0;
        for (int k = 1; k <= 6; ++k) {
            pow *= -s;
            fact2k *= (2 * k - 1) * (2 * k);
            c += pow / fact2k;
            sc += pow / (fact2k * (2 * k + 1));
        }
        (void)term;
        return;
    }
    const Complex w = std::sqrt(s);  // branch irrelevant, both are even
    c = std::cos(w);
    sc = std::sin(w) / w;
}

inline double sinhc(double x) { return x == 0.0 ? 1.0 : std::sinh(x) / x; }
inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// (1 - cos x)/x and (cosh x - 1)/x without cancellation.
inline double one_minus_cos_over(double x) {
    if (x == 0.0) return 0.0;
    const double s = std::sin(0.5 * x);
    return 2.0 * s * s / x;
}
inline double cosh_minus_one_over(double x) {
    if (x == 0.0) return 0.0;
    const double s = std::sinh(0.5 * x);
    return 2.0 * s * s / x;
}

// Determinant used by the propagator: values within the PSD tolerance of
// zero are snapped to exactly zero, so cells that are rank one up to
// rounding (every reduction-produced cell) take the exact terminated
// polynomial instead of feeding their determinant noise into the cosine
// terms.  That noise, of size eps * trace^2, is what would otherwise
// dominate the Weyl geometry once the entries grow large.
inline double effective_det(const PSDMatrix2& M) {
    const double d = M.det();
    const double tr = M.trace();
    return (d < kPsdTol * tr * tr) ? 0.0 : d;
}

// sinh(a)/a - sin(b)/b, stable when both arguments are small.
inline double sinhc_minus_sinc(double a, double b) {
    const double m = std::max(std::abs(a), std::abs(b));
    if (m >= 0.5) return sinhc(a) - sinc(b);
    const double a2 = a * a, b2 = b * b;
    double pa = 1.0, pb = 1.0, fact = 1.0, sum = 0.0;
    for (int k = 1; k <= 12; ++k) {
        pa *= a2;
        pb *= -b2;
        fact *= (2 * k) * (2 * k + 1);
        sum += (pa - pb) / fact;
    }
    return sum;
}

}  // namespace detail

/// Solution matrix of Ju' = zHu across one constant cell: exp(z * delta * G)
/// with G = J^{-1} M.  G is trace free and det G = det M >= 0, so the
/// exponential reduces to cos/sin of sqrt(det M) * z * delta; for rank-one M
/// the series terminates at I + z*delta*G.
inline Mat2 cell_propagator(const PSDMatrix2& M, double delta, Complex z) {
    if (!(delta > 0.0)) throw std::invalid_argument("cell_propagator: delta must be > 0");
    const Mat2 G = symplectic_j_inv() * M.as_mat2();
    const double d = detail::effective_det(M);
    const Complex zd = z * delta;
    Complex c, sc;
    if (d == 0.0) {
        c = 1.0;
        sc = 1.0;
    } else {
        detail::cos_sinc_sqrt(zd * zd * d, c, sc);
    }
    return Mat2{c, 0.0, 0.0, c} + (sc * zd) * G;
}

/// Fundamental solution of Ju' = zHu on [0, N]; columns are u (initial
/// (1,0)) and v (initial (0,1)).  det == 1 up to roundoff.
struct TransferMatrix {
    Mat2 T = Mat2::identity();
    double N = 0.0;
    Complex z{0.0};

    Vec2 u() const { return {T.a, T.c}; }
    Vec2 v() const { return {T.b, T.d}; }
    Complex det() const { return T.det(); }
};

namespace detail {

inline Mat2 mat_pow(Mat2 base, std::uint64_t e) {
    Mat2 acc = Mat2::identity();
    while (e) {
        if (e & 1u) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

}  // namespace detail

/// Transfer matrix over [0, N] (depth coordinates; for a left half line this
/// propagates in depth, i.e. away from the origin).
inline TransferMatrix transfer(const HalfLineHamiltonian& H, double N, Complex z) {
    if (N < 0.0) throw std::domain_error("transfer: N must be >= 0");
    TransferMatrix out;
    out.N = N;
    out.z = z;
    if (N == 0.0) return out;

    Mat2 T = Mat2::identity();
    const double span = H.cell_span();
    const double head = std::min(N, span);
    double pos = 0.0;
    for (const auto& c : H.cells()) {
        if (pos >= head) break;
        const double len = std::min(c.length, head - pos);
        T = cell_propagator(c.matrix, len, z) * T;
        pos += len;
    }
    if (N > span) {
        const double tail = N - span;
        if (H.extension() == Extension::RepeatLast) {
            T = cell_propagator(H.cells().back().matrix, tail, z) * T;
        } else {
            Mat2 period = Mat2::identity();
            for (const auto& c : H.cells()) period = cell_propagator(c.matrix, c.length, z) * period;
            const double k = std::floor(tail / span);
            T = detail::mat_pow(period, static_cast<std::uint64_t>(k)) * T;
            double rem = tail - k * span;
            for (const auto& c : H.cells()) {
                if (rem <= 0.0) break;
                const double len = std::min(c.length, rem);
                T = cell_propagator(c.matrix, len, z) * T;
                rem -= len;
            }
        }
    }
    out.T = T;
    return out;
}

namespace detail {

/// Exact integral over one constant cell: Psi such that
/// f0^* Psi g0 = int_0^delta f(t)^* M g(t) dt for any two solutions f, g
/// with values f0, g0 at the cell start.  Integrands are products of
/// cos/sin of theta*t (theta = z sqrt(det M)), so everything is in closed
/// form; rank-one cells degenerate to polynomials.
inline Mat2 cell_energy_matrix(const PSDMatrix2& M, double delta, Complex z) {
    const Mat2 Mc = M.as_mat2();
    const Mat2 G = symplectic_j_inv() * Mc;
    const Mat2 Gt = G.adjoint();  // G is real, so this is the transpose
    const double d = effective_det(M);

    double A, D;
    Complex B;
    if (d == 0.0) {
        A = delta;
        B = z * delta * delta / 2.0;
        D = std::norm(z) * delta * delta * delta / 3.0;
    } else {
        const Complex theta = z * std::sqrt(d);
        const double p = theta.real(), q = theta.imag();
        const double a = 2.0 * q * delta, b = 2.0 * p * delta;
        A = 0.5 * delta * (sinhc(a) + sinc(b));
        D = std::norm(z / theta) * 0.5 * delta * sinhc_minus_sinc(a, b);
        B = (z / theta) * (0.5 * delta) *
            Complex{one_minus_cos_over(b), cosh_minus_one_over(a)};
    }
    return A * Mc + B * (Mc * G) + std::conj(B) * (Gt * Mc) + D * (Gt * Mc * G);
}

/// Walk [0, N] accumulating fn(T_at_piece_start, psi_of_piece).
template <class Fn>
inline void walk_energy(const HalfLineHamiltonian& H, double N, Complex z, Fn&& fn) {
    Mat2 T = Mat2::identity();
    H.for_each_piece(0.0, N, [&](double lo, double hi, const PSDMatrix2& M) {
        const double len = hi - lo;
        fn(T, cell_energy_matrix(M, len, z));
        T = cell_propagator(M, len, z) * T;
    });
}

}  // namespace detail

/// int_0^N f^* H g dx for the solutions with initial values f0, g0.
inline Complex energy_bilinear(const HalfLineHamiltonian& H, double N, Complex z,
                               const Vec2& f0, const Vec2& g0) {
    Complex acc{0.0};
    detail::walk_energy(H, N, z, [&](const Mat2& T, const Mat2& psi) {
        acc += quad_form(T * f0, psi, T * g0);
    });
    return acc;
}

struct EnergyIntegrals {
    Complex vHv{0.0};    // int_0^N v^* H v dx
    double im_uHv = 0.0; // int_0^N Im(u^* H v) dx
    double N = 0.0;
};

inline EnergyIntegrals energy_integrals(const HalfLineHamiltonian& H, double N, Complex z) {
    if (!(N > 0.0)) throw std::domain_error("energy_integrals: N must be > 0");
    const Vec2 e1{1.0, 0.0}, e2{0.0, 1.0};
    Complex vv{0.0}, uv{0.0};
    detail::walk_energy(H, N, z, [&](const Mat2& T, const Mat2& psi) {
        const Vec2 u = T * e1, v = T * e2;
        vv += quad_form(v, psi, v);
        uv += quad_form(u, psi, v);
    });
    return {vv, uv.imag(), N};
}

/// Residual of W_N(conj f, f) = 2i Im m - 2i Im z * int_0^N f^* H f with
/// f = u + m v, scaled by the largest intermediate magnitude.  Pure
/// numerical error; identically zero in exact arithmetic.
inline double greens_identity_residual(const HalfLineHamiltonian& H, double N,
                                       Complex z, Complex m) {
    if (!(N > 0.0)) throw std::domain_error("greens_identity_residual: N must be > 0");
    if (z.imag() == 0.0) throw std::domain_error("greens_identity_residual: Im z must be nonzero");
    const Vec2 f0{1.0, m};
    const TransferMatrix tr = transfer(H, N, z);
    const Vec2 fN = tr.T * f0;
    const Complex wff = wronskian(conj(fN), fN);
    const Complex fHf = energy_bilinear(H, N, z, f0, f0);
    const Complex lhs = wff;
    const Complex rhs = Complex{0.0, 2.0} * m.imag() - Complex{0.0, 2.0} * z.imag() * fHf;
    const double scale = std::max({1.0, std::abs(wff), 2.0 * std::abs(m.imag()),
                                   2.0 * std::abs(z.imag()) * std::abs(fHf)});
    return std::abs(lhs - rhs) / scale;
}

}  // namespace canosys
