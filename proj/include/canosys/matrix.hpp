#pragma once

#include <cmath>
#include <complex>

namespace canosys {

using Complex = std::complex<double>;

/// 2-component complex vector.
struct Vec2 {
    Complex x{0.0}, y{0.0};

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(Complex s) const { return {x * s, y * s}; }
    double norm_inf() const { return std::max(std::abs(x), std::abs(y)); }
};

inline Vec2 operator*(Complex s, const Vec2& v) { return v * s; }

/// Complex 2x2 matrix, row major.
struct Mat2 {
    Complex a{0.0}, b{0.0}, c{0.0}, d{0.0};  // [[a, b], [c, d]]

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }

    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 operator*(Complex s) const { return {a * s, b * s, c * s, d * s}; }

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }

    Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }

    Complex det() const { return a * d - b * c; }
    Complex trace() const { return a + d; }

    /// Conjugate transpose.
    Mat2 adjoint() const {
        return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
    }

    double norm_inf() const {
        return std::max(std::max(std::abs(a), std::abs(b)),
                        std::max(std::abs(c), std::abs(d)));
    }
};

inline Mat2 operator*(Complex s, const Mat2& m) { return m * s; }

/// f^* M g for the sesquilinear pairing (conjugate on the left slot).
inline Complex quad_form(const Vec2& f, const Mat2& M, const Vec2& g) {
    const Vec2 Mg = M * g;
    return std::conj(f.x) * Mg.x + std::conj(f.y) * Mg.y;
}

/// Symplectic pairing W(f, g) = f1 g2 - f2 g1 of two vectors at a point.
inline Complex wronskian(const Vec2& f, const Vec2& g) {
    return f.x * g.y - f.y * g.x;
}

inline Vec2 conj(const Vec2& v) { return {std::conj(v.x), std::conj(v.y)}; }

// J = [[0, -1], [1, 0]]; its inverse is -J.
inline Mat2 symplectic_j() { return {0.0, -1.0, 1.0, 0.0}; }
inline Mat2 symplectic_j_inv() { return {0.0, 1.0, -1.0, 0.0}; }

}  // namespace canosys
