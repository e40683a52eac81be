#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "canosys/errors.hpp"
#include "canosys/hamiltonian.hpp"
#include "canosys/solver.hpp"

namespace canosys {

/// Weyl disk D_N(z): all interval m-function values over boundary
/// conditions at N.  center = W_N(u, conj v)/W_N(conj v, v),
/// radius = 1/|W_N(conj v, v)|.
struct WeylDisk {
    Complex center{0.0};
    double radius = 0.0;
    double N = 0.0;
    Complex z{0.0};

    bool contains(Complex m, double slack = 0.0) const {
        return std::abs(m - center) <= radius + slack;
    }
};

inline WeylDisk disk_at(const HalfLineHamiltonian& H, double N, Complex z) {
    if (!(N > 0.0)) throw std::domain_error("disk_at: N must be > 0");
    if (!(z.imag() > 0.0)) throw std::domain_error("disk_at: Im z must be > 0");
    const TransferMatrix t = transfer(H, N, z);
    const Vec2 u = t.u(), v = t.v();
    const Complex w_vbar_v = wronskian(conj(v), v);
    const Complex w_u_vbar = wronskian(u, conj(v));
    return {w_u_vbar / w_vbar_v, 1.0 / std::abs(w_vbar_v), N, z};
}

/// m_N^beta(z): the unique coefficient with
/// f1(N) sin(beta) + f2(N) cos(beta) = 0 for f = u + m v.
/// The value lies on the circle of disk_at(H, N, z).
inline Complex m_on_interval(const HalfLineHamiltonian& H, double N, Complex z,
                             double beta) {
    if (!(N > 0.0)) throw std::domain_error("m_on_interval: N must be > 0");
    const TransferMatrix t = transfer(H, N, z);
    const double sb = std::sin(beta), cb = std::cos(beta);
    const Vec2 u = t.u(), v = t.v();
    const Complex den = v.x * sb + v.y * cb;
    // near-poles occur only for z near the real line; refuse rather than
    // return an overflowing value
    if (std::abs(den) <= 1e-14 * (std::abs(v.x) + std::abs(v.y)))
        throw pole_error("m_on_interval: boundary condition hits a pole");
    return -(u.x * sb + u.y * cb) / den;
}

/// Half-line m-function with a certified enclosure: the true m_inf lies in
/// every Weyl disk, so the final disk center with its radius is a rigorous
/// bound.  For side == Left this is the m_- coefficient (f_- = u - m_- v
/// square integrable on the left), computed through the mirrored system.
struct MValue {
    Complex value{0.0};
    double error_radius = 0.0;
    Complex z{0.0};
    double N_used = 0.0;
    bool converged = false;
};

namespace detail {

inline double disk_radius_of(const Mat2& T) {
    const Complex w = std::conj(T.b) * T.d - std::conj(T.d) * T.b;
    const double a = std::abs(w);
    // an overflowed Wronskian must read as "not yet converged", not as a
    // zero radius
    if (!(a > 0.0) || !std::isfinite(a)) return std::numeric_limits<double>::infinity();
    return 1.0 / a;
}

inline Complex disk_center_of(const Mat2& T) {
    const Complex w_vbar_v = std::conj(T.b) * T.d - std::conj(T.d) * T.b;
    const Complex w_u_vbar = T.a * std::conj(T.d) - T.c * std::conj(T.b);
    return w_u_vbar / w_vbar_v;
}

}  // namespace detail

inline MValue m_halfline(const HalfLineHamiltonian& H, Complex z, double tol,
                         double N_max = 1e7) {
    if (!(z.imag() > 0.0)) throw std::domain_error("m_halfline: Im z must be > 0");
    const HalfLineHamiltonian Hr = (H.side() == Side::Left) ? H.mirrored() : H;

    // One incremental walk, checking the radius after every cell: the first
    // truncation with radius <= tol is reported, and by nesting everything
    // past it only shrinks the enclosure.
    Mat2 T = Mat2::identity();
    double pos = 0.0;
    const double span = Hr.cell_span();
    bool converged = false;
    bool dead = false;  // entries ran away; stop touching T
    Hr.for_each_piece(0.0, std::min(span, N_max), [&](double lo, double hi, const PSDMatrix2& M) {
        if (converged || dead) return;
        const Mat2 next = cell_propagator(M, hi - lo, z) * T;
        if (!std::isfinite(next.norm_inf())) {
            dead = true;
            return;
        }
        T = next;
        pos = hi;
        converged = detail::disk_radius_of(T) <= tol;
    });
    if (dead) return {detail::disk_center_of(T), detail::disk_radius_of(T), z, pos, false};
    if (converged || pos >= N_max)
        return {detail::disk_center_of(T), detail::disk_radius_of(T), z, pos, converged};

    // Extension tail: geometric probes advanced from the saved state, with
    // the advance length capped so a single chunk cannot overflow doubles
    // (entries grow like exp(|z| tr delta / 2)).  Periodic probes are
    // snapped to whole periods so a block power covers the advance;
    // repeat-last advances are single closed-form cells.
    const bool periodic = Hr.extension() == Extension::Periodic;
    Mat2 period = Mat2::identity();
    double tr_span = 0.0;
    for (const auto& c : Hr.cells()) {
        if (periodic) period = cell_propagator(c.matrix, c.length, z) * period;
        tr_span += c.matrix.trace() * c.length;
    }
    const PSDMatrix2 last = Hr.cells().back().matrix;
    const double rate = std::abs(z) * std::max(1.0, periodic ? tr_span / span : last.trace());
    const double cap = std::max(periodic ? span : 0.0, 60.0 / rate);

    auto advance = [&](const Mat2& from, double delta) -> Mat2 {
        if (!periodic) return cell_propagator(last, delta, z) * from;
        const double k = std::round(delta / span);
        return detail::mat_pow(period, static_cast<std::uint64_t>(k)) * from;
    };
    auto snap = [&](double delta) {
        return periodic ? std::max(span, std::round(delta / span) * span) : delta;
    };

    double lo = pos;
    Mat2 T_lo = T;
    while (lo < N_max) {
        const double step = snap(std::min(std::max(lo, 1.0), cap));
        const Mat2 T_hi = advance(T_lo, step);
        const double hi = lo + step;
        const double r_hi = detail::disk_radius_of(T_hi);
        if (!std::isfinite(T_hi.norm_inf())) break;  // report the last finite state
        if (r_hi <= tol) {
            // bisect (lo, hi] down to ~1% or the period granularity
            double blo = lo, bhi = hi;
            Mat2 B_lo = T_lo, B_hi = T_hi;
            for (int it = 0; it < 48 && (bhi - blo) > 0.01 * bhi; ++it) {
                const double dmid = snap(0.5 * (bhi - blo));
                if (dmid <= 0.0 || dmid >= bhi - blo) break;
                const Mat2 B_mid = advance(B_lo, dmid);
                if (detail::disk_radius_of(B_mid) <= tol) {
                    bhi = blo + dmid;
                    B_hi = B_mid;
                } else {
                    blo += dmid;
                    B_lo = B_mid;
                }
            }
            return {detail::disk_center_of(B_hi), detail::disk_radius_of(B_hi), z, bhi, true};
        }
        lo = hi;
        T_lo = T_hi;
    }
    return {detail::disk_center_of(T_lo), detail::disk_radius_of(T_lo), z, lo, false};
}

/// Rotation action of a boundary-condition change by gamma = beta - alpha
/// on m_+ values.
inline Complex mobius_change_alpha(Complex m, double gamma) {
    const double s = std::sin(gamma), c = std::cos(gamma);
    const Complex den = c + m * s;
    if (std::abs(den) <= 1e-14 * (1.0 + std::abs(m)))
        throw pole_error("mobius_change_alpha: pole");
    return (-s + m * c) / den;
}

/// Companion action for m_- values: -m_-^beta = (-sin g - m cos g)/(cos g - m sin g).
inline Complex mobius_change_alpha_minus(Complex m, double gamma) {
    const double s = std::sin(gamma), c = std::cos(gamma);
    const Complex den = c - m * s;
    if (std::abs(den) <= 1e-14 * (1.0 + std::abs(m)))
        throw pole_error("mobius_change_alpha_minus: pole");
    return (s + m * c) / den;
}

enum class MSign { Plus, Minus };

/// Base-point change: m_+/-(a, z) from m_+/-(0, z) and the transfer to a.
inline Complex translate_m(Complex m0, const TransferMatrix& T, MSign sign) {
    const Vec2 u = T.u(), v = T.v();
    const double scale = 1e-14 * (std::abs(u.x) + std::abs(m0) * std::abs(v.x));
    if (sign == MSign::Plus) {
        const Complex den = u.x + m0 * v.x;
        if (std::abs(den) <= scale) throw pole_error("translate_m: pole");
        return (u.y + m0 * v.y) / den;
    }
    const Complex den = u.x - m0 * v.x;
    if (std::abs(den) <= scale) throw pole_error("translate_m: pole");
    return -(u.y - m0 * v.y) / den;
}

enum class LimitType { LimitPoint, LimitCircle, Undetermined };

struct ClassifyResult {
    LimitType type = LimitType::Undetermined;
    std::vector<std::pair<double, double>> radius_trace;  // (N, r_N)
};

/// Heuristic limit-point/limit-circle classification from the radius decay
/// along N_seq.  For trace-normalized Hamiltonians limit point is a theorem;
/// elsewhere the verdict is a labeled estimate.
inline ClassifyResult classify_limit_type(const HalfLineHamiltonian& H, Complex z,
                                          const std::vector<double>& N_seq,
                                          double tol_lp = 1e-8,
                                          double stabilization_rel = 0.01) {
    if (!(z.imag() > 0.0)) throw std::domain_error("classify_limit_type: Im z must be > 0");
    ClassifyResult out;
    const HalfLineHamiltonian Hr = (H.side() == Side::Left) ? H.mirrored() : H;
    for (double N : N_seq) out.radius_trace.push_back({N, disk_at(Hr, N, z).radius});
    if (out.radius_trace.empty()) return out;
    const double r_last = out.radius_trace.back().second;
    if (r_last < tol_lp) {
        out.type = LimitType::LimitPoint;
    } else if (out.radius_trace.size() >= 2) {
        const double r_prev = out.radius_trace[out.radius_trace.size() - 2].second;
        if (std::abs(r_last - r_prev) < stabilization_rel * r_last)
            out.type = LimitType::LimitCircle;
    }
    return out;
}

}  // namespace canosys
