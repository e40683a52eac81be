#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "canosys/errors.hpp"
#include "canosys/hamiltonian.hpp"
#include "canosys/harmonic.hpp"
#include "canosys/intervals.hpp"
#include "canosys/quadrature.hpp"
#include "canosys/test_family.hpp"
#include "canosys/weyl.hpp"

namespace canosys {

/// Herglotz boundary sample: m(t + iy) at the recorded offset y > 0.
/// No extrapolation to y = 0 is attempted.
struct HerglotzSample {
    double t = 0.0;
    double y = 0.0;
    Complex value{0.0};
};

struct BoundaryUnconverged : convergence_error {
    explicit BoundaryUnconverged(std::vector<HerglotzSample> partial)
        : convergence_error("boundary_m: no y in the schedule converged"),
          partials(std::move(partial)) {}
    std::vector<HerglotzSample> partials;
};

inline std::vector<double> default_y_schedule() {
    std::vector<double> ys;
    for (double y = 1e-1; y >= 0.99e-4; y /= 2.0) ys.push_back(y);
    return ys;
}

/// Boundary value probe m_+/-(t): walks the decreasing y schedule and
/// returns the sample at the smallest y whose half-line enclosure
/// converged to error_radius <= tol_m.
inline HerglotzSample boundary_m(const HalfLineHamiltonian& H, double t,
                                 const std::vector<double>& y_schedule, double tol_m,
                                 double N_max = 1e7) {
    std::vector<HerglotzSample> partial;
    bool have = false;
    HerglotzSample best;
    for (double y : y_schedule) {
        const MValue m = m_halfline(H, {t, y}, tol_m, N_max);
        const HerglotzSample s{t, y, m.value};
        if (m.converged && m.error_radius <= tol_m) {
            best = s;
            have = true;
        } else {
            partial.push_back(s);
        }
    }
    if (!have) throw BoundaryUnconverged(std::move(partial));
    return best;
}

inline HerglotzSample boundary_m(const WholeLineHamiltonian& H, MSign side, double t,
                                 const std::vector<double>& y_schedule, double tol_m,
                                 double N_max = 1e7) {
    return boundary_m(side == MSign::Plus ? H.right : H.left, t, y_schedule, tol_m, N_max);
}

/// int_A omega_{F(t)}(S) dt by composite Gauss-Legendre on each interval
/// of A; F is sampled exactly at the quadrature nodes.
inline double value_distribution_integral(const std::function<Complex(double)>& F,
                                          const IntervalSet& A, const IntervalSet& S,
                                          int nodes_per_interval = 32) {
    const QuadratureRule rule = gauss_legendre(nodes_per_interval);
    double acc = 0.0;
    for (const auto& [a, b] : A.intervals())
        acc += integrate_gl(
            [&](double t) {
                Complex w = F(t);
                if (w.imag() < 0.0) w = {w.real(), 0.0};  // clamp roundoff
                return harmonic_measure(w, S);
            },
            a, b, rule);
    return acc;
}

struct DefectReport {
    double max_defect = 0.0;
    double y = 0.0;
    std::vector<double> flagged_nodes;  // t values where m did not converge
};

/// Reflectionless defect max_{t in grid(A)} |m_+(t+iy) + conj(m_-(t+iy))|,
/// both m's at base point 0.  The internal enclosure tolerance scales with
/// y (the defect itself is O(y) for reflectionless Hamiltonians).
inline DefectReport reflectionless_defect(const WholeLineHamiltonian& H,
                                          const IntervalSet& A, double y, int grid,
                                          double N_max = 1e8) {
    if (!(y > 0.0)) throw std::domain_error("reflectionless_defect: y must be > 0");
    DefectReport rep;
    rep.y = y;
    const double tol_m = y / 4.0;
    for (const auto& [a, b] : A.intervals()) {
        for (int i = 0; i < grid; ++i) {
            const double t = a + (b - a) * (i + 0.5) / grid;
            const Complex z{t, y};
            const MValue mp = m_halfline(H.right, z, tol_m, N_max);
            const MValue mm = m_halfline(H.left, z, tol_m, N_max);
            if (!mp.converged || !mm.converged) {
                rep.flagged_nodes.push_back(t);
                continue;
            }
            rep.max_defect = std::max(rep.max_defect, std::abs(mp.value + std::conj(mm.value)));
        }
    }
    return rep;
}

struct BpResult {
    double discrepancy = 0.0;        // minus-side integral minus plus-side integral
    double integral_minus = 0.0;     // int_A omega_{m_-(N,t+iy)}(-S) dt
    double integral_plus = 0.0;      // int_A omega_{m_+(N,t+iy)}(S) dt
    std::vector<double> flagged_nodes;
};

/// Finite-N Breimesser-Pearson discrepancy
///   int_A omega_{m_-(N,t+iy)}(-S) dt - int_A omega_{m_+(N,t+iy)}(S) dt
/// with m_+(N, .) the translated half-line m and m_-(N, z) = -v2/v1 the
/// interior m-function at N.
inline BpResult bp_discrepancy(const HalfLineHamiltonian& H, const IntervalSet& A,
                               const IntervalSet& S, double N, double y,
                               int nodes_per_interval = 32, double N_max = 1e8) {
    if (!(N > 0.0)) throw std::domain_error("bp_discrepancy: N must be > 0");
    if (!(y > 0.0)) throw std::domain_error("bp_discrepancy: y must be > 0");
    const QuadratureRule rule = gauss_legendre(nodes_per_interval);
    const IntervalSet S_neg = S.reflected();
    const double tol_m = y / 4.0;
    BpResult out;
    for (const auto& [a, b] : A.intervals()) {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        const double node_gap = (rule.nodes.size() > 1)
                                    ? half * (rule.nodes[1] - rule.nodes[0])
                                    : half;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            double t = mid + half * rule.nodes[i];
            const double w = rule.weights[i] * half;
            Complex z{t, y};
            TransferMatrix T = transfer(H, N, z);
            if (std::abs(T.v().x) < 1e-300 * T.T.norm_inf()) {
                // pole of the interior m at this node: shift the node
                t += 0.5 * node_gap;
                z = {t, y};
                T = transfer(H, N, z);
                out.flagged_nodes.push_back(t);
            }
            const Complex m_minus = -T.v().y / T.v().x;
            const MValue m0 = m_halfline(H, z, tol_m, N_max);
            if (!m0.converged) out.flagged_nodes.push_back(t);
            const Complex m_plus = translate_m(m0.value, T, MSign::Plus);
            auto clamp = [](Complex v) { return v.imag() < 0.0 ? Complex{v.real(), 0.0} : v; };
            out.integral_minus += w * harmonic_measure(clamp(m_minus), S_neg);
            out.integral_plus += w * harmonic_measure(clamp(m_plus), S);
        }
    }
    out.discrepancy = out.integral_minus - out.integral_plus;
    return out;
}

struct SeparationBound {
    double gamma = 0.0;
    double bound = 0.0;  // 1/sqrt(I (I + 1))
    double I = 0.0;      // Im z * int_0^N Im(u^* H v) dx
};

/// gamma(-v2/v1, -(u2 + conj(w) v2)/(u1 + conj(w) v1)) <= 1/sqrt(I(I+1)).
inline SeparationBound weyl_separation_bound(const HalfLineHamiltonian& H, double N,
                                             Complex z, Complex w) {
    if (!(z.imag() > 0.0)) throw std::domain_error("weyl_separation_bound: Im z must be > 0");
    if (w.imag() < 0.0) throw std::domain_error("weyl_separation_bound: Im w must be >= 0");
    const TransferMatrix T = transfer(H, N, z);
    const Vec2 u = T.u(), v = T.v();
    const Complex p1 = -v.y / v.x;
    const Complex wb = std::conj(w);
    const Complex p2 = -(u.y + wb * v.y) / (u.x + wb * v.x);
    const EnergyIntegrals e = energy_integrals(H, N, z);
    SeparationBound out;
    out.I = z.imag() * e.im_uHv;
    out.bound = 1.0 / std::sqrt(out.I * (out.I + 1.0));
    out.gamma = hyperbolic_distance(p1, p2);
    return out;
}

struct AcSupportEstimate {
    IntervalSet estimate;
    double y = 0.0;
    double threshold = 0.0;
    std::vector<double> excluded_nodes;  // unconverged
};

/// Heuristic essential-support estimate: nodes of t_grid where
/// Im m_+(t + iy) exceeds the threshold, merged into maximal intervals.
/// This is an estimate at the recorded (y, threshold), not Sigma_ac.
inline AcSupportEstimate ac_support_estimate(const HalfLineHamiltonian& H,
                                             const IntervalSet& t_grid, double y,
                                             double threshold = 1e-3,
                                             int nodes_per_interval = 64,
                                             double N_max = 1e8) {
    if (!(y > 0.0) || !(threshold > 0.0))
        throw std::domain_error("ac_support_estimate: y and threshold must be > 0");
    AcSupportEstimate out;
    out.y = y;
    out.threshold = threshold;
    std::vector<std::pair<double, double>> kept;
    const double tol_m = std::min(y / 4.0, threshold / 4.0);
    for (const auto& [a, b] : t_grid.intervals()) {
        const double step = (b - a) / nodes_per_interval;
        bool in_run = false;
        double run_start = 0.0, last_t = 0.0;
        for (int i = 0; i < nodes_per_interval; ++i) {
            const double t = a + step * (i + 0.5);
            bool keep = false;
            const MValue m = m_halfline(H, {t, y}, tol_m, N_max);
            if (!m.converged)
                out.excluded_nodes.push_back(t);
            else
                keep = m.value.imag() > threshold;
            if (keep && !in_run) {
                in_run = true;
                run_start = t - 0.5 * step;
            }
            if (keep) last_t = t + 0.5 * step;
            if (!keep && in_run) {
                in_run = false;
                kept.push_back({run_start, last_t});
            }
        }
        if (in_run) kept.push_back({run_start, last_t});
    }
    out.estimate = IntervalSet(std::move(kept));
    return out;
}

inline AcSupportEstimate ac_support_estimate(const WholeLineHamiltonian& H,
                                             const IntervalSet& t_grid, double y,
                                             double threshold = 1e-3,
                                             int nodes_per_interval = 64,
                                             double N_max = 1e8) {
    return ac_support_estimate(H.right, t_grid, y, threshold, nodes_per_interval, N_max);
}

/// d(S_{x_n} mu, nu) along the shift sequence; numerical omega-limit probing.
inline std::vector<std::pair<double, double>> omega_limit_probe(
    const WholeLineHamiltonian& mu, const WholeLineHamiltonian& nu,
    const std::vector<double>& x_seq, const TestFamily& family) {
    std::vector<std::pair<double, double>> out;
    out.reserve(x_seq.size());
    for (double x : x_seq)
        out.push_back({x, metric_distance(shift_by(mu, x), nu, family).value});
    return out;
}

}  // namespace canosys
