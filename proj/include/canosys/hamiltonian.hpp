#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "canosys/errors.hpp"
#include "canosys/matrix.hpp"

namespace canosys {

/// Relative tolerance used when accepting nearly-singular PSD matrices.
/// Reductions produce exactly-rank-one cells whose determinant is zero
/// only up to rounding.
inline constexpr double kPsdTol = 1e-12;

/// Real symmetric positive semidefinite 2x2 matrix (a21 == a12).
struct PSDMatrix2 {
    double a11 = 0.0, a12 = 0.0, a22 = 0.0;

    double trace() const { return a11 + a22; }
    double det() const { return a11 * a22 - a12 * a12; }

    bool is_valid() const {
        const double t = trace();
        return a11 >= 0.0 && a22 >= 0.0 && t > 0.0 && det() >= -kPsdTol * t * t;
    }

    bool operator==(const PSDMatrix2& o) const {
        return a11 == o.a11 && a12 == o.a12 && a22 == o.a22;
    }

    Mat2 as_mat2() const { return {a11, a12, a12, a22}; }

    PSDMatrix2 scaled(double s) const { return {a11 * s, a12 * s, a22 * s}; }

    /// Flip the sign of the off-diagonal entry; this is R M R with
    /// R = diag(1, -1) and shows up when a left half line is mirrored.
    PSDMatrix2 off_diag_flipped() const { return {a11, -a12, a22}; }

    static PSDMatrix2 identity() { return {1.0, 0.0, 1.0}; }
    static PSDMatrix2 diag(double h11, double h22) { return {h11, 0.0, h22}; }

    /// Rank-one projection h * P_phi with P_phi the projection onto
    /// (cos phi, sin phi).
    static PSDMatrix2 rank_one(double h, double phi) {
        const double c = std::cos(phi), s = std::sin(phi);
        return {h * c * c, h * c * s, h * s * s};
    }
};

struct HamiltonianCell {
    double length = 0.0;
    PSDMatrix2 matrix;
};

enum class Extension { RepeatLast, Periodic };
enum class Side { Right, Left };

namespace detail {

inline void check_cells(const std::vector<HamiltonianCell>& cells) {
    if (cells.empty()) throw validation_error("hamiltonian needs at least one cell");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        if (!(c.length > 0.0) || !std::isfinite(c.length))
            throw validation_error("cell " + std::to_string(i) + ": length must be finite and > 0");
        if (!c.matrix.is_valid())
            throw validation_error("cell " + std::to_string(i) + ": matrix is not positive semidefinite with positive trace");
    }
}

inline std::vector<HamiltonianCell> merge_adjacent(std::vector<HamiltonianCell> cells) {
    std::vector<HamiltonianCell> out;
    for (const auto& c : cells) {
        if (!out.empty() && out.back().matrix == c.matrix)
            out.back().length += c.length;
        else
            out.push_back(c);
    }
    return out;
}

}  // namespace detail

/// Piecewise-constant Hamiltonian H(x) on a half line, extended past its
/// explicit cells by the extension rule.  side == Right lives on [0, inf);
/// side == Left lives on (-inf, 0] with cells enumerated away from 0, the
/// k-th cell holding the value of H on (-edge_{k+1}, -edge_k].
class HalfLineHamiltonian {
  public:
    HalfLineHamiltonian(std::vector<HamiltonianCell> cells, Extension ext,
                        Side side = Side::Right)
        : cells_(std::move(cells)), ext_(ext), side_(side) {
        detail::check_cells(cells_);
        rebuild_edges();
    }

    const std::vector<HamiltonianCell>& cells() const { return cells_; }
    Extension extension() const { return ext_; }
    Side side() const { return side_; }

    /// Sum of explicit cell lengths.
    double cell_span() const { return edges_.back(); }

    /// Depth of position x measured away from the origin; domain-checks the
    /// sign against the side.
    double depth_of(double x) const {
        if (side_ == Side::Right) {
            if (x < 0.0) throw std::domain_error("evaluate_at: x < 0 on a right half line");
            return x;
        }
        if (x > 0.0) throw std::domain_error("evaluate_at: x > 0 on a left half line");
        return -x;
    }

    /// Index of the cell containing the given depth (extension applied),
    /// together with the offset of that cell's near edge.
    std::size_t cell_index_at_depth(double s, double* cell_start = nullptr) const {
        const double span = cell_span();
        double base = 0.0;
        if (s >= span) {
            if (ext_ == Extension::RepeatLast) {
                if (cell_start) *cell_start = span - cells_.back().length;
                return cells_.size() - 1;
            }
            const double k = std::floor(s / span);
            base = k * span;
            s -= base;
            if (s >= span) {  // roundoff at a period boundary
                base += span;
                s = 0.0;
            }
        }
        // half-open cells [e_k, e_{k+1}) in depth
        auto it = std::upper_bound(edges_.begin(), edges_.end(), s);
        std::size_t idx = static_cast<std::size_t>(it - edges_.begin());
        idx = (idx == 0) ? 0 : idx - 1;
        if (idx >= cells_.size()) idx = cells_.size() - 1;
        if (cell_start) *cell_start = base + edges_[idx];
        return idx;
    }

    PSDMatrix2 value_at_depth(double s) const { return cells_[cell_index_at_depth(s)].matrix; }

    /// Walk the constant pieces of H over depths [s0, s1), materializing the
    /// extension.  fn(depth_lo, depth_hi, matrix).  The walk advances through
    /// the cell list structurally; boundaries are never re-derived from the
    /// running position, so accumulated roundoff cannot stall it.
    template <class Fn>
    void for_each_piece(double s0, double s1, Fn&& fn) const {
        if (!(s1 > s0)) return;
        double start = 0.0;
        std::size_t idx = cell_index_at_depth(s0, &start);
        double lo = s0;
        while (lo < s1) {
            double end;
            if (ext_ == Extension::RepeatLast && idx == cells_.size() - 1)
                end = s1;  // the last cell repeats forever: one merged piece
            else
                end = start + cells_[idx].length;
            const double hi = std::min(end, s1);
            if (hi > lo) fn(lo, hi, cells_[idx].matrix);
            lo = hi;
            start = end;
            idx = (idx + 1 < cells_.size()) ? idx + 1 : 0;
        }
    }

    std::vector<HamiltonianCell> cells_on(double s0, double s1) const {
        std::vector<HamiltonianCell> out;
        for_each_piece(s0, s1, [&](double lo, double hi, const PSDMatrix2& m) {
            out.push_back({hi - lo, m});
        });
        return out;
    }

    HalfLineHamiltonian with_side(Side s) const { return {cells_, ext_, s}; }

    /// Right half line carrying H(-s) conjugated by diag(1,-1); the Weyl
    /// problem of a left half line is exactly the standard problem of its
    /// mirror.
    HalfLineHamiltonian mirrored() const {
        std::vector<HamiltonianCell> cs = cells_;
        for (auto& c : cs) c.matrix = c.matrix.off_diag_flipped();
        return {std::move(cs), ext_, side_ == Side::Left ? Side::Right : Side::Left};
    }

    /// The half line seen from depth s onward: t -> H(s + t).
    HalfLineHamiltonian tail_from(double s) const {
        if (s < 0.0) throw std::domain_error("tail_from: negative depth");
        if (s == 0.0) return *this;
        std::vector<HamiltonianCell> out;
        const double span = cell_span();
        if (s >= span && ext_ == Extension::RepeatLast) {
            out.push_back({cells_.back().length, cells_.back().matrix});
            return {std::move(out), ext_, side_};
        }
        double pos = s;
        if (ext_ == Extension::Periodic) pos = std::fmod(s, span);
        // remainder of the cell containing pos, then the rest of the list;
        // a periodic tail wraps around to keep the period length intact
        double start = 0.0;
        std::size_t idx = cell_index_at_depth(pos, &start);
        const double rem = start + cells_[idx].length - pos;
        if (rem > 0.0) out.push_back({rem, cells_[idx].matrix});
        for (std::size_t k = idx + 1; k < cells_.size(); ++k) out.push_back(cells_[k]);
        if (ext_ == Extension::Periodic) {
            for (std::size_t k = 0; k < idx; ++k) out.push_back(cells_[k]);
            if (pos - start > 0.0) out.push_back({pos - start, cells_[idx].matrix});
        }
        out = detail::merge_adjacent(std::move(out));
        return {std::move(out), ext_, side_};
    }

  private:
    void rebuild_edges() {
        edges_.assign(1, 0.0);
        for (const auto& c : cells_) edges_.push_back(edges_.back() + c.length);
    }

    std::vector<HamiltonianCell> cells_;
    Extension ext_;
    Side side_;
    std::vector<double> edges_;  // cumulative depths, edges_[0] == 0
};

/// H(x) at x, right-continuous in depth (so right-continuous in x on the
/// right half line and left-continuous on the left one).
inline PSDMatrix2 evaluate_at(const HalfLineHamiltonian& H, double x) {
    return H.value_at_depth(H.depth_of(x));
}

struct WholeLineHamiltonian {
    HalfLineHamiltonian right;  // side == Right
    HalfLineHamiltonian left;   // side == Left

    WholeLineHamiltonian(HalfLineHamiltonian r, HalfLineHamiltonian l)
        : right(std::move(r)), left(std::move(l)) {
        if (right.side() != Side::Right || left.side() != Side::Left)
            throw validation_error("whole-line hamiltonian: sides are inconsistent");
    }

    PSDMatrix2 at(double x) const {
        return x >= 0.0 ? evaluate_at(right, x) : evaluate_at(left, x);
    }

    /// Constant pieces over [lo, hi] in line coordinates.
    template <class Fn>
    void for_each_piece(double lo, double hi, Fn&& fn) const {
        if (lo < 0.0) {
            const double s1 = -lo, s0 = std::max(0.0, -std::min(hi, 0.0));
            // collect left pieces in depth order, emit in x order
            std::vector<std::pair<std::pair<double, double>, PSDMatrix2>> buf;
            left.for_each_piece(s0, s1, [&](double a, double b, const PSDMatrix2& m) {
                buf.push_back({{-b, -a}, m});
            });
            for (auto it = buf.rbegin(); it != buf.rend(); ++it)
                fn(it->first.first, it->first.second, it->second);
        }
        if (hi > 0.0)
            right.for_each_piece(std::max(lo, 0.0), hi,
                                 [&](double a, double b, const PSDMatrix2& m) { fn(a, b, m); });
    }
};

/// Piecewise-linear reparametrization t(x) = integral of tr H, with inverse.
class PiecewiseLinearMap {
  public:
    PiecewiseLinearMap(std::vector<double> x_edges, std::vector<double> t_edges,
                       Extension ext)
        : x_(std::move(x_edges)), t_(std::move(t_edges)), ext_(ext) {}

    double t_of_x(double x) const { return eval(x_, t_, x); }
    double x_of_t(double t) const { return eval(t_, x_, t); }

  private:
    double eval(const std::vector<double>& from, const std::vector<double>& to,
                double v) const {
        if (v < 0.0) throw std::domain_error("reparametrization: negative coordinate");
        const double span_f = from.back(), span_t = to.back();
        double base_f = 0.0, base_t = 0.0;
        if (v >= span_f) {
            if (ext_ == Extension::RepeatLast) {
                const std::size_t k = from.size() - 2;
                const double slope = (to[k + 1] - to[k]) / (from[k + 1] - from[k]);
                return to.back() + (v - span_f) * slope;
            }
            const double k = std::floor(v / span_f);
            base_f = k * span_f;
            base_t = k * span_t;
            v -= base_f;
        }
        auto it = std::upper_bound(from.begin(), from.end(), v);
        std::size_t i = static_cast<std::size_t>(it - from.begin());
        i = (i == 0) ? 0 : i - 1;
        if (i + 1 >= from.size()) i = from.size() - 2;
        const double slope = (to[i + 1] - to[i]) / (from[i + 1] - from[i]);
        return base_t + to[i] + (v - from[i]) * slope;
    }

    std::vector<double> x_, t_;
    Extension ext_;
};

struct TraceNormalized {
    HalfLineHamiltonian hamiltonian;
    PiecewiseLinearMap map;  // t(x) in depth coordinates
};

/// Change of variable t(x) = int_0^x tr H: cell lengths are rescaled by the
/// cell trace and matrices divided by it, so tr == 1 cellwise.
inline TraceNormalized normalize_trace(const HalfLineHamiltonian& H) {
    std::vector<HamiltonianCell> cells;
    std::vector<double> xe{0.0}, te{0.0};
    cells.reserve(H.cells().size());
    for (const auto& c : H.cells()) {
        const double tr = c.matrix.trace();
        cells.push_back({c.length * tr, c.matrix.scaled(1.0 / tr)});
        xe.push_back(xe.back() + c.length);
        te.push_back(te.back() + c.length * tr);
    }
    return {HalfLineHamiltonian(std::move(cells), H.extension(), H.side()),
            PiecewiseLinearMap(std::move(xe), std::move(te), H.extension())};
}

/// (S_x H)(t) = H(x + t): move the origin to x.
inline WholeLineHamiltonian shift_by(const WholeLineHamiltonian& H, double x) {
    if (x == 0.0) return H;
    if (x > 0.0) {
        HalfLineHamiltonian new_right = H.right.tail_from(x);
        std::vector<HamiltonianCell> lcells = H.right.cells_on(0.0, x);
        std::reverse(lcells.begin(), lcells.end());
        for (const auto& c : H.left.cells()) lcells.push_back(c);
        lcells = detail::merge_adjacent(std::move(lcells));
        return {std::move(new_right),
                HalfLineHamiltonian(std::move(lcells), H.left.extension(), Side::Left)};
    }
    HalfLineHamiltonian new_left = H.left.tail_from(-x);
    std::vector<HamiltonianCell> rcells = H.left.cells_on(0.0, -x);
    std::reverse(rcells.begin(), rcells.end());
    for (const auto& c : H.right.cells()) rcells.push_back(c);
    rcells = detail::merge_adjacent(std::move(rcells));
    return {HalfLineHamiltonian(std::move(rcells), H.right.extension(), Side::Right),
            std::move(new_left)};
}

/// Sampled equality of two Hamiltonians as functions on [lo, hi].
inline bool agree_on(const WholeLineHamiltonian& A, const WholeLineHamiltonian& B,
                     double lo, double hi, int samples = 1000, double tol = 0.0) {
    for (int i = 0; i < samples; ++i) {
        const double x = lo + (hi - lo) * (i + 0.5) / samples;
        const PSDMatrix2 a = A.at(x), b = B.at(x);
        if (std::abs(a.a11 - b.a11) > tol || std::abs(a.a12 - b.a12) > tol ||
            std::abs(a.a22 - b.a22) > tol)
            return false;
    }
    return true;
}

inline HalfLineHamiltonian constant_hamiltonian(const PSDMatrix2& M, double cell_len = 1.0,
                                                Side side = Side::Right) {
    return {{{cell_len, M}}, Extension::RepeatLast, side};
}

inline WholeLineHamiltonian constant_whole_line(const PSDMatrix2& M) {
    return {constant_hamiltonian(M), constant_hamiltonian(M, 1.0, Side::Left)};
}

}  // namespace canosys
