#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "canosys/errors.hpp"

namespace canosys {

/// Finite union of disjoint open intervals (a_i, b_i), kept sorted.
/// Infinite endpoints are allowed (harmonic measure of a half line is
/// still closed form).
class IntervalSet {
  public:
    IntervalSet() = default;

    explicit IntervalSet(std::vector<std::pair<double, double>> iv) : iv_(std::move(iv)) {
        normalize();
    }

    static IntervalSet single(double a, double b) { return IntervalSet({{a, b}}); }

    static IntervalSet real_line() {
        return IntervalSet({{-std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity()}});
    }

    const std::vector<std::pair<double, double>>& intervals() const { return iv_; }
    bool empty() const { return iv_.empty(); }

    double measure() const {
        double m = 0.0;
        for (const auto& [a, b] : iv_) m += b - a;
        return m;
    }

    bool contains(double t) const {
        for (const auto& [a, b] : iv_)
            if (t > a && t < b) return true;
        return false;
    }

    bool is_endpoint(double t) const {
        for (const auto& [a, b] : iv_)
            if (t == a || t == b) return true;
        return false;
    }

    /// -S = { -t : t in S }.
    IntervalSet reflected() const {
        std::vector<std::pair<double, double>> out;
        out.reserve(iv_.size());
        for (auto it = iv_.rbegin(); it != iv_.rend(); ++it)
            out.push_back({-it->second, -it->first});
        IntervalSet r;
        r.iv_ = std::move(out);  // already sorted and disjoint
        return r;
    }

    IntervalSet intersect(const IntervalSet& o) const {
        std::vector<std::pair<double, double>> out;
        for (const auto& [a, b] : iv_)
            for (const auto& [c, d] : o.iv_) {
                const double lo = std::max(a, c), hi = std::min(b, d);
                if (lo < hi) out.push_back({lo, hi});
            }
        return IntervalSet(std::move(out));
    }

    IntervalSet unite(const IntervalSet& o) const {
        std::vector<std::pair<double, double>> out = iv_;
        out.insert(out.end(), o.iv_.begin(), o.iv_.end());
        return IntervalSet(std::move(out));
    }

  private:
    void normalize() {
        for (const auto& [a, b] : iv_)
            if (!(a < b)) throw validation_error("interval set: need a < b in every interval");
        std::sort(iv_.begin(), iv_.end());
        std::vector<std::pair<double, double>> merged;
        for (const auto& [a, b] : iv_) {
            if (!merged.empty() && a <= merged.back().second)
                merged.back().second = std::max(merged.back().second, b);
            else
                merged.push_back({a, b});
        }
        iv_ = std::move(merged);
    }

    std::vector<std::pair<double, double>> iv_;
};

}  // namespace canosys
