#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "vforge/errors.hpp"

namespace vforge {

/* A bounded open interval (left, right), left < right. */
struct Interval {
    double left = 0.0;
    double right = 0.0;

    double length() const { return right - left; }
    double center() const { return 0.5 * (left + right); }
    bool operator==(const Interval&) const = default;
};

/* Finite disjoint union of bounded open intervals, kept sorted by left
 * endpoint.  Components may touch only at endpoints (closures may share a
 * point); overlapping interiors are rejected. */
class IntervalSet {
  public:
    IntervalSet() = default;

    explicit IntervalSet(std::vector<Interval> comps) : comps_(std::move(comps)) {
        validate();
    }

    static IntervalSet from_unsorted(std::vector<Interval> comps) {
        std::sort(comps.begin(), comps.end(),
                  [](const Interval& a, const Interval& b) { return a.left < b.left; });
        return IntervalSet(std::move(comps));
    }

    const std::vector<Interval>& components() const { return comps_; }
    bool empty() const { return comps_.empty(); }
    std::size_t size() const { return comps_.size(); }

    double measure() const {
        double m = 0.0;
        for (const auto& c : comps_) m += c.length();
        return m;
    }

    double min() const { return comps_.front().left; }
    double max() const { return comps_.back().right; }

    /* Open-interval membership. */
    bool contains(double x) const {
        for (const auto& c : comps_)
            if (x > c.left && x < c.right) return true;
        return false;
    }

    bool on_boundary(double x) const {
        for (const auto& c : comps_)
            if (x == c.left || x == c.right) return true;
        return false;
    }

    double min_endpoint_distance(double x) const {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& c : comps_) {
            d = std::min(d, std::abs(x - c.left));
            d = std::min(d, std::abs(x - c.right));
        }
        return d;
    }

    /* Measure of the intersection with the closed window [a, b]. */
    double measure_in(double a, double b) const {
        double m = 0.0;
        for (const auto& c : comps_) {
            double lo = std::max(a, c.left), hi = std::min(b, c.right);
            if (hi > lo) m += hi - lo;
        }
        return m;
    }

    /* Insert a component whose interior must not meet any existing one. */
    void insert(Interval iv) {
        if (!(iv.left < iv.right)) throw ConstraintError("insert: degenerate interval");
        for (const auto& c : comps_)
            if (iv.left < c.right && c.left < iv.right)
                throw ConstraintError("insert: interval overlaps an existing component");
        comps_.push_back(iv);
        std::sort(comps_.begin(), comps_.end(),
                  [](const Interval& a, const Interval& b) { return a.left < b.left; });
    }

    /* Remove the open interval (a, b) from the set, splitting components. */
    void erase(double a, double b) {
        if (!(a < b)) throw ConstraintError("erase: degenerate interval");
        std::vector<Interval> out;
        out.reserve(comps_.size() + 1);
        for (const auto& c : comps_) {
            if (b <= c.left || c.right <= a) {
                out.push_back(c);
                continue;
            }
            if (c.left < a) out.push_back({c.left, std::min(a, c.right)});
            if (b < c.right) out.push_back({std::max(b, c.left), c.right});
        }
        comps_ = std::move(out);
    }

    void append_unchecked(Interval iv) { comps_.push_back(iv); }

    void finalize_sorted() {
        std::sort(comps_.begin(), comps_.end(),
                  [](const Interval& a, const Interval& b) { return a.left < b.left; });
        validate();
    }

    bool operator==(const IntervalSet&) const = default;

  private:
    void validate() const {
        for (std::size_t i = 0; i < comps_.size(); ++i) {
            if (!(comps_[i].left < comps_[i].right))
                throw ConstraintError("IntervalSet: component must satisfy left < right");
            if (i > 0 && comps_[i].left < comps_[i - 1].right)
                throw ConstraintError("IntervalSet: components must be disjoint and sorted");
        }
    }

    std::vector<Interval> comps_;
};

/* Affine image a*X + c, a > 0. */
inline IntervalSet scale_translate(const IntervalSet& X, double a, double c) {
    if (!(a > 0.0)) throw ConstraintError("scale_translate: scale must be positive");
    std::vector<Interval> out;
    out.reserve(X.size());
    for (const auto& iv : X.components())
        out.push_back({a * iv.left + c, a * iv.right + c});
    return IntervalSet(std::move(out));
}

/* JSON form: sorted array of [left, right] pairs. */
inline void to_json(nlohmann::json& j, const IntervalSet& X) {
    j = nlohmann::json::array();
    for (const auto& c : X.components()) j.push_back({c.left, c.right});
}

inline void from_json(const nlohmann::json& j, IntervalSet& X) {
    std::vector<Interval> comps;
    for (const auto& e : j) comps.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    X = IntervalSet(std::move(comps));
}

} // namespace vforge
