#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vforge/construction.hpp"
#include "vforge/errors.hpp"

namespace vforge {

/* Two-scale box-counting slope from (count, scale) pairs of consecutive
 * refinement levels: the average of
 * log(count_{l+1}/count_l) / log(scale_l/scale_{l+1}). */
inline double two_scale_slope(const std::vector<std::pair<double, double>>& levels) {
    if (levels.size() < 2)
        throw ConstraintError("two_scale_slope: need at least two levels");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        double cr = levels[i + 1].first / levels[i].first;
        double sr = levels[i].second / levels[i + 1].second;
        if (!(cr > 1.0) || !(sr > 1.0))
            throw ConstraintError("two_scale_slope: counts must grow and scales must shrink");
        acc += std::log(cr) / std::log(sr);
    }
    return acc / static_cast<double>(levels.size() - 1);
}

/* Dimension of the limit set in terms of the construction parameters:
 * log(N-1) / (log N + log(1+log N) + log(2/(eps*gamma1))). */
inline double dimension_formula(long long N, double eps, double gamma1) {
    if (N < 3 || !(eps > 0.0) || !(gamma1 > 0.0))
        throw ConstraintError("dimension_formula: invalid parameters");
    double n = static_cast<double>(N);
    return std::log(n - 1.0) /
           (std::log(n) + std::log(1.0 + std::log(n)) + std::log(2.0 / (eps * gamma1)));
}

struct DimensionReport {
    int levels_used = 0;
    double two_scale_slope = 0.0;
    std::optional<double> formula_s;   // log(N-1)/log(1/gamma)
    std::optional<double> formula_dN;  // closed form in (N, eps, gamma1)
    double cantor_reference = 0.0;     // log 2 / log 3 for the classical set
};

/* Slope measured from a built construction: counts (N-1)^l at scales
 * s_l = (alpha/2) gamma^(l-1). */
inline DimensionReport box_dimension(const ConstructionState& st) {
    if (st.depth() < 2)
        throw ConstraintError("box_dimension: need at least two built levels");
    std::vector<std::pair<double, double>> levels;
    for (int l = 1; l <= st.depth(); ++l)
        levels.emplace_back(static_cast<double>(st.level_count(l)), st.scale(l));
    DimensionReport rep;
    rep.levels_used = st.depth();
    rep.two_scale_slope = two_scale_slope(levels);
    const auto& p = st.params();
    rep.formula_s = std::log(static_cast<double>(p.N - 1)) / std::log(1.0 / p.gamma);
    rep.formula_dN = dimension_formula(p.N, p.eps, p.gamma1);
    rep.cantor_reference = std::log(2.0) / std::log(3.0);
    return rep;
}

/* Slope of the classical middle-thirds-style reference family, measured
 * from the constructed level sets themselves. */
inline DimensionReport box_dimension_cantor(int N, double alpha, int depth) {
    auto level_sets = classical_cantor(N, alpha, depth);
    std::vector<std::pair<double, double>> levels;
    for (const auto& X : level_sets)
        levels.emplace_back(static_cast<double>(X.size()), X.components().front().length());
    DimensionReport rep;
    rep.levels_used = depth;
    rep.two_scale_slope = two_scale_slope(levels);
    rep.cantor_reference = std::log(2.0) / std::log(3.0);
    return rep;
}

inline void to_json(nlohmann::json& j, const DimensionReport& r) {
    j = {{"levels_used", r.levels_used},
         {"two_scale_slope", r.two_scale_slope},
         {"cantor_reference", r.cantor_reference}};
    j["formula_s"] = r.formula_s ? nlohmann::json(*r.formula_s) : nlohmann::json(nullptr);
    j["formula_dN"] = r.formula_dN ? nlohmann::json(*r.formula_dN) : nlohmann::json(nullptr);
}

} // namespace vforge
