#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "vforge/construction.hpp"
#include "vforge/errors.hpp"
#include "vforge/interval_set.hpp"
#include "vforge/poisson.hpp"
#include "vforge/sampling.hpp"

namespace vforge {

/* One stage of the dense assembly: template branching N_n and the scale
 * budget (sigma / 2^n) that caps both the anchor perturbation and the
 * inserted copy size. */
struct DenseStageSpec {
    int N = 3;
    double scale_bound = 0.0;
};

struct DenseProvenance {
    int stage = 0;
    std::string action; // "base", "insert-free" (case 1), "insert-after-delete" (case 2)
    double p = 0.0;     // requested anchor
    double tau = 0.0;   // placed anchor
    double delta = 0.0; // inserted copy scale
    bool erased = false;
    double erased_lo = 0.0, erased_hi = 0.0;
    double margin_after = 0.0; // base certificate margin after this stage
};

struct DenseOptions {
    int base_depth = 2;
    int insert_depth = 1;
    double eps = 1.0 / 128.0;
    double beta1 = 1.0 / 128.0;
    double max_margin_degradation = 2.0; // margin may shrink by at most this factor
    std::size_t cert_samples = 64;
};

struct DenseAssembly {
    IntervalSet set;                  // the assembled union
    std::vector<IntervalSet> members; // members[0] is the base copy
    std::vector<DenseProvenance> log;
    double base_margin0 = 0.0;
};

namespace detail {

/* Certificate: the field of everything except the base copy, sampled on
 * the half-annuli of the base's level-1 nodes; margin against 4*eps. */
inline double dense_foreign_field(const DenseAssembly& a, const ConstructionState& base,
                                  std::size_t samples) {
    double worst = 0.0;
    HaltonStream hs(11);
    for (const auto& k : base.level_nodes(1)) {
        double c = base.center_abs(k);
        double s = base.scale(1);
        for (std::size_t j = 0; j < samples; ++j) {
            cplx zi = sample_half_annulus(hs, j, c, base.params().beta1 * s, s);
            cplx zb = sample_half_annulus_boundary(hs, j + samples, c, base.params().beta1 * s, s);
            for (cplx z : {zi, zb}) {
                CompensatedSum acc;
                for (std::size_t m = 1; m < a.members.size(); ++m)
                    if (!a.members[m].empty()) acc.add(poisson(a.members[m], z));
                worst = std::max(worst, std::abs(acc.value()));
            }
        }
    }
    return worst;
}

/* The free open interval of the complement of Y around x (Y must not
 * contain x); reaches to the nearest endpoints on both sides. */
inline Interval free_gap_around(const IntervalSet& Y, double x, double reach) {
    double lo = x - reach, hi = x + reach;
    for (const auto& c : Y.components()) {
        if (c.right <= x) lo = std::max(lo, c.right);
        if (c.left >= x) hi = std::min(hi, c.left);
    }
    return {lo, hi};
}

} // namespace detail

/* Assembles the dense modification sequence: starts from a full nested
 * construction, then for each later stage places a scaled copy of a
 * depth-truncated construction near the requested anchor.  Anchors in the
 * complement go into the surrounding free interval (case 1); anchors
 * inside the set force a logged deletion of a small subinterval first
 * (case 2).  After every insertion the base copy's exterior-field
 * certificate is re-checked; the copy scale is halved until the margin
 * degradation stays within the configured factor. */
inline DenseAssembly assemble_dense(const std::vector<DenseStageSpec>& stages,
                                    const std::vector<double>& anchors, int max_stage,
                                    const DenseOptions& opts = {}) {
    if (max_stage < 3) throw ConstraintError("max_stage >= 3 violated");
    if (stages.size() < static_cast<std::size_t>(max_stage - 2))
        throw ConstraintError("assemble_dense: need a stage spec for every n in [3, max_stage]");
    if (anchors.size() < static_cast<std::size_t>(max_stage - 3))
        throw ConstraintError("assemble_dense: need an anchor for every n in [4, max_stage]");

    auto params_for = [&](int N) {
        return derive_params(N, opts.eps, opts.beta1, opts.eps * opts.beta1 / 2.0);
    };

    ConstructionState base = build_construction(params_for(stages[0].N), opts.base_depth);
    DenseAssembly a;
    a.members.push_back(base.to_interval_set());
    a.set = a.members[0];
    a.base_margin0 = 4.0 * opts.eps; // no foreign field yet
    a.log.push_back({3, "base", 0.0, 0.0, 1.0, false, 0.0, 0.0, a.base_margin0});

    for (int n = 4; n <= max_stage; ++n) {
        const DenseStageSpec& spec = stages[static_cast<std::size_t>(n - 3)];
        double bound = spec.scale_bound;
        if (!(bound > 0.0)) throw ConstraintError("assemble_dense: scale bound must be positive");
        double p = anchors[static_cast<std::size_t>(n - 4)];

        double tau = p;
        int nudges = 0;
        while (a.set.on_boundary(tau)) {
            tau += bound / 1024.0;
            if (++nudges > 64)
                throw ConstraintError("assemble_dense: could not perturb anchor off the boundary");
        }
        if (!(std::abs(tau - p) <= bound))
            throw ConstraintError("assemble_dense: |tau - p| exceeds the stage scale bound");

        DenseProvenance ev;
        ev.stage = n;
        ev.p = p;
        ev.tau = tau;

        IntervalSet copy_template =
            build_construction(params_for(spec.N), opts.insert_depth).to_interval_set();

        double room;
        if (a.set.contains(tau)) {
            // case 2: delete a subinterval around tau, then insert into it
            double d = a.set.min_endpoint_distance(tau);
            double u = std::min(bound, d / 2.0);
            a.set.erase(tau - u, tau + u);
            for (auto& m : a.members) m.erase(tau - u, tau + u);
            ev.action = "insert-after-delete";
            ev.erased = true;
            ev.erased_lo = tau - u;
            ev.erased_hi = tau + u;
            room = u;
        } else {
            ev.action = "insert-free";
            Interval gap = detail::free_gap_around(a.set, tau, bound * 2.0);
            room = gap.right - tau;
            if (!(room > 0.0))
                throw ConstraintError("assemble_dense: no free room at the anchor");
        }

        double delta = std::min(bound, room / 2.0);
        bool placed = false;
        for (int halving = 0; halving < 60; ++halving) {
            DenseAssembly trial = a;
            IntervalSet copy = scale_translate(copy_template, delta, tau);
            for (const auto& c : copy.components()) trial.set.insert(c);
            trial.members.push_back(copy);
            double foreign = detail::dense_foreign_field(trial, base, opts.cert_samples);
            double margin = 4.0 * opts.eps - foreign;
            if (margin > a.base_margin0 / opts.max_margin_degradation) {
                ev.delta = delta;
                ev.margin_after = margin;
                a = std::move(trial);
                placed = true;
                break;
            }
            delta /= 2.0;
        }
        if (!placed)
            throw ConstraintError("assemble_dense: certificate margin exhausted at stage " +
                                  std::to_string(n));
        a.log.push_back(ev);
    }
    return a;
}

inline void to_json(nlohmann::json& j, const DenseProvenance& e) {
    j = {{"stage", e.stage},   {"action", e.action}, {"p", e.p},
         {"tau", e.tau},       {"delta", e.delta},   {"erased", e.erased},
         {"margin_after", e.margin_after}};
    if (e.erased) j["erased_interval"] = {e.erased_lo, e.erased_hi};
}

inline void to_json(nlohmann::json& j, const DenseAssembly& a) {
    j = nlohmann::json::object();
    j["set"] = a.set;
    j["log"] = a.log;
    j["base_margin0"] = a.base_margin0;
}

} // namespace vforge
