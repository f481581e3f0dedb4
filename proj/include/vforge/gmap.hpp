#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vforge/construction.hpp"
#include "vforge/errors.hpp"
#include "vforge/interval_set.hpp"
#include "vforge/poisson.hpp"
#include "vforge/quadrature.hpp"
#include "vforge/sampling.hpp"
#include "vforge/seed.hpp"

namespace vforge {

/* G(X, z) = Integral_0^z g'(H0^{-1}(P(X, zeta))) dzeta. */
struct GMap {
    SeedFunction seed;
    IntervalSet X;
    double tol = 1e-12;
};

namespace detail {

/* Integrand of G with an optional annulus assertion: |g'| must stay in
 * [m(1-1e-6), M(1+1e-6)] or the seed and constants are inconsistent. */
inline std::function<cplx(cplx)> g_integrand(const SeedFunction& seed, const IntervalSet& X,
                                             const SeedConstants* sc) {
    return [&seed, &X, sc](cplx zeta) {
        cplx w = poisson(X, zeta);
        cplx v = strip_gprime(seed, w);
        if (sc) {
            double a = std::abs(v);
            if (a < sc->m * (1.0 - 1e-6) || a > sc->M * (1.0 + 1e-6))
                throw SeedError("g_eval: integrand left the annulus (seed/constants inconsistency)");
        }
        return v;
    };
}

} // namespace detail

/* Evaluates G along [0, ic, z] with c = max(1e-3, Im z).  The returned
 * error estimate respects tol or a QuadratureError is thrown. */
inline cplx g_eval(const GMap& gm, cplx z, double tol = 0.0, const SeedConstants* sc = nullptr) {
    if (z == cplx(0.0, 0.0)) return {0.0, 0.0};
    if (z.imag() < 0.0) throw ConstraintError("g_eval: z must lie in the closed upper half-plane");
    if (tol <= 0.0) tol = gm.tol;
    auto f = detail::g_integrand(gm.seed, gm.X, sc);
    double c = std::max(1e-3, z.imag());
    std::vector<cplx> path{cplx(0.0, 0.0), cplx(0.0, c), z};
    auto r = integrate_polyline(f, path, tol);
    if (r.error > tol)
        throw QuadratureError("g_eval: requested tolerance not reached");
    return r.value;
}

/* Winding of the image of the circle |zeta - center| = radius under G
 * around w, by incremental chord integrals of G'.  The loop refuses when
 * the image passes within 10x of the accumulated quadrature budget of w,
 * and the point count doubles until two consecutive counts agree with the
 * accumulated argument within 1e-3 of a full turn. */
inline int count_preimages(const GMap& gm, cplx w, cplx center, double radius,
                           std::size_t boundary_points = 4096,
                           const SeedConstants* sc = nullptr) {
    if (!(radius > 0.0)) throw ConstraintError("count_preimages: radius must be positive");
    if (!(center.imag() > radius))
        throw ConstraintError("count_preimages: disk must lie inside the open half-plane");
    auto f = detail::g_integrand(gm.seed, gm.X, sc);

    std::optional<int> prev;
    for (std::size_t n = boundary_points; n <= (std::size_t{1} << 16); n *= 2) {
        // integrand magnitude probe sets the per-segment tolerance scale
        double mag = 0.0;
        for (int k = 0; k < 8; ++k) {
            double th = 2.0 * kPi * k / 8.0;
            mag = std::max(mag, std::abs(f(center + radius * cplx(std::cos(th), std::sin(th)))));
        }
        double seg_tol = std::max(1e-300, mag * (2.0 * kPi * radius / n) * 1e-7);

        cplx zeta0 = center + cplx(radius, 0.0);
        cplx v = g_eval(gm, zeta0, gm.tol, sc) - w;
        double budget = gm.tol;
        double min_dist = std::abs(v);
        double arg_sum = 0.0;
        cplx vprev = v;
        for (std::size_t j = 1; j <= n; ++j) {
            double th = 2.0 * kPi * j / n;
            cplx zeta1 = center + radius * cplx(std::cos(th), std::sin(th));
            auto seg = integrate_segment(f, zeta0, zeta1, seg_tol);
            v += seg.value;
            budget += seg.error;
            min_dist = std::min(min_dist, std::abs(v));
            arg_sum += std::arg(v / vprev);
            vprev = v;
            zeta0 = zeta1;
        }
        if (min_dist < 10.0 * budget)
            throw WindingError("count_preimages: image loop passes too close to the target");
        double turns = arg_sum / (2.0 * kPi);
        int wind = static_cast<int>(std::lround(turns));
        if (std::abs(turns - wind) > 1e-3) {
            prev.reset();
            continue; // not integral yet; refine
        }
        if (prev && *prev == wind) return wind;
        prev = wind;
    }
    throw WindingError("count_preimages: winding did not stabilize");
}

/* ---- Tree-scale machinery: differences of G evaluated in local frames,
 * so deep-level structure keeps full relative precision. ---- */

/* Difference evaluator over a built construction: all integrals run in
 * coordinates relative to a chosen anchor node, with the interval tree
 * expressed through exact relative differences. */
class TreeGEval {
  public:
    TreeGEval(const SeedFunction& seed, const ConstructionState& st, const SeedConstants& sc)
        : seed_(seed), st_(st), sc_(sc) {}

    const ConstructionState& state() const { return st_; }
    const SeedConstants& constants() const { return sc_; }

    /* Sets the frame: offsets are measured from the anchor point, and the
     * interval list covers every built node. */
    void anchor(const NodeIndex& k, PointKind kind) {
        frame_ = FramePoisson(st_.endpoint_guard());
        double b1 = st_.params().beta1;
        st_.for_each_node([&](const NodeIndex& m) {
            double d = st_.point_diff(m, PointKind::kCenter, k, kind);
            double s = st_.scale(m.level());
            frame_.add(d, -s, -b1 * s);
            frame_.add(d, b1 * s, s);
        });
    }

    cplx integrand(cplx zeta) const {
        cplx w = frame_.P(zeta);
        cplx v = strip_gprime(seed_, w);
        double a = std::abs(v);
        if (a < sc_.m * (1.0 - 1e-6) || a > sc_.M * (1.0 + 1e-6))
            throw SeedError("TreeGEval: integrand left the annulus");
        return v;
    }

    /* Integral of G' along the polyline (frame coordinates). */
    cplx along(const std::vector<cplx>& path, double abs_tol) const {
        auto f = [this](cplx z) { return integrand(z); };
        return integrate_polyline(f, path, abs_tol).value;
    }

    /* Integral along a vertical leg from base (on or near the real axis)
     * up to base + i*t_hi.  The stub below t_cut is bounded by M*t_cut and
     * absorbed into the budget; decades above it resolve the log scales. */
    cplx vertical(cplx base, double t_hi, double abs_tol) const {
        double t_cut = std::min(t_hi / 16.0, abs_tol * 0.25 / sc_.M);
        auto f = [this](cplx z) { return integrand(z); };
        cplx main = integrate_vertical_decades(f, base, t_cut, t_hi, abs_tol * 0.5).value;
        // stub contribution approximated at its midpoint
        cplx stub = f(base + cplx(0.0, t_cut * 0.5)) * cplx(0.0, t_cut);
        return main + stub;
    }

    /* Integral along a path whose first leg rises vertically off the real
     * axis; that leg goes through vertical(), the rest through along(). */
    cplx along_from_axis(const std::vector<cplx>& path, double abs_tol) const {
        if (path.size() < 2 || path[0].imag() != 0.0 || path[1].real() != path[0].real() ||
            !(path[1].imag() > 0.0))
            throw ConstraintError("along_from_axis: first leg must rise vertically from the axis");
        cplx head = vertical(path[0], path[1].imag(), abs_tol * 0.5);
        if (path.size() == 2) return head;
        std::vector<cplx> rest(path.begin() + 1, path.end());
        return head + along(rest, abs_tol * 0.5);
    }

  private:
    const SeedFunction& seed_;
    const ConstructionState& st_;
    const SeedConstants& sc_;
    FramePoisson frame_;
};

struct BilipschitzReport {
    double lower_bound = 0.0; // |b0|/8
    double upper_bound = 0.0; // M
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double max_budget = 0.0;       // max over pairs of 2*tol_i/|dx_i|
    double worst_lower_slack = 0.0; // min_i pair slack against lower bound
    double worst_upper_slack = 0.0; // min_i pair slack against upper bound
    std::size_t pairs = 0;
    std::size_t violations = 0;
    bool pass = false;
};

/* Bi-Lipschitz check on endpoint pairs of level-`level` intervals of the
 * construction: |G(x1) - G(x2)| / |x1 - x2| must land in
 * [|b0|/8 - budget, M + budget], budget = 2*quadrature_tol/|x1 - x2|.
 * G differences ride a lifted path of height T*eta*|x1 - x2|, where the
 * integrand is uniformly close to b0. */
inline BilipschitzReport check_bilipschitz(const SeedFunction& seed, const ConstructionState& st,
                                           int level, const SeedConstants& sc, std::size_t pairs,
                                           std::uint64_t rng_seed = 1) {
    if (!(st.params().eps <= sc.eta / (2.0 * kPi)))
        throw ConstraintError("check_bilipschitz: requires eps <= eta/(2*pi)");
    if (level < 1 || level > st.depth())
        throw ConstraintError("check_bilipschitz: level out of range");

    auto nodes = st.level_nodes(level);
    std::size_t n = nodes.size();
    if (n < 2) throw ConstraintError("check_bilipschitz: need at least two intervals");

    TreeGEval ge(seed, st, sc);
    double ab0 = std::abs(sc.b0);
    BilipschitzReport rep;
    rep.lower_bound = ab0 / 8.0;
    rep.upper_bound = sc.M;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    rep.max_ratio = 0.0;
    rep.worst_lower_slack = std::numeric_limits<double>::infinity();
    rep.worst_upper_slack = std::numeric_limits<double>::infinity();

    HaltonStream hs(rng_seed);
    double s = st.scale(level);
    for (std::size_t t = 0; t < pairs; ++t) {
        double u, v;
        hs.pair(2 * t, u, v);
        double u2, v2;
        hs.pair(2 * t + 1, u2, v2);
        std::size_t i1 = std::min<std::size_t>(n - 1, static_cast<std::size_t>(u * n));
        std::size_t i2 = std::min<std::size_t>(n - 2, static_cast<std::size_t>(v * (n - 1)));
        if (i2 >= i1) ++i2; // distinct intervals
        double side1 = (u2 < 0.5) ? -1.0 : 1.0;
        double side2 = (v2 < 0.5) ? -1.0 : 1.0;

        // frame anchored at the first node's center
        ge.anchor(nodes[i1], PointKind::kCenter);
        double e1 = side1 * s; // endpoint of J(i1), relative
        double e2 = st.point_diff(nodes[i2], PointKind::kCenter, nodes[i1], PointKind::kCenter) +
                    side2 * s;
        double dx = std::abs(e1 - e2);
        if (!(dx > 0.0)) continue;

        double h = sc.T * sc.eta * dx;
        double tol_pair = 1e-4 * ab0 * dx;
        cplx up1 = ge.vertical(cplx(e2, 0.0), h, tol_pair * 0.25);
        cplx up2 = ge.vertical(cplx(e1, 0.0), h, tol_pair * 0.25);
        cplx across = ge.along({cplx(e2, h), cplx(e1, h)}, tol_pair * 0.5);
        cplx dG = up1 + across - up2; // G(e1) - G(e2)

        double ratio = std::abs(dG) / dx;
        double budget = 2.0 * tol_pair / dx;
        rep.min_ratio = std::min(rep.min_ratio, ratio);
        rep.max_ratio = std::max(rep.max_ratio, ratio);
        rep.max_budget = std::max(rep.max_budget, budget);
        double lo_slack = ratio - (rep.lower_bound - budget);
        double hi_slack = (rep.upper_bound + budget) - ratio;
        rep.worst_lower_slack = std::min(rep.worst_lower_slack, lo_slack);
        rep.worst_upper_slack = std::min(rep.worst_upper_slack, hi_slack);
        if (lo_slack <= 0.0 || hi_slack <= 0.0) ++rep.violations;
        ++rep.pairs;
    }
    rep.pass = rep.pairs > 0 && rep.violations == 0;
    return rep;
}

struct ValenceDisk {
    std::string node;      // ancestor whose scaled disk this is
    cplx center;           // absolute (rounded, informational)
    double radius;
    int winding = 0;
    double min_loop_dist = 0.0;
    std::vector<int> univalence_windings; // interior spot-check targets
    std::vector<cplx> loop; // image samples of the circle, relative to the target value
};

struct ValenceReport {
    std::string node;  // the deep node whose gap root is the target
    cplx target_w{0.0, 0.0};
    std::vector<ValenceDisk> disks;
    int total_preimages = 0;
    bool disjoint = false;
    bool pass = false;
};

namespace detail {

/* Winding of the image under G of the circle (frame coords) around the
 * value G(target) where target is reachable by the given approach path;
 * everything is evaluated relative to the frame anchor. */
struct LoopOutcome {
    int winding = 0;
    double min_dist = 0.0;
    bool integral = false;
    std::vector<cplx> loop; // image samples relative to w (for svg/export)
    std::vector<int> spot_windings;
};

inline LoopOutcome frame_loop_winding(const TreeGEval& ge, cplx circle_center, double radius,
                                      const std::vector<cplx>& v0_path,
                                      const std::vector<cplx>& spot_targets,
                                      std::size_t start_points) {
    LoopOutcome out;
    auto f = [&ge](cplx z) { return ge.integrand(z); };
    double mag = 0.0;
    for (int k = 0; k < 8; ++k) {
        double th = 2.0 * kPi * k / 8.0;
        mag = std::max(mag, std::abs(f(circle_center + radius * cplx(std::cos(th), std::sin(th)))));
    }
    std::optional<int> prevw;
    for (std::size_t n = start_points; n <= (std::size_t{1} << 16); n *= 2) {
        double seg_tol = std::max(1e-300, mag * (2.0 * kPi * radius / n) * 1e-7);
        // v0: from the target to the first circle point
        cplx v = 0.0;
        {
            std::vector<cplx> path = v0_path;
            path.push_back(circle_center + cplx(radius, 0.0));
            v = ge.along_from_axis(path, seg_tol * 8.0);
        }
        double budget = seg_tol * 8.0;
        double min_dist = std::abs(v);
        double arg_sum = 0.0;
        std::vector<double> spot_args(spot_targets.size(), 0.0);
        cplx vprev = v;
        std::vector<cplx> loop;
        loop.reserve(n + 1);
        loop.push_back(v);
        cplx zeta0 = circle_center + cplx(radius, 0.0);
        for (std::size_t j = 1; j <= n; ++j) {
            double th = 2.0 * kPi * j / n;
            cplx zeta1 = circle_center + radius * cplx(std::cos(th), std::sin(th));
            auto seg = integrate_segment(f, zeta0, zeta1, seg_tol);
            v += seg.value;
            budget += seg.error;
            min_dist = std::min(min_dist, std::abs(v));
            arg_sum += std::arg(v / vprev);
            for (std::size_t si = 0; si < spot_targets.size(); ++si) {
                cplx a = loop.back() - spot_targets[si];
                cplx b = v - spot_targets[si];
                spot_args[si] += std::arg(b / a);
            }
            loop.push_back(v);
            vprev = v;
            zeta0 = zeta1;
        }
        if (min_dist < 10.0 * budget)
            throw WindingError("valence loop passes too close to the target value");
        double turns = arg_sum / (2.0 * kPi);
        int wind = static_cast<int>(std::lround(turns));
        bool integral = std::abs(turns - wind) <= 1e-3;
        if (integral && prevw && *prevw == wind) {
            out.winding = wind;
            out.min_dist = min_dist;
            out.integral = true;
            out.loop = std::move(loop);
            for (double sa : spot_args)
                out.spot_windings.push_back(static_cast<int>(std::lround(sa / (2.0 * kPi))));
            return out;
        }
        prevw = integral ? std::optional<int>(wind) : std::nullopt;
    }
    throw WindingError("valence loop winding did not stabilize");
}

} // namespace detail

/* The multivalence demonstration: takes the gap root x* of a depth-level
 * node, and for each ancestor level i the scaled disk
 * gamma'_i * D(z_beta1, rho) + c(ancestor_i).  Every disk must contain at
 * least one G-preimage of G(x*) (winding >= 1), the disks are pairwise
 * disjoint, and one disk per level gets a 5-point interior univalence
 * spot-check (winding exactly 1). */
inline ValenceReport valence_demo(const SeedFunction& seed, const ConstructionState& st,
                                  const SeedConstants& sc, int depth,
                                  std::size_t start_points = 512) {
    if (depth < 1 || depth > st.depth())
        throw ConstraintError("valence_demo: depth out of range");
    double beta1 = st.params().beta1;
    if (!(beta1 <= sc.beta1_rec() * 4.0 + 1e-300))
        throw ConstraintError("valence_demo: state beta1 exceeds the certified range");

    cplx zb = zbeta_at(seed, sc, beta1);
    double rho = sc.rho();

    // deep node: middle branch at every level
    NodeIndex deep;
    for (int l = 0; l < depth; ++l) deep.idx.push_back(std::max(1, (st.params().N - 1) / 2));

    ValenceReport rep;
    rep.node = deep.str();

    TreeGEval ge(seed, st, sc);
    std::vector<double> radii;
    bool all_wound = true;

    for (int i = 1; i <= depth; ++i) {
        NodeIndex anc = deep.prefix(i);
        double gp = st.scale(i); // gamma'_i = (alpha/2) gamma^(i-1)
        // frame anchored at this level's ancestor center, so the disk and
        // the target offset share one scale and stay fully resolved
        ge.anchor(anc, PointKind::kCenter);
        double w_rel = st.point_diff(deep, PointKind::kRoot, anc, PointKind::kCenter);
        cplx circle_center = gp * zb;
        double radius = gp * rho;

        // approach path: x* up to the disk height, then to its center
        std::vector<cplx> v0_path{cplx(w_rel, 0.0), cplx(w_rel, circle_center.imag()),
                                  circle_center};
        // spot tolerance rides the integrand magnitude on the circle, the
        // same scale the loop segments use
        double mag0 = 0.0;
        for (int k = 0; k < 8; ++k) {
            double th = 2.0 * kPi * k / 8.0;
            mag0 = std::max(
                mag0, std::abs(ge.integrand(circle_center +
                                            radius * cplx(std::cos(th), std::sin(th)))));
        }
        // spot-check targets: G-images of interior points, relative to w
        std::vector<cplx> spots;
        for (int k = 0; k < 5; ++k) {
            double th = 2.0 * kPi * k / 5.0;
            cplx tpt = circle_center + 0.3 * radius * cplx(std::cos(th), std::sin(th));
            std::vector<cplx> path{cplx(w_rel, 0.0), cplx(w_rel, tpt.imag()), tpt};
            spots.push_back(ge.along_from_axis(path, mag0 * radius * 1e-7 + 1e-300));
        }
        auto out = detail::frame_loop_winding(ge, circle_center, radius, v0_path, spots,
                                              start_points);
        ValenceDisk disk;
        disk.node = anc.str();
        disk.center = cplx(st.center_abs(anc), 0.0) + gp * zb;
        disk.radius = radius;
        disk.winding = out.winding;
        disk.min_loop_dist = out.min_dist;
        disk.univalence_windings = out.spot_windings;
        disk.loop = std::move(out.loop);
        rep.disks.push_back(disk);
        rep.total_preimages += std::max(0, out.winding);
        if (out.winding < 1) all_wound = false;
        radii.push_back(radius);
    }

    // exact pairwise disjointness through relative center differences
    rep.disjoint = true;
    for (int i = 1; i <= depth; ++i) {
        for (int j = i + 1; j <= depth; ++j) {
            NodeIndex ai = deep.prefix(i), aj = deep.prefix(j);
            double dc = st.point_diff(ai, PointKind::kCenter, aj, PointKind::kCenter);
            cplx sep = cplx(dc, 0.0) + zb * (st.scale(i) - st.scale(j));
            if (!(std::abs(sep) > radii[static_cast<std::size_t>(i - 1)] +
                                      radii[static_cast<std::size_t>(j - 1)]))
                rep.disjoint = false;
        }
    }

    rep.target_w = cplx(0.0, 0.0); // differences are anchored at G(x*) itself
    rep.pass = all_wound && rep.disjoint && rep.total_preimages >= depth;
    return rep;
}

inline void to_json(nlohmann::json& j, const ValenceDisk& d) {
    j = {{"node", d.node},
         {"center", {d.center.real(), d.center.imag()}},
         {"radius", d.radius},
         {"winding", d.winding},
         {"min_loop_dist", d.min_loop_dist},
         {"univalence_windings", d.univalence_windings}};
}

inline void to_json(nlohmann::json& j, const ValenceReport& r) {
    j = {{"node", r.node},
         {"target_w", {r.target_w.real(), r.target_w.imag()}},
         {"disks", r.disks},
         {"total_preimages", r.total_preimages},
         {"disjoint", r.disjoint},
         {"pass", r.pass}};
}

inline void to_json(nlohmann::json& j, const BilipschitzReport& r) {
    j = {{"lower_bound", r.lower_bound},
         {"upper_bound", r.upper_bound},
         {"min_ratio", r.min_ratio},
         {"max_ratio", r.max_ratio},
         {"max_budget", r.max_budget},
         {"worst_lower_slack", r.worst_lower_slack},
         {"worst_upper_slack", r.worst_upper_slack},
         {"pairs", r.pairs},
         {"violations", r.violations},
         {"pass", r.pass}};
}

} // namespace vforge
