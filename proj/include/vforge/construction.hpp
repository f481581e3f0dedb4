#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "vforge/errors.hpp"
#include "vforge/interval_set.hpp"
#include "vforge/parallel.hpp"
#include "vforge/poisson.hpp"
#include "vforge/sampling.hpp"

namespace vforge {

/* Tree node address: index sequence with entries in [1, N-1]; the empty
 * sequence is the root.  String form joins entries with '.', e.g. "2.3.1". */
struct NodeIndex {
    std::vector<int> idx;

    int level() const { return static_cast<int>(idx.size()); }
    bool is_root() const { return idx.empty(); }

    NodeIndex parent() const {
        if (is_root()) throw ConstraintError("root has no parent");
        return {std::vector<int>(idx.begin(), idx.end() - 1)};
    }

    NodeIndex child(int j) const {
        NodeIndex c = *this;
        c.idx.push_back(j);
        return c;
    }

    NodeIndex prefix(int len) const {
        return {std::vector<int>(idx.begin(), idx.begin() + len)};
    }

    bool is_prefix_of(const NodeIndex& other) const {
        if (level() > other.level()) return false;
        return std::equal(idx.begin(), idx.end(), other.idx.begin());
    }

    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (i) s += '.';
            s += std::to_string(idx[i]);
        }
        return s;
    }

    static NodeIndex parse(const std::string& s) {
        NodeIndex k;
        if (s.empty()) return k;
        std::size_t pos = 0;
        while (pos < s.size()) {
            std::size_t dot = s.find('.', pos);
            if (dot == std::string::npos) dot = s.size();
            k.idx.push_back(std::stoi(s.substr(pos, dot - pos)));
            pos = dot + 1;
        }
        return k;
    }

    bool operator==(const NodeIndex&) const = default;
};

struct ConstructionParams {
    int N = 5;
    double eps = 1.0 / 128.0;
    double beta1 = 1.0 / 128.0;
    double gamma1 = (1.0 / 128.0) * (1.0 / 128.0) / 2.0;
    double alpha = 0.0; // eps / (N (1 + log N))
    double gamma = 0.0; // gamma1 * alpha / 2
};

/* An interval list expressed relative to an anchor point.  Each component
 * keeps a coarse offset plus exact local endpoints, so an interval far
 * narrower than the ulp of its distance never collapses.  The guard scale
 * defaults to the kernel's; frames whose local endpoints are exact may
 * declare a tighter one (gaps of width beta1 << guard are still usable). */
class FramePoisson {
  public:
    struct Comp {
        double off;    // coarse offset of the component from the anchor
        double lo, hi; // exact endpoints relative to off, lo < hi
    };

    explicit FramePoisson(double guard_scale = kEndpointGuard) : guard_scale_(guard_scale) {}

    void add(double off, double lo, double hi) { comps_.push_back({off, lo, hi}); }
    const std::vector<Comp>& comps() const { return comps_; }
    double guard_scale() const { return guard_scale_; }

    cplx P(cplx zeta) const {
        CompensatedSum acc;
        for (const auto& c : comps_)
            acc.add(poisson_interval(c.lo, c.hi, zeta - c.off, guard_scale_));
        return acc.value();
    }

    cplx dP(cplx zeta) const {
        CompensatedSum acc;
        for (const auto& c : comps_)
            acc.add(poisson_deriv_interval(c.lo, c.hi, zeta - c.off, guard_scale_));
        return acc.value();
    }

    /* True if zeta falls within any component's endpoint guard radius. */
    bool within_guard(cplx zeta) const {
        for (const auto& c : comps_) {
            double g = guard_scale_ * (c.hi - c.lo);
            cplx zr = zeta - c.off;
            if (std::abs(zr - cplx(c.lo, 0.0)) <= g) return true;
            if (std::abs(zr - cplx(c.hi, 0.0)) <= g) return true;
        }
        return false;
    }

  private:
    std::vector<Comp> comps_;
    double guard_scale_ = kEndpointGuard;
};

namespace detail {

/* Worst-placement probes for the smallness condition on gamma1: mass
 * gamma1 pushed against the edges of (-beta1/2, beta1/2) comes closest to
 * the evaluation region.  Offsets keep the probes exact when gamma1 sits
 * far below the ulp of beta1. */
inline std::vector<FramePoisson> gamma1_probe_frames(double beta1, double gamma1) {
    double h = beta1 / 2.0;
    std::vector<FramePoisson> out(4);
    out[0].add(h, -gamma1, 0.0);
    out[1].add(-h, 0.0, gamma1);
    out[2].add(0.0, -gamma1 / 2.0, gamma1 / 2.0);
    out[3].add(-h, 0.0, gamma1 / 2.0);
    out[3].add(h, -gamma1 / 2.0, 0.0);
    return out;
}

} // namespace detail

/* Validates (N, eps, beta1, gamma1), derives alpha and gamma, and verifies
 * by sampling that sets of measure <= gamma1 inside (-beta1/2, beta1/2)
 * keep |P| below eps on the closed half-annulus between |z| = beta1 and
 * |z| = 1.  Error messages name the violated inequality. */
inline ConstructionParams derive_params(int N, double eps, double beta1, double gamma1) {
    if (N < 3) throw ConstraintError("N >= 3 violated");
    if (!(eps > 0.0) || !(eps < 0.01)) throw ConstraintError("eps < 1/100 violated");
    if (!(beta1 > 0.0) || !(beta1 < 0.01)) throw ConstraintError("beta1 < 1/100 violated");
    if (!(gamma1 > 0.0) || !(gamma1 < eps * beta1))
        throw ConstraintError("gamma1 < eps*beta1 violated");

    ConstructionParams p;
    p.N = N;
    p.eps = eps;
    p.beta1 = beta1;
    p.gamma1 = gamma1;
    p.alpha = eps / (N * (1.0 + std::log(static_cast<double>(N))));
    p.gamma = gamma1 * p.alpha / 2.0;

    HaltonStream hs(7);
    double worst = 0.0;
    for (const auto& U : detail::gamma1_probe_frames(beta1, gamma1)) {
        for (std::size_t j = 0; j < 64; ++j) {
            cplx zi = sample_half_annulus(hs, j, 0.0, beta1, 1.0);
            cplx zb = sample_half_annulus_boundary(hs, j + 64, 0.0, beta1, 1.0);
            worst = std::max(worst, std::abs(U.P(zi)));
            worst = std::max(worst, std::abs(U.P(zb)));
        }
        for (double x : {beta1, -beta1, 1.0, -1.0})
            worst = std::max(worst, std::abs(U.P(cplx(x, 0.0))));
    }
    if (!(worst < eps)) throw ConstraintError("gamma1 smallness condition violated");
    return p;
}

/* Per-node data, stored relative to the parent so deep levels keep full
 * precision: rel_c = c(k) - x(parent), dx = x(k) - c(k). */
struct NodeRec {
    double rel_c = 0.0;
    double dx = 0.0;
    double resid = 0.0; // |Im P| at the accepted root
};

enum class PointKind { kCenter, kRoot };

/* Which intervals a tree evaluation sums over, relative to a node k. */
enum class SetSelect {
    kRestrictedAll,  // I(m), L(m) <= L(k), including k
    kRestrictedExcl, // I(m), L(m) <= L(k), m != k
    kAllExcl,        // I(m), all built levels, m != k
    kSiblingsJ,      // J(m), same parent, m != k
    kCousinsJ,       // J(m), L(m) = L(k), m != k
    kDescendantsI,   // I(m), strict descendants of k
    kAncestorsSelfI, // I(m), prefixes of k including k
};

class ConstructionState {
  public:
    ConstructionState() = default;
    ConstructionState(ConstructionParams params, int depth)
        : params_(params), depth_(depth), levels_(depth) {
        int width = params_.N - 1;
        std::size_t count = 1;
        for (int l = 1; l <= depth; ++l) {
            count *= static_cast<std::size_t>(width);
            levels_[l - 1].resize(count);
        }
    }

    const ConstructionParams& params() const { return params_; }
    int depth() const { return depth_; }

    std::size_t level_count(int l) const { return levels_.at(l - 1).size(); }

    /* Half-width of J at level l: s_l = (alpha/2) gamma^(l-1). */
    double scale(int l) const {
        return (params_.alpha / 2.0) * std::pow(params_.gamma, l - 1);
    }

    std::size_t flat_index(const NodeIndex& k) const {
        int w = params_.N - 1;
        std::size_t f = 0;
        for (int v : k.idx) {
            if (v < 1 || v > w) throw ConstraintError("node index entry out of range");
            f = f * static_cast<std::size_t>(w) + static_cast<std::size_t>(v - 1);
        }
        return f;
    }

    NodeRec& rec(const NodeIndex& k) { return levels_.at(k.level() - 1).at(flat_index(k)); }
    const NodeRec& rec(const NodeIndex& k) const {
        return levels_.at(k.level() - 1).at(flat_index(k));
    }

    /* rel_c by the template rule: level 1 uses j/N, deeper levels use
     * (j/N - 1/2) gamma^(l-1). */
    double template_rel_c(const NodeIndex& k) const {
        int l = k.level();
        int j = k.idx.back();
        double jn = static_cast<double>(j) / params_.N;
        if (l == 1) return jn;
        return (jn - 0.5) * std::pow(params_.gamma, l - 1);
    }

    /* Exact difference (point of a) - (point of b), where a point is
     * either c(k) or x(k).  Shared-prefix terms cancel identically and the
     * rest is summed smallest-first with compensation, so differences
     * between nearby deep nodes keep full relative precision. */
    double point_diff(const NodeIndex& a, PointKind ka, const NodeIndex& b, PointKind kb) const {
        std::vector<double> terms;
        collect_terms(a, ka, +1.0, terms);
        collect_terms(b, kb, -1.0, terms);
        // cancel exact +t/-t pairs (identical shared-prefix contributions)
        std::sort(terms.begin(), terms.end(),
                  [](double u, double v) { return std::abs(u) < std::abs(v); });
        std::vector<double> kept;
        kept.reserve(terms.size());
        for (double t : terms) {
            if (!kept.empty() && kept.back() == -t) kept.pop_back();
            else kept.push_back(t);
        }
        double sum = 0.0, carry = 0.0;
        for (double t : kept) {
            double y = t - carry;
            double u = sum + y;
            carry = (u - sum) - y;
            sum = u;
        }
        return sum;
    }

    /* Absolute coordinates (rounded; exact structure lives in the diffs).
     * The root contributes no terms, so its point kind is irrelevant. */
    double center_abs(const NodeIndex& k) const {
        return point_diff(k, PointKind::kCenter, NodeIndex{}, PointKind::kRoot);
    }
    double root_abs(const NodeIndex& k) const {
        return point_diff(k, PointKind::kRoot, NodeIndex{}, PointKind::kRoot);
    }

    /* Guard scale for frames of this construction.  The root solver and
     * the gap evaluations keep a relative separation of at least
     * ~1e-9 * beta1 from the inner endpoints, so when beta1 drops below
     * the kernel default the guard tightens proportionally; the frame
     * endpoints are exact, so those evaluations lose no accuracy. */
    double endpoint_guard() const { return std::min(kEndpointGuard, params_.beta1 * 1e-11); }

    /* Builds the interval list of the selected node set, relative to the
     * anchor point of node `anchor`. */
    FramePoisson frame(const NodeIndex& anchor, PointKind anchor_kind, SetSelect sel) const {
        FramePoisson f(endpoint_guard());
        double b1 = params_.beta1;
        int kl = anchor.level();
        for_each_node([&](const NodeIndex& m) {
            int ml = m.level();
            bool use_I = true;
            switch (sel) {
            case SetSelect::kRestrictedAll:
                if (ml > kl) return;
                break;
            case SetSelect::kRestrictedExcl:
                if (ml > kl || m == anchor) return;
                break;
            case SetSelect::kAllExcl:
                if (m == anchor) return;
                break;
            case SetSelect::kSiblingsJ:
                if (ml != kl || m == anchor) return;
                if (kl >= 1 && !(m.parent() == anchor.parent())) return;
                use_I = false;
                break;
            case SetSelect::kCousinsJ:
                if (ml != kl || m == anchor) return;
                use_I = false;
                break;
            case SetSelect::kDescendantsI:
                if (!(anchor.is_prefix_of(m)) || m == anchor) return;
                break;
            case SetSelect::kAncestorsSelfI:
                if (!(m.is_prefix_of(anchor))) return;
                break;
            }
            double d = point_diff(m, PointKind::kCenter, anchor, anchor_kind);
            double s = scale(ml);
            if (use_I) {
                f.add(d, -s, -b1 * s);
                f.add(d, b1 * s, s);
            } else {
                f.add(d, -s, s);
            }
        });
        return f;
    }

    template <class F>
    void for_each_node(F&& fn) const {
        NodeIndex k;
        walk(k, fn);
    }

    /* Enumerates nodes of one level in lexicographic order. */
    std::vector<NodeIndex> level_nodes(int l) const {
        std::vector<NodeIndex> out;
        out.reserve(level_count(l));
        NodeIndex k;
        collect_level(k, l, out);
        return out;
    }

    /* J/B/I of a node in absolute coordinates (informational; degenerate
     * below the ulp of the absolute position). */
    Interval J_abs(const NodeIndex& k) const {
        double c = center_abs(k), s = scale(k.level());
        return {c - s, c + s};
    }
    Interval B_abs(const NodeIndex& k) const {
        double c = center_abs(k), s = scale(k.level());
        return {c - params_.beta1 * s, c + params_.beta1 * s};
    }
    std::vector<Interval> I_abs(const NodeIndex& k) const {
        double c = center_abs(k), s = scale(k.level());
        double b = params_.beta1;
        return {{c - s, c - b * s}, {c + b * s, c + s}};
    }

    /* Union of I(m) over all built nodes, in absolute coordinates.  Valid
     * only while distinct at double precision (shallow constructions). */
    IntervalSet to_interval_set() const {
        IntervalSet X;
        for_each_node([&](const NodeIndex& m) {
            for (const auto& iv : I_abs(m)) X.append_unchecked(iv);
        });
        X.finalize_sorted();
        return X;
    }

  private:
    void collect_terms(const NodeIndex& k, PointKind kind, double sign,
                       std::vector<double>& out) const {
        int L = k.level();
        for (int j = 1; j <= L; ++j) {
            NodeIndex p = k.prefix(j);
            const NodeRec& r = rec(p);
            out.push_back(sign * r.rel_c);
            bool include_dx = (j < L) || kind == PointKind::kRoot;
            if (include_dx) out.push_back(sign * r.dx);
        }
    }

    template <class F>
    void walk(NodeIndex& k, F&& fn) const {
        if (k.level() > 0) fn(k);
        if (k.level() >= depth_) return;
        for (int j = 1; j <= params_.N - 1; ++j) {
            k.idx.push_back(j);
            walk(k, fn);
            k.idx.pop_back();
        }
    }

    void collect_level(NodeIndex& k, int l, std::vector<NodeIndex>& out) const {
        if (k.level() == l) {
            out.push_back(k);
            return;
        }
        for (int j = 1; j <= params_.N - 1; ++j) {
            k.idx.push_back(j);
            collect_level(k, l, out);
            k.idx.pop_back();
        }
    }

    ConstructionParams params_;
    int depth_ = 0;
    std::vector<std::vector<NodeRec>> levels_;

    friend void to_json(nlohmann::json&, const ConstructionState&);
    friend void from_json(const nlohmann::json&, ConstructionState&);
};

/* Finds the root of Im P(X_restricted, .) = 0 inside the gap of node k by
 * bisection.  The bracket is c(k) +- (alpha beta1 / 8) gamma^(l-1), widened
 * once by a factor of 4 if the sign change is not yet inside.  Returns the
 * offset x(k) - c(k). */
inline double solve_center_root(const ConstructionState& st, const NodeIndex& k,
                                double tol = 1e-12) {
    const auto& p = st.params();
    int l = k.level();
    double r8 = (p.alpha * p.beta1 / 8.0) * std::pow(p.gamma, l - 1);
    FramePoisson f = st.frame(k, PointKind::kCenter, SetSelect::kRestrictedAll);
    auto im_p = [&](double u) { return f.P(cplx(u, 0.0)).imag(); };

    double lo = -r8, hi = r8;
    double flo = im_p(lo), fhi = im_p(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) {
        // widen once to the full gap half-width, nudged inward since the
        // field has branch points exactly at the gap edges 4*r8
        lo = -4.0 * (1.0 - 1e-9) * r8;
        hi = 4.0 * (1.0 - 1e-9) * r8;
        flo = im_p(lo);
        fhi = im_p(hi);
        if (flo * fhi > 0.0)
            throw RootFindError("solve_center_root: no sign change in bracket");
    }
    double mid = 0.0, fmid = 0.0;
    for (int it = 0; it < 400; ++it) {
        mid = 0.5 * (lo + hi);
        fmid = im_p(mid);
        if (std::abs(fmid) < tol) return mid;
        if (mid == lo || mid == hi) break; // bracket exhausted at double precision
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    throw RootFindError("solve_center_root: tolerance not reached");
}

/* Builds the nested construction to the given depth.  Level l interval
 * positions depend only on roots of level l-1, so each level's roots are
 * independent and are solved in parallel. */
inline ConstructionState build_construction(const ConstructionParams& params, int depth,
                                            double tol = 1e-12) {
    if (depth < 1) throw ConstraintError("depth >= 1 violated");
    double deepest = params.alpha * std::pow(params.gamma, depth - 1);
    if (!(deepest > 1e-300))
        throw ConstraintError("scale underflow: alpha * gamma^(depth-1) <= 1e-300");

    ConstructionState st(params, depth);
    for (int l = 1; l <= depth; ++l) {
        auto nodes = st.level_nodes(l);
        for (const auto& k : nodes) st.rec(k).rel_c = st.template_rel_c(k);
        std::vector<double> dx(nodes.size()), resid(nodes.size());
        parallel_for(nodes.size(), [&](std::size_t i) {
            double u = solve_center_root(st, nodes[i], tol);
            FramePoisson f = st.frame(nodes[i], PointKind::kCenter, SetSelect::kRestrictedAll);
            dx[i] = u;
            resid[i] = std::abs(f.P(cplx(u, 0.0)).imag());
        });
        double cap = 7.0 * params.eps * params.alpha * params.beta1 * std::pow(params.gamma, l - 1);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (!(std::abs(dx[i]) < cap))
                throw ConstraintError("root drift exceeds 7*eps*alpha*beta1*gamma^(l-1)");
            st.rec(nodes[i]).dx = dx[i];
            st.rec(nodes[i]).resid = resid[i];
        }
        /* Nesting: every child J must sit inside the parent gap B. */
        if (l >= 2) {
            for (const auto& k : nodes) {
                double off = st.point_diff(k, PointKind::kCenter, k.parent(), PointKind::kCenter);
                double sl = st.scale(l);
                double bp = params.beta1 * st.scale(l - 1);
                if (!(std::abs(off) + sl < bp))
                    throw ConstraintError("nesting violated: closure(J(child)) not inside B(parent)");
            }
        }
        /* Sibling J's (hence I's) are pairwise disjoint: adjacent template
         * centers are gamma^(l-1)/N apart, widths are alpha*gamma^(l-1). */
        double spacing = (l == 1 ? 1.0 : std::pow(params.gamma, l - 1)) / params.N;
        if (!(spacing > 2.0 * st.scale(l)))
            throw ConstraintError("sibling intervals are not disjoint");
    }
    return st;
}

/* Queries on the abstract index tree (no state needed). */
inline std::vector<NodeIndex> node_relatives(const NodeIndex& k, int N, const std::string& query) {
    if (N < 3) throw ConstraintError("N >= 3 violated");
    int w = N - 1;
    auto level_set = [&](int l) {
        std::vector<NodeIndex> out;
        std::vector<int> stack;
        // iterative odometer over l digits in [1, w]
        if (l == 0) {
            out.push_back(NodeIndex{});
            return out;
        }
        std::vector<int> d(l, 1);
        for (;;) {
            out.push_back(NodeIndex{d});
            int i = l - 1;
            while (i >= 0 && d[i] == w) {
                d[i] = 1;
                --i;
            }
            if (i < 0) break;
            ++d[i];
        }
        return out;
    };
    if (query == "parent") return {k.parent()};
    if (query == "ancestors") {
        std::vector<NodeIndex> out;
        for (int j = k.level() - 1; j >= 1; --j) out.push_back(k.prefix(j));
        return out;
    }
    if (query == "siblings") {
        if (k.is_root()) return {};
        std::vector<NodeIndex> out;
        for (int j = 1; j <= w; ++j)
            if (j != k.idx.back()) out.push_back(k.parent().child(j));
        return out;
    }
    if (query == "cousins") {
        std::vector<NodeIndex> out;
        for (auto& m : level_set(k.level()))
            if (!(m == k)) out.push_back(m);
        return out;
    }
    if (query == "restricted-tree") {
        std::vector<NodeIndex> out;
        for (int l = 1; l <= k.level(); ++l)
            for (auto& m : level_set(l)) out.push_back(m);
        return out;
    }
    throw ConstraintError("node_relatives: unknown query '" + query + "'");
}

/* Classical Cantor-type set: level m has (N-1)^m closed intervals of
 * length (alpha/N)^m; children are centered at the j/N points of their
 * parent interval. */
inline std::vector<IntervalSet> classical_cantor(int N, double alpha, int depth) {
    if (N < 3) throw ConstraintError("N >= 3 violated");
    if (!(alpha > 0.0) || alpha > 1.0) throw ConstraintError("0 < alpha <= 1 violated");
    if (depth < 1) throw ConstraintError("depth >= 1 violated");
    if (!(std::pow(alpha / N, depth) > 1e-300))
        throw ConstraintError("scale underflow: (alpha/N)^depth <= 1e-300");

    std::vector<IntervalSet> out;
    std::vector<Interval> cur{{0.0, 1.0}};
    double half = alpha / 2.0;
    for (int m = 1; m <= depth; ++m) {
        std::vector<Interval> next;
        next.reserve(cur.size() * (N - 1));
        for (const auto& iv : cur) {
            double len = iv.length();
            for (int j = 1; j <= N - 1; ++j) {
                /* adjacent boundaries share one expression, so siblings
                 * stay disjoint and touch exactly at alpha = 1 */
                double lo = iv.left + ((j - half) / N) * len;
                double hi = iv.left + ((j + half) / N) * len;
                next.push_back({lo, hi});
            }
        }
        cur = next;
        out.push_back(IntervalSet::from_unsorted(cur));
    }
    return out;
}

/* Serialization: exact relative fields drive reconstruction; absolute
 * fields are informational and emitted only when representable. */
inline void to_json(nlohmann::json& j, const ConstructionState& st) {
    j = nlohmann::json::object();
    j["params"] = {{"N", st.params_.N},         {"eps", st.params_.eps},
                   {"beta1", st.params_.beta1}, {"gamma1", st.params_.gamma1},
                   {"alpha", st.params_.alpha}, {"gamma", st.params_.gamma}};
    j["depth"] = st.depth_;
    nlohmann::json counts = nlohmann::json::array();
    for (int l = 1; l <= st.depth_; ++l) counts.push_back(st.level_count(l));
    j["manifest"] = {{"level_counts", counts}};
    nlohmann::json recs = nlohmann::json::object();
    st.for_each_node([&](const NodeIndex& k) {
        const NodeRec& r = st.rec(k);
        nlohmann::json e = {{"rel_c", r.rel_c}, {"dx", r.dx}, {"resid", r.resid}};
        double c = st.center_abs(k), x = st.root_abs(k);
        e["c_abs"] = c;
        e["x_abs"] = x;
        Interval J = st.J_abs(k), B = st.B_abs(k);
        if (J.left < J.right) e["J_abs"] = {J.left, J.right};
        if (B.left < B.right) e["B_abs"] = {B.left, B.right};
        auto I = st.I_abs(k);
        if (I[0].left < I[0].right && I[1].left < I[1].right)
            e["I_abs"] = {{I[0].left, I[0].right}, {I[1].left, I[1].right}};
        recs[k.str()] = std::move(e);
    });
    j["records"] = std::move(recs);
}

inline void from_json(const nlohmann::json& j, ConstructionState& st) {
    ConstructionParams p;
    const auto& jp = j.at("params");
    p.N = jp.at("N").get<int>();
    p.eps = jp.at("eps").get<double>();
    p.beta1 = jp.at("beta1").get<double>();
    p.gamma1 = jp.at("gamma1").get<double>();
    p.alpha = jp.at("alpha").get<double>();
    p.gamma = jp.at("gamma").get<double>();
    st = ConstructionState(p, j.at("depth").get<int>());
    for (const auto& [key, e] : j.at("records").items()) {
        NodeIndex k = NodeIndex::parse(key);
        NodeRec& r = st.rec(k);
        r.rel_c = e.at("rel_c").get<double>();
        r.dx = e.at("dx").get<double>();
        r.resid = e.at("resid").get<double>();
    }
}

} // namespace vforge
