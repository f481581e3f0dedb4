#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "vforge/complex_util.hpp"
#include "vforge/errors.hpp"
#include "vforge/interval_set.hpp"
#include "vforge/poisson.hpp"

namespace vforge {

struct QuadResult {
    cplx value{0.0, 0.0};
    double error = 0.0;   // conservative absolute estimate
    std::size_t evals = 0;
};

namespace detail {

/* Gauss-Kronrod (G7, K15) nodes and weights on [-1, 1]; positive half. */
inline constexpr double kK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
/* G7 weights aligned with odd K15 node indices 1, 3, 5, 7. */
inline constexpr double kG7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

/* One (G7, K15) panel over the straight segment [z0, z1].  All nodes are
 * interior, so integrable endpoint singularities never get evaluated.
 * The center node (i == 7) belongs to both rules. */
template <class F>
QuadResult gk15_panel(F&& f, cplx z0, cplx z1) {
    cplx mid = 0.5 * (z0 + z1);
    cplx half = 0.5 * (z1 - z0);
    CompensatedSum k15, g7;
    for (int i = 0; i < 8; ++i) {
        double x = kK15Nodes[i];
        cplx fa = f(mid + half * x);
        cplx s = (i == 7) ? fa : fa + f(mid - half * x);
        k15.add(kK15Weights[i] * s);
        if (i % 2 == 1) g7.add(kG7Weights[i / 2] * s);
    }
    cplx kv = k15.value() * half;
    cplx gv = g7.value() * half;
    return {kv, std::abs(kv - gv), 15};
}

struct Panel {
    cplx z0, z1;
    cplx value;
    double error;
};

} // namespace detail

/* Globally adaptive integration of f over the segment [z0, z1]: the panel
 * with the largest error estimate is bisected until the total estimate
 * meets max(abs_tol, rel_tol * |value|) or the panel budget is exhausted. */
template <class F>
QuadResult integrate_segment(F&& f, cplx z0, cplx z1, double abs_tol,
                             double rel_tol = 0.0, std::size_t max_panels = 4000) {
    if (z0 == z1) return {cplx(0.0, 0.0), 0.0, 0};
    std::vector<detail::Panel> panels;
    std::size_t evals = 0;
    auto make = [&](cplx a, cplx b) {
        auto r = detail::gk15_panel(f, a, b);
        evals += r.evals;
        return detail::Panel{a, b, r.value, r.error};
    };
    panels.push_back(make(z0, z1));
    for (;;) {
        CompensatedSum total;
        double total_err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            total.add(panels[i].value);
            total_err += panels[i].error;
            if (panels[i].error > panels[worst].error) worst = i;
        }
        double goal = std::max(abs_tol, rel_tol * std::abs(total.value()));
        if (total_err <= goal) return {total.value(), total_err, evals};
        if (panels.size() >= max_panels)
            throw QuadratureError("integrate_segment: tolerance not reached");
        detail::Panel w = panels[worst];
        cplx mid = 0.5 * (w.z0 + w.z1);
        panels[worst] = make(w.z0, mid);
        panels.push_back(make(mid, w.z1));
    }
}

/* Integration along the polyline through pts, with the tolerance split
 * across legs by arc length. */
template <class F>
QuadResult integrate_polyline(F&& f, std::span<const cplx> pts, double abs_tol,
                              double rel_tol = 0.0) {
    if (pts.size() < 2) return {cplx(0.0, 0.0), 0.0, 0};
    double total_len = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) total_len += std::abs(pts[i + 1] - pts[i]);
    QuadResult out;
    CompensatedSum acc;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double frac = total_len > 0.0 ? std::abs(pts[i + 1] - pts[i]) / total_len : 1.0;
        auto r = integrate_segment(f, pts[i], pts[i + 1],
                                   std::max(abs_tol * frac, abs_tol * 1e-3), rel_tol);
        acc.add(r.value);
        out.error += r.error;
        out.evals += r.evals;
    }
    out.value = acc.value();
    return out;
}

/* Vertical segment from base + i*t_lo to base + i*t_hi, split per decade of
 * height so integrands with log-type growth toward the real axis are
 * resolved with panels proportionate to their scale. */
template <class F>
QuadResult integrate_vertical_decades(F&& f, cplx base, double t_lo, double t_hi,
                                      double abs_tol) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo))
        throw ConstraintError("integrate_vertical_decades: requires 0 < t_lo < t_hi");
    std::vector<double> cuts{t_lo};
    for (double t = t_lo * 10.0; t < t_hi; t *= 10.0) cuts.push_back(t);
    cuts.push_back(t_hi);
    QuadResult out;
    CompensatedSum acc;
    double per = abs_tol / static_cast<double>(cuts.size() - 1);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto r = integrate_segment(f, base + cplx(0.0, cuts[i]), base + cplx(0.0, cuts[i + 1]), per);
        acc.add(r.value);
        out.error += r.error;
        out.evals += r.evals;
    }
    out.value = acc.value();
    return out;
}

/* Independent check of the closed-form kernel: direct adaptive quadrature
 * of (i/pi) * Integral over X of dt/(z - t), componentwise over real
 * segments.  Interior evaluation only. */
inline cplx poisson_quadrature_oracle(const IntervalSet& X, cplx z, double tol = 1e-10) {
    if (!(z.imag() > 0.0))
        throw ConstraintError("poisson_quadrature_oracle: requires Im z > 0");
    CompensatedSum acc;
    for (const auto& c : X.components()) {
        auto r = integrate_segment([&](cplx t) { return 1.0 / (z - t); },
                                   cplx(c.left, 0.0), cplx(c.right, 0.0),
                                   tol * 0.5 / static_cast<double>(X.size() ? X.size() : 1));
        acc.add(cplx(0.0, 1.0 / kPi) * r.value);
    }
    return acc.value();
}

} // namespace vforge
