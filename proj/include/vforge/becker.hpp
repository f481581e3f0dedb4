#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include <json.hpp>

#include "vforge/complex_util.hpp"
#include "vforge/errors.hpp"
#include "vforge/sampling.hpp"

namespace vforge {

/* Analytic self-map of the upper half-plane, with derivative. */
struct HalfPlaneMap {
    std::function<cplx(cplx)> p;
    std::function<cplx(cplx)> dp;
    std::string name;
};

inline HalfPlaneMap halfplane_identity() {
    return {[](cplx z) { return z; }, [](cplx) { return cplx(1.0, 0.0); }, "identity"};
}

inline HalfPlaneMap halfplane_scale(double s) {
    if (!(s > 0.0)) throw ConstraintError("halfplane_scale: factor must be positive");
    return {[s](cplx z) { return s * z; }, [s](cplx) { return cplx(s, 0.0); }, "scale"};
}

/* (az+b)/(cz+d) with real coefficients and ad-bc > 0 is an automorphism
 * of the half-plane. */
inline HalfPlaneMap halfplane_mobius(double a, double b, double c, double d) {
    double det = a * d - b * c;
    if (!(det > 0.0)) throw ConstraintError("halfplane_mobius: need ad - bc > 0");
    return {[a, b, c, d](cplx z) { return (a * z + b) / (c * z + d); },
            [c, d, det](cplx z) {
                cplx q = c * z + d;
                return det / (q * q);
            },
            "mobius"};
}

/* Non-automorphism self-map for strict-inequality cases. */
inline HalfPlaneMap halfplane_shift_up(double t) {
    if (!(t > 0.0)) throw ConstraintError("halfplane_shift_up: need t > 0");
    return {[t](cplx z) { return z + cplx(0.0, t); }, [](cplx) { return cplx(1.0, 0.0); },
            "shift-up"};
}

/* F''/F' of the power map with F'(w) = (w/i)^(-i tau/2). */
inline std::function<cplx(cplx)> power_log_deriv(double tau) {
    return [tau](cplx w) { return cplx(0.0, -tau / 2.0) / w; };
}

struct BeckerReport {
    std::string map_name;
    double tau = 0.0;
    std::size_t samples = 0;
    double bound = 0.0;              // 1 + 1e-9
    double max_pick_ratio = 0.0;     // |p'| Im z / Im p
    double max_composed_ratio = 0.0; // |F''/F'(p)| |p'| 2 Im z / tau
    bool pass = false;
    cplx worst_pick{0.0, 0.0};
    cplx worst_composed{0.0, 0.0};
};

/* Samples the invariant-metric contraction of p and the composed
 * criterion quantity of F after p.  Both are bounded by 1, with equality
 * reached by half-plane automorphisms, so the pass bound carries a tiny
 * headroom for rounding. */
inline BeckerReport check_becker_halfplane(const std::function<cplx(cplx)>& logF, double tau,
                                           const HalfPlaneMap& map, std::size_t samples = 4096,
                                           std::uint64_t rng_seed = 1) {
    if (!(tau > 0.0)) throw ConstraintError("check_becker_halfplane: tau must be positive");
    BeckerReport rep;
    rep.map_name = map.name;
    rep.tau = tau;
    rep.bound = 1.0 + 1e-9;

    HaltonStream hs(rng_seed);
    for (std::size_t j = 0; j < samples; ++j) {
        double u, v;
        hs.pair(j, u, v);
        cplx z(-4.0 + 8.0 * u, 4.0 * v + 1e-9);
        cplx pz = map.p(z);
        if (!(pz.imag() > 0.0))
            throw ConstraintError("check_becker_halfplane: map left the half-plane");
        cplx dpz = map.dp(z);

        double pick = std::abs(dpz) * z.imag() / pz.imag();
        double composed = std::abs(logF(pz)) * std::abs(dpz) * 2.0 * z.imag() / tau;
        ++rep.samples;
        if (pick > rep.max_pick_ratio) {
            rep.max_pick_ratio = pick;
            rep.worst_pick = z;
        }
        if (composed > rep.max_composed_ratio) {
            rep.max_composed_ratio = composed;
            rep.worst_composed = z;
        }
    }
    rep.pass = rep.max_pick_ratio <= rep.bound && rep.max_composed_ratio <= rep.bound;
    return rep;
}

inline void to_json(nlohmann::json& j, const BeckerReport& r) {
    j = {{"map_name", r.map_name},
         {"tau", r.tau},
         {"samples", r.samples},
         {"bound", r.bound},
         {"max_pick_ratio", r.max_pick_ratio},
         {"max_composed_ratio", r.max_composed_ratio},
         {"pass", r.pass},
         {"worst_pick", {r.worst_pick.real(), r.worst_pick.imag()}},
         {"worst_composed", {r.worst_composed.real(), r.worst_composed.imag()}}};
}

} // namespace vforge
