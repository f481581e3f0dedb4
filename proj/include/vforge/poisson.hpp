#pragma once

#include <cmath>
#include <string>

#include "vforge/complex_util.hpp"
#include "vforge/errors.hpp"
#include "vforge/interval_set.hpp"

namespace vforge {

/* Evaluations closer to an interval endpoint than this fraction of the
 * interval length are rejected as singular. */
inline constexpr double kEndpointGuard = 1e-14;

namespace detail {

inline void check_interval(double a, double b) {
    if (!(a < b)) throw ConstraintError("poisson_interval: requires a < b");
    if (!std::isfinite(a) || !std::isfinite(b))
        throw ConstraintError("poisson_interval: endpoints must be finite");
}

} // namespace detail

/* P((a,b), z) = (i/pi) * Integral over (a,b) of dt/(z - t)
 *             = (i/pi) * (log(z - a) - log(z - b)),
 * with Im log in [0, pi] so P maps the closed upper half-plane into the
 * closed strip 0 <= Re <= 1.
 *
 * Real z is evaluated on a separate path that keeps Re exactly 0 or 1 and
 * computes Im from real log ratios, so deep-scale geometry loses no
 * precision to branch bookkeeping.  Points within the endpoint guard are
 * rejected; callers whose geometry is exact at finer relative scales may
 * declare a tighter guard. */
inline cplx poisson_interval(double a, double b, cplx z, double guard_scale = kEndpointGuard) {
    detail::check_interval(a, b);
    double guard = guard_scale * (b - a);
    if (std::abs(z - cplx(a, 0.0)) <= guard || std::abs(z - cplx(b, 0.0)) <= guard)
        throw SingularEndpointError("poisson_interval: z within guard radius of an endpoint");
    if (z.imag() < 0.0)
        throw ConstraintError("poisson_interval: z must lie in the closed upper half-plane");

    if (z.imag() == 0.0) {
        double x = z.real();
        if (x > a && x < b) {
            // inside: Re = 1, Im = (1/pi) log((x-a)/(b-x))
            return {1.0, std::log((x - a) / (b - x)) / kPi};
        }
        double len = b - a;
        if (x > b) return {0.0, std::log1p(len / (x - b)) / kPi};
        return {0.0, -std::log1p(len / (a - x)) / kPi};
    }
    // interior: -(i/pi) log((z-b)/(z-a)).  Near one endpoint the ratio is
    // formed from the two differences directly, which stays accurate while
    // |z - near| / |z - far| is below double resolution; elsewhere it is
    // written as 1 + (a-b)/(z-a), which stays accurate when z is far away.
    cplx za = z - cplx(a, 0.0), zb = z - cplx(b, 0.0);
    if (std::min(std::abs(za), std::abs(zb)) <= kEndpointGuard * (b - a)) {
        cplx L = std::log(zb / za);
        return cplx(0.0, -1.0 / kPi) * L;
    }
    cplx L = clog1p(cplx(a - b, 0.0) / za);
    return cplx(0.0, -1.0 / kPi) * L;
}

/* d/dz P((a,b), z) = (i/pi) (1/(z-a) - 1/(z-b)) = (i/pi)(a-b)/((z-a)(z-b)). */
inline cplx poisson_deriv_interval(double a, double b, cplx z, double guard_scale = kEndpointGuard) {
    detail::check_interval(a, b);
    double guard = guard_scale * (b - a);
    if (std::abs(z - cplx(a, 0.0)) <= guard || std::abs(z - cplx(b, 0.0)) <= guard)
        throw SingularEndpointError("poisson_deriv_interval: z within guard radius of an endpoint");
    return cplx(0.0, 1.0 / kPi) * (a - b) / ((z - a) * (z - b));
}

/* P(X, z) summed over components.  Real z on the boundary of X is an
 * error; real z elsewhere keeps Re exactly 0 or 1. */
inline cplx poisson(const IntervalSet& X, cplx z) {
    if (z.imag() == 0.0 && X.on_boundary(z.real()))
        throw BoundaryPointError("poisson: real z lies on the boundary of X");
    CompensatedSum acc;
    for (const auto& c : X.components()) acc.add(poisson_interval(c.left, c.right, z));
    return acc.value();
}

inline cplx poisson_deriv(const IntervalSet& X, cplx z) {
    if (z.imag() == 0.0 && X.on_boundary(z.real()))
        throw BoundaryPointError("poisson_deriv: real z lies on the boundary of X");
    CompensatedSum acc;
    for (const auto& c : X.components()) acc.add(poisson_deriv_interval(c.left, c.right, z));
    return acc.value();
}

/* h0 = P((-1,1), .), the conformal map of the upper half-plane onto the
 * strip 0 < Re < 1 with h0(0) = 1, h0(i) = 1/2, h0(oo) = 0. */
inline cplx h0(cplx z) { return poisson_interval(-1.0, 1.0, z); }

/* Inverse of h0.  Solving exp(-i pi w) = (z+1)/(z-1) gives
 * z = (1 + q)/(q - 1) = (2 + d)/d with d = expm1(-i pi w), which stays
 * accurate near w = 1 (z near 0).  Accepts the closed strip minus w = 0;
 * the overflow branches cover |Im w| large, where z approaches +-1. */
inline cplx h0_inv(cplx w) {
    double re = w.real();
    if (re < 0.0 || re > 1.0) {
        // tolerate roundoff spill from upstream kernel sums
        if (re > -1e-12 && re < 0.0) re = 0.0;
        else if (re > 1.0 && re < 1.0 + 1e-12) re = 1.0;
        else throw OutOfStripError("h0_inv: Re w must lie in [0, 1]");
    }
    if (w == cplx(0.0, 0.0))
        throw OutOfStripError("h0_inv: w = 0 is the image of the point at infinity");
    w = cplx(re, w.imag());
    double t = kPi * w.imag(); // |exp(-i pi w)| = exp(pi Im w)
    if (t > 300.0) {
        // q huge: z = 1 + 2/q + O(q^-2)
        return 1.0 + 2.0 * std::exp(cplx(0.0, kPi) * w);
    }
    if (t < -300.0) {
        // q tiny: z = -1 - 2q + O(q^2)
        return -1.0 - 2.0 * std::exp(cplx(0.0, -1.0) * kPi * w);
    }
    cplx d = cexpm1(cplx(0.0, -kPi) * w);
    return (2.0 + d) / d;
}

} // namespace vforge
