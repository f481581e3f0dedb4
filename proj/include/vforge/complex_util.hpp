#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace vforge {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/* Argument in [0, pi] on the closed upper half-plane.  Differs from
 * std::arg only on the negative real axis approached with Im == -0.0,
 * which must still map to +pi here. */
inline double arg_upper(cplx z) {
    double im = z.imag();
    if (im == 0.0) im = +0.0; // collapse signed zero
    return std::atan2(im, z.real());
}

/* log with Im in [0, pi]; valid for z in the closed upper half-plane. */
inline cplx log_upper(cplx z) {
    return {std::log(std::abs(z)), arg_upper(z)};
}

/* Principal-branch log(1 + w), accurate for small |w|. */
inline cplx clog1p(cplx w) {
    double x = w.real(), y = w.imag();
    double a2 = x * x + y * y;
    if (a2 > 0.25) return std::log(1.0 + w);
    // Re log(1+w) = log|1+w| = 0.5*log1p(2x + |w|^2), exact cancellation-free
    return {0.5 * std::log1p(2.0 * x + a2), std::atan2(y, 1.0 + x)};
}

/* exp(w) - 1, accurate for small |w|.
 * Re = expm1(x)*cos(y) - (1 - cos(y)), with 1 - cos(y) = 2*sin^2(y/2). */
inline cplx cexpm1(cplx w) {
    double x = w.real(), y = w.imag();
    double em = std::expm1(x);
    double shy = std::sin(0.5 * y);
    double omc = 2.0 * shy * shy;
    return {em - omc - em * omc, (em + 1.0) * std::sin(y)};
}

/* Neumaier-compensated accumulator for complex sums; the compensation
 * survives a late large addend cancelling the running sum. */
struct CompensatedSum {
    double sr = 0.0, si = 0.0;
    double cr = 0.0, ci = 0.0;

    static void step(double& s, double& c, double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x)) c += (s - t) + x;
        else c += (x - t) + s;
        s = t;
    }
    void add(cplx x) {
        step(sr, cr, x.real());
        step(si, ci, x.imag());
    }
    cplx value() const { return {sr + cr, si + ci}; }
};

} // namespace vforge
