#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vforge/complex_util.hpp"
#include "vforge/errors.hpp"
#include "vforge/interval_set.hpp"
#include "vforge/poisson.hpp"
#include "vforge/quadrature.hpp"
#include "vforge/sampling.hpp"

namespace vforge {

/* q_r maps the closed upper half-plane onto the closed disk of radius
 * r - 1/r centered at r*i, fixing i; q_r(z) -> z locally as r grows. */
inline cplx qr_map(double r, cplx z) {
    if (!(r > 1.0)) throw ConstraintError("qr_map: requires r > 1");
    cplx ic(0.0, 2.0 * r + 1.0);
    return cplx(0.0, r) + cplx(0.0, 1.0) * (r - 1.0 / r) * (z - ic) / (z + ic);
}

struct SeedFunction {
    std::function<cplx(cplx)> gprime;
    std::string description;
    enum class Origin { kBuiltin, kNormalized, kUser } origin = Origin::kBuiltin;

    /* Exact annulus data when known in closed form (built-in seeds). */
    std::optional<double> exact_m, exact_M;
    std::optional<cplx> exact_b0;

    /* Second zero of the normalized antiderivative, when a collision
     * witness exists; |z0| = 1/2, Im z0 > 0. */
    std::optional<cplx> z0;
    double collision_residual = 0.0;
};

/* g' == 1: G becomes the identity.  Useful as a degenerate reference. */
inline SeedFunction degenerate_seed() {
    SeedFunction s;
    s.gprime = [](cplx) { return cplx(1.0, 0.0); };
    s.description = "degenerate (g' == 1)";
    s.exact_m = 1.0;
    s.exact_M = 1.0;
    s.exact_b0 = cplx(1.0, 0.0);
    return s;
}

/* g' == b0 constant. */
inline SeedFunction constant_seed(cplx b0) {
    SeedFunction s;
    s.gprime = [b0](cplx) { return b0; };
    s.description = "constant (g' == b0)";
    s.exact_m = std::abs(b0);
    s.exact_M = std::abs(b0);
    s.exact_b0 = b0;
    return s;
}

/* The built-in pre-normalization derivative exp(i c z). */
inline std::function<cplx(cplx)> exp_g0prime(double c = 1.0) {
    return [c](cplx z) { return std::exp(cplx(0.0, c) * z); };
}

namespace detail {

/* Antiderivative of g0' composed with q_r, from 0 along a straight
 * segment; the integrand is analytic on the closed half-plane. */
template <class G0>
inline cplx f_qr_eval(const G0& g0p, double r, cplx z, double tol) {
    if (z == cplx(0.0, 0.0)) return {0.0, 0.0};
    auto integ = [&](cplx w) { return g0p(qr_map(r, w)); };
    return integrate_segment(integ, cplx(0.0, 0.0), z, tol).value;
}

struct CollisionPair {
    cplx a, b;
    double residual = 0.0; // |f(b) - f(a)| after normalization
    cplx z0;
};

/* Searches for a genuine collision f(a) = f(b), a != b, of the
 * antiderivative of g0' o q_r.  Starts Newton iterations from a grid of
 * horizontal offsets near the 2*pi quasi-period and keeps the pair whose
 * normalized direction (b - a)/(2|b - a|) sits deepest in the upper
 * half-plane. */
template <class G0>
inline CollisionPair find_collision(const G0& g0p, double r) {
    const double tol = 1e-13;
    std::optional<CollisionPair> best;
    for (double im : {0.5, 1.0, 2.0, 3.5}) {
        for (int ia = -6; ia <= 6; ++ia) {
            cplx a(static_cast<double>(ia) * kPi / 2.0, im);
            cplx fa = f_qr_eval(g0p, r, a, tol);
            cplx b = a + cplx(2.0 * kPi, 0.0);
            bool ok = false;
            for (int it = 0; it < 30; ++it) {
                cplx fb = f_qr_eval(g0p, r, b, tol);
                cplx d = fb - fa;
                cplx fp = g0p(qr_map(r, b));
                if (std::abs(fp) < 1e-300) break;
                cplx step = d / fp;
                if (std::abs(step) > 2.0) step *= 2.0 / std::abs(step);
                b -= step;
                if (!(b.imag() > 1e-6)) break;
                if (std::abs(step) < 1e-13 * (1.0 + std::abs(b))) {
                    ok = true;
                    break;
                }
            }
            if (!ok) continue;
            double sep = std::abs(b - a);
            if (sep < 1e-3) continue; // degenerate pair
            cplx z0 = (b - a) / (2.0 * sep);
            if (!(z0.imag() > 1e-3)) continue;
            cplx fb = f_qr_eval(g0p, r, b, tol);
            double resid = std::abs(fb - fa) / (2.0 * sep);
            if (resid > 1e-10) continue;
            if (!best || z0.imag() > best->z0.imag()) best = CollisionPair{a, b, resid, z0};
        }
    }
    if (!best)
        throw SeedError("build_normalized_seed: no collision found within the search budget");
    return *best;
}

} // namespace detail

/* Builds the normalized seed g'(z) = g0'(q_r(2L z + a)) where (a, b) is a
 * collision pair of the antiderivative f of g0' o q_r and L = |b - a|.
 * The antiderivative g then satisfies g(0) = g(z0) = 0 with
 * z0 = (b - a)/(2L) on the upper unit half-circle of radius 1/2. */
inline SeedFunction build_normalized_seed(std::function<cplx(cplx)> g0prime, double r,
                                          const std::string& description = "normalized seed") {
    if (!(r > 1.0)) throw ConstraintError("build_normalized_seed: requires r > 1");
    auto pair = detail::find_collision(g0prime, r);
    double L = std::abs(pair.b - pair.a);
    cplx a = pair.a;
    SeedFunction s;
    s.gprime = [g0prime, r, L, a](cplx z) { return g0prime(qr_map(r, 2.0 * L * z + a)); };
    s.description = description;
    s.origin = SeedFunction::Origin::kNormalized;
    s.z0 = pair.z0;
    s.collision_residual = pair.residual;

    // sampled nonvanishing check over the closed half-plane
    HaltonStream hs(3);
    for (std::size_t j = 0; j < 10000; ++j) {
        double u, v;
        hs.pair(j, u, v);
        cplx z(20.0 * (u - 0.5), 10.0 * v);
        if (!(std::abs(s.gprime(z)) > 0.0))
            throw SeedError("build_normalized_seed: derivative vanishes at a sample point");
    }
    return s;
}

/* The default seed: exp(i z) pushed through q_r and normalized.  The
 * annulus of |g'| is exact: |g'| = exp(-Im q_r) with Im q_r covering
 * [1/r, 2r - 1/r], so m = |b0| = exp(-(2r - 1/r)) and M = exp(-1/r). */
inline SeedFunction exp_seed(double r = 20.0, double c = 1.0) {
    SeedFunction s = build_normalized_seed(exp_g0prime(c), r, "exp seed (g0' = exp(i c z))");
    s.exact_m = std::exp(-c * (2.0 * r - 1.0 / r));
    s.exact_M = std::exp(-c / r);
    s.exact_b0 = cplx(std::exp(-c * (2.0 * r - 1.0 / r)), 0.0);
    return s;
}

/* User seeds: rational-plus-exponential template
 *   g0'(z) = (P(z)/Q(z)) * exp(i * R(z)),
 * with complex coefficient lists p, q, rr (ascending powers, entries as
 * [re, im]) and the q_r radius r; normalized through the same pipeline. */
inline SeedFunction user_seed_from_json(const nlohmann::json& spec) {
    auto coeffs = [](const nlohmann::json& arr) {
        std::vector<cplx> cs;
        for (const auto& e : arr) cs.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
        return cs;
    };
    std::vector<cplx> P = coeffs(spec.at("p"));
    std::vector<cplx> Q = coeffs(spec.at("q"));
    std::vector<cplx> R = coeffs(spec.at("r"));
    if (P.empty() || Q.empty()) throw ConstraintError("user seed: p and q must be nonempty");
    double r = spec.value("qr_radius", 20.0);
    auto horner = [](const std::vector<cplx>& cs, cplx z) {
        cplx v(0.0, 0.0);
        for (std::size_t i = cs.size(); i-- > 0;) v = v * z + cs[i];
        return v;
    };
    auto g0p = [P, Q, R, horner](cplx z) {
        cplx den = horner(Q, z);
        if (std::abs(den) < 1e-300) throw SeedError("user seed: Q vanishes at evaluation point");
        return horner(P, z) / den * std::exp(cplx(0.0, 1.0) * horner(R, z));
    };
    std::string desc = spec.value("description", std::string("user seed"));
    SeedFunction s = build_normalized_seed(g0p, r, desc);
    s.origin = SeedFunction::Origin::kUser;
    return s;
}

/* g'(H0^{-1}(w)) on the closed strip; w = 0 maps to the value at
 * infinity. */
inline cplx strip_gprime(const SeedFunction& seed, cplx w) {
    if (w == cplx(0.0, 0.0)) {
        if (seed.exact_b0) return *seed.exact_b0;
        return seed.gprime(cplx(0.0, 1e8));
    }
    return seed.gprime(h0_inv(w));
}

/* I(beta) = (-1,-beta) u (beta,1) and its half-plane-to-strip map. */
inline IntervalSet gap_template(double beta) {
    if (beta <= 0.0) return IntervalSet({{-1.0, 1.0}});
    return IntervalSet({{-1.0, -beta}, {beta, 1.0}});
}

inline cplx h_beta(double beta, cplx z) { return poisson(gap_template(beta), z); }

/* g_beta(z) = Integral_0^z g'(H0^{-1}(H_beta(zeta))) dzeta along
 * [0, i c, z]; beta = 0 reduces to g itself (the composition collapses). */
inline cplx g_beta_eval(const SeedFunction& seed, double beta, cplx z, double abs_tol) {
    if (z == cplx(0.0, 0.0)) return {0.0, 0.0};
    auto integ = [&](cplx zeta) {
        if (beta == 0.0) return seed.gprime(zeta);
        return strip_gprime(seed, h_beta(beta, zeta));
    };
    double c = std::max(0.25, z.imag());
    if (beta > 0.0 && beta < 1e-10) {
        /* Branch points at +-beta sit inside the endpoint guard of the
         * unit template, so the vertical leg cannot be refined down to the
         * axis.  Run it per decade above a stub and take the stub at its
         * midpoint; the integrand is bounded, so the stub error is
         * O(t_cut) times its oscillation there. */
        double t_cut = 1e-12;
        CompensatedSum acc;
        acc.add(integ(cplx(0.0, 0.5 * t_cut)) * cplx(0.0, t_cut));
        acc.add(integrate_vertical_decades(integ, cplx(0.0, 0.0), t_cut, c, abs_tol * 0.5).value);
        if (z != cplx(0.0, c))
            acc.add(integrate_segment(integ, cplx(0.0, c), z, abs_tol * 0.5).value);
        return acc.value();
    }
    std::vector<cplx> path{cplx(0.0, 0.0), cplx(0.0, c), z};
    return integrate_polyline(integ, path, abs_tol).value;
}

/* Continuation step: Newton for g_beta(z) = 0 from a nearby start.  The
 * quadrature tolerance tightens with the residual (inexact Newton). */
inline cplx newton_zbeta(const SeedFunction& seed, double beta, cplx start) {
    cplx z = start;
    double gtol = 1e-8 * std::max(1.0, std::abs(start));
    for (int it = 0; it < 40; ++it) {
        cplx val = g_beta_eval(seed, beta, z, gtol);
        cplx fp = (beta == 0.0) ? seed.gprime(z) : strip_gprime(seed, h_beta(beta, z));
        if (std::abs(fp) < 1e-300) throw SeedError("z_beta continuation: derivative vanished");
        cplx step = val / fp;
        if (std::abs(step) > 0.25) step *= 0.25 / std::abs(step);
        z -= step;
        if (!(z.imag() > 0.0)) throw SeedError("z_beta continuation: left the half-plane");
        if (std::abs(step) < 1e-12 * std::max(1.0, std::abs(z))) return z;
        gtol = std::max(1e-17, std::min(gtol, 1e-3 * std::abs(val)));
    }
    throw SeedError("z_beta continuation: Newton did not converge");
}

struct SeedConstants {
    cplx b0{1.0, 0.0};
    double m = 1.0, M = 1.0;
    double delta = 0.0, T = 0.0, eta = 0.0;
    double A = 1.0, B_koebe = 0.0;

    /* Zero-pair-dependent block; absent for seeds without a collision
     * witness. */
    std::optional<double> xi_, rho_, r_cov_, c0_, eps0_, beta1_rec_, eps_rec_;
    std::optional<double> beta2_, beta3_, eps1_, M1_;
    std::vector<std::pair<double, cplx>> zbeta_table;

    bool partial() const { return !xi_.has_value(); }

    double xi() const { return req(xi_, "xi"); }
    double rho() const { return req(rho_, "rho"); }
    double r_cov() const { return req(r_cov_, "r_cov"); }
    double c0() const { return req(c0_, "c0"); }
    double eps0() const { return req(eps0_, "eps0"); }
    double beta1_rec() const { return req(beta1_rec_, "beta1_rec"); }
    double eps_rec() const { return req(eps_rec_, "eps_rec"); }
    double beta2() const { return req(beta2_, "beta2"); }
    double beta3() const { return req(beta3_, "beta3"); }
    double eps1() const { return req(eps1_, "eps1"); }
    double M1() const { return req(M1_, "M1"); }

  private:
    static double req(const std::optional<double>& v, const char* name) {
        if (!v)
            throw SeedError(std::string("SeedConstants: ") + name +
                            " requires a collision witness (seed has no zero pair)");
        return *v;
    }
};

struct EstimateOptions {
    double grid_safety = 0.0; // relative inflation of grid m/M when no exact annulus
    int annulus_grid = 96;
    int delta_angles = 33;
    double beta_step = 0.02;
    double beta_max = 0.60;
    int region_samples = 160;
};

namespace detail {

/* Vertical central difference of Phi = g' o H0^{-1}; Re w is unchanged,
 * so the stencil never leaves the strip. */
inline cplx phi_deriv(const SeedFunction& seed, cplx w) {
    double h = 1e-6 * std::max(1.0, std::abs(w));
    cplx ih(0.0, h);
    return (strip_gprime(seed, w + ih) - strip_gprime(seed, w - ih)) / (2.0 * ih);
}

} // namespace detail

/* Estimates the full constants chain.  Grid-derived quantities (delta via
 * its certification grid; eps1, M1, beta3, xi, beta2 and the z_beta
 * continuation) are heuristic and flagged as such in the serialized
 * output; the rest are exact formulas in terms of them. */
inline SeedConstants estimate_constants(const SeedFunction& seed, const EstimateOptions& opts = {}) {
    SeedConstants sc;
    sc.b0 = seed.exact_b0 ? *seed.exact_b0 : seed.gprime(cplx(0.0, 1e8));
    double ab0 = std::abs(sc.b0);
    if (!(ab0 > 0.0)) throw SeedError("nonpositive constant: |b0|");

    if (seed.exact_m && seed.exact_M) {
        sc.m = *seed.exact_m;
        sc.M = *seed.exact_M;
    } else {
        // Cayley grid u -> z = i (1-u)/(1+u) over the closed disk
        double lo = ab0, hi = ab0;
        int K = opts.annulus_grid;
        for (int i = 0; i <= K; ++i) {
            double rho = std::min(1.0 - 1e-9, static_cast<double>(i) / K);
            for (int jth = 0; jth <= K; ++jth) {
                double th = 2.0 * kPi * jth / K;
                cplx u = rho * cplx(std::cos(th), std::sin(th));
                if (std::abs(u + 1.0) < 1e-8) continue;
                cplx z = cplx(0.0, 1.0) * (1.0 - u) / (1.0 + u);
                if (z.imag() < 0.0) z = {z.real(), 0.0};
                double g = std::abs(seed.gprime(z));
                lo = std::min(lo, g);
                hi = std::max(hi, g);
            }
        }
        sc.m = lo * (1.0 - opts.grid_safety);
        sc.M = hi * (1.0 + opts.grid_safety);
    }
    if (!(sc.m > 0.0)) throw SeedError("nonpositive constant: m");
    if (!(sc.m <= sc.M)) throw SeedError("annulus estimate inverted: m > M");
    sc.m = std::min(sc.m, ab0);
    sc.M = std::max(sc.M, ab0);

    /* delta: largest grid-certified radius with |Phi(w) - b0| < |b0|/4 on
     * the right half-disk |w| < delta (P-values near 0 have Re in [0,1)). */
    auto delta_ok = [&](double d) {
        for (double frac : {1.0, 0.75, 0.5, 0.25, 0.05}) {
            for (int k = 0; k <= opts.delta_angles; ++k) {
                double phi = -kPi / 2.0 + kPi * k / opts.delta_angles;
                cplx w = d * frac * cplx(std::cos(phi), std::sin(phi));
                if (w == cplx(0.0, 0.0)) continue;
                if (std::abs(strip_gprime(seed, w) - sc.b0) >= ab0 / 4.0) return false;
            }
        }
        return true;
    };
    if (delta_ok(1.0)) {
        sc.delta = 1.0;
    } else {
        double lo_d = 1e-8, hi_d = 1.0;
        if (!delta_ok(lo_d)) throw SeedError("delta estimation did not converge");
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo_d + hi_d);
            (delta_ok(mid) ? lo_d : hi_d) = mid;
        }
        sc.delta = lo_d;
    }
    sc.T = 24.0 / (kPi * sc.delta);
    sc.eta = 0.9 * std::min({kPi * sc.delta / 24.0, kPi * sc.delta * ab0 / (96.0 * sc.M),
                             ab0 / (8.0 * sc.M)});

    double ratio = sc.M / sc.m;
    sc.A = (ratio < 1.0 + 1e-12) ? 1.0 : std::tanh(kPi * kPi / (2.0 * std::log(ratio)));
    sc.B_koebe = sc.A * sc.m / 4.0;

    if (!seed.z0) return sc; // partial mode: no zero pair to continue from

    /* z_beta continuation from z0, stopping at the first failure. */
    sc.zbeta_table.emplace_back(0.0, *seed.z0);
    double beta2 = 0.0;
    cplx zb = *seed.z0;
    for (double beta = opts.beta_step; beta <= opts.beta_max + 1e-12; beta += opts.beta_step) {
        try {
            cplx znext = newton_zbeta(seed, beta, zb);
            if (!(znext.imag() > 1e-6) || !(std::abs(znext) < 1.0 - 1e-6)) break;
            zb = znext;
            beta2 = beta;
            sc.zbeta_table.emplace_back(beta, zb);
        } catch (const SeedError&) {
            break;
        }
    }
    sc.beta2_ = beta2;

    double xi = std::numeric_limits<double>::infinity();
    for (const auto& [beta, z] : sc.zbeta_table)
        xi = std::min(xi, std::min(z.imag() / 2.0, 1.0 - std::abs(z)));
    xi *= 0.95;
    if (!(xi > 0.0)) throw SeedError("nonpositive constant: xi");
    sc.xi_ = xi;
    sc.rho_ = xi * std::min(sc.A, 0.49);
    sc.r_cov_ = *sc.rho_ * sc.m / 4.0;
    sc.c0_ = std::min(*sc.r_cov_ / (8.0 * sc.M), xi / 4.0);

    /* Samples of D(c0) = closure of {Im z >= c0} within the unit disk. */
    double c0 = *sc.c0_;
    std::vector<cplx> region;
    HaltonStream hs(5);
    int S = opts.region_samples;
    for (int j = 0; j < S; ++j) {
        cplx z = sample_half_disk(hs, static_cast<std::size_t>(j), 0.0, 1.0);
        if (z.imag() < c0) z = {z.real(), c0};
        if (std::abs(z) > 1.0) z *= (1.0 - 1e-12) / std::abs(z);
        region.push_back(z);
    }
    // corner clearance keeps boundary samples outside the kernel endpoint guard
    double thc = std::max(std::asin(std::min(1.0, c0)), 1e-7);
    double xmax = std::min(std::cos(thc), 1.0 - 1e-7);
    for (int j = 0; j < S / 2; ++j) {
        double th = thc + (kPi - 2.0 * thc) * j / std::max(1, S / 2 - 1);
        region.push_back({std::cos(th), std::sin(th)});
        region.push_back({-xmax + 2.0 * xmax * j / std::max(1, S / 2 - 1), c0});
    }

    auto w_of = [&](double beta, cplx z) { return h_beta(beta, z); };

    double m1max = 0.0;
    for (cplx z : region) m1max = std::max(m1max, std::abs(detail::phi_deriv(seed, w_of(0.0, z))));
    sc.M1_ = 2.0 * m1max; // grid estimate with safety factor 2

    /* eps1: neighborhood radius within which |Phi'| stays under M1. */
    auto nbhd_ok = [&](double e1, double beta) {
        for (cplx z : region) {
            cplx w = w_of(beta, z);
            for (int k = 0; k < 8; ++k) {
                double phi = 2.0 * kPi * k / 8.0;
                cplx wp = w + e1 * cplx(std::cos(phi), std::sin(phi));
                if (wp.real() < 0.0 || wp.real() > 1.0) continue; // outside the strip
                if (std::abs(detail::phi_deriv(seed, wp)) > *sc.M1_) return false;
            }
        }
        return true;
    };
    double e1 = 0.05;
    for (int it = 0; it < 80 && !nbhd_ok(e1, 0.0); ++it) e1 /= 2.0;
    if (!nbhd_ok(e1, 0.0)) throw SeedError("eps1 estimation did not converge");
    sc.eps1_ = e1;

    double beta3 = 0.0;
    for (const auto& [beta, z] : sc.zbeta_table) {
        (void)z;
        if (!nbhd_ok(e1, beta)) break;
        beta3 = beta;
    }
    sc.beta3_ = beta3;

    sc.eps0_ = std::min({*sc.r_cov_ / (4.0 * *sc.M1_), e1, sc.eta / (2.0 * kPi)});
    sc.beta1_rec_ = 0.25 * std::min(c0, beta3);
    sc.eps_rec_ = 0.25 * std::min(*sc.eps0_ / 24.0, 1.0 / 200.0);
    return sc;
}

/* z_beta for arbitrary beta in [0, beta2]: nearest continuation entry
 * refined by Newton.  Below double resolution of the table the kernel
 * itself no longer distinguishes beta from 0. */
inline cplx zbeta_at(const SeedFunction& seed, const SeedConstants& sc, double beta) {
    if (!seed.z0) throw SeedError("zbeta_at: seed has no zero pair");
    if (beta < 1e-12) return *seed.z0;
    if (sc.zbeta_table.empty()) throw SeedError("zbeta_at: no continuation table");
    cplx start = sc.zbeta_table.front().second;
    double bestd = std::abs(sc.zbeta_table.front().first - beta);
    for (const auto& [b, z] : sc.zbeta_table) {
        double d = std::abs(b - beta);
        if (d < bestd) {
            bestd = d;
            start = z;
        }
    }
    return newton_zbeta(seed, beta, start);
}

inline void to_json(nlohmann::json& j, const SeedConstants& sc) {
    auto put_opt = [&](const char* name, const std::optional<double>& v) {
        if (v) j[name] = *v;
        else j[name] = nullptr;
    };
    j = nlohmann::json::object();
    j["b0"] = {sc.b0.real(), sc.b0.imag()};
    j["m"] = sc.m;
    j["M"] = sc.M;
    j["delta"] = sc.delta;
    j["T"] = sc.T;
    j["eta"] = sc.eta;
    j["A"] = sc.A;
    j["B_koebe"] = sc.B_koebe;
    put_opt("xi", sc.xi_);
    put_opt("rho", sc.rho_);
    put_opt("r_cov", sc.r_cov_);
    put_opt("c0", sc.c0_);
    put_opt("eps0", sc.eps0_);
    put_opt("beta1_rec", sc.beta1_rec_);
    put_opt("eps_rec", sc.eps_rec_);
    put_opt("beta2", sc.beta2_);
    put_opt("beta3", sc.beta3_);
    put_opt("eps1", sc.eps1_);
    put_opt("M1", sc.M1_);
    j["heuristic"] = {"beta2", "beta3", "delta_grid", "eps1", "M1", "xi"};
    nlohmann::json tab = nlohmann::json::array();
    for (const auto& [b, z] : sc.zbeta_table) tab.push_back({b, z.real(), z.imag()});
    j["zbeta_table"] = tab;
}

} // namespace vforge
