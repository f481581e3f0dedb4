#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "vforge/quadrature.hpp"
#include "vforge/sampling.hpp"

using namespace vforge;
using Catch::Matchers::WithinAbs;

TEST_CASE("one panel integrates low-degree polynomials exactly") {
    auto sq = [](cplx z) { return z * z; };
    auto r = integrate_segment(sq, cplx(0.0, 0.0), cplx(1.0, 1.0), 1e-12);
    REQUIRE(r.evals == 15);
    REQUIRE(std::abs(r.value - cplx(-2.0, 2.0) / 3.0) < 1e-14);

    auto p13 = [](cplx z) { return std::pow(z, 13); };
    auto r2 = integrate_segment(p13, cplx(-1.0, 0.0), cplx(2.0, 0.0), 1e-9);
    REQUIRE(r2.evals == 15);
    REQUIRE_THAT(r2.value.real(), WithinAbs((std::pow(2.0, 14.0) - 1.0) / 14.0, 1e-9));
}

TEST_CASE("adaptive segments meet the requested tolerance") {
    auto ex = [](cplx z) { return std::exp(z); };
    auto r = integrate_segment(ex, cplx(0.0, 0.0), cplx(0.0, kPi), 1e-13);
    REQUIRE(std::abs(r.value - cplx(-2.0, 0.0)) <= r.error + 1e-13);
    REQUIRE(r.error <= 1e-13);

    cplx zc(0.3, 0.2);
    auto f = [zc](cplx z) { return 1.0 / (z - zc); };
    cplx exact = std::log((cplx(1.0, 0.0) - zc) / (cplx(-1.0, 0.0) - zc));
    auto a = integrate_segment(f, cplx(-1.0, 0.0), cplx(1.0, 0.0), 1e-8);
    auto b = integrate_segment(f, cplx(-1.0, 0.0), cplx(1.0, 0.0), 1e-10);
    REQUIRE(std::abs(a.value - b.value) <= 1e-8);
    REQUIRE(std::abs(b.value - exact) <= 1e-9);

    auto rel = integrate_segment([](cplx z) { return std::pow(z, 13); }, cplx(-1.0, 0.0),
                                 cplx(2.0, 0.0), 0.0, 1e-10);
    REQUIRE_THAT(rel.value.real(), WithinAbs((std::pow(2.0, 14.0) - 1.0) / 14.0, 1e-6));
}

TEST_CASE("segment integration reports an exhausted panel budget") {
    auto f = [](cplx z) { return 1.0 / (z - cplx(0.0, 1e-6)); };
    REQUIRE_THROWS_AS(
        integrate_segment(f, cplx(-1.0, 0.0), cplx(1.0, 0.0), 1e-15, 0.0, 4),
        QuadratureError);
}

TEST_CASE("polyline splits the tolerance across legs") {
    auto sq = [](cplx z) { return z * z; };
    std::vector<cplx> pts{cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 1.0)};
    auto r = integrate_polyline(sq, pts, 1e-12);
    REQUIRE(std::abs(r.value - cplx(-2.0, 2.0) / 3.0) < 1e-13);

    std::vector<cplx> degen{cplx(0.5, 0.5)};
    REQUIRE(integrate_polyline(sq, degen, 1e-12).value == cplx(0.0, 0.0));
    std::vector<cplx> zero_leg{cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(1.0, 0.0)};
    REQUIRE(std::abs(integrate_polyline(sq, zero_leg, 1e-12).value - 1.0 / 3.0) < 1e-13);
}

TEST_CASE("vertical decade splitting resolves log-type integrands") {
    auto one = [](cplx) { return cplx(1.0, 0.0); };
    auto r = integrate_vertical_decades(one, cplx(0.3, 0.0), 1e-6, 1.0, 1e-12);
    REQUIRE(std::abs(r.value - cplx(0.0, 1.0 - 1e-6)) < 1e-13);

    auto invz = [](cplx z) { return 1.0 / z; };
    auto r2 = integrate_vertical_decades(invz, cplx(0.0, 0.0), 1e-6, 1.0, 1e-10);
    REQUIRE_THAT(r2.value.real(), WithinAbs(6.0 * std::log(10.0), 1e-9));
    REQUIRE_THAT(r2.value.imag(), WithinAbs(0.0, 1e-12));
    REQUIRE(r2.error <= 1e-10);

    REQUIRE_THROWS_AS(integrate_vertical_decades(one, cplx(0.0, 0.0), 0.0, 1.0, 1e-9),
                      ConstraintError);
    REQUIRE_THROWS_AS(integrate_vertical_decades(one, cplx(0.0, 0.0), 1.0, 0.5, 1e-9),
                      ConstraintError);
}

TEST_CASE("quadrature oracle reproduces the closed-form kernel") {
    IntervalSet I({{-1.0, 1.0}});
    REQUIRE(std::abs(poisson_quadrature_oracle(I, cplx(0.0, 1.0)) - cplx(0.5, 0.0)) < 1e-10);

    IntervalSet tiny({{0.0, 1e-6}});
    cplx v = poisson_quadrature_oracle(tiny, cplx(0.0, 1.0));
    REQUIRE(std::abs(v - cplx(1e-6 / kPi, 0.0)) < 1e-12);

    REQUIRE(poisson_quadrature_oracle(IntervalSet{}, cplx(0.0, 1.0)) == cplx(0.0, 0.0));
    REQUIRE_THROWS_AS(poisson_quadrature_oracle(I, cplx(0.5, 0.0)), ConstraintError);

    HaltonStream hs(21);
    for (std::size_t i = 0; i < 25; ++i) {
        double u, v1, p, q;
        hs.pair(i, u, v1);
        hs.pair(i + 500, p, q);
        double a = -1.5 + 2.0 * u, len = 0.05 + v1;
        IntervalSet X({{a, a + len}, {a + len + 0.2, a + 2.0 * len + 0.2}});
        cplx z(3.0 * (p - 0.5), 1e-2 + 4.0 * q);
        REQUIRE(std::abs(poisson(X, z) - poisson_quadrature_oracle(X, z)) < 1e-9);
    }
}

TEST_CASE("radical inverse and Halton streams are deterministic") {
    REQUIRE(radical_inverse(1, 2) == 0.5);
    REQUIRE(radical_inverse(2, 2) == 0.25);
    REQUIRE(radical_inverse(3, 2) == 0.75);
    REQUIRE(radical_inverse(4, 2) == 0.125);
    REQUIRE_THAT(radical_inverse(1, 3), WithinAbs(1.0 / 3.0, 1e-16));
    REQUIRE_THAT(radical_inverse(2, 3), WithinAbs(2.0 / 3.0, 1e-16));
    REQUIRE_THAT(radical_inverse(3, 3), WithinAbs(1.0 / 9.0, 1e-16));

    HaltonStream a(3), b(3), c(4);
    bool differs = false;
    for (std::size_t j = 0; j < 64; ++j) {
        double ua, va, ub, vb, uc, vc;
        a.pair(j, ua, va);
        b.pair(j, ub, vb);
        c.pair(j, uc, vc);
        REQUIRE(ua == ub);
        REQUIRE(va == vb);
        if (ua != uc || va != vc) differs = true;
        REQUIRE(ua >= 0.0);
        REQUIRE(ua < 1.0);
        REQUIRE(va >= 0.0);
        REQUIRE(va < 1.0);
    }
    REQUIRE(differs);
}

TEST_CASE("region samplers stay inside their regions") {
    HaltonStream hs(2);
    cplx c(0.4, 1.3);
    for (std::size_t j = 0; j < 500; ++j) {
        REQUIRE(std::abs(sample_disk(hs, j, c, 0.7) - c) <= 0.7);

        cplx hd = sample_half_disk(hs, j, 0.25, 0.5);
        REQUIRE(hd.imag() >= 0.0);
        REQUIRE(std::abs(hd - cplx(0.25, 0.0)) <= 0.5 * (1.0 + 1e-12));

        cplx ha = sample_half_annulus(hs, j, -0.5, 0.2, 0.9);
        REQUIRE(ha.imag() >= 0.0);
        double d = std::abs(ha - cplx(-0.5, 0.0));
        REQUIRE(d >= 0.2 * (1.0 - 1e-12));
        REQUIRE(d <= 0.9 * (1.0 + 1e-12));

        REQUIRE_THAT(std::abs(sample_circle(hs, j, c, 0.3) - c), WithinAbs(0.3, 1e-12));

        cplx hb = sample_half_disk_boundary(hs, j, 0.1, 0.6);
        REQUIRE(hb.imag() >= 0.0);
        bool on_arc = std::abs(std::abs(hb - cplx(0.1, 0.0)) - 0.6) < 1e-12;
        bool on_diam = hb.imag() == 0.0 && std::abs(hb.real() - 0.1) <= 0.6 * (1.0 + 1e-12);
        REQUIRE((on_arc || on_diam));

        cplx ab = sample_half_annulus_boundary(hs, j, 0.0, 0.25, 1.0);
        REQUIRE(ab.imag() >= 0.0);
        double da = std::abs(ab);
        bool on_outer = std::abs(da - 1.0) < 1e-12;
        bool on_inner = std::abs(da - 0.25) < 1e-12;
        bool on_seg = ab.imag() == 0.0 && da >= 0.25 * (1.0 - 1e-12) && da <= 1.0 + 1e-12;
        REQUIRE((on_outer || on_inner || on_seg));
    }
}
