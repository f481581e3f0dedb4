#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>

#include "vforge/poisson.hpp"
#include "vforge/sampling.hpp"
#include "vforge/seed.hpp"

using namespace vforge;
using Catch::Matchers::WithinAbs;

namespace {

IntervalSet two_comp() {
    return IntervalSet({{0.0, 1.0}, {2.0, 3.0}});
}

} // namespace

TEST_CASE("complex helpers keep upper-boundary conventions") {
    REQUIRE(arg_upper(cplx(-1.0, 0.0)) == kPi);
    REQUIRE(arg_upper(cplx(-1.0, -0.0)) == kPi);
    REQUIRE(arg_upper(cplx(1.0, 0.0)) == 0.0);
    REQUIRE(arg_upper(cplx(0.0, 1.0)) == kPi / 2.0);

    cplx w(1e-12, 1e-12);
    REQUIRE(std::abs(clog1p(w) - w) < 3e-24);
    REQUIRE(std::abs(clog1p(cplx(0.0, 0.0))) == 0.0);
    cplx m(0.3, 0.4);
    REQUIRE(std::abs(clog1p(m) - std::log(cplx(1.0, 0.0) + m)) < 1e-15);
    cplx b(2.0, 2.0);
    REQUIRE(std::abs(clog1p(b) - std::log(cplx(1.0, 0.0) + b)) < 1e-15);

    cplx e = cexpm1(cplx(0.0, 1e-12));
    REQUIRE_THAT(e.imag(), WithinAbs(1e-12, 1e-27));
    REQUIRE_THAT(e.real(), WithinAbs(-5e-25, 1e-30));
    cplx e2 = cexpm1(cplx(0.5, 0.3));
    REQUIRE(std::abs(e2 - (std::exp(cplx(0.5, 0.3)) - 1.0)) < 1e-15);

    CompensatedSum acc;
    acc.add(cplx(1e16, 0.0));
    acc.add(cplx(1.0, 0.0));
    acc.add(cplx(-1e16, 0.0));
    REQUIRE(acc.value() == cplx(1.0, 0.0));
}

TEST_CASE("interval sets validate, mutate and serialize") {
    REQUIRE_THROWS_AS(IntervalSet({{1.0, 1.0}}), ConstraintError);
    REQUIRE_THROWS_AS(IntervalSet({{0.0, 2.0}, {1.0, 3.0}}), ConstraintError);
    IntervalSet touching({{0.0, 1.0}, {1.0, 2.0}});
    REQUIRE(touching.size() == 2);
    REQUIRE_FALSE(touching.contains(1.0));
    REQUIRE(touching.on_boundary(1.0));
    REQUIRE(touching.contains(0.5));
    REQUIRE(touching.measure() == 2.0);

    IntervalSet u = IntervalSet::from_unsorted({{2.0, 3.0}, {0.0, 1.0}});
    REQUIRE(u.min() == 0.0);
    REQUIRE(u.max() == 3.0);
    REQUIRE(u.measure_in(0.5, 2.5) == 1.0);
    REQUIRE(u.measure_in(-5.0, 5.0) == 2.0);
    REQUIRE(u.min_endpoint_distance(1.25) == 0.25);

    REQUIRE_THROWS_AS(u.insert({0.5, 1.5}), ConstraintError);
    REQUIRE_THROWS_AS(u.insert({1.2, 1.2}), ConstraintError);
    u.insert({1.25, 1.75});
    REQUIRE(u.size() == 3);
    REQUIRE(u.components()[1] == Interval{1.25, 1.75});

    IntervalSet e({{0.0, 1.0}});
    e.erase(0.25, 0.5);
    REQUIRE(e.components() == std::vector<Interval>{{0.0, 0.25}, {0.5, 1.0}});
    e.erase(-1.0, 0.3);
    REQUIRE(e.components() == std::vector<Interval>{{0.5, 1.0}});

    IntervalSet s = scale_translate(two_comp(), 2.0, 3.0);
    REQUIRE(s.components() == std::vector<Interval>{{3.0, 5.0}, {7.0, 9.0}});
    REQUIRE_THROWS_AS(scale_translate(two_comp(), 0.0, 0.0), ConstraintError);
    REQUIRE(scale_translate(two_comp(), 1.0, 0.0) == two_comp());

    nlohmann::json j = two_comp();
    IntervalSet back = j.get<IntervalSet>();
    REQUIRE(back == two_comp());
}

TEST_CASE("kernel closed form on the real axis is exact") {
    REQUIRE(poisson_interval(2.0, 4.0, cplx(3.0, 0.0)) == cplx(1.0, 0.0));
    REQUIRE(h0(cplx(0.0, 0.0)) == cplx(1.0, 0.0));

    cplx outside = poisson(two_comp(), cplx(1.5, 0.0));
    REQUIRE(outside.real() == 0.0);
    REQUIRE(std::abs(outside.imag()) < 1e-16); // symmetric contributions cancel

    cplx inside = poisson(two_comp(), cplx(0.5, 0.0));
    REQUIRE(inside.real() == 1.0);
    REQUIRE(inside.imag() < 0.0);

    cplx left = poisson(two_comp(), cplx(-2.0, 0.0));
    REQUIRE(left.real() == 0.0);
    REQUIRE(left.imag() < 0.0);
}

TEST_CASE("kernel maps the upper half-plane into the unit strip") {
    HaltonStream hs(5);
    for (std::size_t i = 0; i < 400; ++i) {
        double u, v, p, q;
        hs.pair(i, u, v);
        hs.pair(i + 1000, p, q);
        double a = -2.0 + 3.0 * u, len = 0.05 + v;
        IntervalSet X({{a, a + len}, {a + len + 0.1, a + 2.0 * len + 0.1}});
        cplx z(4.0 * (p - 0.5), 1e-3 + 3.0 * q);
        cplx w = poisson(X, z);
        REQUIRE(w.real() > 0.0);
        REQUIRE(w.real() < 1.0);
    }
}

TEST_CASE("kernel is additive over disjoint components") {
    IntervalSet X({{0.0, 1.0}});
    IntervalSet Y({{2.0, 3.0}});
    cplx z(0.7, 0.9);
    cplx sum = poisson(X, z) + poisson(Y, z);
    REQUIRE(std::abs(poisson(two_comp(), z) - sum) < 1e-15);
    REQUIRE(poisson(IntervalSet{}, z) == cplx(0.0, 0.0));
    REQUIRE(poisson_deriv(IntervalSet{}, z) == cplx(0.0, 0.0));
}

TEST_CASE("kernel rejects singular and invalid evaluation points") {
    REQUIRE_THROWS_AS(poisson_interval(1.0, 1.0, cplx(0.0, 1.0)), ConstraintError);
    double inf = std::numeric_limits<double>::infinity();
    REQUIRE_THROWS_AS(poisson_interval(0.0, inf, cplx(0.0, 1.0)), ConstraintError);
    REQUIRE_THROWS_AS(poisson_interval(0.0, 1.0, cplx(0.5, -1e-12)), ConstraintError);
    REQUIRE_THROWS_AS(poisson_interval(0.0, 1.0, cplx(0.0, 0.0)), SingularEndpointError);
    REQUIRE_THROWS_AS(poisson_interval(0.0, 1.0, cplx(1.0, 5e-15)), SingularEndpointError);
    REQUIRE_THROWS_AS(poisson(two_comp(), cplx(2.0, 0.0)), BoundaryPointError);
    REQUIRE_THROWS_AS(poisson_deriv(two_comp(), cplx(3.0, 0.0)), BoundaryPointError);

    // guard radius scales with the interval length
    REQUIRE_THROWS_AS(poisson_interval(0.0, 1e-6, cplx(1e-6 + 1e-21, 0.0)),
                      SingularEndpointError);
    REQUIRE_NOTHROW(poisson_interval(0.0, 1e-6, cplx(1e-6 * (1.0 + 1e-3), 0.0)));
}

TEST_CASE("derivative matches a central difference of the kernel") {
    cplx z(1.0, 1.0);
    double h = 1e-5;
    cplx fd = (poisson(two_comp(), z + h) - poisson(two_comp(), z - h)) / (2.0 * h);
    REQUIRE(std::abs(poisson_deriv(two_comp(), z) - fd) < 1e-8);

    cplx zi(0.4, 2.0);
    cplx fdi = (poisson(two_comp(), zi + h) - poisson(two_comp(), zi - h)) / (2.0 * h);
    REQUIRE(std::abs(poisson_deriv(two_comp(), zi) - fdi) < 1e-8);
}

TEST_CASE("gap template derivative is steeply negative across the gap") {
    double beta = 0.01;
    IntervalSet I = gap_template(beta);
    cplx d0 = poisson_deriv(I, cplx(0.0, 0.0));
    REQUIRE(d0.real() == 0.0);
    REQUIRE_THAT(d0.imag(), WithinAbs(-63.02535746439055, 1e-10));

    HaltonStream hs(9);
    for (std::size_t i = 0; i < 200; ++i) {
        double u, v;
        hs.pair(i, u, v);
        double x = -beta + 2.0 * beta * (0.01 + 0.98 * u);
        REQUIRE(poisson_deriv(I, cplx(x, 0.0)).imag() < -1.0 / (2.0 * beta));
    }
}

TEST_CASE("kernel respects affine rescaling of the set") {
    double a = 0.37, c = -2.0;
    IntervalSet Xs = scale_translate(two_comp(), a, c);
    HaltonStream hs(13);
    for (std::size_t i = 0; i < 200; ++i) {
        double u, v;
        hs.pair(i, u, v);
        cplx z(3.0 * (u - 0.5), 0.3 + 2.0 * v);
        REQUIRE(std::abs(poisson(Xs, z) - poisson(two_comp(), (z - c) / a)) < 1e-12);
    }
}

TEST_CASE("strip map hits its normalization points and decays at infinity") {
    REQUIRE(std::abs(h0(cplx(0.0, 1.0)) - cplx(0.5, 0.0)) < 1e-15);
    for (int k = 0; k < 8; ++k) {
        double th = kPi * (k + 0.5) / 8.0;
        cplx z = 1e8 * cplx(std::cos(th), std::sin(th));
        REQUIRE(std::abs(h0(z)) < 1e-7);
    }
    REQUIRE(std::abs(h0(cplx(1e8, 0.0))) < 1e-7);
}

TEST_CASE("strip map inverse round-trips both ways") {
    REQUIRE(std::abs(h0_inv(cplx(1.0, 0.0))) < 1e-15);
    REQUIRE(std::abs(h0_inv(cplx(0.5, 0.0)) - cplx(0.0, 1.0)) < 1e-14);

    HaltonStream hs(17);
    double worst = 0.0;
    for (std::size_t i = 0; i < 1000; ++i) {
        double u, v;
        hs.pair(i, u, v);
        cplx z(4.0 * (u - 0.5), 1e-3 + 10.0 * v);
        worst = std::max(worst, std::abs(h0_inv(h0(z)) - z));
    }
    REQUIRE(worst < 1e-12);

    for (std::size_t i = 0; i < 500; ++i) {
        double u, v;
        hs.pair(5000 + i, u, v);
        cplx w(0.02 + 0.96 * u, 4.0 * (v - 0.5));
        REQUIRE(std::abs(h0(h0_inv(w)) - w) < 1e-12);
    }
}

TEST_CASE("strip map inverse handles deep strip values and rejects outsiders") {
    cplx zp = h0_inv(cplx(0.5, 150.0));
    REQUIRE(std::abs(zp - cplx(1.0, 0.0)) < 1e-200);
    REQUIRE(zp.imag() >= 0.0);
    cplx zm = h0_inv(cplx(0.5, -150.0));
    REQUIRE(std::abs(zm - cplx(-1.0, 0.0)) < 1e-200);
    REQUIRE(zm.imag() >= 0.0);

    REQUIRE_THROWS_AS(h0_inv(cplx(0.0, 0.0)), OutOfStripError);
    REQUIRE_THROWS_AS(h0_inv(cplx(1.5, 0.0)), OutOfStripError);
    REQUIRE_THROWS_AS(h0_inv(cplx(-0.2, 1.0)), OutOfStripError);
    REQUIRE_NOTHROW(h0_inv(cplx(-1e-13, 0.7)));
    REQUIRE_NOTHROW(h0_inv(cplx(1.0 + 1e-13, 0.7)));
}
