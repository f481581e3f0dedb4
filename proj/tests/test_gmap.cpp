#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_fixtures.hpp"
#include "vforge/gmap.hpp"

using namespace vforge;
using Catch::Matchers::WithinAbs;

TEST_CASE("identity-derivative map integrates to the identity") {
    GMap gm{degenerate_seed(), IntervalSet({{-1.0, 1.0}}), 1e-12};
    REQUIRE(g_eval(gm, cplx(0.0, 0.0)) == cplx(0.0, 0.0));
    REQUIRE(std::abs(g_eval(gm, cplx(0.5, 0.5)) - cplx(0.5, 0.5)) < 1e-12);
    REQUIRE(std::abs(g_eval(gm, cplx(-2.0, 1e-3)) - cplx(-2.0, 1e-3)) < 1e-12);
    REQUIRE_THROWS_AS(g_eval(gm, cplx(0.0, -0.1)), ConstraintError);

    GMap gc{constant_seed(cplx(0.0, 2.0)), IntervalSet({{-1.0, 1.0}}), 1e-12};
    cplx z(0.7, 0.4);
    REQUIRE(std::abs(g_eval(gc, z) - cplx(0.0, 2.0) * z) < 1e-12);
}

TEST_CASE("preimage counts follow the argument principle") {
    GMap gm{degenerate_seed(), IntervalSet({{-1.0, 1.0}}), 1e-12};

    REQUIRE(count_preimages(gm, cplx(0.2, 1.0), cplx(0.2, 1.0), 0.25) == 1);
    REQUIRE(count_preimages(gm, cplx(2.0, 1.0), cplx(0.0, 1.0), 0.25) == 0);

    // a target on or next to the image of the circle is a refusal, not a count
    REQUIRE_THROWS_AS(count_preimages(gm, cplx(0.25, 1.0), cplx(0.0, 1.0), 0.25), WindingError);
    REQUIRE_THROWS_AS(
        count_preimages(gm, cplx(0.25 * (1.0 + 1e-12), 1.0), cplx(0.0, 1.0), 0.25),
        WindingError);

    REQUIRE_THROWS_AS(count_preimages(gm, cplx(0.0, 1.0), cplx(0.0, 1.0), -1.0),
                      ConstraintError);
    REQUIRE_THROWS_AS(count_preimages(gm, cplx(0.0, 0.2), cplx(0.0, 0.2), 0.3),
                      ConstraintError);
}

TEST_CASE("annulus assertion catches seed/constants mismatches") {
    GMap gm{constant_seed(cplx(2.0, 0.0)), IntervalSet({{-1.0, 1.0}}), 1e-12};
    SeedConstants unit_constants; // m = M = 1
    REQUIRE_THROWS_AS(g_eval(gm, cplx(0.0, 1.0), 1e-10, &unit_constants), SeedError);
    REQUIRE(std::abs(g_eval(gm, cplx(0.0, 1.0)) - cplx(0.0, 2.0)) < 1e-12);
}

TEST_CASE("tree evaluator reproduces straight differences for a flat seed") {
    SeedFunction ds = degenerate_seed();
    SeedConstants sc;
    TreeGEval ge(ds, tfix::ref_state_depth2(), sc);
    ge.anchor(NodeIndex::parse("1"), PointKind::kCenter);

    cplx v = ge.along({cplx(0.0, 0.0), cplx(0.5, 0.5)}, 1e-12);
    REQUIRE(std::abs(v - cplx(0.5, 0.5)) < 1e-11);

    cplx up = ge.vertical(cplx(0.3, 0.0), 0.5, 1e-10);
    REQUIRE(std::abs(up - cplx(0.0, 0.5)) < 1e-9);

    cplx tiny = ge.vertical(cplx(0.0, 0.0), 1e-8, 1e-14);
    REQUIRE(std::abs(tiny - cplx(0.0, 1e-8)) < 1e-13);
}

TEST_CASE("endpoint difference quotients stay inside the derivative annulus") {
    const SeedFunction& seed = tfix::exp_seed_fixture();
    const SeedConstants& sc = tfix::exp_constants_fixture();
    const ConstructionState& st = tfix::bilip_state_depth2();

    BilipschitzReport rep = check_bilipschitz(seed, st, 2, sc, 25);
    REQUIRE(rep.pass);
    REQUIRE(rep.pairs == 25);
    REQUIRE(rep.violations == 0);
    REQUIRE(rep.lower_bound == std::abs(sc.b0) / 8.0);
    REQUIRE(rep.upper_bound == sc.M);

    // the integrand is nearly constant at b0, so ratios cluster tightly
    double ab0 = std::abs(sc.b0);
    REQUIRE(rep.min_ratio > 0.9 * ab0);
    REQUIRE(rep.max_ratio < 1.1 * ab0);
    REQUIRE(rep.max_budget < 0.1 * ab0);
    REQUIRE(rep.worst_lower_slack > 0.0);
    REQUIRE(rep.worst_upper_slack > 0.0);

    REQUIRE_THROWS_AS(check_bilipschitz(seed, st, 0, sc, 4), ConstraintError);
    REQUIRE_THROWS_AS(check_bilipschitz(seed, st, 3, sc, 4), ConstraintError);
    // the reference state's eps is far above the certified window scale
    REQUIRE_THROWS_AS(check_bilipschitz(seed, tfix::ref_state_depth2(), 2, sc, 4),
                      ConstraintError);
}

TEST_CASE("scaled disks at every ancestor level capture distinct preimages") {
    const SeedFunction& seed = tfix::exp_seed_fixture();
    const SeedConstants& sc = tfix::exp_constants_fixture();
    const ConstructionState& st = tfix::valence_state_depth2();

    ValenceReport rep = valence_demo(seed, st, sc, 2, 256);
    REQUIRE(rep.pass);
    REQUIRE(rep.node == "2.2");
    REQUIRE(rep.disks.size() == 2);
    REQUIRE(rep.disjoint);
    REQUIRE(rep.total_preimages == 2);
    for (const auto& d : rep.disks) {
        REQUIRE(d.winding == 1);
        REQUIRE(d.min_loop_dist > 0.0);
        REQUIRE(d.radius > 0.0);
        REQUIRE(d.loop.size() >= 257);
        REQUIRE(d.univalence_windings.size() == 5);
        for (int w : d.univalence_windings) REQUIRE(w == 1);
    }

    ValenceReport shallow = valence_demo(seed, st, sc, 1, 256);
    REQUIRE(shallow.disks.size() == 1);
    REQUIRE(shallow.pass);

    REQUIRE_THROWS_AS(valence_demo(seed, st, sc, 0, 256), ConstraintError);
    REQUIRE_THROWS_AS(valence_demo(seed, st, sc, 3, 256), ConstraintError);
    REQUIRE_THROWS_AS(valence_demo(seed, tfix::ref_state_depth2(), sc, 2, 256),
                      ConstraintError);

    nlohmann::json j = rep;
    REQUIRE(j.at("disks").size() == 2);
    REQUIRE_FALSE(j.at("disks")[0].contains("loop"));
    REQUIRE(j.at("disks")[0].at("univalence_windings").size() == 5);
}
