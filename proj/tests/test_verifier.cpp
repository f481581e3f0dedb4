#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "test_fixtures.hpp"
#include "vforge/parallel.hpp"
#include "vforge/verifier.hpp"

using namespace vforge;
using Catch::Matchers::WithinRel;

namespace {

const std::vector<VerificationReport>& reports64() {
    static const std::vector<VerificationReport> reps =
        check_construction_bounds(tfix::ref_state_depth2(), VerifyOptions{64, 1});
    return reps;
}

std::size_t count_id(const std::vector<VerificationReport>& reps, const std::string& id) {
    return static_cast<std::size_t>(std::count_if(
        reps.begin(), reps.end(), [&](const auto& r) { return r.check_id == id; }));
}

const VerificationReport& find_report(const std::vector<VerificationReport>& reps,
                                      const std::string& id, const std::string& node) {
    for (const auto& r : reps)
        if (r.check_id == id && r.node == node) return r;
    FAIL("missing report " << id << " @ " << node);
    return reps.front();
}

} // namespace

TEST_CASE("bound suite covers every check family on every node") {
    const auto& reps = reports64();
    REQUIRE(reps.size() == 256);

    REQUIRE(count_id(reps, "eq12-4eps") == 20);
    REQUIRE(count_id(reps, "eq12-7eps") == 20);
    REQUIRE(count_id(reps, "lemma1-chain") == 16);
    REQUIRE(count_id(reps, "lemma2-siblings") == 20);
    REQUIRE(count_id(reps, "lemma3-ancestors") == 20);
    REQUIRE(count_id(reps, "lemma4-cousins") == 20);
    REQUIRE(count_id(reps, "lemma5-extent") == 20);
    REQUIRE(count_id(reps, "lemma5-measure") == 20);
    REQUIRE(count_id(reps, "lemma5-descendants") == 20);
    REQUIRE(count_id(reps, "eq13-7eps") == 20);
    REQUIRE(count_id(reps, "eq13-4eps") == 20);
    REQUIRE(count_id(reps, "eq19-restricted-all") == 20);
    REQUIRE(count_id(reps, "eq23-all-excl") == 20);

    for (const auto& r : reps) {
        bool should_advise = r.check_id == "eq12-4eps" || r.check_id == "eq13-4eps";
        REQUIRE(r.advisory == should_advise);
        if (!r.advisory) {
            INFO(r.check_id << " @ " << r.node);
            REQUIRE(r.pass);
            REQUIRE(r.margin > 0.0);
        }
    }
    REQUIRE(all_pass(reps));
}

TEST_CASE("certified bound constants match their closed forms") {
    const auto& reps = reports64();
    const auto& p = tfix::ref_params();

    const auto& l2 = find_report(reps, "lemma2-siblings", "1");
    REQUIRE(l2.bound == 8.0 * p.alpha * 5 * 5 / 1.0);
    const auto& l2d = find_report(reps, "lemma2-siblings", "1.1");
    REQUIRE_THAT(l2d.bound, WithinRel(8.0 * p.alpha * 25.0 / p.gamma, 1e-14));

    const auto& l3 = find_report(reps, "lemma3-ancestors", "2");
    REQUIRE_THAT(l3.bound, WithinRel(4.0 / (p.alpha * p.beta1), 1e-14));

    REQUIRE(find_report(reps, "lemma4-cousins", "3").bound == 4.0 * p.eps);
    REQUIRE(find_report(reps, "lemma5-descendants", "3").bound == p.eps);
    REQUIRE(find_report(reps, "eq13-7eps", "4").bound == 7.0 * p.eps);
    REQUIRE(find_report(reps, "eq19-restricted-all", "4").bound == 3.0 * p.eps);
    REQUIRE(find_report(reps, "eq23-all-excl", "1.3").bound == 0.09375);

    // sampled sweeps actually evaluated points and saw a nonzero field
    const auto& e23 = find_report(reps, "eq23-all-excl", "1.3");
    REQUIRE(e23.samples > 0);
    REQUIRE(e23.observed_max > 0.0);
}

TEST_CASE("report stream is independent of the worker count") {
    set_thread_count(1);
    auto serial = check_construction_bounds(tfix::ref_state_depth2(), VerifyOptions{32, 1});
    set_thread_count(4);
    auto parallel = check_construction_bounds(tfix::ref_state_depth2(), VerifyOptions{32, 1});
    set_thread_count(0);

    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        REQUIRE(serial[i].check_id == parallel[i].check_id);
        REQUIRE(serial[i].node == parallel[i].node);
        REQUIRE(serial[i].bound == parallel[i].bound);
        REQUIRE(serial[i].observed_max == parallel[i].observed_max);
        REQUIRE(serial[i].margin == parallel[i].margin);
        REQUIRE(serial[i].pass == parallel[i].pass);
        REQUIRE(serial[i].samples == parallel[i].samples);
        REQUIRE(serial[i].skipped == parallel[i].skipped);
    }
}

TEST_CASE("denser sampling only tightens observed maxima") {
    auto coarse = reports64();
    auto fine = check_construction_bounds(tfix::ref_state_depth2(), VerifyOptions{128, 1});
    std::map<std::pair<std::string, std::string>, double> coarse_max;
    for (const auto& r : coarse) coarse_max[{r.check_id, r.node}] = r.observed_max;
    REQUIRE(fine.size() == coarse.size());
    for (const auto& r : fine) {
        INFO(r.check_id << " @ " << r.node);
        REQUIRE(r.observed_max >= coarse_max.at({r.check_id, r.node}));
    }
}

TEST_CASE("sliding window maximum hits the exact breakpoints") {
    IntervalSet X({{0.0, 0.1}, {0.2, 0.3}});
    double at = 0.0;
    REQUIRE_THAT(max_window_measure(X, 0.15, at), WithinRel(0.1, 1e-13));
    REQUIRE_THAT(X.measure_in(at, at + 0.15), WithinRel(0.1, 1e-13));
    REQUIRE_THAT(max_window_measure(X, 0.25, at), WithinRel(0.15, 1e-13));
    REQUIRE_THAT(X.measure_in(at, at + 0.25), WithinRel(0.15, 1e-13));
}

TEST_CASE("height-eta field bound certifies the densest admissible set") {
    IntervalSet X = lemma7_admissible_set(10, 1.0, 0.1);
    REQUIRE(X.size() == 10);
    REQUIRE(X.min() > 0.0);
    REQUIRE(X.max() < 1.0);
    double d = 0.1 * 1.0 / (10.0 * (1.0 + std::log(10.0)));
    double shave = std::max(1e-12 * d, 1e-13 * 1.0);
    double len = X.components()[0].right - X.components()[0].left;
    REQUIRE_THAT(len, WithinRel(d - shave, 1e-9));

    Lemma7Report rep = check_lemma7(X, 1.0, 10, 0.1, 10.0);
    REQUIRE(rep.window == 0.1);
    REQUIRE_THAT(rep.height, WithinRel(0.1, 1e-14));
    REQUIRE(rep.density.pass);
    REQUIRE_THAT(rep.bound.bound, WithinRel(0.15915494309189535, 1e-14));
    REQUIRE(rep.bound.pass);
    REQUIRE(rep.bound.observed_max > 0.02);
    REQUIRE(rep.bound.observed_max < 0.06);
}

TEST_CASE("field bound handles degenerate and invalid inputs") {
    Lemma7Report empty = check_lemma7(IntervalSet{}, 1.0, 10, 0.1, 10.0);
    REQUIRE(empty.density.pass);
    REQUIRE(empty.bound.pass);
    REQUIRE(empty.bound.observed_max == 0.0);

    Lemma7Report tiny = check_lemma7(IntervalSet{}, 1.0, 10, 1e-12, 1e9, 64);
    REQUIRE(tiny.bound.bound > 0.0);
    REQUIRE(tiny.bound.bound < 1e-8);
    REQUIRE(tiny.bound.pass);

    REQUIRE_THROWS_AS(check_lemma7(IntervalSet({{-0.1, 0.2}}), 1.0, 10, 0.1, 10.0),
                      ConstraintError);
    REQUIRE_THROWS_AS(check_lemma7(IntervalSet({{0.5, 1.5}}), 1.0, 10, 0.1, 10.0),
                      ConstraintError);
    REQUIRE_THROWS_AS(check_lemma7(IntervalSet{}, 1.0, 1, 0.1, 10.0), ConstraintError);
    REQUIRE_THROWS_AS(check_lemma7(IntervalSet{}, 0.0, 10, 0.1, 10.0), ConstraintError);

    // a window denser than the cap is a broken hypothesis, not a failed bound
    REQUIRE_THROWS_AS(check_lemma7(IntervalSet({{0.0, 0.2}}), 1.0, 10, 0.1, 10.0),
                      ConstraintError);
}

TEST_CASE("report writers emit deterministic machine-readable streams") {
    std::vector<VerificationReport> reps(reports64().begin(), reports64().begin() + 5);

    std::ostringstream csv1, csv2;
    write_reports_csv(reps, csv1);
    write_reports_csv(reps, csv2);
    const std::string csv = csv1.str();
    REQUIRE(csv == csv2.str());
    REQUIRE(csv.substr(0, csv.find('\n')) == "check_id,node,bound,observed_max,margin,pass");
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 6);

    std::ostringstream jl1, jl2;
    write_reports_jsonl(reps, jl1);
    write_reports_jsonl(reps, jl2);
    REQUIRE(jl1.str() == jl2.str());
    std::istringstream in(jl1.str());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        nlohmann::json j = nlohmann::json::parse(line);
        REQUIRE(j.at("check_id").get<std::string>() == reps[n].check_id);
        REQUIRE(j.at("bound").get<double>() == reps[n].bound);
        REQUIRE(j.at("worst_point").is_array());
        ++n;
    }
    REQUIRE(n == reps.size());
}

TEST_CASE("advisory results never gate the aggregate verdict") {
    VerificationReport ok;
    ok.check_id = "x";
    ok.pass = true;
    VerificationReport advisory_fail;
    advisory_fail.check_id = "y";
    advisory_fail.pass = false;
    advisory_fail.advisory = true;
    VerificationReport hard_fail;
    hard_fail.check_id = "z";
    hard_fail.pass = false;

    REQUIRE(all_pass({ok, advisory_fail}));
    REQUIRE_FALSE(all_pass({ok, hard_fail}));
    REQUIRE(all_pass({}));
}
