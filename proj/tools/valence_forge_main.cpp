#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vforge/becker.hpp"
#include "vforge/construction.hpp"
#include "vforge/dimension.hpp"
#include "vforge/gmap.hpp"
#include "vforge/parallel.hpp"
#include "vforge/seed.hpp"
#include "vforge/svg.hpp"
#include "vforge/verifier.hpp"

namespace fs = std::filesystem;
using namespace vforge;

namespace {

struct Options {
    int N = 5;
    double eps = 1.0 / 128.0;
    double beta1 = 1.0 / 128.0;
    double gamma1 = 0.0; // resolved to eps*beta1/2 when unset
    int depth = 3;
    double tol = 1e-12;
    int threads = -1; // resolved from VALENCE_FORGE_THREADS, then auto
    std::string seed_name = "exp";
    double r = 20.0;
    std::size_t samples = 200;
    std::uint64_t rng_seed = 1;
    std::string out_dir = ".";
    bool svg = false;
    std::string state_path;
    int level = 0; // resolved to depth when unset
    std::size_t pairs = 500;
    double tau = 0.8;

    // true when the value came from an explicit command-line flag
    bool flag_eps = false, flag_beta1 = false, flag_gamma1 = false, flag_samples = false;
};

void write_json_file(const fs::path& p, const nlohmann::json& j) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConstraintError("cannot open for writing: " + p.string());
    os << j.dump(2) << '\n';
}

std::string origin_name(SeedFunction::Origin o) {
    switch (o) {
    case SeedFunction::Origin::kBuiltin: return "builtin";
    case SeedFunction::Origin::kNormalized: return "normalized";
    case SeedFunction::Origin::kUser: return "user";
    }
    return "unknown";
}

SeedFunction make_seed(const Options& o) {
    if (o.seed_name == "exp") return exp_seed(o.r);
    if (o.seed_name == "degenerate") return degenerate_seed();
    if (o.seed_name.rfind("user:", 0) == 0) {
        fs::path p = o.seed_name.substr(5);
        std::ifstream in(p);
        if (!in) throw ConstraintError("seed spec file not found: " + p.string());
        nlohmann::json spec = nlohmann::json::parse(in);
        return user_seed_from_json(spec);
    }
    throw ConstraintError("unknown seed name '" + o.seed_name +
                          "' (expected exp, degenerate, or user:<path>)");
}

nlohmann::json seed_artifact(const SeedFunction& seed, const SeedConstants& sc) {
    nlohmann::json js = {{"description", seed.description},
                         {"origin", origin_name(seed.origin)},
                         {"collision_residual", seed.collision_residual}};
    if (seed.z0) js["z0"] = {seed.z0->real(), seed.z0->imag()};
    else js["z0"] = nullptr;
    return {{"seed", js}, {"constants", sc}};
}

ConstructionState load_state(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConstraintError("state file not found: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    ConstructionState st;
    from_json(j, st);
    return st;
}

ConstructionState obtain_state(const Options& o) {
    if (!o.state_path.empty()) return load_state(o.state_path);
    return build_construction(derive_params(o.N, o.eps, o.beta1, o.gamma1), o.depth, o.tol);
}

void write_construction_svg(const fs::path& p, const ConstructionState& st) {
    std::vector<IntervalSet> sets;
    for (int l = 1; l <= st.depth(); ++l) {
        std::vector<Interval> ivs;
        bool degenerate = false;
        for (const auto& k : st.level_nodes(l)) {
            Interval J = st.J_abs(k);
            if (!(J.left < J.right)) degenerate = true;
            ivs.push_back(J);
        }
        if (degenerate) break; // deeper levels are below absolute double resolution
        sets.push_back(IntervalSet::from_unsorted(ivs));
    }
    if (sets.empty()) return;
    std::ofstream os(p, std::ios::binary);
    svg_interval_sets(os, sets, 0.0, 1.0);
}

/* ---- subcommand bodies; each writes its artifacts and returns the exit
 * code contribution (0 pass, 1 check failure) ---- */

int cmd_seed(const Options& o, SeedFunction& seed, SeedConstants& sc) {
    seed = make_seed(o);
    sc = estimate_constants(seed);
    write_json_file(fs::path(o.out_dir) / "seed_constants.json", seed_artifact(seed, sc));
    std::printf("seed: %s (m=%.6g, M=%.6g, delta=%.6g, T=%.6g, eta=%.6g%s)\n",
                seed.description.c_str(), sc.m, sc.M, sc.delta, sc.T, sc.eta,
                sc.partial() ? ", partial: no zero pair" : "");
    return 0;
}

int cmd_construct(const Options& o, ConstructionState& st) {
    st = build_construction(derive_params(o.N, o.eps, o.beta1, o.gamma1), o.depth, o.tol);
    nlohmann::json j = st;
    write_json_file(fs::path(o.out_dir) / "state.json", j);
    if (o.svg) write_construction_svg(fs::path(o.out_dir) / "construction.svg", st);

    std::size_t nodes = 0;
    double max_resid = 0.0;
    st.for_each_node([&](const NodeIndex& k) {
        ++nodes;
        max_resid = std::max(max_resid, st.rec(k).resid);
    });
    std::printf("construct: N=%d depth=%d nodes=%zu deepest scale=%.6g max residual=%.3g\n",
                o.N, o.depth, nodes, st.scale(o.depth), max_resid);
    return 0;
}

int cmd_verify(const Options& o, const ConstructionState& st) {
    auto reports = check_construction_bounds(st, VerifyOptions{o.samples, o.rng_seed});
    {
        std::ofstream jl(fs::path(o.out_dir) / "verify_reports.jsonl", std::ios::binary);
        write_reports_jsonl(reports, jl);
        std::ofstream cs(fs::path(o.out_dir) / "verify_reports.csv", std::ios::binary);
        write_reports_csv(reports, cs);
    }

    struct Family {
        std::size_t pass = 0, total = 0;
        double min_margin = std::numeric_limits<double>::infinity();
        bool advisory = false;
    };
    std::vector<std::string> order;
    std::map<std::string, Family> fams;
    for (const auto& rep : reports) {
        if (!fams.count(rep.check_id)) order.push_back(rep.check_id);
        Family& f = fams[rep.check_id];
        ++f.total;
        if (rep.pass) ++f.pass;
        f.min_margin = std::min(f.min_margin, rep.margin);
        f.advisory = rep.advisory;
    }
    for (const auto& id : order) {
        const Family& f = fams[id];
        std::printf("  %-20s %3zu/%3zu pass  min margin % .3e%s\n", id.c_str(), f.pass, f.total,
                    f.min_margin, f.advisory ? "  (advisory)" : "");
    }
    bool ok = all_pass(reports);
    std::printf("verify: %s (%zu reports, %zu samples/node)\n", ok ? "PASS" : "FAIL",
                reports.size(), o.samples);
    return ok ? 0 : 1;
}

int cmd_gmap(const Options& o, const SeedFunction& seed, const SeedConstants& sc) {
    double eps = o.flag_eps ? o.eps : 0.9 * sc.eta / (2.0 * kPi);
    double beta1 = o.flag_beta1 ? o.beta1 : 1.0 / 128.0;
    double gamma1 = o.flag_gamma1 ? o.gamma1 : eps * beta1 / 2.0;
    ConstructionState st =
        build_construction(derive_params(o.N, eps, beta1, gamma1), o.depth, o.tol);
    BilipschitzReport rep = check_bilipschitz(seed, st, o.level, sc, o.pairs, o.rng_seed);

    nlohmann::json j = {{"aux_params",
                         {{"N", o.N},
                          {"eps", eps},
                          {"beta1", beta1},
                          {"gamma1", gamma1},
                          {"depth", o.depth}}},
                        {"level", o.level},
                        {"report", rep}};
    write_json_file(fs::path(o.out_dir) / "gmap_report.json", j);
    std::printf("gmap: %zu pairs at level %d, ratio in [%.6g, %.6g] vs [%.6g, %.6g], "
                "budget %.3g, violations %zu -> %s\n",
                rep.pairs, o.level, rep.min_ratio, rep.max_ratio, rep.lower_bound,
                rep.upper_bound, rep.max_budget, rep.violations, rep.pass ? "PASS" : "FAIL");
    return rep.pass ? 0 : 1;
}

int cmd_valence(const Options& o, const SeedFunction& seed, const SeedConstants& sc) {
    if (sc.partial())
        throw ConstraintError("valence: seed has no zero pair (pick a seed with a collision)");
    double eps = o.flag_eps ? o.eps : sc.eps_rec();
    double beta1 = o.flag_beta1 ? o.beta1 : sc.beta1_rec();
    double gamma1 = o.flag_gamma1 ? o.gamma1 : eps * beta1 / 2.0;
    ConstructionState st =
        build_construction(derive_params(o.N, eps, beta1, gamma1), o.depth, o.tol);
    ValenceReport rep = valence_demo(seed, st, sc, o.depth);

    nlohmann::json j = {{"aux_params",
                         {{"N", o.N},
                          {"eps", eps},
                          {"beta1", beta1},
                          {"gamma1", gamma1},
                          {"depth", o.depth}}},
                        {"report", rep}};
    write_json_file(fs::path(o.out_dir) / "valence_report.json", j);
    if (o.svg && !rep.disks.empty()) {
        std::ofstream os(fs::path(o.out_dir) / "valence_loop.svg", std::ios::binary);
        svg_loop(os, rep.disks.back().loop,
                 "image of the level-" + std::to_string(rep.disks.size()) + " disk boundary");
    }

    for (const auto& d : rep.disks)
        std::printf("  disk at %s: winding %d, radius %.3g, min loop distance %.3g\n",
                    d.node.c_str(), d.winding, d.radius, d.min_loop_dist);
    std::printf("valence: %d preimages across %zu disjoint disks -> %s\n", rep.total_preimages,
                rep.disks.size(), rep.pass ? "PASS" : "FAIL");
    return rep.pass ? 0 : 1;
}

int cmd_dimension(const Options& o, const ConstructionState* st) {
    nlohmann::json j;
    if (st) {
        DimensionReport rep = box_dimension(*st);
        const auto& p = st->params();
        j = {{"report", rep},
             {"params", {{"N", p.N}, {"eps", p.eps}, {"gamma1", p.gamma1}}}};
        if (o.svg) {
            std::vector<std::pair<double, double>> levels;
            for (int l = 1; l <= st->depth(); ++l)
                levels.emplace_back(static_cast<double>(st->level_count(l)), st->scale(l));
            std::ofstream os(fs::path(o.out_dir) / "dimension.svg", std::ios::binary);
            svg_dimension_plot(os, levels, rep.two_scale_slope, "box-counting scaling");
        }
        std::printf("dimension: two-scale slope %.12g, closed form d(N)=%.12g\n",
                    rep.two_scale_slope, *rep.formula_dN);
    } else {
        double d = dimension_formula(o.N, o.eps, o.gamma1);
        j = {{"params", {{"N", o.N}, {"eps", o.eps}, {"gamma1", o.gamma1}}},
             {"formula_dN", d}};
        std::printf("d(%d) = %.17g\n", o.N, d);
    }
    write_json_file(fs::path(o.out_dir) / "dimension_report.json", j);
    return 0;
}

int cmd_becker(const Options& o) {
    std::size_t samples = o.flag_samples ? o.samples : 1024;
    auto logF = power_log_deriv(o.tau);
    std::vector<HalfPlaneMap> maps;
    maps.push_back(halfplane_identity());
    maps.push_back(halfplane_scale(2.0));
    maps.push_back(halfplane_mobius(2.0, 1.0, 1.0, 1.0));
    maps.push_back(halfplane_shift_up(1.0));

    nlohmann::json arr = nlohmann::json::array();
    bool ok = true;
    for (const auto& m : maps) {
        BeckerReport rep = check_becker_halfplane(logF, o.tau, m, samples, o.rng_seed);
        arr.push_back(rep);
        ok = ok && rep.pass;
        std::printf("  %-9s pick ratio %.12f, composed %.12f -> %s\n", rep.map_name.c_str(),
                    rep.max_pick_ratio, rep.max_composed_ratio, rep.pass ? "ok" : "VIOLATED");
    }
    write_json_file(fs::path(o.out_dir) / "becker_report.json",
                    {{"tau", o.tau}, {"samples", samples}, {"reports", arr}});
    std::printf("becker: %s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

void merge_config(Options& o, const CLI::App& app, const std::map<std::string, CLI::Option*>& opts,
                  const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConstraintError("config file not found: " + path);
    nlohmann::json cfg = nlohmann::json::parse(in);
    if (!cfg.is_object()) throw ConstraintError("config file must hold a JSON object");
    (void)app;

    auto unset = [&](const char* key) {
        auto it = opts.find(key);
        return it != opts.end() && it->second->count() == 0;
    };
    for (const auto& [key, val] : cfg.items()) {
        if (key == "N") { if (unset("N")) o.N = val.get<int>(); }
        else if (key == "eps") { if (unset("eps")) o.eps = val.get<double>(); }
        else if (key == "beta1") { if (unset("beta1")) o.beta1 = val.get<double>(); }
        else if (key == "gamma1") { if (unset("gamma1")) o.gamma1 = val.get<double>(); }
        else if (key == "depth") { if (unset("depth")) o.depth = val.get<int>(); }
        else if (key == "tol") { if (unset("tol")) o.tol = val.get<double>(); }
        else if (key == "threads") { if (unset("threads")) o.threads = val.get<int>(); }
        else if (key == "seed") { if (unset("seed")) o.seed_name = val.get<std::string>(); }
        else if (key == "r") { if (unset("r")) o.r = val.get<double>(); }
        else if (key == "samples") { if (unset("samples")) o.samples = val.get<std::size_t>(); }
        else if (key == "rng_seed") { if (unset("rng_seed")) o.rng_seed = val.get<std::uint64_t>(); }
        else if (key == "out_dir") { if (unset("out_dir")) o.out_dir = val.get<std::string>(); }
        else if (key == "svg") { if (unset("svg")) o.svg = val.get<bool>(); }
        else if (key == "state") { if (unset("state")) o.state_path = val.get<std::string>(); }
        else if (key == "level") { if (unset("level")) o.level = val.get<int>(); }
        else if (key == "pairs") { if (unset("pairs")) o.pairs = val.get<std::size_t>(); }
        else if (key == "tau") { if (unset("tau")) o.tau = val.get<double>(); }
        else throw ConstraintError("unknown config key: " + key);
    }
}

} // namespace

int main(int argc, char** argv) {
    Options o;
    std::string config_path;

    CLI::App app{"valence-forge: interval-set field bounds, nested constructions, and the "
                 "multivalence pipeline"};
    app.require_subcommand(1);

    std::map<std::string, CLI::Option*> opts;
    opts["config"] = app.add_option("--config", config_path, "JSON config file (flags win)");
    opts["N"] = app.add_option("--N", o.N, "template branching parameter (>= 3)");
    opts["eps"] = app.add_option("--eps", o.eps, "field bound epsilon (< 1/100)");
    opts["beta1"] = app.add_option("--beta1", o.beta1, "gap half-width ratio (< 1/100)");
    opts["gamma1"] =
        app.add_option("--gamma1", o.gamma1, "first-level scale ratio (default eps*beta1/2)");
    opts["depth"] = app.add_option("--depth", o.depth, "construction depth (levels)");
    opts["tol"] = app.add_option("--tol", o.tol, "root-solve and quadrature tolerance");
    opts["threads"] =
        app.add_option("--threads", o.threads, "worker threads (default: VALENCE_FORGE_THREADS)");
    opts["seed"] = app.add_option("--seed-name", o.seed_name,
                                  "seed function: exp, degenerate, or user:<spec.json>");
    opts["r"] = app.add_option("--r", o.r, "half-plane contraction radius for the seed");
    opts["samples"] = app.add_option("--samples", o.samples, "verification samples per node");
    opts["rng_seed"] = app.add_option("--rng-seed", o.rng_seed, "sampling stream seed");
    opts["out_dir"] = app.add_option("--out-dir", o.out_dir, "artifact output directory");
    opts["svg"] = app.add_flag("--svg", o.svg, "also emit SVG artifacts");
    opts["state"] = app.add_option("--state", o.state_path, "existing state.json to load");
    opts["level"] = app.add_option("--level", o.level, "endpoint-pair level (default: depth)");
    opts["pairs"] = app.add_option("--pairs", o.pairs, "endpoint pairs to test");
    opts["tau"] = app.add_option("--tau", o.tau, "criterion parameter tau");

    CLI::App* sub_seed = app.add_subcommand("seed", "normalize a seed and estimate its constants");
    CLI::App* sub_construct = app.add_subcommand("construct", "build the nested construction");
    CLI::App* sub_verify = app.add_subcommand("verify", "run the certified bound suite");
    CLI::App* sub_gmap = app.add_subcommand("gmap", "bi-Lipschitz endpoint-pair check");
    CLI::App* sub_valence = app.add_subcommand("valence", "multivalence disk demonstration");
    CLI::App* sub_dimension = app.add_subcommand("dimension", "box dimension and closed form");
    CLI::App* sub_becker = app.add_subcommand("becker", "half-plane contraction criterion");
    CLI::App* sub_all = app.add_subcommand("all", "seed, construct, verify, gmap, valence, "
                                                  "dimension against one shared state");
    for (CLI::App* s : {sub_seed, sub_construct, sub_verify, sub_gmap, sub_valence, sub_dimension,
                        sub_becker, sub_all})
        s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) merge_config(o, app, opts, config_path);

        o.flag_eps = opts["eps"]->count() > 0;
        o.flag_beta1 = opts["beta1"]->count() > 0;
        o.flag_gamma1 = opts["gamma1"]->count() > 0;
        o.flag_samples = opts["samples"]->count() > 0;
        if (o.gamma1 == 0.0) o.gamma1 = o.eps * o.beta1 / 2.0;
        if (o.level == 0) o.level = o.depth;
        if (o.threads < 0) {
            const char* env = std::getenv("VALENCE_FORGE_THREADS");
            o.threads = env ? std::atoi(env) : 0;
        }
        set_thread_count(o.threads < 0 ? 0 : o.threads);
        fs::create_directories(o.out_dir);

        if (app.got_subcommand(sub_seed)) {
            SeedFunction seed;
            SeedConstants sc;
            return cmd_seed(o, seed, sc);
        }
        if (app.got_subcommand(sub_construct)) {
            ConstructionState st;
            return cmd_construct(o, st);
        }
        if (app.got_subcommand(sub_verify)) {
            ConstructionState st = obtain_state(o);
            return cmd_verify(o, st);
        }
        if (app.got_subcommand(sub_gmap)) {
            SeedFunction seed;
            SeedConstants sc;
            cmd_seed(o, seed, sc);
            return cmd_gmap(o, seed, sc);
        }
        if (app.got_subcommand(sub_valence)) {
            SeedFunction seed;
            SeedConstants sc;
            cmd_seed(o, seed, sc);
            return cmd_valence(o, seed, sc);
        }
        if (app.got_subcommand(sub_dimension)) {
            if (!o.state_path.empty()) {
                ConstructionState st = load_state(o.state_path);
                return cmd_dimension(o, &st);
            }
            return cmd_dimension(o, nullptr);
        }
        if (app.got_subcommand(sub_becker)) return cmd_becker(o);

        // all: one seed, one state, every pipeline stage except becker
        SeedFunction seed;
        SeedConstants sc;
        int rc = cmd_seed(o, seed, sc);
        ConstructionState st;
        rc = std::max(rc, cmd_construct(o, st));
        rc = std::max(rc, cmd_verify(o, st));
        rc = std::max(rc, cmd_gmap(o, seed, sc));
        rc = std::max(rc, cmd_valence(o, seed, sc));
        rc = std::max(rc, cmd_dimension(o, &st));
        std::printf("all: %s\n", rc == 0 ? "PASS" : "FAIL");
        return rc;
    } catch (const ConstraintError& e) {
        std::fprintf(stderr, "configuration or precondition error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "computation failed: %s\n", e.what());
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "malformed input: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
