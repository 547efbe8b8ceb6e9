#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "shearlab/experiment.hpp"

using namespace shearlab;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool has_error_containing(const std::vector<std::string>& errs, const std::string& needle) {
    for (const auto& e : errs)
        if (e.find(needle) != std::string::npos) return true;
    return false;
}

std::string tmp_dir(const char* name) {
    std::string d = std::string("/tmp/shearlab_test_") + name;
    std::remove((d + "/report.json").c_str());
    return d;
}

} // namespace

TEST_CASE("spec parsing: a complete valid document") {
    const char* text = R"({
        "subcommand": "nonlinear-run",
        "profile": {"type": "perturbed", "amplitude": 0.05, "theta0": 0.12},
        "grid": {"nx": 64, "ny": 129},
        "weights": {"scale": "test"},
        "run": {"eps": 2e-3, "T_end": 10, "dt": 0.05, "out_every": 2},
        "thresholds": {"identity_tol": 1e-5},
        "out_dir": "/tmp/spec_ok",
        "seed": 7
    })";
    std::vector<std::string> errs;
    auto spec = parse_spec_json(text, errs);
    CHECK(errs.empty());
    CHECK(spec.subcommand == "nonlinear-run");
    CHECK(spec.profile_type == "perturbed");
    CHECK(spec.amplitude == doctest::Approx(0.05));
    CHECK(spec.theta0 == doctest::Approx(0.12));
    CHECK(spec.nx == 64);
    CHECK(spec.ny == 129);
    CHECK(spec.weight_scale == "test");
    CHECK(spec.eps == doctest::Approx(2e-3));
    CHECK(spec.T_end == doctest::Approx(10.0));
    CHECK(spec.out_every == doctest::Approx(2.0));
    CHECK(spec.threshold("identity_tol", 0.0) == doctest::Approx(1e-5));
    CHECK(spec.threshold("not_there", 3.25) == doctest::Approx(3.25));
    CHECK(spec.seed == 7);
    CHECK(spec.weight_params().delta == doctest::Approx(0.5));
}

TEST_CASE("spec parsing: malformed JSON reports a parse error") {
    std::vector<std::string> errs;
    parse_spec_json("{ not json ", errs);
    REQUIRE_FALSE(errs.empty());
    CHECK(has_error_containing(errs, "<json>"));
}

TEST_CASE("spec parsing: unknown fields carry their path") {
    std::vector<std::string> errs;
    parse_spec_json(R"({"subcommand":"check-profile","grid":{"nxx":64}})", errs);
    CHECK(has_error_containing(errs, "grid.nxx"));
    CHECK(has_error_containing(errs, "unknown"));
}

TEST_CASE("spec parsing: type and range errors carry their path") {
    std::vector<std::string> errs;
    parse_spec_json(R"({"subcommand":"check-profile","grid":{"nx":"many"}})", errs);
    CHECK(has_error_containing(errs, "grid.nx"));
    errs.clear();
    parse_spec_json(R"({"subcommand":"check-profile","grid":{"nx":63,"ny":129}})", errs);
    CHECK(has_error_containing(errs, "grid.nx")); // odd nx rejected
    errs.clear();
    parse_spec_json(R"({"subcommand":"check-profile","profile":{"theta0":0.4}})", errs);
    CHECK(has_error_containing(errs, "profile.theta0"));
    errs.clear();
    parse_spec_json(R"({"grid":{"nx":64}})", errs); // subcommand missing
    CHECK(has_error_containing(errs, "subcommand"));
    errs.clear();
    parse_spec_json(
        R"({"subcommand":"nonlinear-run","run":{"T_end":1.0,"dt":0.3}})", errs);
    CHECK(has_error_containing(errs, "dt")); // T_end not a multiple of dt
}

TEST_CASE("check-profile: pass and quantitative-failure exit codes") {
    ExperimentSpec spec;
    spec.subcommand = "check-profile";
    spec.profile_type = "couette";
    spec.out_dir = tmp_dir("cp_ok");
    CHECK(run_experiment(spec) == 0);
    std::string rep = slurp(spec.out_dir + "/report.json");
    CHECK(rep.find("\"pass\": true") != std::string::npos);

    ExperimentSpec bad;
    bad.subcommand = "check-profile";
    bad.profile_type = "perturbed";
    bad.amplitude = 8.0; // violates the size condition on b'' by a wide margin
    bad.out_dir = tmp_dir("cp_bad");
    CHECK(run_experiment(bad) == 2);
    rep = slurp(bad.out_dir + "/report.json");
    CHECK(rep.find("\"pass\": false") != std::string::npos);
}

TEST_CASE("weights-audit report is deterministic for a fixed seed") {
    ExperimentSpec spec;
    spec.subcommand = "weights-audit";
    spec.weight_scale = "test";
    spec.samples = 500;
    spec.seed = 99;

    spec.out_dir = tmp_dir("wa_1");
    int rc1 = run_experiment(spec);
    std::string r1 = slurp(spec.out_dir + "/report.json");

    spec.out_dir = tmp_dir("wa_2");
    int rc2 = run_experiment(spec);
    std::string r2 = slurp(spec.out_dir + "/report.json");

    CHECK(rc1 == rc2);
    CHECK(r1 == r2); // byte-identical: %.17g everywhere, seeded sampling
    CHECK(rc1 == 0);
}

TEST_CASE("theorem-rates: eps = 0 run is a degenerate pass") {
    ExperimentSpec spec;
    spec.subcommand = "theorem-rates";
    spec.profile_type = "couette";
    spec.eps = 0.0;
    spec.nx = 32;
    spec.ny = 65;
    spec.T_end = 4.0;
    spec.dt = 0.05; // CFL limit at nx=32 is dt < 0.5 hx / max|b| ~ 0.098
    spec.out_every = 1.0;
    spec.fit_t1 = 1.0;
    spec.fit_t2 = 4.0;
    spec.energies_on = false;
    spec.out_dir = tmp_dir("tr_zero");
    CHECK(run_experiment(spec) == 0);
    std::string rep = slurp(spec.out_dir + "/report.json");
    CHECK(rep.find("degenerate") != std::string::npos);
}

TEST_CASE("unknown subcommand is a config error") {
    ExperimentSpec spec;
    spec.subcommand = "does-not-exist";
    spec.out_dir = tmp_dir("unk");
    CHECK(run_experiment(spec) == 1);
}
