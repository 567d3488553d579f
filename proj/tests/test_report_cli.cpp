#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "zeromode/report.hpp"

using namespace zeromode;

namespace {

int cli(std::initializer_list<const char*> args) {
    std::vector<const char*> argv = {"zeromode"};
    argv.insert(argv.end(), args.begin(), args.end());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

nlohmann::ordered_json strip_runtimes(nlohmann::ordered_json j) {
    if (j.is_object()) {
        for (auto& [k, v] : j.items()) {
            if (k == "runtime_ms")
                v = 0;
            else
                v = strip_runtimes(v);
        }
    } else if (j.is_array()) {
        for (auto& v : j) v = strip_runtimes(v);
    }
    return j;
}

}  // namespace

TEST_CASE("verification report pass semantics") {
    // target form: |computed - target| <= tolerance
    CHECK(make_report("x", 1.05, 1.0, 0.1).pass);
    CHECK(!make_report("x", 1.2, 1.0, 0.1).pass);
    // defect form: computed <= tolerance
    CHECK(make_report("x", 1e-15, std::nullopt, 1e-14).pass);
    CHECK(!make_report("x", 2e-14, std::nullopt, 1e-14).pass);
}

TEST_CASE("tolerance config lookup") {
    const ToleranceConfig cfg = ToleranceConfig::defaults();
    CHECK(cfg.get("clifford_defect") == 1e-14);
    CHECK_THROWS_AS(cfg.get("nonsense"), std::invalid_argument);
}

TEST_CASE("smooth window: plateau, support, monotonicity") {
    CHECK(smooth_window(0.0, 4.0, 7.5) == 1.0);
    CHECK(smooth_window(3.9, 4.0, 7.5) == 1.0);
    CHECK(smooth_window(7.5, 4.0, 7.5) == 0.0);
    CHECK(smooth_window(9.0, 4.0, 7.5) == 0.0);
    double prev = 1.0;
    for (double r = 4.0; r <= 7.5; r += 0.05) {
        const double w = smooth_window(r, 4.0, 7.5);
        CHECK(w <= prev + 1e-15);
        prev = w;
    }
}

TEST_CASE("log-log slope fit recovers exact powers") {
    const std::vector<double> hs = {0.2, 0.1, 0.05};
    std::vector<double> d4;
    for (double h : hs) d4.push_back(3.7 * h * h * h * h);
    CHECK(fit_loglog_slope(hs, d4) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("seeded zero-mode parameters are reproducible") {
    const CliffordRep rep = build_representation(3);
    const ZeroModeParams a = seeded_zero_mode_params(rep, 3, 1, 42);
    const ZeroModeParams b = seeded_zero_mode_params(rep, 3, 1, 42);
    REQUIRE(a.psi0.size() == b.psi0.size());
    for (std::size_t k = 0; k < a.psi0.size(); ++k) CHECK(a.psi0[k] == b.psi0[k]);
}

TEST_CASE("random bump fields decay on the default margins") {
    GridSpec g;
    g.dim = 3;
    g.half_width = 8.0;
    g.points_per_axis = 65;
    Rng rng(1042);
    for (int trial = 0; trial < 5; ++trial) {
        const SpinorField f = random_bump_field(g, 2, rng);
        double margin_peak = 0.0;
        for_each_site(g, [&](std::size_t idx, const std::vector<int>& coords) {
            if (in_interior(g, coords)) return;
            double a = 0.0;
            for (int c = 0; c < 2; ++c) a += std::norm(f.v[idx * 2 + c]);
            margin_peak = std::max(margin_peak, std::sqrt(a));
        });
        CHECK(margin_peak < 1e-8);
    }
}

TEST_CASE("gamma-check subcommand runs clean and honors exit codes") {
    CHECK(cli({"gamma-check", "--dim", "9"}) == 0);
    CHECK(cli({"gamma-check", "--dim", "1"}) == 2);   // config error
    CHECK(cli({"does-not-exist"}) == 2);              // unknown subcommand
    CHECK(cli({"gamma-check", "--bogus", "1"}) == 2); // unknown flag
    CHECK(cli({"gamma-check", "--s", "3"}) == 2);     // out-of-domain sign
}

TEST_CASE("injected failure flips the exit code to 1") {
    // an impossible tolerance forces a clean FAIL path
    CHECK(cli({"constants", "--dim", "3", "--tol", "chain_defect=1e-20"}) == 1);
    CHECK(cli({"constants", "--dim", "3", "--tol", "nonsense=1"}) == 2);
    CHECK(cli({"constants", "--dim", "3", "--tol", "chain_defect"}) == 2);
}

TEST_CASE("constants subcommand writes a schema-complete JSON report") {
    const std::string path = "constants_report_test.json";
    CHECK(cli({"constants", "--dim", "3", "--out", path.c_str()}) == 0);

    std::ifstream is(path);
    REQUIRE(is.good());
    nlohmann::ordered_json j;
    is >> j;
    is.close();
    std::remove(path.c_str());

    CHECK(j["subcommand"] == "constants");
    CHECK(j["tolerances"].contains("version"));
    CHECK(j["tolerances"].contains("chain_defect"));
    REQUIRE(j["reports"].is_array());
    REQUIRE(!j["reports"].empty());
    for (const auto& r : j["reports"]) {
        CHECK(r.contains("check_name"));
        CHECK(r.contains("parameters"));
        CHECK(r.contains("computed"));
        CHECK(r.contains("target"));
        CHECK(r.contains("tolerance"));
        CHECK(r.contains("pass"));
        CHECK(r.contains("runtime_ms"));
        CHECK(r["pass"].is_boolean());
    }
}

TEST_CASE("csv format emits one row per check") {
    RunOptions opt;
    opt.dim = 3;
    const RunResult res = run_constants(opt);
    const std::string csv = result_to_csv(res);

    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "check_name,computed,target,tolerance,pass,runtime_ms");
    std::size_t rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == res.reports.size());
}

TEST_CASE("re-running a subcommand with the same seed is byte-identical") {
    RunOptions opt;
    opt.dim = 3;
    opt.sign = -1;
    opt.seed = 42;
    const nlohmann::ordered_json a = strip_runtimes(result_to_json(run_nullspace_psi0(opt), opt));
    const nlohmann::ordered_json b = strip_runtimes(result_to_json(run_nullspace_psi0(opt), opt));
    CHECK(a.dump() == b.dump());
}

TEST_CASE("yamabe-min subcommand passes its checks") {
    RunOptions opt;
    opt.dim = 3;
    const RunResult res = run_yamabe_min(opt);
    CHECK(res.all_pass());
    CHECK(res.extras.contains("descent_trace"));
}
