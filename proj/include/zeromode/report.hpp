#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zeromode/discrete_ops.hpp"
#include "zeromode/flat_fields.hpp"
#include "zeromode/rng.hpp"

namespace zeromode {

/// One pass/fail line of the verification front end. With a target, pass
/// means |computed - target| <= tolerance; without one, the check is
/// defect-style and pass means computed <= tolerance.
struct VerificationReport {
    std::string check_name;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    double computed = 0.0;
    std::optional<double> target;
    double tolerance = 0.0;
    bool pass = false;
    std::int64_t runtime_ms = 0;
};

VerificationReport make_report(std::string name, double computed, std::optional<double> target,
                               double tolerance);

/// Versioned block of every default tolerance; emitted in the report header
/// so pass/fail is reproducible across releases.
struct ToleranceConfig {
    std::string version = "1";
    std::map<std::string, double> values;

    static ToleranceConfig defaults();
    double get(const std::string& key) const;
};

struct RunOptions {
    int dim = 3;
    int sign = 1;
    int grid = 129;
    double radius = 8.0;
    std::vector<double> eps = {0.1};
    int order = 4;
    std::uint64_t seed = 42;
    std::string format = "json";
    std::string out_path;
    ToleranceConfig tolerances = ToleranceConfig::defaults();
};

struct RunResult {
    std::string subcommand;
    std::vector<VerificationReport> reports;
    nlohmann::ordered_json extras = nlohmann::ordered_json::object();

    bool all_pass() const;
};

RunResult run_gamma_check(const RunOptions& opt);
RunResult run_zeromode_verify(const RunOptions& opt);
RunResult run_nullspace_psi0(const RunOptions& opt);
RunResult run_identity_check(const RunOptions& opt);
RunResult run_equality_ledger(const RunOptions& opt);
RunResult run_constants(const RunOptions& opt);
RunResult run_yamabe_min(const RunOptions& opt);
RunResult run_all(const RunOptions& opt);

nlohmann::ordered_json result_to_json(const RunResult& result, const RunOptions& opt);
std::string result_to_csv(const RunResult& result);

/// Exit codes: 0 all checks pass, 1 a tolerance failed, 2 usage error.
int run_cli(int argc, const char* const* argv);

// Canonical verification inputs, shared by the CLI and the test suites.

/// C-infinity cutoff: 1 for r <= r0, 0 for r >= r1.
double smooth_window(double r, double r0, double r1);

/// Sharp zero-mode spinor sampled on the grid; windowed to compact support
/// when window_r1 > window_r0 > 0 (the integral-identity quadratures require
/// margin decay that the raw power-law pair does not have on a box).
SpinorField sample_sharp_spinor(const CliffordRep& rep, const ZeroModeParams& params, const GridSpec& grid,
                                double window_r0 = -1.0, double window_r1 = -1.0);

VectorFieldGrid sample_sharp_potential(const GridSpec& grid, int n, int s);

/// Sum of a few random Gaussian bump spinors, normalized to unit sup norm;
/// decays below 1e-8 on the margins of the default boxes.
SpinorField random_bump_field(const GridSpec& grid, int spinor_dim, Rng& rng);

/// Least-squares slope of log(defect) against log(h).
double fit_loglog_slope(const std::vector<double>& hs, const std::vector<double>& defects);

/// Admissible base spinor from a seeded nullspace run; throws if none exists.
ZeroModeParams seeded_zero_mode_params(const CliffordRep& rep, int n, int s, std::uint64_t seed);

}  // namespace zeromode
