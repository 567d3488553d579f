#include "zeromode/report.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "zeromode/conformal_yamabe.hpp"
#include "zeromode/identity_ledger.hpp"

namespace zeromode {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ms_since(Clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
}

void stamp(std::vector<VerificationReport>& reports, std::size_t from, std::int64_t ms) {
    for (std::size_t i = from; i < reports.size(); ++i) reports[i].runtime_ms = ms;
}

GridSpec grid_from(const RunOptions& opt) {
    GridSpec g;
    g.dim = opt.dim;
    g.half_width = opt.radius;
    g.points_per_axis = opt.grid;
    g.stencil_order = opt.order;
    g.validate();
    return g;
}

std::vector<double> eps_sweep(const RunOptions& opt) {
    if (opt.eps.size() >= 2) return opt.eps;
    return {0.1, 0.03, 0.01};
}

}  // namespace

VerificationReport make_report(std::string name, double computed, std::optional<double> target,
                               double tolerance) {
    VerificationReport r;
    r.check_name = std::move(name);
    r.computed = computed;
    r.target = target;
    r.tolerance = tolerance;
    r.pass = target ? (std::abs(computed - *target) <= tolerance) : (computed <= tolerance);
    return r;
}

ToleranceConfig ToleranceConfig::defaults() {
    ToleranceConfig cfg;
    cfg.version = "1";
    cfg.values = {
        {"bubble_quotient_relative", 5e-3},
        {"chain_defect", 1e-14},
        {"clifford_defect", 1e-14},
        {"descent_profile_linf", 2e-2},
        {"descent_quotient_relative", 1e-2},
        {"descent_stationarity", 1e-4},
        {"eps_trend_ratio", 1.0},
        {"gradient_match", 1e-6},
        {"holder_residual", 1e-6},
        {"identity_defect", 1e-2},
        {"identity_refinement_ratio", 1.0},
        {"ledger_refinement_ratio", 1.0},
        {"ledger_relative", 5e-2},
        {"nullspace_residual", 1e-10},
        {"nullspace_stability", 1e-8},
        {"orthonormality", 1e-12},
        {"pullback_relative", 1e-6},
        {"sharpness_relative", 1e-6},
        {"slope_window", 0.3},
        {"sphere_identity", 1e-12},
        {"sphere_norm_defect", 1e-10},
        {"step_defect", 1e-3},
        {"twistor_algebraic", 1e-12},
        {"twistor_ledger_relative", 1e-2},
    };
    return cfg;
}

double ToleranceConfig::get(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) throw std::invalid_argument("unknown tolerance key: " + key);
    return it->second;
}

bool RunResult::all_pass() const {
    for (const VerificationReport& r : reports)
        if (!r.pass) return false;
    return true;
}

double smooth_window(double r, double r0, double r1) {
    const double t = std::clamp((r - r0) / (r1 - r0), 0.0, 1.0);
    const auto f = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    const double a = f(1.0 - t), b = f(t);
    return a / (a + b);
}

SpinorField sample_sharp_spinor(const CliffordRep& rep, const ZeroModeParams& params, const GridSpec& grid,
                                double window_r0, double window_r1) {
    const bool windowed = window_r1 > window_r0 && window_r0 > 0.0;
    return sample_spinor_field(grid, rep.rep_size, [&](const Vector& x) {
        Spinor psi = eval_zero_mode(rep, params, x);
        if (windowed) {
            double r2 = 0.0;
            for (double c : x) r2 += c * c;
            const double w = smooth_window(std::sqrt(r2), window_r0, window_r1);
            for (Complex& z : psi) z *= w;
        }
        return psi;
    });
}

VectorFieldGrid sample_sharp_potential(const GridSpec& grid, int n, int s) {
    return sample_vector_field(grid, [&](const Vector& x) { return eval_potential(n, s, x); });
}

SpinorField random_bump_field(const GridSpec& grid, int spinor_dim, Rng& rng) {
    struct Bump {
        Vector center;
        double width;
        Spinor coeff;
    };
    // one dominant bump plus smaller perturbers; the dominant core keeps
    // |psi| away from zero so the regularized quotients stay smooth, and the
    // width floor keeps the field below 1e-8 on the default box margins
    std::vector<Bump> bumps;
    for (int b = 0; b < 3; ++b) {
        Bump bump;
        const double center_clamp = (b == 0) ? 1.5 : 1.8;
        bump.center = rng.point(grid.dim, b == 0 ? 0.8 : 1.5);
        for (double& c : bump.center) c = std::clamp(c, -center_clamp, center_clamp);
        bump.width = (b == 0) ? 0.5 + 0.3 * rng.uniform() : 0.5 + rng.uniform();
        bump.coeff = rng.unit_spinor(spinor_dim);
        const double amp = (b == 0) ? 1.0 : 0.3 * rng.uniform();
        for (Complex& z : bump.coeff) z *= amp;
        bumps.push_back(std::move(bump));
    }

    SpinorField out = sample_spinor_field(grid, spinor_dim, [&](const Vector& x) {
        Spinor val(spinor_dim, Complex(0.0));
        for (const Bump& b : bumps) {
            double d2 = 0.0;
            for (int a = 0; a < grid.dim; ++a) d2 += (x[a] - b.center[a]) * (x[a] - b.center[a]);
            const double g = std::exp(-b.width * d2);
            for (int k = 0; k < spinor_dim; ++k) val[k] += g * b.coeff[k];
        }
        return val;
    });

    double peak = 0.0;
    for (std::size_t s = 0; s < out.grid.site_count(); ++s) {
        double acc = 0.0;
        for (int k = 0; k < spinor_dim; ++k) acc += std::norm(out.v[s * spinor_dim + k]);
        peak = std::max(peak, acc);
    }
    peak = std::sqrt(peak);
    for (Complex& z : out.v) z /= peak;
    return out;
}

double fit_loglog_slope(const std::vector<double>& hs, const std::vector<double>& defects) {
    const std::size_t n = hs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(hs[i]);
        my += std::log(defects[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(hs[i]) - mx;
        sxy += dx * (std::log(defects[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

ZeroModeParams seeded_zero_mode_params(const CliffordRep& rep, int n, int s, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vector> pts;
    for (int k = 0; k < 50; ++k) pts.push_back(rng.point(n, 1.5));
    const NullspaceResult null = admissible_spinor_basis(rep, n, s, pts);
    if (null.basis.empty()) throw std::runtime_error("no admissible base spinor for the requested (n, s)");
    return ZeroModeParams(n, s, null.basis.front());
}

// ---------------------------------------------------------------------------
// subcommands

RunResult run_gamma_check(const RunOptions& opt) {
    RunResult res;
    res.subcommand = "gamma-check";
    if (opt.dim < 2) throw std::invalid_argument("gamma-check: dimension must be >= 2");
    const double tol = opt.tolerances.get("clifford_defect");
    const int top = opt.dim;
    for (int n = 2; n <= top; ++n) {
        const auto t0 = Clock::now();
        const CliffordRep rep = build_representation(n);
        const std::size_t from = res.reports.size();
        auto add = [&](const char* name, double v) {
            VerificationReport r = make_report(name, v, std::nullopt, tol);
            r.parameters["dim"] = n;
            r.parameters["rep_size"] = rep.rep_size;
            res.reports.push_back(std::move(r));
        };
        add("clifford_anticommutation", anticommutation_defect(rep));
        add("clifford_skew_adjoint", skew_adjoint_defect(rep));
        add("clifford_unitarity", unitarity_defect(rep));
        stamp(res.reports, from, ms_since(t0));
    }
    return res;
}

namespace {

double fd_dirac_defect(const CliffordRep& rep, const ZeroModeParams& params, const GridSpec& grid) {
    const SpinorField psi = sample_sharp_spinor(rep, params, grid);
    const SpinorField numeric = dirac_fd(rep, psi);
    const SpinorField closed = sample_spinor_field(grid, rep.rep_size, [&](const Vector& x) {
        return closed_form_dirac(rep, params, x);
    });

    double worst = 0.0, scale = 0.0;
    const int N = rep.rep_size;
    for_each_site(grid, [&](std::size_t idx, const std::vector<int>& coords) {
        if (!in_interior(grid, coords)) return;
        double diff = 0.0, ref = 0.0;
        for (int k = 0; k < N; ++k) {
            diff += std::norm(numeric.v[idx * N + k] - closed.v[idx * N + k]);
            ref += std::norm(closed.v[idx * N + k]);
        }
        worst = std::max(worst, diff);
        scale = std::max(scale, ref);
    });
    return std::sqrt(worst / scale);
}

}  // namespace

RunResult run_zeromode_verify(const RunOptions& opt) {
    RunResult res;
    res.subcommand = "zeromode-verify";
    const CliffordRep rep = build_representation(opt.dim);

    for (const int s : {1, -1}) {
        const auto t0 = Clock::now();
        const std::size_t from = res.reports.size();

        Rng rng(opt.seed + (s == 1 ? 0 : 1));
        std::vector<Vector> pts;
        for (int k = 0; k < 50; ++k) pts.push_back(rng.point(opt.dim, 1.5));
        const NullspaceResult null = admissible_spinor_basis(rep, opt.dim, s, pts);

        {
            VerificationReport r = make_report("nullspace_nonempty", null.basis.empty() ? 0.0 : 1.0, 1.0, 0.0);
            r.parameters["dim"] = opt.dim;
            r.parameters["s"] = s;
            r.parameters["dimension"] = null.basis.size();
            r.parameters["sample_points"] = 50;
            res.reports.push_back(std::move(r));
        }

        if (!null.basis.empty()) {
            double worst = 0.0;
            for (const Spinor& psi0 : null.basis) {
                for (int k = 0; k < 100; ++k) {
                    const Vector x = rng.point(opt.dim, 3.0);
                    const CMatrix rm = residual_matrix(rep, opt.dim, s, x);
                    worst = std::max(worst, spinor_norm(rm.apply(psi0)));
                }
            }
            VerificationReport r = make_report("zero_mode_residual_heldout", worst, std::nullopt,
                                               opt.tolerances.get("nullspace_residual"));
            r.parameters["dim"] = opt.dim;
            r.parameters["s"] = s;
            r.parameters["heldout_points"] = 100;
            res.reports.push_back(std::move(r));

            const ZeroModeParams params(opt.dim, s, null.basis.front());
            const std::vector<int> ms = {33, 65, 129};
            std::vector<double> hs, defects;
            for (int m : ms) {
                GridSpec g;
                g.dim = opt.dim;
                g.half_width = 3.2;
                g.points_per_axis = m;
                g.stencil_order = opt.order;
                hs.push_back(g.spacing());
                defects.push_back(fd_dirac_defect(rep, params, g));
            }
            const double slope = fit_loglog_slope(hs, defects);
            VerificationReport sr = make_report("fd_dirac_convergence_slope", slope,
                                                static_cast<double>(opt.order),
                                                opt.tolerances.get("slope_window"));
            sr.parameters["dim"] = opt.dim;
            sr.parameters["s"] = s;
            sr.parameters["h"] = hs;
            sr.parameters["defect"] = defects;
            res.reports.push_back(std::move(sr));
        }
        stamp(res.reports, from, ms_since(t0));
    }
    return res;
}

RunResult run_nullspace_psi0(const RunOptions& opt) {
    RunResult res;
    res.subcommand = "nullspace-psi0";
    const auto t0 = Clock::now();
    const CliffordRep rep = build_representation(opt.dim);
    const int N = rep.rep_size;

    auto sample_set = [&](std::uint64_t seed) {
        Rng rng(seed);
        std::vector<Vector> pts;
        for (int k = 0; k < 50; ++k) pts.push_back(rng.point(opt.dim, 1.5));
        return pts;
    };

    const NullspaceResult a = admissible_spinor_basis(rep, opt.dim, opt.sign, sample_set(opt.seed));
    const NullspaceResult b = admissible_spinor_basis(rep, opt.dim, opt.sign, sample_set(opt.seed + 7919));

    {
        VerificationReport r = make_report("nullspace_nonempty", a.basis.empty() ? 0.0 : 1.0, 1.0, 0.0);
        r.parameters["dim"] = opt.dim;
        r.parameters["s"] = opt.sign;
        r.parameters["dimension"] = a.basis.size();
        nlohmann::ordered_json sv = nlohmann::ordered_json::array();
        for (double v : a.singular_values) sv.push_back(v);
        r.parameters["singular_values"] = sv;
        res.reports.push_back(std::move(r));
    }

    if (!a.basis.empty()) {
        double ortho = 0.0;
        for (std::size_t i = 0; i < a.basis.size(); ++i)
            for (std::size_t j = 0; j < a.basis.size(); ++j) {
                const Complex ip = inner(a.basis[i], a.basis[j]);
                ortho = std::max(ortho, std::abs(ip - (i == j ? Complex(1.0) : Complex(0.0))));
            }
        res.reports.push_back(make_report("nullspace_orthonormality", ortho, std::nullopt,
                                          opt.tolerances.get("orthonormality")));

        Rng rng(opt.seed + 31);
        double worst = 0.0;
        for (const Spinor& psi0 : a.basis)
            for (int k = 0; k < 100; ++k) {
                const CMatrix rm = residual_matrix(rep, opt.dim, opt.sign, rng.point(opt.dim, 3.0));
                worst = std::max(worst, spinor_norm(rm.apply(psi0)));
            }
        res.reports.push_back(make_report("zero_mode_residual_heldout", worst, std::nullopt,
                                          opt.tolerances.get("nullspace_residual")));

        // stability of the span across two independent sample sets: largest
        // principal-angle sine via || (I - B_a B_a^H) B_b ||_2
        double stability = 1.0;
        if (a.basis.size() == b.basis.size()) {
            const int d = static_cast<int>(a.basis.size());
            CMatrix proj(N, d);
            for (int j = 0; j < d; ++j) {
                Spinor col = b.basis[j];
                for (const Spinor& u : a.basis) {
                    const Complex c = inner(u, col);
                    for (int i = 0; i < N; ++i) col[i] -= c * u[i];
                }
                for (int i = 0; i < N; ++i) proj(i, j) = col[i];
            }
            if (N >= d) {
                const SvdResult sv = jacobi_svd(proj);
                stability = sv.singular_values.empty() ? 0.0 : sv.singular_values.front();
            }
        }
        VerificationReport st = make_report("nullspace_stability", stability, std::nullopt,
                                            opt.tolerances.get("nullspace_stability"));
        st.parameters["dimension_a"] = a.basis.size();
        st.parameters["dimension_b"] = b.basis.size();
        res.reports.push_back(std::move(st));
    }
    stamp(res.reports, 0, ms_since(t0));
    return res;
}

RunResult run_identity_check(const RunOptions& opt) {
    RunResult res;
    res.subcommand = "identity-check";
    const CliffordRep rep = build_representation(opt.dim);
    const ZeroModeParams params = seeded_zero_mode_params(rep, opt.dim, opt.sign, opt.seed);

    const GridSpec fine = grid_from(opt);
    const int coarse_m = (opt.grid - 1) / 2 + 1;
    bool have_coarse = coarse_m >= std::max(9, 2 * opt.order + 1) && (opt.grid - 1) % 2 == 0;
    GridSpec coarse = fine;
    if (have_coarse) coarse.points_per_axis = coarse_m;

    const double win_r0 = 0.5 * opt.radius;
    const double win_r1 = opt.radius - 0.5;

    struct Labeled {
        std::string label;
        SpinorField fine_field;
        SpinorField coarse_field;
    };
    std::vector<Labeled> fields;
    fields.push_back({"sharp_windowed",
                      sample_sharp_spinor(rep, params, fine, win_r0, win_r1),
                      have_coarse ? sample_sharp_spinor(rep, params, coarse, win_r0, win_r1) : SpinorField{}});
    Rng rng_fine(opt.seed + 1000);
    Rng rng_coarse(opt.seed + 1000);
    for (int k = 0; k < 5; ++k) {
        Labeled l;
        l.label = "bump" + std::to_string(k);
        l.fine_field = random_bump_field(fine, rep.rep_size, rng_fine);
        if (have_coarse) l.coarse_field = random_bump_field(coarse, rep.rep_size, rng_coarse);
        fields.push_back(std::move(l));
    }

    res.extras["identity_reports"] = nlohmann::ordered_json::array();
    const double tol = opt.tolerances.get("identity_defect");

    for (const double eps : opt.eps) {
        double max_fine = 0.0, max_coarse = 0.0;
        for (const Labeled& l : fields) {
            const auto t0 = Clock::now();
            const IdentityReport fine_rep = integral_identity_report(rep, l.fine_field, eps);
            max_fine = std::max(max_fine, fine_rep.defect);
            VerificationReport r = make_report("identity_defect", fine_rep.defect, std::nullopt, tol);
            r.parameters["field"] = l.label;
            r.parameters["eps"] = eps;
            r.parameters["grid"] = opt.grid;
            r.parameters["radius"] = opt.radius;
            r.runtime_ms = ms_since(t0);
            res.reports.push_back(std::move(r));

            nlohmann::ordered_json jr;
            jr["field"] = l.label;
            jr["eps"] = eps;
            jr["lhs"] = fine_rep.lhs;
            jr["term_dirac"] = fine_rep.term_dirac;
            jr["term_grad"] = fine_rep.term_grad;
            jr["term_K"] = fine_rep.term_K;
            jr["defect"] = fine_rep.defect;
            jr["lhs_ops"] = fine_rep.lhs_ops;
            jr["rhs_ops"] = fine_rep.rhs_ops;
            res.extras["identity_reports"].push_back(jr);

            if (have_coarse)
                max_coarse = std::max(max_coarse,
                                      integral_identity_report(rep, l.coarse_field, eps).defect);
        }
        if (have_coarse && max_coarse > 0.0) {
            // the criterion-level defect at this eps (worst field) must drop
            // under the refinement
            VerificationReport r = make_report("identity_refinement_ratio", max_fine / max_coarse,
                                               std::nullopt,
                                               opt.tolerances.get("identity_refinement_ratio"));
            r.parameters["eps"] = eps;
            r.parameters["coarse_grid"] = coarse_m;
            r.parameters["fine_grid"] = opt.grid;
            r.parameters["max_defect_coarse"] = max_coarse;
            r.parameters["max_defect_fine"] = max_fine;
            res.reports.push_back(std::move(r));
        }
    }
    return res;
}

RunResult run_equality_ledger(const RunOptions& opt) {
    RunResult res;
    res.subcommand = "equality-ledger";
    const CliffordRep rep = build_representation(opt.dim);
    const ZeroModeParams params = seeded_zero_mode_params(rep, opt.dim, opt.sign, opt.seed);
    const double yamabe = yamabe_sphere(opt.dim);

    auto build_ledger = [&](const GridSpec& g, std::optional<double> eps) {
        const SpinorField psi = sample_sharp_spinor(rep, params, g);
        const VectorFieldGrid a = sample_sharp_potential(g, opt.dim, params.sign);
        return equality_ledger(rep, psi, a, eps, yamabe, TailModel::power_law);
    };

    auto ledger_json = [](const EqualityLedger& led) {
        nlohmann::ordered_json j;
        j["P"] = led.P;
        j["R1"] = led.R1;
        j["R2"] = led.R2;
        j["S"] = led.S;
        if (led.P_eps) j["P_eps"] = *led.P_eps;
        if (led.R1_eps) j["R1_eps"] = *led.R1_eps;
        if (led.R2_eps) j["R2_eps"] = *led.R2_eps;
        if (led.R_eps) j["R_eps"] = *led.R_eps;
        if (led.S1_eps) j["S1_eps"] = *led.S1_eps;
        if (led.S2_eps) j["S2_eps"] = *led.S2_eps;
        j["yamabe_constant_used"] = led.yamabe_constant_used;
        j["holder_lambda"] = led.holder_lambda;
        j["holder_residual"] = led.holder_residual;
        j["dirac_term"] = led.dirac_term;
        j["potential_ln_sq"] = led.potential_ln_sq;
        return j;
    };

    const auto t0 = Clock::now();
    const GridSpec base = grid_from(opt);
    const EqualityLedger led = build_ledger(base, std::nullopt);
    res.extras["ledger_base"] = ledger_json(led);

    const double scale = led.dirac_term;
    const double ledger_tol = opt.tolerances.get("ledger_relative");
    auto add_term = [&](const char* name, double value, double tol) {
        VerificationReport r = make_report(name, std::abs(value) / scale, std::nullopt, tol);
        r.parameters["value"] = value;
        r.parameters["dirac_term"] = scale;
        res.reports.push_back(std::move(r));
    };
    add_term("ledger_twistor_P_relative", led.P, opt.tolerances.get("twistor_ledger_relative"));
    add_term("ledger_R1_relative", led.R1, ledger_tol);
    add_term("ledger_R2_relative", led.R2, ledger_tol);
    add_term("ledger_S_relative", led.S, ledger_tol);
    res.reports.push_back(make_report("holder_residual", led.holder_residual, std::nullopt,
                                      opt.tolerances.get("holder_residual")));
    res.reports.back().parameters["lambda"] = led.holder_lambda;
    stamp(res.reports, 0, ms_since(t0));

    // refinement: same spacing, larger box, then finer spacing
    {
        const std::size_t from = res.reports.size();
        const auto t1 = Clock::now();
        GridSpec refined = base;
        refined.half_width = 1.5 * base.half_width;
        refined.points_per_axis = (base.points_per_axis - 1) * 3 / 2 + 1;
        const EqualityLedger led2 = build_ledger(refined, std::nullopt);
        res.extras["ledger_refined"] = ledger_json(led2);

        const double scale2 = led2.dirac_term;
        const double floor = 1e-12;
        auto add_ratio = [&](const char* name, double coarse_v, double fine_v) {
            const double ratio = (std::abs(fine_v) / scale2) / std::max(std::abs(coarse_v) / scale, floor);
            VerificationReport r = make_report(name, ratio, std::nullopt,
                                               opt.tolerances.get("ledger_refinement_ratio"));
            r.parameters["base"] = coarse_v;
            r.parameters["refined"] = fine_v;
            res.reports.push_back(std::move(r));
        };
        add_ratio("ledger_refinement_P", led.P, led2.P);
        add_ratio("ledger_refinement_R1", led.R1, led2.R1);
        add_ratio("ledger_refinement_R2", led.R2, led2.R2);
        add_ratio("ledger_refinement_S", led.S, led2.S);
        stamp(res.reports, from, ms_since(t1));
    }

    // eps sweep exhibits the regularized terms trending to zero
    {
        const std::size_t from = res.reports.size();
        const auto t2 = Clock::now();
        std::vector<double> sweep = eps_sweep(opt);
        std::sort(sweep.begin(), sweep.end(), std::greater<>());
        std::vector<EqualityLedger> ledgers;
        res.extras["ledger_eps_sweep"] = nlohmann::ordered_json::array();
        for (double e : sweep) {
            ledgers.push_back(build_ledger(base, e));
            nlohmann::ordered_json j = ledger_json(ledgers.back());
            j["eps"] = e;
            res.extras["ledger_eps_sweep"].push_back(j);
        }
        const double floor = 1e-9 * scale;
        auto trend = [&](const char* name, auto getter) {
            const double first = *getter(ledgers.front());
            const double last = *getter(ledgers.back());
            const double ratio = last / std::max(std::abs(first), floor);
            VerificationReport r = make_report(name, ratio, std::nullopt,
                                               opt.tolerances.get("eps_trend_ratio"));
            r.parameters["eps_first"] = sweep.front();
            r.parameters["eps_last"] = sweep.back();
            r.parameters["value_first"] = first;
            r.parameters["value_last"] = last;
            res.reports.push_back(std::move(r));
        };
        trend("eps_trend_P", [](const EqualityLedger& l) { return l.P_eps; });
        trend("eps_trend_R", [](const EqualityLedger& l) { return l.R_eps; });
        trend("eps_trend_R1", [](const EqualityLedger& l) { return l.R1_eps; });
        trend("eps_trend_R2", [](const EqualityLedger& l) { return l.R2_eps; });
        stamp(res.reports, from, ms_since(t2));
    }
    return res;
}

RunResult run_constants(const RunOptions& opt) {
    RunResult res;
    res.subcommand = "constants";
    const auto t0 = Clock::now();

    {
        double worst_y = 0.0, worst_s = 0.0;
        nlohmann::ordered_json per_dim = nlohmann::ordered_json::array();
        for (int n = 3; n <= 9; ++n) {
            const ConstantsReport c = constants_report(n);
            worst_y = std::max(worst_y, c.chain_defect_sobolev);
            worst_s = std::max(worst_s, c.chain_defect_sphere);
            nlohmann::ordered_json j;
            j["dim"] = n;
            j["sphere_volume"] = c.sphere_vol;
            j["sobolev_constant"] = c.sobolev;
            j["yamabe_sphere"] = c.yamabe;
            j["chain_defect_sobolev"] = c.chain_defect_sobolev;
            j["chain_defect_sphere"] = c.chain_defect_sphere;
            per_dim.push_back(j);
        }
        res.extras["constants"] = per_dim;
        const double tol = opt.tolerances.get("chain_defect");
        VerificationReport r1 = make_report("remark_chain_yamabe_vs_sphere", worst_y, std::nullopt, tol);
        r1.parameters["dims"] = "3..9";
        res.reports.push_back(std::move(r1));
        VerificationReport r2 = make_report("remark_chain_sphere_vs_sobolev", worst_s, std::nullopt, tol);
        r2.parameters["dims"] = "3..9";
        res.reports.push_back(std::move(r2));
    }

    if (opt.dim % 2 == 1 && opt.dim >= 3) {
        const double norm_flat = potential_ln_norm(opt.dim);
        const double a2 = norm_flat * norm_flat;
        const double target = opt.dim / (4.0 * (opt.dim - 1)) * yamabe_sphere(opt.dim);
        const double rel = opt.tolerances.get("sharpness_relative");
        VerificationReport r = make_report("potential_norm_sharpness", a2, target, rel * target);
        r.parameters["dim"] = opt.dim;
        r.parameters["relative_tolerance"] = rel;
        res.reports.push_back(std::move(r));

        const double norm_sphere = sphere_pullback_ln_norm(opt.dim, opt.sign);
        VerificationReport rp = make_report("pullback_norm_invariance",
                                            std::abs(norm_sphere - norm_flat) / norm_flat, std::nullopt,
                                            opt.tolerances.get("pullback_relative"));
        rp.parameters["flat_norm"] = norm_flat;
        rp.parameters["sphere_norm"] = norm_sphere;
        res.reports.push_back(std::move(rp));

        const CliffordRep rep = build_representation(opt.dim);
        const double defect = sphere_spinor_norm_check(rep, opt.dim, opt.sign, opt.seed + 5);
        VerificationReport rs = make_report("sphere_spinor_norm_constant", defect, std::nullopt,
                                            opt.tolerances.get("sphere_norm_defect"));
        rs.parameters["dim"] = opt.dim;
        rs.parameters["s"] = opt.sign;
        rs.parameters["target_constant"] = std::pow(2.0, -0.5 * (opt.dim - 1));
        res.reports.push_back(std::move(rs));
    }

    {
        double worst = 0.0;
        for (int n = 3; n <= 9; n += 2) worst = std::max(worst, yamabe_functional_sphere_check(n));
        VerificationReport r = make_report("yamabe_functional_sphere_reduction", worst, std::nullopt,
                                           opt.tolerances.get("sphere_identity"));
        r.parameters["dims"] = "odd 3..9";
        res.reports.push_back(std::move(r));
    }

    stamp(res.reports, 0, ms_since(t0));
    return res;
}

RunResult run_yamabe_min(const RunOptions& opt) {
    RunResult res;
    res.subcommand = "yamabe-min";
    const int n = opt.dim;
    if (n < 3) throw std::invalid_argument("yamabe-min: dimension must be >= 3");
    const double sn = sobolev_constant(n);

    {
        const auto t0 = Clock::now();
        const RadialProfile bubble = log_profile(4000, 1e-3, 1e3, [&](double r) { return talenti_bubble(n, r); });
        const double q = sobolev_quotient(bubble, n);
        const double rel = opt.tolerances.get("bubble_quotient_relative");
        VerificationReport r = make_report("bubble_sobolev_quotient", q, sn, rel * sn);
        r.parameters["nodes"] = 4000;
        r.parameters["relative_tolerance"] = rel;
        r.runtime_ms = ms_since(t0);
        res.reports.push_back(std::move(r));
    }

    const RadialProfile init = log_profile(400, 1e-2, 1e2, [](double r) { return std::exp(-r * r); });

    {
        const auto t0 = Clock::now();
        const std::size_t from = res.reports.size();
        const DescentResult desc = radial_descent(init, n, 500, 1.0);
        const double qf = desc.trace.back();
        const double rel = opt.tolerances.get("descent_quotient_relative");
        VerificationReport r = make_report("descent_final_quotient", qf, sn, rel * sn);
        r.parameters["steps"] = desc.trace.size() - 1;
        r.parameters["initial_quotient"] = desc.trace.front();
        r.parameters["relative_tolerance"] = rel;
        res.reports.push_back(std::move(r));

        const BubbleFit fit = fit_bubble(desc.profile, n);
        VerificationReport rf = make_report("descent_profile_bubble_linf", fit.deviation, std::nullopt,
                                            opt.tolerances.get("descent_profile_linf"));
        rf.parameters["amplitude"] = fit.amplitude;
        rf.parameters["dilation"] = fit.dilation;
        res.reports.push_back(std::move(rf));

        double worst_rise = 0.0;
        for (std::size_t i = 1; i < desc.trace.size(); ++i)
            worst_rise = std::max(worst_rise, desc.trace[i] - desc.trace[i - 1]);
        res.reports.push_back(make_report("descent_trace_monotone", worst_rise, std::nullopt, 1e-12));

        nlohmann::ordered_json trace = nlohmann::ordered_json::array();
        for (double q : desc.trace) trace.push_back(q);
        res.extras["descent_trace"] = trace;
        stamp(res.reports, from, ms_since(t0));
    }

    {
        const auto t0 = Clock::now();
        const RadialProfile bubble400 = log_profile(400, 1e-2, 1e2, [&](double r) { return talenti_bubble(n, r); });
        const DescentResult stat = radial_descent(bubble400, n, 10, 1.0);
        double worst_drop = 0.0;
        for (std::size_t i = 1; i < stat.trace.size(); ++i)
            worst_drop = std::max(worst_drop, (stat.trace[i - 1] - stat.trace[i]) / stat.trace.front());
        VerificationReport r = make_report("descent_bubble_stationarity", worst_drop, std::nullopt,
                                           opt.tolerances.get("descent_stationarity"));
        r.parameters["steps"] = stat.trace.size() - 1;
        r.runtime_ms = ms_since(t0);
        res.reports.push_back(std::move(r));
    }

    {
        const auto t0 = Clock::now();
        const std::vector<double> grad = sobolev_quotient_gradient(init, n);
        double gmax = 0.0;
        for (double g : grad) gmax = std::max(gmax, std::abs(g));

        Rng rng(opt.seed + 17);
        RadialProfile probe = init;
        double worst = 0.0;
        nlohmann::ordered_json checked = nlohmann::ordered_json::array();
        int found = 0;
        while (found < 5) {
            const int k = 1 + static_cast<int>(rng.uniform() * (init.values.size() - 1));
            if (std::abs(grad[k]) < 1e-3 * gmax) continue;
            const double delta = 1e-5 * std::max(1.0, std::abs(init.values[k]));
            probe.values[k] = init.values[k] + delta;
            const double qp = sobolev_quotient(probe, n);
            probe.values[k] = init.values[k] - delta;
            const double qm = sobolev_quotient(probe, n);
            probe.values[k] = init.values[k];
            const double fd = (qp - qm) / (2.0 * delta);
            worst = std::max(worst, std::abs(fd - grad[k]) / std::abs(grad[k]));
            checked.push_back(k);
            ++found;
        }
        VerificationReport r = make_report("quotient_gradient_vs_fd", worst, std::nullopt,
                                           opt.tolerances.get("gradient_match"));
        r.parameters["nodes_checked"] = checked;
        r.runtime_ms = ms_since(t0);
        res.reports.push_back(std::move(r));
    }
    return res;
}

RunResult run_all(const RunOptions& opt) {
    RunResult res;
    res.subcommand = "all";

    auto merge = [&](RunResult part) {
        for (VerificationReport& r : part.reports) {
            r.parameters["subcommand"] = part.subcommand;
            res.reports.push_back(std::move(r));
        }
        res.extras[part.subcommand] = std::move(part.extras);
    };

    RunOptions gamma = opt;
    gamma.dim = 9;
    merge(run_gamma_check(gamma));
    merge(run_zeromode_verify(opt));
    merge(run_nullspace_psi0(opt));

    RunOptions ident = opt;
    ident.eps = eps_sweep(opt);
    merge(run_identity_check(ident));
    merge(run_equality_ledger(opt));
    merge(run_constants(opt));
    merge(run_yamabe_min(opt));
    return res;
}

// ---------------------------------------------------------------------------
// serialization and CLI

namespace {

nlohmann::ordered_json report_to_json(const VerificationReport& r) {
    nlohmann::ordered_json j;
    j["check_name"] = r.check_name;
    j["parameters"] = r.parameters;
    j["computed"] = r.computed;
    if (r.target)
        j["target"] = *r.target;
    else
        j["target"] = nullptr;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["runtime_ms"] = r.runtime_ms;
    return j;
}

}  // namespace

nlohmann::ordered_json result_to_json(const RunResult& result, const RunOptions& opt) {
    nlohmann::ordered_json j;
    j["tool"] = "zeromode";
    j["subcommand"] = result.subcommand;
    nlohmann::ordered_json o;
    o["dim"] = opt.dim;
    o["s"] = opt.sign;
    o["grid"] = opt.grid;
    o["radius"] = opt.radius;
    o["eps"] = opt.eps;
    o["order"] = opt.order;
    o["seed"] = opt.seed;
    j["options"] = o;
    nlohmann::ordered_json tols;
    tols["version"] = opt.tolerances.version;
    for (const auto& [k, v] : opt.tolerances.values) tols[k] = v;
    j["tolerances"] = tols;
    nlohmann::ordered_json reps = nlohmann::ordered_json::array();
    for (const VerificationReport& r : result.reports) reps.push_back(report_to_json(r));
    j["reports"] = reps;
    j["extras"] = result.extras;
    return j;
}

std::string result_to_csv(const RunResult& result) {
    std::ostringstream os;
    os.precision(17);
    os << "check_name,computed,target,tolerance,pass,runtime_ms\n";
    for (const VerificationReport& r : result.reports) {
        os << r.check_name << "," << r.computed << ",";
        if (r.target)
            os << *r.target;
        else
            os << "";
        os << "," << r.tolerance << "," << (r.pass ? "true" : "false") << "," << r.runtime_ms << "\n";
    }
    return os.str();
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"zeromode: numerical verification of Dirac zero-mode identities and sharpness constants"};
    app.require_subcommand(1);

    RunOptions opt;
    std::vector<std::string> tol_overrides;

    app.add_option("--dim", opt.dim, "ambient dimension")->envname("ZEROMODE_DIM");
    app.add_option("--s", opt.sign, "sign of the zero-mode family, +1 or -1")
        ->check(CLI::IsMember({1, -1}))
        ->envname("ZEROMODE_S");
    app.add_option("--grid", opt.grid, "points per axis")->envname("ZEROMODE_GRID");
    app.add_option("--radius", opt.radius, "box half width")->envname("ZEROMODE_RADIUS");
    app.add_option("--eps", opt.eps, "regularization eps (repeatable for sweeps)")->envname("ZEROMODE_EPS");
    app.add_option("--order", opt.order, "finite-difference stencil order")
        ->check(CLI::IsMember({2, 4}))
        ->envname("ZEROMODE_ORDER");
    app.add_option("--seed", opt.seed, "random seed")->envname("ZEROMODE_SEED");
    app.add_option("--format", opt.format, "report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->envname("ZEROMODE_FORMAT");
    app.add_option("--out", opt.out_path, "report output path")->envname("ZEROMODE_OUT");
    app.add_option("--tol", tol_overrides, "tolerance override key=value (repeatable)")
        ->envname("ZEROMODE_TOL");

    const std::vector<std::string> names = {"gamma-check",    "zeromode-verify", "nullspace-psi0",
                                            "identity-check", "equality-ledger", "constants",
                                            "yamabe-min",     "all"};
    for (const std::string& name : names) {
        CLI::App* sub = app.add_subcommand(name);
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        for (const std::string& ov : tol_overrides) {
            const auto pos = ov.find('=');
            if (pos == std::string::npos) throw std::invalid_argument("--tol expects key=value, got: " + ov);
            const std::string key = ov.substr(0, pos);
            if (opt.tolerances.values.find(key) == opt.tolerances.values.end())
                throw std::invalid_argument("unknown tolerance key: " + key);
            opt.tolerances.values[key] = std::stod(ov.substr(pos + 1));
        }

        RunResult result;
        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "gamma-check")
            result = run_gamma_check(opt);
        else if (sub == "zeromode-verify")
            result = run_zeromode_verify(opt);
        else if (sub == "nullspace-psi0")
            result = run_nullspace_psi0(opt);
        else if (sub == "identity-check")
            result = run_identity_check(opt);
        else if (sub == "equality-ledger")
            result = run_equality_ledger(opt);
        else if (sub == "constants")
            result = run_constants(opt);
        else if (sub == "yamabe-min")
            result = run_yamabe_min(opt);
        else
            result = run_all(opt);

        for (const VerificationReport& r : result.reports) {
            std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.check_name << "  computed=" << r.computed;
            if (r.target) std::cout << "  target=" << *r.target;
            std::cout << "  tol=" << r.tolerance << "\n";
        }
        std::cout << (result.all_pass() ? "all checks passed" : "CHECK FAILURES PRESENT") << " ("
                  << result.reports.size() << " checks)\n";

        if (!opt.out_path.empty()) {
            std::ofstream os(opt.out_path);
            if (!os) throw std::runtime_error("cannot open output path: " + opt.out_path);
            if (opt.format == "csv")
                os << result_to_csv(result);
            else
                os << result_to_json(result, opt).dump(2) << "\n";
        }
        return result.all_pass() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace zeromode
