#include "zeromode/identity_ledger.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zeromode/conformal_yamabe.hpp"
#include "zeromode/linalg.hpp"

namespace zeromode {

namespace {

void require_dim(const SpinorField& f) {
    if (f.grid.dim < 3) throw std::invalid_argument("identity ledger: grid dimension must be >= 3");
}

ScalarField pow_field(const ScalarField& f, double expo) {
    ScalarField out = f;
    for (double& x : out.v) x = std::pow(x, expo);
    return out;
}

// psi * scale^expo pointwise
SpinorField rescale_by_power(const SpinorField& psi, const ScalarField& scale, double expo) {
    SpinorField out = psi;
    const std::size_t sites = scale.v.size();
    for (std::size_t s = 0; s < sites; ++s) {
        const double f = std::pow(scale.v[s], expo);
        for (int k = 0; k < psi.spinor_dim; ++k) out.v[s * psi.spinor_dim + k] *= f;
    }
    return out;
}

ScalarField squared_norm_sum(const std::vector<SpinorField>& comps) {
    ScalarField out;
    out.grid = comps.front().grid;
    out.v.assign(out.grid.site_count(), 0.0);
    const int N = comps.front().spinor_dim;
    for (const SpinorField& c : comps)
        for (std::size_t s = 0; s < out.v.size(); ++s) {
            double acc = 0.0;
            for (int k = 0; k < N; ++k) acc += std::norm(c.v[s * N + k]);
            out.v[s] += acc;
        }
    return out;
}

ScalarField squared_norm(const SpinorField& f) {
    ScalarField out;
    out.grid = f.grid;
    out.v.resize(f.grid.site_count());
    for (std::size_t s = 0; s < out.v.size(); ++s) {
        double acc = 0.0;
        for (int k = 0; k < f.spinor_dim; ++k) acc += std::norm(f.v[s * f.spinor_dim + k]);
        out.v[s] = acc;
    }
    return out;
}

double max_interior(const GridSpec& grid, const std::vector<double>& site_values) {
    double worst = 0.0;
    for_each_site(grid, [&](std::size_t idx, const std::vector<int>& coords) {
        if (!in_interior(grid, coords)) return;
        worst = std::max(worst, site_values[idx]);
    });
    return worst;
}

}  // namespace

double step0_defect(const SpinorField& field, double eps) {
    require_dim(field);
    if (!(eps > 0.0)) throw std::domain_error("step0_defect: eps must be positive");
    const int n = field.grid.dim;
    const int N = field.spinor_dim;

    const std::vector<SpinorField> grad_psi = gradient_fd(field);
    const ScalarField npsi = pointwise_norm(field);
    const ScalarField npe = regularized_norm(field, eps);
    const VectorFieldGrid gn = gradient_fd(npsi);
    const VectorFieldGrid gne = gradient_fd(npe);

    std::vector<double> defect(field.grid.site_count(), 0.0);
    for (std::size_t s = 0; s < defect.size(); ++s) {
        double worst = 0.0;
        for (int j = 0; j < n; ++j) {
            double re = 0.0;
            for (int k = 0; k < N; ++k)
                re += std::real(std::conj(field.v[s * N + k]) * grad_psi[j].v[s * N + k]);
            const double b = npsi.v[s] * gn.v[s * n + j];
            const double c = npe.v[s] * gne.v[s * n + j];
            worst = std::max({worst, std::abs(re - b), std::abs(re - c), std::abs(b - c)});
        }
        defect[s] = worst;
    }
    return max_interior(field.grid, defect);
}

double step1_defect(const SpinorField& field, double eps) {
    require_dim(field);
    if (!(eps > 0.0)) throw std::domain_error("step1_defect: eps must be positive");
    const int n = field.grid.dim;

    const ScalarField npe = regularized_norm(field, eps);
    const ScalarField npsi2 = squared_norm(field);
    const SpinorField phi = rescale_by_power(field, npe, -static_cast<double>(n) / (n - 1));

    const ScalarField grad_phi2 = squared_norm_sum(gradient_fd(phi));
    const ScalarField grad_psi2 = squared_norm_sum(gradient_fd(field));
    const ScalarField v_eps = pow_field(npe, static_cast<double>(n - 2) / (n - 1));
    const VectorFieldGrid gv = gradient_fd(v_eps);

    const double cn2 = std::pow(static_cast<double>(n) / (n - 2), 2);
    const double c2 = 2.0 * n * (n - 1) / ((n - 2) * (n - 2));

    std::vector<double> defect(field.grid.site_count(), 0.0);
    for (std::size_t s = 0; s < defect.size(); ++s) {
        const double ne = npe.v[s];
        const double lhs = grad_phi2.v[s] * ne * ne;
        double gv2 = 0.0;
        for (int j = 0; j < n; ++j) gv2 += gv.v[s * n + j] * gv.v[s * n + j];
        const double rhs = grad_psi2.v[s] / std::pow(ne, 2.0 / (n - 1)) +
                           gv2 * (cn2 * npsi2.v[s] / (ne * ne) - c2);
        defect[s] = std::abs(lhs - rhs);
    }
    return max_interior(field.grid, defect);
}

double step2_defect(const CliffordRep& rep, const SpinorField& field, double eps) {
    require_dim(field);
    if (!(eps > 0.0)) throw std::domain_error("step2_defect: eps must be positive");
    const int n = field.grid.dim;
    const int N = field.spinor_dim;

    const ScalarField npe = regularized_norm(field, eps);
    const ScalarField npsi2 = squared_norm(field);
    const SpinorField phi = rescale_by_power(field, npe, -static_cast<double>(n) / (n - 1));

    const ScalarField dphi2 = squared_norm(dirac_fd(rep, phi));
    const SpinorField dpsi = dirac_fd(rep, field);
    const ScalarField dpsi2 = squared_norm(dpsi);
    const ScalarField v_eps = pow_field(npe, static_cast<double>(n - 2) / (n - 1));
    const VectorFieldGrid gv = gradient_fd(v_eps);
    const VectorFieldGrid gne = gradient_fd(npe);

    const double cn2 = std::pow(static_cast<double>(n) / (n - 2), 2);
    const double cross_coef = 2.0 * n / (n - 1);

    Vector grad_site(n);
    Spinor psi_site(N);
    std::vector<double> defect(field.grid.site_count(), 0.0);
    for (std::size_t s = 0; s < defect.size(); ++s) {
        const double ne = npe.v[s];
        const double lhs = dphi2.v[s] * ne * ne;

        double gv2 = 0.0;
        for (int j = 0; j < n; ++j) gv2 += gv.v[s * n + j] * gv.v[s * n + j];

        for (int j = 0; j < n; ++j) grad_site[j] = gne.v[s * n + j];
        for (int k = 0; k < N; ++k) psi_site[k] = field.v[s * N + k];
        const Spinor cross = clifford_apply(rep, grad_site, psi_site);
        double re = 0.0;
        for (int k = 0; k < N; ++k) re += std::real(std::conj(dpsi.v[s * N + k]) * cross[k]);

        const double rhs = dpsi2.v[s] / std::pow(ne, 2.0 / (n - 1)) + cn2 * gv2 * npsi2.v[s] / (ne * ne) -
                           cross_coef / std::pow(ne, 2.0 / (n - 1) + 1.0) * re;
        defect[s] = std::abs(lhs - rhs);
    }
    return max_interior(field.grid, defect);
}

IdentityReport integral_identity_report(const CliffordRep& rep, const SpinorField& field, double eps,
                                        const EndoField* curvature) {
    require_dim(field);
    if (!(eps > 0.0)) throw std::domain_error("integral_identity_report: eps must be positive");
    const int n = field.grid.dim;
    const int N = field.spinor_dim;

    const ScalarField npe = regularized_norm(field, eps);
    const ScalarField npsi2 = squared_norm(field);

    IdentityReport rep_out;
    rep_out.eps = eps;
    rep_out.lhs_ops = {"twistor_fd(psi/|psi|_eps^{n/(n-1)})"};
    rep_out.rhs_ops = {"dirac_fd(psi)", "gradient_fd(|psi|_eps^{(n-2)/(n-1)})"};

    {
        const SpinorField phi = rescale_by_power(field, npe, -static_cast<double>(n) / (n - 1));
        ScalarField tw = squared_norm_sum(twistor_fd(rep, phi));
        for (std::size_t s = 0; s < tw.v.size(); ++s) tw.v[s] *= npe.v[s] * npe.v[s];
        rep_out.lhs = integrate(tw);
    }

    {
        ScalarField di = squared_norm(dirac_fd(rep, field));
        for (std::size_t s = 0; s < di.v.size(); ++s) di.v[s] /= std::pow(npe.v[s], 2.0 / (n - 1));
        rep_out.term_dirac = (n - 1.0) / n * integrate(di);
    }

    {
        const ScalarField v_eps = pow_field(npe, static_cast<double>(n - 2) / (n - 1));
        const VectorFieldGrid gv = gradient_fd(v_eps);
        ScalarField gr;
        gr.grid = field.grid;
        gr.v.resize(field.grid.site_count());
        for (std::size_t s = 0; s < gr.v.size(); ++s) {
            double gv2 = 0.0;
            for (int j = 0; j < n; ++j) gv2 += gv.v[s * n + j] * gv.v[s * n + j];
            const double bracket = 2.0 * (n - 1) - n * npsi2.v[s] / (npe.v[s] * npe.v[s]);
            gr.v[s] = gv2 * bracket;
        }
        rep_out.term_grad = (n - 1.0) / ((n - 2.0) * (n - 2.0)) * integrate(gr);
    }

    if (curvature) {
        if (!curvature->grid.same_layout(field.grid) || curvature->rep_size != N)
            throw std::invalid_argument("integral_identity_report: curvature field layout mismatch");
        ScalarField kf;
        kf.grid = field.grid;
        kf.v.resize(field.grid.site_count());
        for (std::size_t s = 0; s < kf.v.size(); ++s) {
            Complex acc(0.0);
            for (int i = 0; i < N; ++i) {
                Complex row(0.0);
                for (int j = 0; j < N; ++j)
                    row += curvature->v[(s * N + i) * N + j] * field.v[s * N + j];
                acc += std::conj(field.v[s * N + i]) * row;
            }
            kf.v[s] = std::real(acc) / std::pow(npe.v[s], 2.0 / (n - 1));
        }
        rep_out.term_K = integrate(kf);
        rep_out.rhs_ops.push_back("curvature_contraction(psi)");
    }

    const double rhs = rep_out.term_dirac - rep_out.term_grad - rep_out.term_K;
    rep_out.defect = std::abs(rep_out.lhs - rhs) / std::max(std::abs(rep_out.lhs), 1.0);
    return rep_out;
}

namespace {

// Shell-fitted power-law tail: integrand ~ kappa r^{-p} outside the inscribed
// ball; adds omega_{n-1} kappa R^{n-p} / (p - n).
double ball_integral_with_tail(const ScalarField& f, double r_int, double p, bool with_tail) {
    const double base = integrate_ball(f, r_int);
    if (!with_tail) return base;

    const GridSpec& g = f.grid;
    const double lo = 0.88 * r_int;
    double kappa_sum = 0.0;
    std::size_t count = 0;
    for_each_site(g, [&](std::size_t idx, const std::vector<int>& coords) {
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const double c = g.coord(coords[a]);
            r2 += c * c;
        }
        const double r = std::sqrt(r2);
        if (r < lo || r > r_int) return;
        kappa_sum += f.v[idx] * std::pow(r, p);
        ++count;
    });
    if (count == 0) return base;
    const double kappa = kappa_sum / static_cast<double>(count);
    const double tail = sphere_volume(g.dim - 1) * kappa * std::pow(r_int, g.dim - p) / (p - g.dim);
    return base + tail;
}

}  // namespace

EqualityLedger equality_ledger(const CliffordRep& rep, const SpinorField& psi, const VectorFieldGrid& a_field,
                               std::optional<double> eps, double yamabe_constant, TailModel tail) {
    require_dim(psi);
    if (!a_field.grid.same_layout(psi.grid) || a_field.vec_dim != psi.grid.dim)
        throw std::invalid_argument("equality_ledger: potential field layout mismatch");
    if (eps && !(*eps > 0.0)) throw std::domain_error("equality_ledger: eps must be positive");

    const GridSpec& g = psi.grid;
    const int n = g.dim;
    const double q = static_cast<double>(n - 2) / (n - 1);
    const double c_n = 4.0 * (n - 1) / (n - 2);
    const double sobolev_side = yamabe_constant / c_n;  // Y / c_n
    const bool with_tail = (tail == TailModel::power_law);
    const double r_int = g.half_width - (g.trim() + 0.5) * g.spacing();

    const ScalarField napsi = pointwise_norm(psi);
    ScalarField aabs;
    aabs.grid = g;
    aabs.v.resize(g.site_count());
    for (std::size_t s = 0; s < aabs.v.size(); ++s) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += a_field.v[s * n + j] * a_field.v[s * n + j];
        aabs.v[s] = std::sqrt(acc);
    }

    double min_psi = 1e300;
    for_each_site(g, [&](std::size_t idx, const std::vector<int>& coords) {
        if (in_interior(g, coords)) min_psi = std::min(min_psi, napsi.v[idx]);
    });
    if (!eps && min_psi == 0.0)
        throw std::invalid_argument("equality_ledger: |psi| vanishes on the interior and no eps was given");

    auto masked = [&](const ScalarField& f, double p) {
        return with_tail ? ball_integral_with_tail(f, r_int, p, true) : integrate(f);
    };

    EqualityLedger led;
    led.yamabe_constant_used = yamabe_constant;

    // ||A||_{L^n}^2 of the input field
    {
        const ScalarField an = pow_field(aabs, static_cast<double>(n));
        led.potential_ln_sq = std::pow(masked(an, 2.0 * n), 2.0 / n);
    }

    // plain terms (eps-free identity, valid for |psi| > 0)
    if (min_psi > 0.0) {
        const ScalarField i3f = pow_field(napsi, 2.0 * n / (n - 1));
        const double ld = std::pow(masked(i3f, 2.0 * n), static_cast<double>(n - 2) / n);

        ScalarField iaf;
        iaf.grid = g;
        iaf.v.resize(g.site_count());
        for (std::size_t s = 0; s < iaf.v.size(); ++s)
            iaf.v[s] = aabs.v[s] * aabs.v[s] * std::pow(napsi.v[s], 2.0 * q);
        const double ia = masked(iaf, 2.0 * n);

        const ScalarField v = pow_field(napsi, q);
        const VectorFieldGrid gv = gradient_fd(v);
        ScalarField gv2;
        gv2.grid = g;
        gv2.v.resize(g.site_count());
        for (std::size_t s = 0; s < gv2.v.size(); ++s) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += gv.v[s * n + j] * gv.v[s * n + j];
            gv2.v[s] = acc;
        }
        const double igrad = masked(gv2, 2.0 * (n - 1));

        {
            const SpinorField phi = rescale_by_power(psi, napsi, -static_cast<double>(n) / (n - 1));
            ScalarField tw = squared_norm_sum(twistor_fd(rep, phi));
            for (std::size_t s = 0; s < tw.v.size(); ++s) tw.v[s] *= napsi.v[s] * napsi.v[s];
            led.P = with_tail ? integrate_ball(tw, r_int) : integrate(tw);
        }

        led.R1 = (n - 1.0) / n * (led.potential_ln_sq * ld - ia);
        led.R2 = (n - 1.0) / (n - 2.0) * (igrad - sobolev_side * ld);
        led.S = ((n - 1.0) / n * led.potential_ln_sq - yamabe_constant / 4.0) * ld;
        led.dirac_term = (n - 1.0) / n * ia;

        // weighted least-squares proportionality |A| ~ lambda |psi|^{2/(n-1)}
        {
            double num = 0.0, den = 0.0, amax = 0.0;
            const ScalarField b = pow_field(napsi, 2.0 / (n - 1));
            for_each_site(g, [&](std::size_t idx, const std::vector<int>& coords) {
                if (!in_interior(g, coords)) return;
                num += b.v[idx] * b.v[idx] * aabs.v[idx];
                den += b.v[idx] * b.v[idx] * b.v[idx];
                amax = std::max(amax, aabs.v[idx]);
            });
            led.holder_lambda = num / den;
            double worst = 0.0;
            for_each_site(g, [&](std::size_t idx, const std::vector<int>& coords) {
                if (!in_interior(g, coords)) return;
                worst = std::max(worst, std::abs(aabs.v[idx] - led.holder_lambda * b.v[idx]));
            });
            led.holder_residual = worst / amax;
        }
    }

    if (eps) {
        const double e = *eps;
        const ScalarField npe = regularized_norm(psi, e);
        const ScalarField npsi2 = squared_norm(psi);
        const ScalarField v_eps = pow_field(npe, q);
        const VectorFieldGrid gve = gradient_fd(v_eps);

        ScalarField gv2e;
        gv2e.grid = g;
        gv2e.v.resize(g.site_count());
        for (std::size_t s = 0; s < gv2e.v.size(); ++s) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += gve.v[s * n + j] * gve.v[s * n + j];
            gv2e.v[s] = acc;
        }

        {
            const SpinorField phi = rescale_by_power(psi, npe, -static_cast<double>(n) / (n - 1));
            ScalarField tw = squared_norm_sum(twistor_fd(rep, phi));
            for (std::size_t s = 0; s < tw.v.size(); ++s) tw.v[s] *= npe.v[s] * npe.v[s];
            led.P_eps = integrate(tw);
        }

        {
            ScalarField re = gv2e;
            for (std::size_t s = 0; s < re.v.size(); ++s) re.v[s] *= e * e / (npe.v[s] * npe.v[s]);
            led.R_eps = static_cast<double>(n) * (n - 1) / ((n - 2.0) * (n - 2.0)) * integrate(re);
        }

        ScalarField jf;
        jf.grid = g;
        jf.v.resize(g.site_count());
        for (std::size_t s = 0; s < jf.v.size(); ++s)
            jf.v[s] = std::pow(npsi2.v[s] / std::pow(npe.v[s], 2.0 / (n - 1)), static_cast<double>(n) / (n - 2));
        const double jpow = std::pow(integrate(jf), static_cast<double>(n - 2) / n);

        ScalarField iae;
        iae.grid = g;
        iae.v.resize(g.site_count());
        for (std::size_t s = 0; s < iae.v.size(); ++s)
            iae.v[s] = aabs.v[s] * aabs.v[s] * npsi2.v[s] / std::pow(npe.v[s], 2.0 / (n - 1));
        led.R1_eps = (n - 1.0) / n * (led.potential_ln_sq * jpow - integrate(iae));

        ScalarField tilde;
        tilde.grid = g;
        tilde.v.resize(g.site_count());
        const double eq = std::pow(e, q);
        for (std::size_t s = 0; s < tilde.v.size(); ++s)
            tilde.v[s] = std::pow(std::max(v_eps.v[s] - eq, 0.0), 2.0 * n / (n - 2));
        const double tpow = std::pow(integrate(tilde), static_cast<double>(n - 2) / n);

        const double igrad_e = integrate(gv2e);
        led.R2_eps = (n - 1.0) / (n - 2.0) * (igrad_e - sobolev_side * tpow);
        led.S1_eps = (n - 1.0) / n * led.potential_ln_sq * jpow - (n - 1.0) / (n - 2.0) * sobolev_side * tpow;
        led.S2_eps = 0.0;  // flat: scal = 0
    }

    return led;
}

}  // namespace zeromode
