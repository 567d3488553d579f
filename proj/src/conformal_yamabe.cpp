#include "zeromode/conformal_yamabe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zeromode/flat_fields.hpp"
#include "zeromode/linalg.hpp"
#include "zeromode/quadrature.hpp"
#include "zeromode/rng.hpp"

namespace zeromode {

namespace {
constexpr double kPi = 3.141592653589793238462643383279503;
}

double sphere_volume(int n) {
    if (n < 1) throw std::invalid_argument("sphere_volume: dimension must be >= 1");
    return 2.0 * std::pow(kPi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

double sobolev_constant(int n) {
    if (n < 3) throw std::invalid_argument("sobolev_constant: dimension must be >= 3");
    return 0.25 * n * (n - 2) * std::pow(sphere_volume(n), 2.0 / n);
}

double yamabe_sphere(int n) {
    if (n < 2) throw std::invalid_argument("yamabe_sphere: dimension must be >= 2");
    return static_cast<double>(n) * (n - 1) * std::pow(sphere_volume(n), 2.0 / n);
}

double talenti_bubble(int n, double r) {
    if (n < 3) throw std::invalid_argument("talenti_bubble: dimension must be >= 3");
    return std::pow(1.0 + r * r, -0.5 * (n - 2));
}

ConstantsReport constants_report(int n) {
    ConstantsReport rep;
    rep.dim = n;
    rep.sphere_vol = sphere_volume(n);
    rep.sobolev = sobolev_constant(n);
    rep.yamabe = yamabe_sphere(n);
    const double mid = 0.25 * n * n * std::pow(rep.sphere_vol, 2.0 / n);
    const double left = n / (4.0 * (n - 1)) * rep.yamabe;
    const double right = static_cast<double>(n) / (n - 2) * rep.sobolev;
    rep.chain_defect_sobolev = std::abs(left - mid) / mid;
    rep.chain_defect_sphere = std::abs(mid - right) / mid;
    return rep;
}

RadialProfile log_profile(int count, double r_min, double r_max,
                          const std::function<double(double)>& f) {
    if (count < 10 || !(0.0 < r_min && r_min < r_max))
        throw std::invalid_argument("log_profile: bad node parameters");
    RadialProfile p;
    p.radii.resize(count);
    p.values.resize(count);
    p.radii[0] = 0.0;
    const double ratio = std::log(r_max / r_min);
    for (int i = 1; i < count; ++i)
        p.radii[i] = r_min * std::exp(ratio * static_cast<double>(i - 1) / (count - 2));
    for (int i = 0; i < count; ++i) p.values[i] = f(p.radii[i]);
    return p;
}

namespace {

struct Stencil {
    int j[3];
    double c[3];
};

// Machinery shared by the quotient, its gradient, and the descent: nodal
// 3-point derivative stencils (one-sided at the ends), trapezoid weights,
// and the fixed-decay tail contributions.
struct QuotientAssembly {
    int n;
    int m;
    std::vector<double> r, w, rn1;
    std::vector<Stencil> stencils;
    double p_crit, theta, omega;

    QuotientAssembly(const RadialProfile& profile, int dim) {
        n = dim;
        m = static_cast<int>(profile.radii.size());
        if (m < 5) throw std::invalid_argument("sobolev_quotient: too few nodes");
        r = profile.radii;
        if (r[0] != 0.0) throw std::invalid_argument("sobolev_quotient: first node must be r = 0");
        for (int i = 0; i + 1 < m; ++i)
            if (!(r[i] < r[i + 1])) throw std::invalid_argument("sobolev_quotient: radii must increase");

        p_crit = 2.0 * n / (n - 2);
        theta = static_cast<double>(n - 2) / n;
        omega = sphere_volume(n - 1);

        w.assign(m, 0.0);
        for (int i = 0; i + 1 < m; ++i) {
            const double d = r[i + 1] - r[i];
            w[i] += 0.5 * d;
            w[i + 1] += 0.5 * d;
        }

        rn1.resize(m);
        for (int i = 0; i < m; ++i) rn1[i] = std::pow(r[i], n - 1);

        stencils.resize(m);
        for (int i = 0; i < m; ++i) {
            int j0 = (i == 0) ? 0 : (i == m - 1 ? m - 3 : i - 1);
            const double x0 = r[j0] - r[i], x1 = r[j0 + 1] - r[i], x2 = r[j0 + 2] - r[i];
            Stencil& s = stencils[i];
            s.j[0] = j0; s.j[1] = j0 + 1; s.j[2] = j0 + 2;
            s.c[0] = -(x1 + x2) / ((x0 - x1) * (x0 - x2));
            s.c[1] = -(x0 + x2) / ((x1 - x0) * (x1 - x2));
            s.c[2] = -(x0 + x1) / ((x2 - x0) * (x2 - x1));
        }
    }

    double derivative(const std::vector<double>& u, int i) const {
        const Stencil& s = stencils[i];
        return s.c[0] * u[s.j[0]] + s.c[1] * u[s.j[1]] + s.c[2] * u[s.j[2]];
    }

    // numerator integral (without omega), including the tail (n-2) u_m^2 r_m^{n-2}
    double num(const std::vector<double>& u) const {
        std::vector<double> terms(m);
        for (int i = 0; i < m; ++i) {
            const double up = derivative(u, i);
            terms[i] = w[i] * up * up * rn1[i];
        }
        return pairwise_sum(terms) + (n - 2) * u[m - 1] * u[m - 1] * std::pow(r[m - 1], n - 2);
    }

    // denominator integral (without omega), including the tail u_m^p r_m^n / n
    double den(const std::vector<double>& u) const {
        std::vector<double> terms(m);
        for (int i = 0; i < m; ++i) terms[i] = w[i] * std::pow(std::abs(u[i]), p_crit) * rn1[i];
        return pairwise_sum(terms) + std::pow(std::abs(u[m - 1]), p_crit) * std::pow(r[m - 1], n) / n;
    }

    double quotient(const std::vector<double>& u) const {
        const double d = den(u);
        if (!(d > 0.0)) throw std::runtime_error("sobolev_quotient: degenerate profile (zero mass)");
        return omega * num(u) / std::pow(omega * d, theta);
    }

    std::vector<double> gradient(const std::vector<double>& u) const {
        const double nu = num(u);
        const double de = den(u);
        if (!(de > 0.0)) throw std::runtime_error("sobolev_quotient: degenerate profile (zero mass)");
        const double q = omega * nu / std::pow(omega * de, theta);

        std::vector<double> dnum(m, 0.0), dden(m, 0.0);
        for (int i = 0; i < m; ++i) {
            const double up = derivative(u, i);
            const Stencil& s = stencils[i];
            for (int k = 0; k < 3; ++k) dnum[s.j[k]] += 2.0 * w[i] * up * rn1[i] * s.c[k];
            dden[i] = w[i] * p_crit * std::pow(std::abs(u[i]), p_crit - 1.0) * (u[i] < 0.0 ? -1.0 : 1.0) * rn1[i];
        }
        dnum[m - 1] += 2.0 * (n - 2) * u[m - 1] * std::pow(r[m - 1], n - 2);
        dden[m - 1] += p_crit * std::pow(std::abs(u[m - 1]), p_crit - 1.0) * (u[m - 1] < 0.0 ? -1.0 : 1.0) *
                       std::pow(r[m - 1], n) / n;

        std::vector<double> g(m);
        const double npow = std::pow(omega * de, theta);
        for (int k = 0; k < m; ++k) g[k] = omega * dnum[k] / npow - theta * q / de * dden[k];
        return g;
    }

    // banded (half-bandwidth 2) Hessian of num(): constant in u
    std::vector<double> num_hessian_band() const {
        const int bw = 2;
        std::vector<double> band(static_cast<size_t>(m) * (bw + 1), 0.0);
        auto add = [&](int i, int j, double v) {
            if (j < i) std::swap(i, j);
            if (j - i <= bw) band[static_cast<size_t>(i) * (bw + 1) + (j - i)] += v;
        };
        for (int i = 0; i < m; ++i) {
            const Stencil& s = stencils[i];
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    if (s.j[a] <= s.j[b]) add(s.j[a], s.j[b], 2.0 * w[i] * rn1[i] * s.c[a] * s.c[b]);
        }
        add(m - 1, m - 1, 2.0 * (n - 2) * std::pow(r[m - 1], n - 2));
        double peak = 0.0;
        for (size_t i = 0; i < band.size(); i += (bw + 1)) peak = std::max(peak, band[i]);
        for (int i = 0; i < m; ++i) band[static_cast<size_t>(i) * (bw + 1)] += 1e-12 * peak;
        return band;
    }
};

void check_dim(int n) {
    if (n < 3) throw std::invalid_argument("radial Sobolev machinery needs dimension >= 3");
}

}  // namespace

double sobolev_quotient(const RadialProfile& profile, int n) {
    check_dim(n);
    return QuotientAssembly(profile, n).quotient(profile.values);
}

std::vector<double> sobolev_quotient_gradient(const RadialProfile& profile, int n) {
    check_dim(n);
    return QuotientAssembly(profile, n).gradient(profile.values);
}

DescentResult radial_descent(const RadialProfile& initial, int n, int steps, double step_size) {
    check_dim(n);
    QuotientAssembly asy(initial, n);
    const int m = asy.m;

    BandedCholesky hess(m, 2, asy.num_hessian_band());

    std::vector<double> u = initial.values;
    const double den_target = asy.den(u);
    if (!(den_target > 0.0)) throw std::runtime_error("radial_descent: degenerate initial profile");

    // keep the origin on the even-symmetry parabola through the next two
    // nodes; node 0 carries no quadrature weight (r^{n-1} = 0) and would
    // otherwise decouple
    auto project = [&](std::vector<double>& v) {
        for (double& x : v) x = std::max(x, 0.0);
        const double r1 = asy.r[1], r2 = asy.r[2];
        v[0] = std::max(0.0, (v[1] * r2 * r2 - v[2] * r1 * r1) / (r2 * r2 - r1 * r1));
    };
    project(u);

    double q = asy.quotient(u);
    double alpha = step_size > 0.0 ? step_size : 1.0;

    DescentResult out;
    out.trace.push_back(q);

    for (int step = 0; step < steps; ++step) {
        std::vector<double> g = asy.gradient(u);
        std::vector<double> rhs(m);
        for (int k = 0; k < m; ++k) rhs[k] = -g[k];
        const std::vector<double> dir = hess.solve(std::move(rhs));

        bool accepted = false;
        std::vector<double> trial(m);
        for (int halving = 0; halving < 45; ++halving) {
            for (int k = 0; k < m; ++k) trial[k] = u[k] + alpha * dir[k];
            project(trial);
            const double dt = asy.den(trial);
            if (dt > 0.0) {
                const double qt = asy.quotient(trial);
                if (qt < q - 1e-14 * std::abs(q)) {
                    const double scale = std::pow(den_target / dt, (n - 2) / (2.0 * n));
                    for (int k = 0; k < m; ++k) u[k] = scale * trial[k];
                    q = asy.quotient(u);
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) break;  // stationary within line-search resolution
        out.trace.push_back(q);
        alpha = std::min(alpha * 2.0, 4.0);
    }

    double peak = 0.0;
    for (double x : u) peak = std::max(peak, x);
    if (!(peak > 0.0)) throw std::runtime_error("radial_descent: profile collapsed to zero");

    out.profile.radii = asy.r;
    out.profile.values = std::move(u);
    return out;
}

BubbleFit fit_bubble(const RadialProfile& profile, int n) {
    check_dim(n);
    const std::vector<double>& r = profile.radii;
    const std::vector<double>& u = profile.values;
    const int m = static_cast<int>(r.size());

    double umax = 0.0;
    for (double x : u) umax = std::max(umax, x);
    if (!(umax > 0.0)) throw std::invalid_argument("fit_bubble: zero profile");

    auto eval = [&](double lam) {
        double num = 0.0, den = 0.0;
        std::vector<double> b(m);
        for (int i = 0; i < m; ++i) {
            b[i] = talenti_bubble(n, lam * r[i]);
            num += u[i] * b[i];
            den += b[i] * b[i];
        }
        const double c = num / den;
        double dev = 0.0;
        for (int i = 0; i < m; ++i) dev = std::max(dev, std::abs(u[i] - c * b[i]));
        return std::pair<double, double>(dev / umax, c);
    };

    double best_lam = 1.0, best_c = 1.0, best_dev = 1e300;
    double lo = 1e-4, hi = 1e4;
    for (int pass = 0; pass < 3; ++pass) {
        const int samples = 160;
        for (int k = 0; k <= samples; ++k) {
            const double lam = lo * std::pow(hi / lo, static_cast<double>(k) / samples);
            const auto [dev, c] = eval(lam);
            if (dev < best_dev) {
                best_dev = dev;
                best_lam = lam;
                best_c = c;
            }
        }
        lo = best_lam / 1.6;
        hi = best_lam * 1.6;
    }
    return {best_dev, best_c, best_lam};
}

Vector pushforward_potential(const Vector& a_at_x, const Vector& x) {
    double u = 0.0;
    for (double c : x) u += c * c;
    Vector out = a_at_x;
    for (double& c : out) c *= 0.5 * (1.0 + u);
    return out;
}

double sphere_pullback_ln_norm(int n, int s) {
    if (n < 3 || n % 2 == 0) throw std::invalid_argument("sphere_pullback_ln_norm: dimension must be odd >= 3");

    const auto integrand = [n, s](double r) {
        Vector x(n, 0.0);
        x[0] = r / std::sqrt(2.0);  // direction is immaterial; |A| is radial
        x[n - 1] = r / std::sqrt(2.0);
        const Vector abar = pushforward_potential(eval_potential(n, s, x), x);
        double len = 0.0;
        for (double c : abar) len += c * c;
        len = std::sqrt(len);
        const double vol_factor = std::pow(2.0 / (1.0 + r * r), n);
        return std::pow(len, n) * vol_factor * std::pow(r, n - 1);
    };

    double estimate = integrate_adaptive(integrand, 0.0, 10.0, 1e-9);
    double r_max = std::pow(std::pow(static_cast<double>(n), n - 1) / (1e-11 * estimate), 1.0 / n);
    r_max = std::max(r_max, 20.0);
    const double radial = integrate_adaptive(integrand, 0.0, r_max, 1e-10);
    return std::pow(sphere_volume(n - 1) * radial, 1.0 / n);
}

double sphere_spinor_norm_check(const CliffordRep& rep, int n, int s, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vector> pts;
    for (int k = 0; k < 8 * rep.rep_size; ++k) pts.push_back(rng.point(n, 1.5));
    const NullspaceResult null = admissible_spinor_basis(rep, n, s, pts);
    if (null.basis.empty())
        throw std::runtime_error("sphere_spinor_norm_check: no admissible base spinor found");

    const double target = std::pow(2.0, -0.5 * (n - 1));
    double worst = 0.0;
    for (const Spinor& psi0 : null.basis) {
        const ZeroModeParams params(n, s, psi0);
        for (int k = 0; k < 200; ++k) {
            const Vector x = rng.point(n, 2.5);
            double u = 0.0;
            for (double c : x) u += c * c;
            const double conf = std::pow(2.0 / (1.0 + u), -0.5 * (n - 1));
            const Spinor psi = eval_zero_mode(rep, params, x);
            worst = std::max(worst, std::abs(conf * spinor_norm(psi) - target));
        }
    }
    return worst;
}

double yamabe_functional_sphere_check(int n) {
    if (n < 3) throw std::invalid_argument("yamabe_functional_sphere_check: dimension must be >= 3");
    const double c_n = 4.0 * (n - 1) / (n - 2);
    const double vol = sphere_volume(n);
    const double phi = std::pow(2.0, -0.5 * (n - 1));
    const double scal = static_cast<double>(n) * (n - 1);

    const double lhs = yamabe_sphere(n) / c_n *
                       std::pow(vol * std::pow(phi, 2.0 * n / (n - 1)), static_cast<double>(n - 2) / n);
    const double rhs = scal / c_n * vol * std::pow(phi, 2.0 * (n - 2) / (n - 1));
    return std::abs(lhs - rhs) / std::abs(rhs);
}

}  // namespace zeromode
