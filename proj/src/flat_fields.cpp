#include "zeromode/flat_fields.hpp"

#include <cmath>
#include <stdexcept>

#include "zeromode/conformal_yamabe.hpp"
#include "zeromode/quadrature.hpp"

namespace zeromode {

namespace {

double squared_norm(const Vector& x) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return s;
}

// L x with the first 2x2 rotation block oriented by s.
Vector oriented_skew_apply(int n, int s, const Vector& x) {
    Vector out(n, 0.0);
    for (int k = 0; 1 + 2 * k + 1 < n; ++k) {
        const double block_sign = (k == 0) ? static_cast<double>(s) : 1.0;
        const int i = 1 + 2 * k;
        out[i] = -block_sign * x[i + 1];
        out[i + 1] = block_sign * x[i];
    }
    return out;
}

void check_point(int n, const Vector& x) {
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("point dimension mismatch");
}

}  // namespace

ZeroModeParams::ZeroModeParams(int n, int s, Spinor base) : dim(n), sign(s), psi0(std::move(base)) {
    if (n < 3 || n % 2 == 0) throw std::invalid_argument("ZeroModeParams: dimension must be odd and >= 3");
    if (s != 1 && s != -1) throw std::invalid_argument("ZeroModeParams: sign must be +1 or -1");
    const double nrm = spinor_norm(psi0);
    if (nrm == 0.0) throw std::invalid_argument("ZeroModeParams: base spinor must be nonzero");
    for (Complex& z : psi0) z /= nrm;
}

Vector SkewGenerator::apply(const Vector& x) const {
    Vector out(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (int j = 0; j < dim; ++j) acc += at(i, j) * x[j];
        out[i] = acc;
    }
    return out;
}

SkewGenerator build_skew_generator(int n) {
    if (n < 3 || n % 2 == 0) throw std::invalid_argument("build_skew_generator: dimension must be odd and >= 3");
    SkewGenerator g;
    g.dim = n;
    g.entries.assign(static_cast<size_t>(n) * n, 0.0);
    for (int k = 0; 1 + 2 * k + 1 < n; ++k) {
        const int i = 1 + 2 * k;
        g.entries[static_cast<size_t>(i) * n + (i + 1)] = -1.0;
        g.entries[static_cast<size_t>(i + 1) * n + i] = 1.0;
    }
    return g;
}

Vector eval_potential(int n, int s, const Vector& x) {
    check_point(n, x);
    const double u = squared_norm(x);
    const double pre = n / ((1.0 + u) * (1.0 + u));
    const Vector lx = oriented_skew_apply(n, s, x);
    Vector out(n);
    for (int j = 0; j < n; ++j) out[j] = pre * (2.0 * x[0] * x[j] + 2.0 * lx[j]);
    out[0] += pre * (1.0 - u);
    return out;
}

Vector eval_potential(const ZeroModeParams& params, const Vector& x) {
    return eval_potential(params.dim, params.sign, x);
}

Spinor eval_zero_mode(const CliffordRep& rep, const ZeroModeParams& params, const Vector& x) {
    check_point(params.dim, x);
    const double u = squared_norm(x);
    const double f = std::pow(1.0 + u, -0.5 * params.dim);
    Spinor out = clifford_apply(rep, x, params.psi0);
    for (int c = 0; c < rep.rep_size; ++c) out[c] = f * (params.psi0[c] + static_cast<double>(params.sign) * out[c]);
    return out;
}

Spinor closed_form_dirac(const CliffordRep& rep, const ZeroModeParams& params, const Vector& x) {
    check_point(params.dim, x);
    const double u = squared_norm(x);
    const double pre = -params.dim * std::pow(1.0 + u, -0.5 * params.dim - 1.0);
    Spinor out = clifford_apply(rep, x, params.psi0);
    for (int c = 0; c < rep.rep_size; ++c) out[c] = pre * (out[c] + static_cast<double>(params.sign) * params.psi0[c]);
    return out;
}

CMatrix residual_matrix(const CliffordRep& rep, int n, int s, const Vector& x) {
    check_point(n, x);
    const int N = rep.rep_size;
    const double u = squared_norm(x);
    const double f = std::pow(1.0 + u, -0.5 * n);

    CMatrix X(N, N);
    for (int j = 0; j < n; ++j)
        if (x[j] != 0.0) {
            CMatrix t = rep.gamma[j];
            t *= Complex(x[j]);
            X += t;
        }

    const Vector a = eval_potential(n, s, x);
    CMatrix WA(N, N);
    for (int j = 0; j < n; ++j)
        if (a[j] != 0.0) {
            CMatrix t = rep.gamma[j];
            t *= Complex(a[j]);
            WA += t;
        }

    const Complex sgn(static_cast<double>(s));
    CMatrix dirac = X + sgn * CMatrix::identity(N);
    dirac *= Complex(-n * std::pow(1.0 + u, -0.5 * n - 1.0));

    CMatrix action = WA * (CMatrix::identity(N) + sgn * X);
    action *= Complex(0.0, f);

    return dirac - action;
}

NullspaceResult admissible_spinor_basis(const CliffordRep& rep, int n, int s,
                                        const std::vector<Vector>& points, double rel_threshold) {
    const int N = rep.rep_size;
    if (static_cast<int>(points.size()) < N)
        throw std::invalid_argument("admissible_spinor_basis: need at least N sample points");

    CMatrix stacked(static_cast<int>(points.size()) * N, N);
    for (size_t k = 0; k < points.size(); ++k) {
        const CMatrix r = residual_matrix(rep, n, s, points[k]);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) stacked(static_cast<int>(k) * N + i, j) = r(i, j);
    }

    const SvdResult svd = jacobi_svd(stacked);
    const double cutoff = rel_threshold * svd.singular_values.front();

    NullspaceResult out;
    out.singular_values = svd.singular_values;
    for (int j = N - 1; j >= 0; --j) {
        if (svd.singular_values[j] >= cutoff) break;
        Spinor v(N);
        for (int i = 0; i < N; ++i) v[i] = svd.right_vectors(i, j);
        const double nrm = spinor_norm(v);
        for (Complex& z : v) z /= nrm;
        out.basis.push_back(std::move(v));
    }
    return out;
}

double potential_ln_norm(int n) {
    if (n < 3 || n % 2 == 0) throw std::invalid_argument("potential_ln_norm: dimension must be odd and >= 3");

    const auto integrand = [n](double r) {
        return std::pow(n / (1.0 + r * r), n) * std::pow(r, n - 1);
    };

    // integral over [R, inf) is below n^{n-1} R^{-n}; pick R so that bound
    // is under 1e-11 of a first estimate
    double estimate = integrate_adaptive(integrand, 0.0, 10.0, 1e-9);
    double r_max = std::pow(std::pow(static_cast<double>(n), n - 1) / (1e-11 * estimate), 1.0 / n);
    r_max = std::max(r_max, 20.0);

    const double radial = integrate_adaptive(integrand, 0.0, r_max, 1e-10);
    const double full = sphere_volume(n - 1) * radial;
    return std::pow(full, 1.0 / n);
}

}  // namespace zeromode
