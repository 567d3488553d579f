#pragma once

#include <vector>

#include "zeromode/clifford.hpp"

namespace zeromode {

/// Parameters of the sharp zero-mode family on R^n (n odd):
///   A(x)   = n (1+|x|^2)^{-2} [ (1-|x|^2) e1 + 2 x1 x + 2 L x ],
///   psi(x) = (1+|x|^2)^{-n/2} (psi0 + s x . psi0),
/// where L is block-skew (see build_skew_generator) with the first rotation
/// block oriented by s, and x . psi0 is Clifford multiplication. In the
/// -2 delta convention used here the spinor factor carries a real s; the
/// familiar Hermitian-convention form (1 + i s x .) denotes the same field.
/// Both signs of s then admit a one-dimensional admissible psi0 space.
struct ZeroModeParams {
    int dim;
    int sign;
    Spinor psi0;

    ZeroModeParams(int n, int s, Spinor base);  // validates n odd >= 3, s in {+1,-1}; normalizes base
};

/// Skew-symmetric block generator: zero first row/column, then 2x2 rotation
/// blocks [[0,-1],[1,0]] down the diagonal.
struct SkewGenerator {
    int dim = 0;
    std::vector<double> entries;  // dim x dim, row-major

    double at(int i, int j) const { return entries[static_cast<size_t>(i) * dim + j]; }
    Vector apply(const Vector& x) const;
};

SkewGenerator build_skew_generator(int n);  // n odd >= 3

Vector eval_potential(int n, int s, const Vector& x);
Vector eval_potential(const ZeroModeParams& params, const Vector& x);

Spinor eval_zero_mode(const CliffordRep& rep, const ZeroModeParams& params, const Vector& x);

/// Analytic Dirac image of the sharp spinor:
///   D psi (x) = -n (1+|x|^2)^{-n/2-1} (x . psi0 + s psi0).
Spinor closed_form_dirac(const CliffordRep& rep, const ZeroModeParams& params, const Vector& x);

/// Matrix R(x) with R(x) psi0 = D psi(x) - i A(x) . psi(x); both sides are
/// linear in psi0, so the residual of the zero-mode equation is a linear map.
CMatrix residual_matrix(const CliffordRep& rep, int n, int s, const Vector& x);

struct NullspaceResult {
    std::vector<Spinor> basis;            // orthonormal, |psi0| = 1, most-null first
    std::vector<double> singular_values;  // all singular values, descending
};

/// Orthonormal basis of the common nullspace of { R(x) : x in points }, via
/// SVD of the stacked residual matrices with threshold sigma < rel_threshold
/// * sigma_max. Empty basis (dimension 0) is a valid result, not an error.
NullspaceResult admissible_spinor_basis(const CliffordRep& rep, int n, int s,
                                        const std::vector<Vector>& points,
                                        double rel_threshold = 1e-10);

/// ||A||_{L^n(R^n)} by adaptive radial quadrature of |A| = n/(1+r^2); the
/// integration cutoff is sized so the dropped tail is below 1e-10 relative.
double potential_ln_norm(int n);

}  // namespace zeromode
