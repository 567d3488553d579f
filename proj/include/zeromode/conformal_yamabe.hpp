#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "zeromode/clifford.hpp"

namespace zeromode {

// Exact constants of the sharpness chain
//   n/(4(n-1)) Y(S^n) = n^2/4 |S^n|^{2/n} = n/(n-2) S_n
// and the variational machinery that reproduces S_n as a minimum rather than
// a plugged formula.

double sphere_volume(int n);     // |S^n| = 2 pi^{(n+1)/2} / Gamma((n+1)/2), n >= 1
double sobolev_constant(int n);  // S_n = n(n-2)/4 |S^n|^{2/n}, n >= 3
double yamabe_sphere(int n);     // Y(S^n) = n(n-1) |S^n|^{2/n}

/// Extremal Sobolev profile (1 + r^2)^{-(n-2)/2}; equals |psi|^{(n-2)/(n-1)}
/// of the sharp zero mode.
double talenti_bubble(int n, double r);

struct ConstantsReport {
    int dim = 0;
    double sphere_vol = 0.0;
    double sobolev = 0.0;
    double yamabe = 0.0;
    double chain_defect_sobolev = 0.0;  // n/(4(n-1)) Y  vs  n^2/4 |S^n|^{2/n}
    double chain_defect_sphere = 0.0;   // n^2/4 |S^n|^{2/n}  vs  n/(n-2) S_n
};

ConstantsReport constants_report(int n);

/// Radial trial function on strictly increasing nodes r0 = 0 < r1 < ... < rm,
/// nonnegative nodal values, and fixed r^{-(n-2)} decay past the last node.
struct RadialProfile {
    std::vector<double> radii;
    std::vector<double> values;
};

RadialProfile log_profile(int count, double r_min, double r_max,
                          const std::function<double(double)>& f);

/// [omega ∫ (u')^2 r^{n-1} dr] / [omega ∫ u^{2n/(n-2)} r^{n-1} dr]^{(n-2)/n},
/// with nodal 3-point derivatives, trapezoid quadrature, and analytic tails
/// from the fixed decay exponent. Throws on a degenerate (zero-mass) profile.
double sobolev_quotient(const RadialProfile& profile, int n);

/// Exact gradient of the discretized quotient with respect to nodal values.
std::vector<double> sobolev_quotient_gradient(const RadialProfile& profile, int n);

struct DescentResult {
    RadialProfile profile;
    std::vector<double> trace;  // quotient after each accepted step, trace[0] = initial
};

/// Projected descent of the discretized Sobolev quotient: the exact gradient
/// is preconditioned by the (constant, banded) Hessian of the Dirichlet term,
/// with backtracking line search, clamping to u >= 0, and renormalization of
/// the constraint integral each step. The trace is monotone decreasing up to
/// the line-search tolerance. step_size <= 0 selects the default trial step.
DescentResult radial_descent(const RadialProfile& initial, int n, int steps, double step_size = 0.0);

struct BubbleFit {
    double deviation = 0.0;  // max_i |u_i - c b(lam r_i)| / max_i u_i
    double amplitude = 0.0;
    double dilation = 0.0;
};

/// Best L-inf match of a profile against the dilation/amplitude family of the
/// bubble; the quotient is invariant under both, so the fit searches them.
BubbleFit fit_bubble(const RadialProfile& profile, int n);

/// Abar(x) = (1+|x|^2)/2 * A(x): pushforward of a potential to the sphere
/// under stereographic identification.
Vector pushforward_potential(const Vector& a_at_x, const Vector& x);

/// ||Abar||_{L^n(S^n)} of the sharp potential, by pullback radial quadrature
/// ∫ |Abar|^n (2/(1+r^2))^n over R^n. Conformal invariance makes this equal
/// to ||A||_{L^n(R^n)}.
double sphere_pullback_ln_norm(int n, int s);

/// Max defect over random points of (2/(1+|x|^2))^{-(n-1)/2} |psi(x)| against
/// the constant 2^{-(n-1)/2}. Needs an admissible base spinor; throws if the
/// nullspace comes back empty.
double sphere_spinor_norm_check(const CliffordRep& rep, int n, int s, std::uint64_t seed);

/// Residual of the Yamabe functional identity for the constant-norm sphere
/// spinor: with |phi| constant the gradient term drops and the identity
/// reduces to Y(S^n) = n(n-1) |S^n|^{2/n}.
double yamabe_functional_sphere_check(int n);

}  // namespace zeromode
