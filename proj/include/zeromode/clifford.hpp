#pragma once

#include <vector>

#include "zeromode/linalg.hpp"

namespace zeromode {

using Spinor = std::vector<Complex>;
using Vector = std::vector<double>;

/// Matrix model of the Clifford algebra with the sign convention
///   g_i g_j + g_j g_i = -2 delta_ij,
/// each generator skew-adjoint (g* = -g) and unitary up to sign (g*g = I).
struct CliffordRep {
    int dim = 0;       // ambient dimension n
    int rep_size = 0;  // N = 2^floor(n/2)
    std::vector<CMatrix> gamma;
};

/// Deterministic construction: tensor-product recursion on Hermitian
/// anticommuting generators (a_i a_j + a_j a_i = 2 delta_ij), with the
/// chirality element appended for odd n, then gamma_i = i * a_i to flip the
/// convention to -2 delta. Throws std::invalid_argument for n < 2.
CliffordRep build_representation(int n);

/// (sum_i v_i gamma_i) psi. Linear in both arguments.
Spinor clifford_apply(const CliffordRep& rep, const Vector& v, const Spinor& psi);

/// max_{i,j} of the entrywise sup norm of g_i g_j + g_j g_i + 2 delta_ij I.
double anticommutation_defect(const CliffordRep& rep);

/// max_i entrywise sup norm of g_i* + g_i.
double skew_adjoint_defect(const CliffordRep& rep);

/// max_i entrywise sup norm of g_i* g_i - I.
double unitarity_defect(const CliffordRep& rep);

/// Hermitian inner product, antilinear in the first slot.
Complex inner(const Spinor& a, const Spinor& b);
double spinor_norm(const Spinor& a);

}  // namespace zeromode
