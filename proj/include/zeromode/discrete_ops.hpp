#pragma once

#include <functional>
#include <string>
#include <vector>

#include "zeromode/clifford.hpp"

namespace zeromode {

/// Uniform box grid on [-R, R]^n. Derivative operators are defined on the
/// interior subgrid only (stencil_order/2 sites trimmed per side); outputs
/// are zero-filled on the trimmed margin.
struct GridSpec {
    int dim = 3;
    double half_width = 8.0;
    int points_per_axis = 129;
    int stencil_order = 4;

    double spacing() const { return 2.0 * half_width / (points_per_axis - 1); }
    int trim() const { return stencil_order / 2; }
    std::size_t site_count() const;
    double coord(int i) const { return -half_width + i * spacing(); }
    bool same_layout(const GridSpec& o) const;
    void validate() const;
};

struct ScalarField {
    GridSpec grid;
    std::vector<double> v;
};

struct SpinorField {
    GridSpec grid;
    int spinor_dim = 0;
    std::vector<Complex> v;  // site-major, spinor_dim entries per site
};

struct VectorFieldGrid {
    GridSpec grid;
    int vec_dim = 0;
    std::vector<double> v;
};

SpinorField sample_spinor_field(const GridSpec& grid, int spinor_dim,
                                const std::function<Spinor(const Vector&)>& f);
ScalarField sample_scalar_field(const GridSpec& grid, const std::function<double(const Vector&)>& f);
VectorFieldGrid sample_vector_field(const GridSpec& grid, const std::function<Vector(const Vector&)>& f);

/// Central-difference partial derivative along one axis (order 2 or 4 per the
/// grid), valid on the interior; margins zero.
SpinorField axis_derivative(const SpinorField& f, int axis);
ScalarField axis_derivative(const ScalarField& f, int axis);

std::vector<SpinorField> gradient_fd(const SpinorField& f);
VectorFieldGrid gradient_fd(const ScalarField& f);

/// D psi = sum_i gamma_i d_i psi.
SpinorField dirac_fd(const CliffordRep& rep, const SpinorField& f);

/// Per direction j: d_j psi + (1/n) gamma_j (D psi).
std::vector<SpinorField> twistor_fd(const CliffordRep& rep, const SpinorField& f);

/// Componentwise finite-difference Laplacian (second-derivative stencils).
SpinorField laplacian_fd(const SpinorField& f);

/// Max interior pointwise defect of sum_j |T_j psi|^2 = |grad psi|^2
/// - (1/n)|D psi|^2, both sides assembled from their own operator outputs.
double twistor_norm_identity_defect(const CliffordRep& rep, const SpinorField& f);

/// Relative interior defect || D^2 psi + Lap psi || / || Lap psi || over the
/// doubly-trimmed interior (D applied twice). Returns 0 for a zero Laplacian.
double weitzenboeck_defect(const CliffordRep& rep, const SpinorField& f);

ScalarField pointwise_norm(const SpinorField& f);            // |psi|
ScalarField regularized_norm(const SpinorField& f, double eps);  // sqrt(|psi|^2 + eps^2), eps > 0

/// Composite trapezoid over the interior subgrid, deterministic pairwise
/// summation order.
double integrate(const ScalarField& f);

/// Same, restricted to the inscribed ball |x| <= radius.
double integrate_ball(const ScalarField& f, double radius);

// flat binary layout: int64 n, int64 m, float64 R, int64 N, then row-major
// complex pairs as little-endian 64-bit floats
void write_binary(const SpinorField& f, const std::string& path);
SpinorField read_binary(const std::string& path, int stencil_order = 4);
void write_csv(const SpinorField& f, const std::string& path);
void write_csv(const ScalarField& f, const std::string& path);

/// Visits every site: fn(flat_index, coords).
void for_each_site(const GridSpec& grid, const std::function<void(std::size_t, const std::vector<int>&)>& fn);

/// x-position of a site from its integer coords.
Vector site_position(const GridSpec& grid, const std::vector<int>& coords);

/// True if every coordinate lies in [t, m-1-t] with t = extra_trim * trim().
bool in_interior(const GridSpec& grid, const std::vector<int>& coords, int extra_trim = 1);

}  // namespace zeromode
