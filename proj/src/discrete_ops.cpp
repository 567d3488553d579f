#include "zeromode/discrete_ops.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "zeromode/linalg.hpp"

namespace zeromode {

std::size_t GridSpec::site_count() const {
    std::size_t c = 1;
    for (int a = 0; a < dim; ++a) c *= static_cast<std::size_t>(points_per_axis);
    return c;
}

bool GridSpec::same_layout(const GridSpec& o) const {
    return dim == o.dim && points_per_axis == o.points_per_axis && half_width == o.half_width &&
           stencil_order == o.stencil_order;
}

void GridSpec::validate() const {
    if (dim < 1) throw std::invalid_argument("GridSpec: dimension must be >= 1");
    if (!(half_width > 0.0)) throw std::invalid_argument("GridSpec: half width must be positive");
    if (stencil_order != 2 && stencil_order != 4) throw std::invalid_argument("GridSpec: stencil order must be 2 or 4");
    if (points_per_axis < 9 || points_per_axis < 2 * stencil_order + 1)
        throw std::invalid_argument("GridSpec: too few points per axis for the stencil");
}

namespace {

std::vector<std::size_t> strides_of(const GridSpec& g) {
    std::vector<std::size_t> s(g.dim);
    std::size_t acc = 1;
    for (int a = g.dim - 1; a >= 0; --a) {
        s[a] = acc;
        acc *= static_cast<std::size_t>(g.points_per_axis);
    }
    return s;
}

// Stencils are evaluated in paired form (differences/sums of mirror taps
// with integer coefficients, one final scale) so constant fields map to
// exact zeros.
template <typename T>
void axis_derivative_raw(const GridSpec& g, const std::vector<T>& in, std::vector<T>& out, int comps,
                         int axis, int deriv) {
    const auto strides = strides_of(g);
    const int m = g.points_per_axis;
    const int t = g.trim();
    const double h = g.spacing();
    const std::size_t stride = strides[axis];
    const std::size_t count = g.site_count();
    const int order = g.stencil_order;

    out.assign(in.size(), T{});
    for (std::size_t idx = 0; idx < count; ++idx) {
        const int c = static_cast<int>((idx / stride) % static_cast<std::size_t>(m));
        if (c < t || c > m - 1 - t) continue;
        const std::size_t base = idx * comps;
        const std::size_t sc = stride * comps;
        for (int k = 0; k < comps; ++k) {
            const std::size_t i0 = base + k;
            T acc{};
            if (deriv == 1) {
                if (order == 2) {
                    acc = (in[i0 + sc] - in[i0 - sc]) * (0.5 / h);
                } else {
                    acc = ((in[i0 - 2 * sc] - in[i0 + 2 * sc]) +
                           8.0 * (in[i0 + sc] - in[i0 - sc])) *
                          (1.0 / (12.0 * h));
                }
            } else {
                if (order == 2) {
                    acc = ((in[i0 + sc] + in[i0 - sc]) - 2.0 * in[i0]) * (1.0 / (h * h));
                } else {
                    acc = (16.0 * (in[i0 + sc] + in[i0 - sc]) -
                           (in[i0 + 2 * sc] + in[i0 - 2 * sc]) - 30.0 * in[i0]) *
                          (1.0 / (12.0 * h * h));
                }
            }
            out[i0] = acc;
        }
    }
}

// zero out every site with any coordinate on the trimmed margin
template <typename T>
void clear_margin(const GridSpec& g, std::vector<T>& data, int comps) {
    const auto strides = strides_of(g);
    const int m = g.points_per_axis;
    const int t = g.trim();
    const std::size_t count = g.site_count();
    for (std::size_t idx = 0; idx < count; ++idx) {
        bool margin = false;
        for (int a = 0; a < g.dim; ++a) {
            const int c = static_cast<int>((idx / strides[a]) % static_cast<std::size_t>(m));
            if (c < t || c > m - 1 - t) {
                margin = true;
                break;
            }
        }
        if (margin)
            for (int k = 0; k < comps; ++k) data[idx * comps + k] = T{};
    }
}

void gamma_times_accumulate(const CMatrix& g, const std::vector<Complex>& in, std::vector<Complex>& out,
                            int comps, double scale) {
    std::array<Complex, 256> gm{};
    for (int i = 0; i < comps; ++i)
        for (int j = 0; j < comps; ++j) gm[static_cast<std::size_t>(i) * comps + j] = scale * g(i, j);

    const std::size_t sites = in.size() / comps;
    for (std::size_t s = 0; s < sites; ++s) {
        const Complex* src = in.data() + s * comps;
        Complex* dst = out.data() + s * comps;
        for (int i = 0; i < comps; ++i) {
            Complex acc{};
            for (int j = 0; j < comps; ++j) acc += gm[static_cast<std::size_t>(i) * comps + j] * src[j];
            dst[i] += acc;
        }
    }
}

void check_field(const SpinorField& f) {
    f.grid.validate();
    if (f.v.size() != f.grid.site_count() * static_cast<std::size_t>(f.spinor_dim))
        throw std::invalid_argument("SpinorField: storage does not match grid");
}

}  // namespace

void for_each_site(const GridSpec& grid, const std::function<void(std::size_t, const std::vector<int>&)>& fn) {
    const int m = grid.points_per_axis;
    std::vector<int> coords(grid.dim, 0);
    const std::size_t count = grid.site_count();
    for (std::size_t idx = 0; idx < count; ++idx) {
        fn(idx, coords);
        for (int a = grid.dim - 1; a >= 0; --a) {
            if (++coords[a] < m) break;
            coords[a] = 0;
        }
    }
}

Vector site_position(const GridSpec& grid, const std::vector<int>& coords) {
    Vector x(grid.dim);
    for (int a = 0; a < grid.dim; ++a) x[a] = grid.coord(coords[a]);
    return x;
}

bool in_interior(const GridSpec& grid, const std::vector<int>& coords, int extra_trim) {
    const int t = grid.trim() * extra_trim;
    for (int a = 0; a < grid.dim; ++a)
        if (coords[a] < t || coords[a] > grid.points_per_axis - 1 - t) return false;
    return true;
}

SpinorField sample_spinor_field(const GridSpec& grid, int spinor_dim,
                                const std::function<Spinor(const Vector&)>& f) {
    grid.validate();
    SpinorField out;
    out.grid = grid;
    out.spinor_dim = spinor_dim;
    out.v.resize(grid.site_count() * static_cast<std::size_t>(spinor_dim));
    for_each_site(grid, [&](std::size_t idx, const std::vector<int>& coords) {
        const Spinor val = f(site_position(grid, coords));
        if (static_cast<int>(val.size()) != spinor_dim)
            throw std::invalid_argument("sample_spinor_field: sampled spinor has wrong size");
        for (int k = 0; k < spinor_dim; ++k) out.v[idx * spinor_dim + k] = val[k];
    });
    return out;
}

ScalarField sample_scalar_field(const GridSpec& grid, const std::function<double(const Vector&)>& f) {
    grid.validate();
    ScalarField out;
    out.grid = grid;
    out.v.resize(grid.site_count());
    for_each_site(grid, [&](std::size_t idx, const std::vector<int>& coords) {
        out.v[idx] = f(site_position(grid, coords));
    });
    return out;
}

VectorFieldGrid sample_vector_field(const GridSpec& grid, const std::function<Vector(const Vector&)>& f) {
    grid.validate();
    VectorFieldGrid out;
    out.grid = grid;
    out.vec_dim = grid.dim;
    out.v.resize(grid.site_count() * static_cast<std::size_t>(grid.dim));
    for_each_site(grid, [&](std::size_t idx, const std::vector<int>& coords) {
        const Vector val = f(site_position(grid, coords));
        for (int k = 0; k < grid.dim; ++k) out.v[idx * grid.dim + k] = val[k];
    });
    return out;
}

SpinorField axis_derivative(const SpinorField& f, int axis) {
    check_field(f);
    SpinorField out;
    out.grid = f.grid;
    out.spinor_dim = f.spinor_dim;
    axis_derivative_raw(f.grid, f.v, out.v, f.spinor_dim, axis, 1);
    return out;
}

ScalarField axis_derivative(const ScalarField& f, int axis) {
    f.grid.validate();
    ScalarField out;
    out.grid = f.grid;
    axis_derivative_raw(f.grid, f.v, out.v, 1, axis, 1);
    return out;
}

std::vector<SpinorField> gradient_fd(const SpinorField& f) {
    check_field(f);
    std::vector<SpinorField> out;
    out.reserve(f.grid.dim);
    for (int a = 0; a < f.grid.dim; ++a) {
        out.push_back(axis_derivative(f, a));
        clear_margin(out.back().grid, out.back().v, f.spinor_dim);
    }
    return out;
}

VectorFieldGrid gradient_fd(const ScalarField& f) {
    f.grid.validate();
    VectorFieldGrid out;
    out.grid = f.grid;
    out.vec_dim = f.grid.dim;
    out.v.assign(f.grid.site_count() * static_cast<std::size_t>(f.grid.dim), 0.0);
    std::vector<double> tmp;
    for (int a = 0; a < f.grid.dim; ++a) {
        axis_derivative_raw(f.grid, f.v, tmp, 1, a, 1);
        for (std::size_t i = 0; i < tmp.size(); ++i) out.v[i * f.grid.dim + a] = tmp[i];
    }
    std::vector<double>& data = out.v;
    clear_margin(out.grid, data, out.vec_dim);
    return out;
}

SpinorField dirac_fd(const CliffordRep& rep, const SpinorField& f) {
    check_field(f);
    if (rep.dim != f.grid.dim || rep.rep_size != f.spinor_dim)
        throw std::invalid_argument("dirac_fd: representation does not match field");
    SpinorField out;
    out.grid = f.grid;
    out.spinor_dim = f.spinor_dim;
    out.v.assign(f.v.size(), Complex{});
    std::vector<Complex> tmp;
    for (int a = 0; a < f.grid.dim; ++a) {
        axis_derivative_raw(f.grid, f.v, tmp, f.spinor_dim, a, 1);
        gamma_times_accumulate(rep.gamma[a], tmp, out.v, f.spinor_dim, 1.0);
    }
    clear_margin(out.grid, out.v, out.spinor_dim);
    return out;
}

std::vector<SpinorField> twistor_fd(const CliffordRep& rep, const SpinorField& f) {
    check_field(f);
    const SpinorField dpsi = dirac_fd(rep, f);
    std::vector<SpinorField> out;
    out.reserve(f.grid.dim);
    for (int a = 0; a < f.grid.dim; ++a) {
        SpinorField comp = axis_derivative(f, a);
        gamma_times_accumulate(rep.gamma[a], dpsi.v, comp.v, f.spinor_dim, 1.0 / f.grid.dim);
        clear_margin(comp.grid, comp.v, comp.spinor_dim);
        out.push_back(std::move(comp));
    }
    return out;
}

SpinorField laplacian_fd(const SpinorField& f) {
    check_field(f);
    SpinorField out;
    out.grid = f.grid;
    out.spinor_dim = f.spinor_dim;
    out.v.assign(f.v.size(), Complex{});
    std::vector<Complex> tmp;
    for (int a = 0; a < f.grid.dim; ++a) {
        axis_derivative_raw(f.grid, f.v, tmp, f.spinor_dim, a, 2);
        for (std::size_t i = 0; i < tmp.size(); ++i) out.v[i] += tmp[i];
    }
    clear_margin(out.grid, out.v, out.spinor_dim);
    return out;
}

double twistor_norm_identity_defect(const CliffordRep& rep, const SpinorField& f) {
    const std::vector<SpinorField> tw = twistor_fd(rep, f);
    const std::vector<SpinorField> gr = gradient_fd(f);
    const SpinorField dpsi = dirac_fd(rep, f);
    const int N = f.spinor_dim;

    double worst = 0.0;
    for_each_site(f.grid, [&](std::size_t idx, const std::vector<int>& coords) {
        if (!in_interior(f.grid, coords)) return;
        double lhs = 0.0, grad2 = 0.0, d2 = 0.0;
        for (int a = 0; a < f.grid.dim; ++a)
            for (int k = 0; k < N; ++k) {
                lhs += std::norm(tw[a].v[idx * N + k]);
                grad2 += std::norm(gr[a].v[idx * N + k]);
            }
        for (int k = 0; k < N; ++k) d2 += std::norm(dpsi.v[idx * N + k]);
        worst = std::max(worst, std::abs(lhs - (grad2 - d2 / f.grid.dim)));
    });
    return worst;
}

double weitzenboeck_defect(const CliffordRep& rep, const SpinorField& f) {
    const SpinorField d2 = dirac_fd(rep, dirac_fd(rep, f));
    const SpinorField lap = laplacian_fd(f);

    std::vector<double> num_terms, den_terms;
    num_terms.reserve(f.grid.site_count());
    den_terms.reserve(f.grid.site_count());
    for_each_site(f.grid, [&](std::size_t idx, const std::vector<int>& coords) {
        if (!in_interior(f.grid, coords, 2)) return;
        double nn = 0.0, dd = 0.0;
        for (int k = 0; k < f.spinor_dim; ++k) {
            nn += std::norm(d2.v[idx * f.spinor_dim + k] + lap.v[idx * f.spinor_dim + k]);
            dd += std::norm(lap.v[idx * f.spinor_dim + k]);
        }
        num_terms.push_back(nn);
        den_terms.push_back(dd);
    });
    const double den = pairwise_sum(den_terms);
    if (den == 0.0) return 0.0;
    return std::sqrt(pairwise_sum(num_terms) / den);
}

ScalarField pointwise_norm(const SpinorField& f) {
    check_field(f);
    ScalarField out;
    out.grid = f.grid;
    out.v.resize(f.grid.site_count());
    for (std::size_t s = 0; s < out.v.size(); ++s) {
        double acc = 0.0;
        for (int k = 0; k < f.spinor_dim; ++k) acc += std::norm(f.v[s * f.spinor_dim + k]);
        out.v[s] = std::sqrt(acc);
    }
    return out;
}

ScalarField regularized_norm(const SpinorField& f, double eps) {
    if (!(eps > 0.0)) throw std::domain_error("regularized_norm: eps must be positive");
    ScalarField out = pointwise_norm(f);
    for (double& x : out.v) x = std::sqrt(x * x + eps * eps);
    return out;
}

namespace {

std::vector<double> interior_axis_weights(const GridSpec& g) {
    const int m = g.points_per_axis;
    const int t = g.trim();
    const double h = g.spacing();
    std::vector<double> w(m, 0.0);
    for (int i = t; i <= m - 1 - t; ++i) w[i] = h;
    w[t] = 0.5 * h;
    w[m - 1 - t] = 0.5 * h;
    return w;
}

double integrate_impl(const ScalarField& f, double radius_sq) {
    f.grid.validate();
    const auto wa = interior_axis_weights(f.grid);
    std::vector<double> terms(f.grid.site_count(), 0.0);
    for_each_site(f.grid, [&](std::size_t idx, const std::vector<int>& coords) {
        double w = 1.0;
        for (int a = 0; a < f.grid.dim; ++a) w *= wa[coords[a]];
        if (w == 0.0) return;
        if (radius_sq >= 0.0) {
            double r2 = 0.0;
            for (int a = 0; a < f.grid.dim; ++a) {
                const double c = f.grid.coord(coords[a]);
                r2 += c * c;
            }
            if (r2 > radius_sq) return;
        }
        terms[idx] = w * f.v[idx];
    });
    return pairwise_sum(terms);
}

}  // namespace

double integrate(const ScalarField& f) { return integrate_impl(f, -1.0); }

double integrate_ball(const ScalarField& f, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("integrate_ball: radius must be positive");
    return integrate_impl(f, radius * radius);
}

namespace {

void write_raw(std::ofstream& os, const void* p, std::size_t bytes) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(bytes));
}

}  // namespace

void write_binary(const SpinorField& f, const std::string& path) {
    check_field(f);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_binary: cannot open " + path);
    const std::int64_t n = f.grid.dim, m = f.grid.points_per_axis, N = f.spinor_dim;
    const double R = f.grid.half_width;
    write_raw(os, &n, 8);
    write_raw(os, &m, 8);
    write_raw(os, &R, 8);
    write_raw(os, &N, 8);
    for (const Complex& z : f.v) {
        const double re = z.real(), im = z.imag();
        write_raw(os, &re, 8);
        write_raw(os, &im, 8);
    }
    if (!os) throw std::runtime_error("write_binary: write failed for " + path);
}

SpinorField read_binary(const std::string& path, int stencil_order) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_binary: cannot open " + path);
    std::int64_t n = 0, m = 0, N = 0;
    double R = 0.0;
    is.read(reinterpret_cast<char*>(&n), 8);
    is.read(reinterpret_cast<char*>(&m), 8);
    is.read(reinterpret_cast<char*>(&R), 8);
    is.read(reinterpret_cast<char*>(&N), 8);
    if (!is) throw std::runtime_error("read_binary: truncated header in " + path);

    SpinorField f;
    f.grid.dim = static_cast<int>(n);
    f.grid.points_per_axis = static_cast<int>(m);
    f.grid.half_width = R;
    f.grid.stencil_order = stencil_order;
    f.grid.validate();
    f.spinor_dim = static_cast<int>(N);
    f.v.resize(f.grid.site_count() * static_cast<std::size_t>(N));
    for (Complex& z : f.v) {
        double re = 0.0, im = 0.0;
        is.read(reinterpret_cast<char*>(&re), 8);
        is.read(reinterpret_cast<char*>(&im), 8);
        z = Complex(re, im);
    }
    if (!is) throw std::runtime_error("read_binary: truncated data in " + path);
    return f;
}

void write_csv(const SpinorField& f, const std::string& path) {
    check_field(f);
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    for (int a = 0; a < f.grid.dim; ++a) os << "x" << a << ",";
    for (int k = 0; k < f.spinor_dim; ++k) {
        os << "re" << k << ",im" << k << (k + 1 < f.spinor_dim ? "," : "");
    }
    os << "\n";
    os.precision(17);
    for_each_site(f.grid, [&](std::size_t idx, const std::vector<int>& coords) {
        for (int a = 0; a < f.grid.dim; ++a) os << f.grid.coord(coords[a]) << ",";
        for (int k = 0; k < f.spinor_dim; ++k) {
            const Complex& z = f.v[idx * f.spinor_dim + k];
            os << z.real() << "," << z.imag() << (k + 1 < f.spinor_dim ? "," : "");
        }
        os << "\n";
    });
}

void write_csv(const ScalarField& f, const std::string& path) {
    f.grid.validate();
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    for (int a = 0; a < f.grid.dim; ++a) os << "x" << a << ",";
    os << "value\n";
    os.precision(17);
    for_each_site(f.grid, [&](std::size_t idx, const std::vector<int>& coords) {
        for (int a = 0; a < f.grid.dim; ++a) os << f.grid.coord(coords[a]) << ",";
        os << f.v[idx] << "\n";
    });
}

}  // namespace zeromode
