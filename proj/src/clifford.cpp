#include "zeromode/clifford.hpp"

#include <cmath>
#include <stdexcept>

namespace zeromode {

namespace {

CMatrix pauli(int k) {
    CMatrix m(2, 2);
    switch (k) {
        case 1: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case 2: m(0, 1) = Complex(0.0, -1.0); m(1, 0) = Complex(0.0, 1.0); break;
        default: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    }
    return m;
}

// Hermitian generators for even m: start with {s1, s2}, then
// {s1 (x) a_1, ..., s1 (x) a_m, s2 (x) I, s3 (x) I}.
std::vector<CMatrix> hermitian_generators_even(int m) {
    std::vector<CMatrix> a = {pauli(1), pauli(2)};
    while (static_cast<int>(a.size()) < m) {
        const int sz = a.front().rows();
        std::vector<CMatrix> next;
        next.reserve(a.size() + 2);
        for (const CMatrix& g : a) next.push_back(CMatrix::kron(pauli(1), g));
        next.push_back(CMatrix::kron(pauli(2), CMatrix::identity(sz)));
        next.push_back(CMatrix::kron(pauli(3), CMatrix::identity(sz)));
        a = std::move(next);
    }
    return a;
}

// (-i)^{m/2} a_1 ... a_m: Hermitian, squares to I, anticommutes with each a_i.
CMatrix chirality(const std::vector<CMatrix>& a) {
    CMatrix w = CMatrix::identity(a.front().rows());
    for (const CMatrix& g : a) w = w * g;
    const int half = static_cast<int>(a.size()) / 2;
    Complex c(1.0);
    for (int k = 0; k < half; ++k) c *= Complex(0.0, -1.0);
    return c * w;
}

}  // namespace

CliffordRep build_representation(int n) {
    if (n < 2) throw std::invalid_argument("build_representation: dimension must be >= 2");

    const int even_part = (n % 2 == 0) ? n : n - 1;
    std::vector<CMatrix> a = hermitian_generators_even(even_part);
    if (n % 2 == 1) a.push_back(chirality(a));

    CliffordRep rep;
    rep.dim = n;
    rep.rep_size = a.front().rows();
    rep.gamma.reserve(n);
    for (CMatrix& g : a) rep.gamma.push_back(Complex(0.0, 1.0) * g);
    return rep;
}

Spinor clifford_apply(const CliffordRep& rep, const Vector& v, const Spinor& psi) {
    if (static_cast<int>(v.size()) != rep.dim) throw std::invalid_argument("clifford_apply: vector dimension mismatch");
    if (static_cast<int>(psi.size()) != rep.rep_size) throw std::invalid_argument("clifford_apply: spinor size mismatch");

    const int N = rep.rep_size;
    Spinor out(N, Complex(0.0));
    for (int j = 0; j < rep.dim; ++j) {
        if (v[j] == 0.0) continue;
        const CMatrix& g = rep.gamma[j];
        for (int r = 0; r < N; ++r) {
            Complex acc(0.0);
            for (int c = 0; c < N; ++c) acc += g(r, c) * psi[c];
            out[r] += v[j] * acc;
        }
    }
    return out;
}

double anticommutation_defect(const CliffordRep& rep) {
    double worst = 0.0;
    const CMatrix id = CMatrix::identity(rep.rep_size);
    for (int i = 0; i < rep.dim; ++i)
        for (int j = 0; j < rep.dim; ++j) {
            CMatrix d = rep.gamma[i] * rep.gamma[j] + rep.gamma[j] * rep.gamma[i];
            if (i == j) d += 2.0 * id;
            worst = std::max(worst, d.max_abs());
        }
    return worst;
}

double skew_adjoint_defect(const CliffordRep& rep) {
    double worst = 0.0;
    for (const CMatrix& g : rep.gamma) worst = std::max(worst, (g.adjoint() + g).max_abs());
    return worst;
}

double unitarity_defect(const CliffordRep& rep) {
    double worst = 0.0;
    const CMatrix id = CMatrix::identity(rep.rep_size);
    for (const CMatrix& g : rep.gamma) worst = std::max(worst, (g.adjoint() * g - id).max_abs());
    return worst;
}

Complex inner(const Spinor& a, const Spinor& b) {
    Complex s(0.0);
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double spinor_norm(const Spinor& a) {
    double s = 0.0;
    for (const Complex& z : a) s += std::norm(z);
    return std::sqrt(s);
}

}  // namespace zeromode
