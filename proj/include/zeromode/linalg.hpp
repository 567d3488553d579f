#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace zeromode {

using Complex = std::complex<double>;

/// Small dense complex matrix, row-major. Sized for spinor representations
/// (at most 16x16 here), not for large linear algebra.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

    static CMatrix identity(int n);
    static CMatrix kron(const CMatrix& a, const CMatrix& b);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Complex& operator()(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    const Complex& operator()(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

    CMatrix adjoint() const;
    std::vector<Complex> apply(std::span<const Complex> v) const;

    /// Largest entry modulus (entrywise sup norm).
    double max_abs() const;

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(Complex s);

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Complex> a_;
};

/// Deterministic tree-order summation; independent of accumulation chunking
/// and more accurate than naive left-to-right sums.
double pairwise_sum(std::span<const double> v);

struct SvdResult {
    std::vector<double> singular_values;  // descending
    CMatrix right_vectors;                // cols x cols unitary; column j pairs with sigma_j
};

/// One-sided Jacobi SVD of an m x n matrix (m >= n). Orthogonalizes columns by
/// unitary plane rotations, which preserves the tiny singular values that a
/// normal-equations route would destroy; nullspace thresholds near 1e-10 of
/// sigma_max need that accuracy.
SvdResult jacobi_svd(CMatrix a);

/// Cholesky factorization of a symmetric positive definite band matrix with
/// half-bandwidth `bw`. Storage: band(i, d) holds A(i, i+d) for 0 <= d <= bw.
class BandedCholesky {
public:
    BandedCholesky(int n, int bw, const std::vector<double>& upper_band);
    std::vector<double> solve(std::vector<double> rhs) const;

private:
    int n_;
    int bw_;
    std::vector<double> l_;  // lower-triangular band factor
    std::vector<double> d_;  // diagonal of L
};

}  // namespace zeromode
