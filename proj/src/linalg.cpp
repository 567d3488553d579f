#include "zeromode/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace zeromode {

CMatrix CMatrix::identity(int n) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const Complex aij = a(i, j);
            if (aij == Complex(0.0)) continue;
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return out;
}

CMatrix CMatrix::adjoint() const {
    CMatrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

std::vector<Complex> CMatrix::apply(std::span<const Complex> v) const {
    if (static_cast<int>(v.size()) != cols_) throw std::invalid_argument("CMatrix::apply: size mismatch");
    std::vector<Complex> out(rows_, Complex(0.0));
    for (int i = 0; i < rows_; ++i) {
        Complex acc(0.0);
        for (int j = 0; j < cols_; ++j) acc += (*this)(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (const Complex& z : a_) m = std::max(m, std::abs(z));
    return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
    for (Complex& z : a_) z *= s;
    return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("CMatrix::operator*: shape mismatch");
    CMatrix out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex(0.0)) continue;
            for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

SvdResult jacobi_svd(CMatrix a) {
    const int m = a.rows();
    const int n = a.cols();
    if (m < n) throw std::invalid_argument("jacobi_svd: expects rows >= cols");

    CMatrix v = CMatrix::identity(n);

    auto col_dot = [&](int p, int q) {  // <col_p, col_q> with conjugation on p
        Complex s(0.0);
        for (int i = 0; i < m; ++i) s += std::conj(a(i, p)) * a(i, q);
        return s;
    };

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double app = std::real(col_dot(p, p));
                const double aqq = std::real(col_dot(q, q));
                const Complex apq = col_dot(p, q);
                const double off = std::abs(apq);
                if (off <= 1e-15 * std::sqrt(app * aqq) || off == 0.0) continue;
                rotated = true;

                // absorb the phase of apq into column q, then rotate as in the real case
                const Complex phase = apq / off;
                const double zeta = (aqq - app) / (2.0 * off);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;

                for (int i = 0; i < m; ++i) {
                    const Complex ap = a(i, p);
                    const Complex aq = a(i, q) * std::conj(phase);
                    a(i, p) = cs * ap - sn * aq;
                    a(i, q) = sn * ap + cs * aq;
                }
                for (int i = 0; i < n; ++i) {
                    const Complex vp = v(i, p);
                    const Complex vq = v(i, q) * std::conj(phase);
                    v(i, p) = cs * vp - sn * vq;
                    v(i, q) = sn * vp + cs * vq;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sig(n);
    for (int j = 0; j < n; ++j) {
        double s2 = 0.0;
        for (int i = 0; i < m; ++i) s2 += std::norm(a(i, j));
        sig[j] = std::sqrt(s2);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return sig[i] > sig[j]; });

    SvdResult out;
    out.singular_values.resize(n);
    out.right_vectors = CMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.singular_values[j] = sig[order[j]];
        for (int i = 0; i < n; ++i) out.right_vectors(i, j) = v(i, order[j]);
    }
    return out;
}

BandedCholesky::BandedCholesky(int n, int bw, const std::vector<double>& upper_band)
    : n_(n), bw_(bw), l_(static_cast<size_t>(n) * (bw + 1), 0.0), d_(n, 0.0) {
    if (static_cast<int>(upper_band.size()) != n * (bw + 1))
        throw std::invalid_argument("BandedCholesky: band storage size mismatch");

    auto band = [&](int i, int d) { return upper_band[static_cast<size_t>(i) * (bw_ + 1) + d]; };
    auto L = [&](int i, int d) -> double& { return l_[static_cast<size_t>(i) * (bw_ + 1) + d]; };  // L(i, i-d)

    for (int i = 0; i < n_; ++i) {
        for (int d = std::min(bw_, i); d >= 0; --d) {
            const int j = i - d;  // column, j <= i
            double s = (d <= bw_) ? band(j, d) : 0.0;
            for (int k = std::max(0, i - bw_); k < j; ++k) {
                const int di = i - k, dj = j - k;
                if (di <= bw_ && dj <= bw_) s -= L(i, di) * L(j, dj) * d_[k];
            }
            if (d == 0) {
                if (s <= 0.0) throw std::runtime_error("BandedCholesky: matrix not positive definite");
                d_[i] = s;
                L(i, 0) = 1.0;
            } else {
                L(i, d) = s / d_[j];
            }
        }
    }
}

std::vector<double> BandedCholesky::solve(std::vector<double> rhs) const {
    if (static_cast<int>(rhs.size()) != n_) throw std::invalid_argument("BandedCholesky::solve: size mismatch");
    auto L = [&](int i, int d) { return l_[static_cast<size_t>(i) * (bw_ + 1) + d]; };

    for (int i = 0; i < n_; ++i)
        for (int d = 1; d <= std::min(bw_, i); ++d) rhs[i] -= L(i, d) * rhs[i - d];
    for (int i = 0; i < n_; ++i) rhs[i] /= d_[i];
    for (int i = n_ - 1; i >= 0; --i)
        for (int d = 1; d <= std::min(bw_, n_ - 1 - i); ++d) rhs[i] -= L(i + d, d) * rhs[i + d];
    return rhs;
}

}  // namespace zeromode
