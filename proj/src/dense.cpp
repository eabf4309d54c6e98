#include "precond_lab/dense.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

#include "precond_lab/error.hpp"

namespace precond_lab {

DenseMatrix::DenseMatrix(Index n, std::vector<double> row_major) : n_(n), values_(std::move(row_major)) {
    if (static_cast<Index>(values_.size()) != n_ * n_)
        throw Error(ErrorCode::dimension_mismatch, "dense matrix needs n*n values");
}

DenseMatrix DenseMatrix::from_csr(const CsrMatrix& a) {
    DenseMatrix d(a.size());
    for (const auto& [i, j, v] : a.triplets()) d(i, j) = v;
    return d;
}

DenseMatrix DenseMatrix::identity(Index n) {
    DenseMatrix d(n);
    for (Index i = 0; i < n; ++i) d(i, i) = 1.0;
    return d;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& rhs) const {
    if (rhs.n_ != n_) throw Error(ErrorCode::dimension_mismatch, "dense product: size mismatch");
    DenseMatrix out(n_);
    for (Index i = 0; i < n_; ++i)
        for (Index k = 0; k < n_; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (Index j = 0; j < n_; ++j) out(i, j) += aik * rhs(k, j);
        }
    return out;
}

DenseMatrix DenseMatrix::operator-(const DenseMatrix& rhs) const {
    if (rhs.n_ != n_) throw Error(ErrorCode::dimension_mismatch, "dense difference: size mismatch");
    DenseMatrix out(n_);
    for (std::size_t k = 0; k < values_.size(); ++k) out.values_[k] = values_[k] - rhs.values_[k];
    return out;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
    if (static_cast<Index>(x.size()) != n_)
        throw Error(ErrorCode::dimension_mismatch, "dense matrix-vector product: length mismatch");
    std::vector<double> y(static_cast<std::size_t>(n_), 0.0);
    for (Index i = 0; i < n_; ++i)
        for (Index j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
}

double DenseMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

std::optional<DenseMatrix> DenseMatrix::inverse() const {
    const Index n = n_;
    DenseMatrix work = *this;
    DenseMatrix inv = identity(n);
    const double tiny = 1e-14 * std::max(max_abs(), 1e-300);

    for (Index k = 0; k < n; ++k) {
        Index piv = k;
        for (Index i = k + 1; i < n; ++i)
            if (std::abs(work(i, k)) > std::abs(work(piv, k))) piv = i;
        if (std::abs(work(piv, k)) <= tiny) return std::nullopt;
        if (piv != k) {
            for (Index j = 0; j < n; ++j) {
                std::swap(work(k, j), work(piv, j));
                std::swap(inv(k, j), inv(piv, j));
            }
        }
        const double p = work(k, k);
        for (Index j = 0; j < n; ++j) {
            work(k, j) /= p;
            inv(k, j) /= p;
        }
        for (Index i = 0; i < n; ++i) {
            if (i == k) continue;
            const double f = work(i, k);
            if (f == 0.0) continue;
            for (Index j = 0; j < n; ++j) {
                work(i, j) -= f * work(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

Index oracle_limit() {
    if (const char* env = std::getenv("PRECOND_LAB_ORACLE_LIMIT")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<Index>(v);
        throw Error(ErrorCode::invalid_argument,
                    std::string("PRECOND_LAB_ORACLE_LIMIT is not a positive integer: ") + env);
    }
    return 200;
}

MatrixClassCheck check_m_matrix(const DenseMatrix& a) {
    if (a.size() > oracle_limit())
        throw Error(ErrorCode::invalid_argument,
                    "dense oracle refused: n=" + std::to_string(a.size()) + " exceeds the oracle limit");
    for (Index i = 0; i < a.size(); ++i)
        for (Index j = 0; j < a.size(); ++j)
            if (i != j && a(i, j) > 0.0) return {};

    const auto inv = a.inverse();
    if (!inv) return {.holds = false, .singular = true};
    const double eps = 1e-12 * inv->max_abs();
    for (double v : inv->data())
        if (v < -eps) return {};
    return {.holds = true, .singular = false};
}

DenseMatrix comparison_matrix(const DenseMatrix& a) {
    DenseMatrix c(a.size());
    for (Index i = 0; i < a.size(); ++i)
        for (Index j = 0; j < a.size(); ++j)
            c(i, j) = i == j ? std::abs(a(i, j)) : -std::abs(a(i, j));
    return c;
}

MatrixClassCheck check_h_matrix(const DenseMatrix& a) { return check_m_matrix(comparison_matrix(a)); }

} // namespace precond_lab
