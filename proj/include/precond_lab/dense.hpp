#pragma once

#include <optional>
#include <span>
#include <vector>

#include "precond_lab/sparse.hpp"

namespace precond_lab {

/// Row-major dense matrix. Substrate for the brute-force oracles only.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    explicit DenseMatrix(Index n) : n_(n), values_(static_cast<std::size_t>(n * n), 0.0) {}
    DenseMatrix(Index n, std::vector<double> row_major);

    static DenseMatrix from_csr(const CsrMatrix& a);
    static DenseMatrix identity(Index n);

    Index size() const noexcept { return n_; }
    double& operator()(Index i, Index j) noexcept { return values_[i * n_ + j]; }
    double operator()(Index i, Index j) const noexcept { return values_[i * n_ + j]; }
    std::span<const double> data() const noexcept { return values_; }

    DenseMatrix operator*(const DenseMatrix& rhs) const;
    DenseMatrix operator-(const DenseMatrix& rhs) const;
    std::vector<double> multiply(std::span<const double> x) const;
    double max_abs() const noexcept;

    /// Gauss-Jordan with partial pivoting; nullopt when numerically singular.
    std::optional<DenseMatrix> inverse() const;

  private:
    Index n_ = 0;
    std::vector<double> values_;
};

/// Largest dimension the dense oracles accept. Defaults to 200 and can be
/// overridden with PRECOND_LAB_ORACLE_LIMIT.
Index oracle_limit();

struct MatrixClassCheck {
    bool holds = false;
    bool singular = false;
};

/// Sign condition on the off-diagonals plus an entrywise nonnegative inverse
/// (to -1e-12 times the largest inverse entry).
MatrixClassCheck check_m_matrix(const DenseMatrix& a);
MatrixClassCheck check_h_matrix(const DenseMatrix& a);

inline bool is_m_matrix(const DenseMatrix& a) { return check_m_matrix(a).holds; }
inline bool is_h_matrix(const DenseMatrix& a) { return check_h_matrix(a).holds; }

DenseMatrix comparison_matrix(const DenseMatrix& a);

} // namespace precond_lab
