#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "precond_lab/sparse.hpp"

namespace precond_lab {

/// Absolute drop tolerance. A computed value v is discarded when |v| < tau;
/// tau = 0 disables dropping (only exact zeros are left out of storage).
struct DropRule {
    double tau = 0.0;

    /// Throws Error(invalid_argument) for negative or non-finite tau.
    explicit DropRule(double tau_ = 0.0);

    bool drops(double v) const noexcept;
};

/// Inverse factors with W A Z ~ D^{-1}, so that A^{-1} ~ Z D W.
///
/// W is unit lower triangular and kept by rows, Z is unit upper triangular
/// and kept by columns. Only the strict triangles are stored.
struct InverseFactors {
    Index n = 0;
    SparseVectorSet w_rows;    // row j: columns k < j
    SparseVectorSet z_cols;    // column j: rows k < j
    std::vector<double> d;
    Index breakdown_count = 0; // pivot safeguards triggered

    /// (nnz(W) + nnz(Z) + n) / nnz(A), counting D with Z.
    double density(const CsrMatrix& a) const;

    /// Full unit-triangular matrices, for export and tests.
    CsrMatrix w_matrix() const;
    CsrMatrix z_matrix() const;
};

/// One recorded coefficient of the scalar recurrences, 0-based.
struct TraceEntry {
    Index i;    // earlier index
    Index step; // current step j
    double value;
};

/// Coefficients seen during a scalar-form run. Only nonzero values are kept;
/// alpha and beta are recorded after dropping.
struct CoefficientTrace {
    std::vector<TraceEntry> alpha;
    std::vector<TraceEntry> beta;
    std::vector<TraceEntry> l;
    std::vector<TraceEntry> u;
};

/// Forward factored approximate inverse, vector form.
///
/// Step j computes alpha_i = d_i w_i A_{*j} and beta_i = d_i A_{j*} z_i for
/// every i < j from the finished rows/columns, skips the update for any
/// coefficient with |.| < tau, accumulates z_j and w_j by sparse axpys, purges
/// their entries below tau, and sets d_j = 1 / (w_j A_{*j}). A pivot smaller
/// than machine epsilon in magnitude is replaced by sqrt(eps) carrying the
/// sign of a_jj and counted in breakdown_count. Non-finite values raise
/// Error(numerical).
InverseFactors ffinv_vector(const CsrMatrix& a, const ColumnCursorIndex& cols, DropRule rule);

/// Same factors through the entrywise recurrences (l, beta, w_ji, d_j, u,
/// alpha, z_ij) with dropping at beta, w_ji, alpha and z_ij. Reference route:
/// works on dense n x n scratch, so memory is O(n^2).
InverseFactors ffinv_scalar(const CsrMatrix& a, const ColumnCursorIndex& cols, DropRule rule,
                            CoefficientTrace* trace = nullptr);

/// out = Z (D (W v)).
void apply_factored_inverse(const InverseFactors& f, std::span<const double> v, std::span<double> out);
std::vector<double> apply_factored_inverse(const InverseFactors& f, std::span<const double> v);

/// Writes <prefix>_W.mtx, <prefix>_Z.mtx and <prefix>_D.txt.
void write_factors(const InverseFactors& f, const std::filesystem::path& prefix);

} // namespace precond_lab
