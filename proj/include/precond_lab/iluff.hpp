#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "precond_lab/fapinv.hpp"
#include "precond_lab/sparse.hpp"

namespace precond_lab {

enum class PivotMode {
    general,           // d_j = 1 / (w_j A_{*j})
    positive_definite, // d_j = 1 / (z_j^T A z_j)
};

/// Incomplete factorization A ~ L D^{-1} U with L unit lower (rows) and
/// U unit upper (columns); only strict triangles are stored.
struct IlduFactors {
    Index n = 0;
    SparseVectorSet l_rows;
    SparseVectorSet u_cols;
    std::vector<double> d;
    Index breakdown_count = 0;

    CsrMatrix l_matrix() const;
    CsrMatrix u_matrix() const;
};

/// ILU computed as a by-product of the forward approximate-inverse process.
///
/// For each j the column coefficients U_ij = d_i w_i A_{*j} are visited in
/// increasing i. A coefficient with |U_ij| > tau is stored and applied as
/// z_j -= U_ij z_i, after which entries of z_j below tau are dropped; any
/// other coefficient is discarded. The row side (L_ji = d_i A_{j*} z_i, w_j)
/// mirrors this. The w_i, z_i work vectors live only for the duration of the
/// call. Pivot safeguard and non-finite checks match ffinv_vector; in
/// positive_definite mode a non-positive z_j^T A z_j raises
/// Error(not_positive_definite).
IlduFactors iluff_factorize(const CsrMatrix& a, const ColumnCursorIndex& cols, DropRule rule,
                            PivotMode mode = PivotMode::general);

/// out = U^{-1} D L^{-1} v by forward substitution, scaling, back substitution.
void apply_ildu_inverse(const IlduFactors& f, std::span<const double> v, std::span<double> out);
std::vector<double> apply_ildu_inverse(const IlduFactors& f, std::span<const double> v);

/// (nnz(L) + nnz(U) + n) / nnz(A): D is counted as part of U.
double density(const IlduFactors& f, const CsrMatrix& a);

/// Writes <prefix>_L.mtx, <prefix>_U.mtx and <prefix>_D.txt.
void write_factors(const IlduFactors& f, const std::filesystem::path& prefix);

} // namespace precond_lab
