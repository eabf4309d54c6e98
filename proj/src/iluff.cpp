#include "precond_lab/iluff.hpp"

#include <cmath>
#include <string>

#include "detail/factor_kernels.hpp"
#include "precond_lab/error.hpp"
#include "precond_lab/matrix_market.hpp"

namespace precond_lab {

using detail::SparseAccumulator;
using detail::TransposedLists;

namespace {

/// Applies the kept coefficients of one side of a step. For each i in
/// ascending order with |c_i| > tau: records c_i, performs
/// work -= c_i * (e_i + vectors[i]) and drops the touched entries of work
/// that fall below tau.
void eliminate(SparseAccumulator& coef, const std::vector<double>& d, const SparseVectorSet& vectors,
               DropRule rule, Index j, SparseAccumulator& work, std::vector<Index>& kept_idx,
               std::vector<double>& kept_val) {
    kept_idx.clear();
    kept_val.clear();
    for (Index i : coef.sorted_positions()) {
        const double c = d[i] * coef[i];
        detail::require_finite(c, j, "factor coefficient");
        if (!(std::abs(c) > rule.tau)) continue;
        kept_idx.push_back(i);
        kept_val.push_back(c);

        const auto vi = vectors.indices(i);
        const auto vv = vectors.values(i);
        work.add(i, -c);
        for (std::size_t p = 0; p < vi.size(); ++p) work.add(vi[p], -c * vv[p]);
        if (rule.tau > 0.0) {
            if (rule.drops(work[i])) work.zero(i);
            for (Index k : vi)
                if (rule.drops(work[k])) work.zero(k);
        }
    }
    coef.clear();
}

void freeze(SparseAccumulator& acc, DropRule rule, Index j, std::vector<Index>& idx,
            std::vector<double>& val) {
    idx.clear();
    val.clear();
    for (Index k : acc.sorted_positions()) {
        const double v = acc[k];
        detail::require_finite(v, j, "work vector entry");
        if (v == 0.0 || rule.drops(v)) continue;
        idx.push_back(k);
        val.push_back(v);
    }
    acc.clear();
}

/// z^T A z for z = e_j + sum_p val[p] e_{idx[p]}; z_dense must be zero on entry.
double quadratic_form(const CsrMatrix& a, Index j, const std::vector<Index>& idx,
                      const std::vector<double>& val, std::vector<double>& z_dense) {
    z_dense[j] = 1.0;
    for (std::size_t p = 0; p < idx.size(); ++p) z_dense[idx[p]] = val[p];

    auto row_dot = [&](Index k) {
        const auto cols = a.row_cols(k);
        const auto vals = a.row_values(k);
        double s = 0.0;
        for (std::size_t p = 0; p < cols.size(); ++p) s += vals[p] * z_dense[cols[p]];
        return s;
    };
    double q = row_dot(j);
    for (std::size_t p = 0; p < idx.size(); ++p) q += val[p] * row_dot(idx[p]);

    z_dense[j] = 0.0;
    for (Index k : idx) z_dense[k] = 0.0;
    return q;
}

} // namespace

CsrMatrix IlduFactors::l_matrix() const { return detail::unit_triangle(n, l_rows, true); }
CsrMatrix IlduFactors::u_matrix() const { return detail::unit_triangle(n, u_cols, false); }

IlduFactors iluff_factorize(const CsrMatrix& a, const ColumnCursorIndex& cols, DropRule rule,
                            PivotMode mode) {
    if (cols.size() != a.size())
        throw Error(ErrorCode::dimension_mismatch, "column index was built for a different matrix");
    const Index n = a.size();

    IlduFactors f;
    f.n = n;
    f.d.assign(static_cast<std::size_t>(n), 0.0);

    // Work vectors of the approximate-inverse process, needed by later steps.
    SparseVectorSet w_rows, z_cols;
    TransposedLists w_by_col(static_cast<std::size_t>(n));
    TransposedLists z_by_row(static_cast<std::size_t>(n));

    SparseAccumulator coef(n), work(n);
    std::vector<double> dense(static_cast<std::size_t>(n), 0.0);
    std::vector<Index> idx, kept_idx;
    std::vector<double> val, kept_val;

    for (Index j = 0; j < n; ++j) {
        detail::accumulate_w_times_column(a, cols, w_by_col, j, coef);
        eliminate(coef, f.d, z_cols, rule, j, work, kept_idx, kept_val);
        f.u_cols.append(kept_idx, kept_val);
        freeze(work, rule, j, idx, val);
        z_cols.append(idx, val);
        for (std::size_t p = 0; p < idx.size(); ++p) z_by_row[idx[p]].emplace_back(j, val[p]);

        if (mode == PivotMode::positive_definite) {
            const double q = quadratic_form(a, j, idx, val, dense);
            detail::require_finite(q, j, "pivot");
            if (q <= 0.0)
                throw Error(ErrorCode::not_positive_definite,
                            "matrix not positive definite: z^T A z <= 0 at column " + std::to_string(j));
            f.d[j] = detail::pivot_inverse(q, 1.0, j, f.breakdown_count);
        }

        detail::accumulate_row_times_z(a, z_by_row, j, coef);
        eliminate(coef, f.d, w_rows, rule, j, work, kept_idx, kept_val);
        f.l_rows.append(kept_idx, kept_val);
        freeze(work, rule, j, idx, val);
        w_rows.append(idx, val);
        for (std::size_t p = 0; p < idx.size(); ++p) w_by_col[idx[p]].emplace_back(j, val[p]);

        if (mode == PivotMode::general) {
            for (std::size_t p = 0; p < idx.size(); ++p) dense[idx[p]] = val[p];
            const double denom = detail::row_times_column(a, cols, dense, j);
            for (Index k : idx) dense[k] = 0.0;
            f.d[j] = detail::pivot_inverse(denom, a.at(j, j), j, f.breakdown_count);
        }
    }
    return f;
}

void apply_ildu_inverse(const IlduFactors& f, std::span<const double> v, std::span<double> out) {
    if (static_cast<Index>(v.size()) != f.n || static_cast<Index>(out.size()) != f.n)
        throw Error(ErrorCode::dimension_mismatch, "ILDU solve: vector length mismatch");
    if (v.data() != out.data()) std::copy(v.begin(), v.end(), out.begin());

    // L a = v, rows in order.
    for (Index i = 0; i < f.n; ++i) {
        const auto idx = f.l_rows.indices(i);
        const auto val = f.l_rows.values(i);
        double s = out[i];
        for (std::size_t p = 0; p < idx.size(); ++p) s -= val[p] * out[idx[p]];
        out[i] = s;
    }
    for (Index i = 0; i < f.n; ++i) out[i] *= f.d[i];
    // U x = D a, columns from last to first.
    for (Index j = f.n - 1; j >= 0; --j) {
        const double xj = out[j];
        const auto idx = f.u_cols.indices(j);
        const auto val = f.u_cols.values(j);
        for (std::size_t p = 0; p < idx.size(); ++p) out[idx[p]] -= val[p] * xj;
    }
}

std::vector<double> apply_ildu_inverse(const IlduFactors& f, std::span<const double> v) {
    std::vector<double> out(v.size());
    apply_ildu_inverse(f, v, out);
    return out;
}

double density(const IlduFactors& f, const CsrMatrix& a) {
    return static_cast<double>(f.l_rows.nnz() + f.u_cols.nnz() + f.n) / static_cast<double>(a.nnz());
}

void write_factors(const IlduFactors& f, const std::filesystem::path& prefix) {
    write_matrix_market(f.l_matrix(), prefix.string() + "_L.mtx");
    write_matrix_market(f.u_matrix(), prefix.string() + "_U.mtx");
    write_vector(f.d, prefix.string() + "_D.txt");
}

} // namespace precond_lab
