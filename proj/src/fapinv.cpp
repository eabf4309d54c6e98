#include "precond_lab/fapinv.hpp"

#include <cmath>

#include "detail/factor_kernels.hpp"
#include "precond_lab/error.hpp"
#include "precond_lab/matrix_market.hpp"

namespace precond_lab {

using detail::SparseAccumulator;
using detail::TransposedLists;

DropRule::DropRule(double tau_) : tau(tau_) {
    if (!(tau >= 0.0) || !std::isfinite(tau))
        throw Error(ErrorCode::invalid_argument, "drop tolerance must be finite and >= 0");
}

bool DropRule::drops(double v) const noexcept { return std::abs(v) < tau; }

namespace {

void check_square(const CsrMatrix& a, const ColumnCursorIndex& cols) {
    if (cols.size() != a.size())
        throw Error(ErrorCode::dimension_mismatch, "column index was built for a different matrix");
}

/// Moves the surviving entries of acc into (idx, val), ascending.
void freeze(SparseAccumulator& acc, DropRule rule, Index j, std::vector<Index>& idx,
            std::vector<double>& val) {
    idx.clear();
    val.clear();
    for (Index k : acc.sorted_positions()) {
        const double v = acc[k];
        detail::require_finite(v, j, "factor entry");
        if (v == 0.0 || rule.drops(v)) continue;
        idx.push_back(k);
        val.push_back(v);
    }
    acc.clear();
}

} // namespace

double InverseFactors::density(const CsrMatrix& a) const {
    return static_cast<double>(w_rows.nnz() + z_cols.nnz() + n) / static_cast<double>(a.nnz());
}

CsrMatrix InverseFactors::w_matrix() const { return detail::unit_triangle(n, w_rows, true); }
CsrMatrix InverseFactors::z_matrix() const { return detail::unit_triangle(n, z_cols, false); }

InverseFactors ffinv_vector(const CsrMatrix& a, const ColumnCursorIndex& cols, DropRule rule) {
    check_square(a, cols);
    const Index n = a.size();

    InverseFactors f;
    f.n = n;
    f.d.assign(static_cast<std::size_t>(n), 0.0);

    TransposedLists w_by_col(static_cast<std::size_t>(n));
    TransposedLists z_by_row(static_cast<std::size_t>(n));
    SparseAccumulator coef(n), work(n);
    std::vector<double> w_dense(static_cast<std::size_t>(n), 0.0);
    std::vector<Index> idx;
    std::vector<double> val;

    for (Index j = 0; j < n; ++j) {
        // z_j = e_j - sum_i alpha_i z_i
        detail::accumulate_w_times_column(a, cols, w_by_col, j, coef);
        for (Index i : coef.sorted_positions()) {
            const double alpha = f.d[i] * coef[i];
            detail::require_finite(alpha, j, "alpha");
            if (alpha == 0.0 || rule.drops(alpha)) continue;
            work.add(i, -alpha);
            const auto zi = f.z_cols.indices(i);
            const auto zv = f.z_cols.values(i);
            for (std::size_t p = 0; p < zi.size(); ++p) work.add(zi[p], -alpha * zv[p]);
        }
        coef.clear();
        freeze(work, rule, j, idx, val);
        f.z_cols.append(idx, val);
        for (std::size_t p = 0; p < idx.size(); ++p) z_by_row[idx[p]].emplace_back(j, val[p]);

        // w_j = e_j - sum_i beta_i w_i
        detail::accumulate_row_times_z(a, z_by_row, j, coef);
        for (Index i : coef.sorted_positions()) {
            const double beta = f.d[i] * coef[i];
            detail::require_finite(beta, j, "beta");
            if (beta == 0.0 || rule.drops(beta)) continue;
            work.add(i, -beta);
            const auto wi = f.w_rows.indices(i);
            const auto wv = f.w_rows.values(i);
            for (std::size_t p = 0; p < wi.size(); ++p) work.add(wi[p], -beta * wv[p]);
        }
        coef.clear();
        freeze(work, rule, j, idx, val);
        f.w_rows.append(idx, val);
        for (std::size_t p = 0; p < idx.size(); ++p) w_by_col[idx[p]].emplace_back(j, val[p]);

        // d_j = 1 / (w_j A_{*j})
        for (std::size_t p = 0; p < idx.size(); ++p) w_dense[idx[p]] = val[p];
        const double denom = detail::row_times_column(a, cols, w_dense, j);
        for (Index k : idx) w_dense[k] = 0.0;
        f.d[j] = detail::pivot_inverse(denom, a.at(j, j), j, f.breakdown_count);
    }
    return f;
}

InverseFactors ffinv_scalar(const CsrMatrix& a, const ColumnCursorIndex& cols, DropRule rule,
                            CoefficientTrace* trace) {
    check_square(a, cols);
    const Index n = a.size();
    const auto values = a.values();
    const std::size_t nn = static_cast<std::size_t>(n);

    // Dense strict triangles: w[j*n + i] = w_ji (i < j), z[i*n + j] = z_ij (i < j).
    std::vector<double> w(nn * nn, 0.0), z(nn * nn, 0.0);
    std::vector<double> d(nn, 0.0);
    std::vector<double> beta(nn), alpha(nn);
    Index breakdowns = 0;

    auto W = [&](Index r, Index c) -> double& { return w[static_cast<std::size_t>(r * n + c)]; };
    auto Z = [&](Index r, Index c) -> double& { return z[static_cast<std::size_t>(r * n + c)]; };
    auto record = [trace](std::vector<TraceEntry> CoefficientTrace::*field, Index i, Index j, double v) {
        if (trace && v != 0.0) (trace->*field).push_back({i, j, v});
    };

    for (Index j = 0; j < n; ++j) {
        const auto row_cols = a.row_cols(j);
        const auto row_vals = a.row_values(j);

        // l_i = a_ji + sum_{k<i} a_jk z_ki ; beta_i = l_i d_i
        for (Index i = j - 1; i >= 0; --i) {
            double s = 0.0;
            for (std::size_t p = 0; p < row_cols.size() && row_cols[p] <= i; ++p)
                s += row_vals[p] * (row_cols[p] == i ? 1.0 : Z(row_cols[p], i));
            double b = s * d[i];
            detail::require_finite(b, j, "beta");
            if (rule.drops(b)) b = 0.0;
            beta[i] = b;
            record(&CoefficientTrace::l, i, j, s);
            record(&CoefficientTrace::beta, i, j, b);
        }
        // w_ji = -beta_i - sum_{k=i+1}^{j-1} beta_k w_ki
        for (Index i = 0; i < j; ++i) {
            double s = -beta[i];
            for (Index k = i + 1; k < j; ++k)
                if (beta[k] != 0.0) s -= beta[k] * W(k, i);
            detail::require_finite(s, j, "factor entry");
            W(j, i) = rule.drops(s) ? 0.0 : s;
        }
        // d_j = 1 / (a_jj + sum_k w_jk a_kj)
        double denom = 0.0;
        for (Index e = cols.first(j); e != ColumnCursorIndex::npos; e = cols.next(e)) {
            const Index k = cols.row(e);
            if (k > j) break;
            denom += (k == j ? 1.0 : W(j, k)) * values[e];
        }
        d[j] = detail::pivot_inverse(denom, a.at(j, j), j, breakdowns);

        // u_i = a_ij + sum_{k<i} w_ik a_kj ; alpha_i = u_i d_i
        for (Index i = j - 1; i >= 0; --i) {
            double s = 0.0;
            for (Index e = cols.first(j); e != ColumnCursorIndex::npos; e = cols.next(e)) {
                const Index k = cols.row(e);
                if (k > i) break;
                s += (k == i ? 1.0 : W(i, k)) * values[e];
            }
            double al = s * d[i];
            detail::require_finite(al, j, "alpha");
            if (rule.drops(al)) al = 0.0;
            alpha[i] = al;
            record(&CoefficientTrace::u, i, j, s);
            record(&CoefficientTrace::alpha, i, j, al);
        }
        // z_ij = -alpha_i - sum_{k=i+1}^{j-1} alpha_k z_ik
        for (Index i = 0; i < j; ++i) {
            double s = -alpha[i];
            for (Index k = i + 1; k < j; ++k)
                if (alpha[k] != 0.0) s -= alpha[k] * Z(i, k);
            detail::require_finite(s, j, "factor entry");
            Z(i, j) = rule.drops(s) ? 0.0 : s;
        }
    }

    InverseFactors f;
    f.n = n;
    f.d = std::move(d);
    f.breakdown_count = breakdowns;
    std::vector<Index> idx;
    std::vector<double> val;
    for (Index j = 0; j < n; ++j) {
        idx.clear();
        val.clear();
        for (Index k = 0; k < j; ++k)
            if (W(j, k) != 0.0) {
                idx.push_back(k);
                val.push_back(W(j, k));
            }
        f.w_rows.append(idx, val);
        idx.clear();
        val.clear();
        for (Index k = 0; k < j; ++k)
            if (Z(k, j) != 0.0) {
                idx.push_back(k);
                val.push_back(Z(k, j));
            }
        f.z_cols.append(idx, val);
    }
    return f;
}

void apply_factored_inverse(const InverseFactors& f, std::span<const double> v, std::span<double> out) {
    if (static_cast<Index>(v.size()) != f.n || static_cast<Index>(out.size()) != f.n)
        throw Error(ErrorCode::dimension_mismatch, "factored inverse: vector length mismatch");
    if (v.data() == out.data()) throw Error(ErrorCode::invalid_argument, "factored inverse: output aliases input");
    for (Index j = 0; j < f.n; ++j) {
        double s = v[j];
        const auto idx = f.w_rows.indices(j);
        const auto val = f.w_rows.values(j);
        for (std::size_t p = 0; p < idx.size(); ++p) s += val[p] * v[idx[p]];
        out[j] = f.d[j] * s;
    }
    // Column j of Z only touches rows k < j, whose entries are already final.
    for (Index j = 0; j < f.n; ++j) {
        const double yj = out[j];
        const auto idx = f.z_cols.indices(j);
        const auto val = f.z_cols.values(j);
        for (std::size_t p = 0; p < idx.size(); ++p) out[idx[p]] += val[p] * yj;
    }
}

std::vector<double> apply_factored_inverse(const InverseFactors& f, std::span<const double> v) {
    std::vector<double> out(v.size());
    apply_factored_inverse(f, v, out);
    return out;
}

void write_factors(const InverseFactors& f, const std::filesystem::path& prefix) {
    write_matrix_market(f.w_matrix(), prefix.string() + "_W.mtx");
    write_matrix_market(f.z_matrix(), prefix.string() + "_Z.mtx");
    write_vector(f.d, prefix.string() + "_D.txt");
}

} // namespace precond_lab
