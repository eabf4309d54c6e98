#include "precond_lab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "precond_lab/error.hpp"

namespace precond_lab {

namespace {

[[noreturn]] void invalid(const std::string& what) {
    throw Error(ErrorCode::invalid_argument, what);
}

} // namespace

CsrMatrix::CsrMatrix(Index n, std::vector<Index> row_ptr, std::vector<Index> col_idx,
                     std::vector<double> values)
    : n_(n), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
    if (n_ < 0) invalid("negative matrix dimension");
    if (static_cast<Index>(row_ptr_.size()) != n_ + 1) invalid("row_ptr must have n+1 entries");
    if (row_ptr_.front() != 0) invalid("row_ptr[0] must be 0");
    if (col_idx_.size() != values_.size()) invalid("col_idx and values differ in length");
    if (row_ptr_.back() != static_cast<Index>(values_.size())) invalid("row_ptr[n] must equal nnz");
    for (Index i = 0; i < n_; ++i) {
        if (row_ptr_[i + 1] < row_ptr_[i]) invalid("row_ptr is decreasing at row " + std::to_string(i));
        for (Index e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) {
            const Index c = col_idx_[e];
            if (c < 0 || c >= n_) invalid("column index out of range in row " + std::to_string(i));
            if (e > row_ptr_[i] && col_idx_[e - 1] >= c)
                invalid("column indices not strictly increasing in row " + std::to_string(i));
        }
    }
}

CsrMatrix CsrMatrix::from_triplets(Index n, std::vector<Triplet> triplets) {
    if (n < 0) invalid("negative matrix dimension");
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
            invalid("triplet index out of range");
    }
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& x, const Triplet& y) {
        return x.row != y.row ? x.row < y.row : x.col < y.col;
    });

    std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1, 0);
    std::vector<Index> col_idx;
    std::vector<double> values;
    col_idx.reserve(triplets.size());
    values.reserve(triplets.size());

    std::size_t k = 0;
    while (k < triplets.size()) {
        const Index r = triplets[k].row;
        const Index c = triplets[k].col;
        double sum = 0.0;
        for (; k < triplets.size() && triplets[k].row == r && triplets[k].col == c; ++k)
            sum += triplets[k].value;
        if (sum != 0.0) {
            col_idx.push_back(c);
            values.push_back(sum);
            ++row_ptr[r + 1];
        }
    }
    for (Index i = 0; i < n; ++i) row_ptr[i + 1] += row_ptr[i];
    return CsrMatrix(n, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::identity(Index n) {
    std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1);
    std::vector<Index> col_idx(static_cast<std::size_t>(n));
    for (Index i = 0; i <= n; ++i) row_ptr[i] = i;
    for (Index i = 0; i < n; ++i) col_idx[i] = i;
    return CsrMatrix(n, std::move(row_ptr), std::move(col_idx),
                     std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

double CsrMatrix::at(Index i, Index j) const {
    const auto cols = row_cols(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return row_values(i)[it - cols.begin()];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (static_cast<Index>(x.size()) != n_ || static_cast<Index>(y.size()) != n_)
        throw Error(ErrorCode::dimension_mismatch, "matrix-vector product: length mismatch");
    for (Index i = 0; i < n_; ++i) {
        double s = 0.0;
        for (Index e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) s += values_[e] * x[col_idx_[e]];
        y[i] = s;
    }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(n_));
    multiply(x, y);
    return y;
}

double CsrMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

std::vector<std::tuple<Index, Index, double>> CsrMatrix::triplets() const {
    std::vector<std::tuple<Index, Index, double>> out;
    out.reserve(values_.size());
    for (Index i = 0; i < n_; ++i)
        for (Index e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e)
            out.emplace_back(i, col_idx_[e], values_[e]);
    return out;
}

ColumnCursorIndex::ColumnCursorIndex(const CsrMatrix& a)
    : first_in_col_(static_cast<std::size_t>(a.size()), npos),
      next_in_col_(static_cast<std::size_t>(a.nnz()), npos),
      row_of_(static_cast<std::size_t>(a.nnz())) {
    const auto row_ptr = a.row_ptr();
    const auto col_idx = a.col_idx();
    // Prepending while walking rows backwards leaves each list in increasing row order.
    for (Index i = a.size() - 1; i >= 0; --i) {
        for (Index e = row_ptr[i + 1] - 1; e >= row_ptr[i]; --e) {
            const Index c = col_idx[e];
            row_of_[e] = i;
            next_in_col_[e] = first_in_col_[c];
            first_in_col_[c] = e;
        }
    }
}

std::vector<std::tuple<Index, Index, double>> column_triplets(const CsrMatrix& a,
                                                              const ColumnCursorIndex& cols) {
    std::vector<std::tuple<Index, Index, double>> out;
    out.reserve(static_cast<std::size_t>(a.nnz()));
    const auto values = a.values();
    for (Index j = 0; j < cols.size(); ++j)
        for (Index e = cols.first(j); e != ColumnCursorIndex::npos; e = cols.next(e))
            out.emplace_back(cols.row(e), j, values[e]);
    return out;
}

void SparseVectorSet::append(std::span<const Index> indices, std::span<const double> values) {
    idx_.insert(idx_.end(), indices.begin(), indices.end());
    values_.insert(values_.end(), values.begin(), values.end());
    ptr_.push_back(static_cast<Index>(values_.size()));
}

Permutation::Permutation(std::vector<Index> perm) : perm_(std::move(perm)) {
    const Index n = size();
    std::vector<char> seen(perm_.size(), 0);
    for (Index i = 0; i < n; ++i) {
        const Index p = perm_[i];
        if (p < 0 || p >= n) invalid("permutation entry out of range at position " + std::to_string(i));
        if (seen[p]) invalid("permutation repeats target " + std::to_string(p));
        seen[p] = 1;
    }
}

Permutation Permutation::identity(Index n) {
    std::vector<Index> p(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) p[i] = i;
    return Permutation(std::move(p));
}

Permutation Permutation::inverse() const {
    std::vector<Index> inv(perm_.size());
    for (Index i = 0; i < size(); ++i) inv[perm_[i]] = i;
    return Permutation(std::move(inv));
}

CsrMatrix comparison_matrix(const CsrMatrix& a) {
    std::vector<double> values(a.values().begin(), a.values().end());
    for (Index i = 0; i < a.size(); ++i) {
        for (Index e = a.row_ptr()[i]; e < a.row_ptr()[i + 1]; ++e)
            values[e] = a.col_idx()[e] == i ? std::abs(values[e]) : -std::abs(values[e]);
    }
    return CsrMatrix(a.size(), {a.row_ptr().begin(), a.row_ptr().end()},
                     {a.col_idx().begin(), a.col_idx().end()}, std::move(values));
}

CsrMatrix apply_permutation(const CsrMatrix& a, const Permutation& p) {
    if (p.size() != a.size())
        throw Error(ErrorCode::dimension_mismatch, "permutation length differs from matrix dimension");
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(a.nnz()));
    for (const auto& [i, j, v] : a.triplets()) t.push_back({p[i], p[j], v});
    return CsrMatrix::from_triplets(a.size(), std::move(t));
}

std::vector<double> apply_permutation(std::span<const double> x, const Permutation& p) {
    if (static_cast<Index>(x.size()) != p.size())
        throw Error(ErrorCode::dimension_mismatch, "permutation length differs from vector length");
    std::vector<double> out(x.size());
    for (Index i = 0; i < p.size(); ++i) out[p[i]] = x[i];
    return out;
}

} // namespace precond_lab
