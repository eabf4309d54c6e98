#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "precond_lab/error.hpp"
#include "precond_lab/sparse.hpp"

namespace precond_lab::detail {

/// Dense work vector plus the list of occupied positions, reset in time
/// proportional to the occupied count.
class SparseAccumulator {
  public:
    explicit SparseAccumulator(Index n)
        : values_(static_cast<std::size_t>(n), 0.0), occupied_(static_cast<std::size_t>(n), 0) {}

    void add(Index i, double v) {
        if (!occupied_[i]) {
            occupied_[i] = 1;
            touched_.push_back(i);
        }
        values_[i] += v;
    }

    double operator[](Index i) const noexcept { return values_[i]; }
    void zero(Index i) noexcept { values_[i] = 0.0; }

    /// Occupied positions in ascending order.
    const std::vector<Index>& sorted_positions() {
        std::sort(touched_.begin(), touched_.end());
        return touched_;
    }

    void clear() {
        for (Index i : touched_) {
            values_[i] = 0.0;
            occupied_[i] = 0;
        }
        touched_.clear();
    }

  private:
    std::vector<double> values_;
    std::vector<char> occupied_;
    std::vector<Index> touched_;
};

/// Transposed access to the frozen rows of W (by column) or columns of Z (by
/// row). Entries arrive in increasing outer order.
using TransposedLists = std::vector<std::vector<std::pair<Index, double>>>;

inline constexpr double machine_epsilon = std::numeric_limits<double>::epsilon();

inline void require_finite(double v, Index j, const char* what) {
    if (!std::isfinite(v))
        throw Error(ErrorCode::numerical,
                    std::string("non-finite ") + what + " at column " + std::to_string(j));
}

/// Returns 1/denominator, substituting sqrt(eps) with the sign of a_jj when
/// |denominator| < eps.
inline double pivot_inverse(double denominator, double a_jj, Index j, Index& breakdowns) {
    require_finite(denominator, j, "pivot");
    if (std::abs(denominator) < machine_epsilon) {
        denominator = std::copysign(std::sqrt(machine_epsilon), a_jj < 0.0 ? -1.0 : 1.0);
        ++breakdowns;
    }
    const double d = 1.0 / denominator;
    require_finite(d, j, "pivot");
    return d;
}

/// acc[i] += (w_i A_{*j}) for every i < j, using W stored by columns.
inline void accumulate_w_times_column(const CsrMatrix& a, const ColumnCursorIndex& cols,
                                      const TransposedLists& w_by_col, Index j,
                                      SparseAccumulator& acc) {
    const auto values = a.values();
    for (Index e = cols.first(j); e != ColumnCursorIndex::npos; e = cols.next(e)) {
        const Index k = cols.row(e);
        if (k >= j) break;
        const double a_kj = values[e];
        acc.add(k, a_kj);
        for (const auto& [i, w_ik] : w_by_col[k]) {
            if (i >= j) break;
            acc.add(i, w_ik * a_kj);
        }
    }
}

/// acc[i] += (A_{j*} z_i) for every i < j, using Z stored by rows.
inline void accumulate_row_times_z(const CsrMatrix& a, const TransposedLists& z_by_row, Index j,
                                   SparseAccumulator& acc) {
    const auto cols = a.row_cols(j);
    const auto vals = a.row_values(j);
    for (std::size_t p = 0; p < cols.size(); ++p) {
        const Index k = cols[p];
        if (k >= j) break;
        const double a_jk = vals[p];
        acc.add(k, a_jk);
        for (const auto& [i, z_ki] : z_by_row[k]) {
            if (i >= j) break;
            acc.add(i, a_jk * z_ki);
        }
    }
}

/// a_jj + sum_{k<j} v_k a_kj, with v a dense scatter of the strict part of w_j.
inline double row_times_column(const CsrMatrix& a, const ColumnCursorIndex& cols,
                               const std::vector<double>& w_dense, Index j) {
    const auto values = a.values();
    double s = 0.0;
    for (Index e = cols.first(j); e != ColumnCursorIndex::npos; e = cols.next(e)) {
        const Index k = cols.row(e);
        if (k < j) s += w_dense[k] * values[e];
        else if (k == j) s += values[e];
        else break;
    }
    return s;
}

/// Strict triangle plus unit diagonal as a CsrMatrix; set holds rows when
/// by_rows, columns otherwise.
inline CsrMatrix unit_triangle(Index n, const SparseVectorSet& set, bool by_rows) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(set.nnz() + n));
    for (Index j = 0; j < n; ++j) {
        t.push_back({j, j, 1.0});
        const auto idx = set.indices(j);
        const auto val = set.values(j);
        for (std::size_t p = 0; p < idx.size(); ++p)
            t.push_back(by_rows ? Triplet{j, idx[p], val[p]} : Triplet{idx[p], j, val[p]});
    }
    return CsrMatrix::from_triplets(n, std::move(t));
}

} // namespace precond_lab::detail
