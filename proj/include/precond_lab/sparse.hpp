#pragma once

#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

namespace precond_lab {

using Index = std::int64_t;

struct Triplet {
    Index row;
    Index col;
    double value;
};

/// Square matrix in compressed sparse row format.
///
/// Column indices are strictly increasing within each row and every index
/// lies in [0, n). The triplet builder sums duplicates and drops exact zeros,
/// so nnz() counts structural nonzeros.
class CsrMatrix {
  public:
    CsrMatrix() = default;

    /// Validates the arrays; throws Error(invalid_argument) on any violation.
    CsrMatrix(Index n, std::vector<Index> row_ptr, std::vector<Index> col_idx,
              std::vector<double> values);

    static CsrMatrix from_triplets(Index n, std::vector<Triplet> triplets);
    static CsrMatrix identity(Index n);

    Index size() const noexcept { return n_; }
    Index nnz() const noexcept { return static_cast<Index>(values_.size()); }

    std::span<const Index> row_ptr() const noexcept { return row_ptr_; }
    std::span<const Index> col_idx() const noexcept { return col_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    std::span<const Index> row_cols(Index i) const noexcept {
        return {col_idx_.data() + row_ptr_[i],
                static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
    }
    std::span<const double> row_values(Index i) const noexcept {
        return {values_.data() + row_ptr_[i],
                static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
    }

    /// Stored value at (i, j), or 0.
    double at(Index i, Index j) const;

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;

    double max_abs() const noexcept;

    std::vector<std::tuple<Index, Index, double>> triplets() const;

    friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

  private:
    Index n_ = 0;
    std::vector<Index> row_ptr_{0};
    std::vector<Index> col_idx_;
    std::vector<double> values_;
};

/// Linked lists threading the entries of a CsrMatrix column by column.
///
/// Entry handles are positions in the matrix's value array. Within each column
/// the rows are visited in strictly increasing order.
class ColumnCursorIndex {
  public:
    static constexpr Index npos = -1;

    explicit ColumnCursorIndex(const CsrMatrix& a);

    Index size() const noexcept { return static_cast<Index>(first_in_col_.size()); }
    Index first(Index col) const noexcept { return first_in_col_[col]; }
    Index next(Index entry) const noexcept { return next_in_col_[entry]; }
    Index row(Index entry) const noexcept { return row_of_[entry]; }

  private:
    std::vector<Index> first_in_col_;
    std::vector<Index> next_in_col_;
    std::vector<Index> row_of_;
};

std::vector<std::tuple<Index, Index, double>> column_triplets(const CsrMatrix& a,
                                                              const ColumnCursorIndex& cols);

/// A sequence of sparse vectors frozen one at a time in compressed storage.
/// Used for the rows of W and L and the columns of Z and U.
class SparseVectorSet {
  public:
    SparseVectorSet() = default;

    void append(std::span<const Index> indices, std::span<const double> values);

    Index count() const noexcept { return static_cast<Index>(ptr_.size()) - 1; }
    Index nnz() const noexcept { return static_cast<Index>(values_.size()); }

    std::span<const Index> indices(Index k) const noexcept {
        return {idx_.data() + ptr_[k], static_cast<std::size_t>(ptr_[k + 1] - ptr_[k])};
    }
    std::span<const double> values(Index k) const noexcept {
        return {values_.data() + ptr_[k], static_cast<std::size_t>(ptr_[k + 1] - ptr_[k])};
    }

    friend bool operator==(const SparseVectorSet&, const SparseVectorSet&) = default;

  private:
    std::vector<Index> ptr_{0};
    std::vector<Index> idx_;
    std::vector<double> values_;
};

/// Bijection old index -> new index.
class Permutation {
  public:
    /// Throws Error(invalid_argument) unless perm is a bijection on {0..n-1}.
    explicit Permutation(std::vector<Index> perm);
    static Permutation identity(Index n);

    Index size() const noexcept { return static_cast<Index>(perm_.size()); }
    Index operator[](Index old_index) const noexcept { return perm_[old_index]; }
    std::span<const Index> data() const noexcept { return perm_; }

    Permutation inverse() const;

  private:
    std::vector<Index> perm_;
};

/// Off-diagonals -|a_ij|, diagonal |a_ii|, same pattern.
CsrMatrix comparison_matrix(const CsrMatrix& a);

/// Returns P A P^T: entry (i, j) moves to (p[i], p[j]).
CsrMatrix apply_permutation(const CsrMatrix& a, const Permutation& p);

/// x_new[p[i]] = x[i]
std::vector<double> apply_permutation(std::span<const double> x, const Permutation& p);

} // namespace precond_lab
