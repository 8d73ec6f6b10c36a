#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lse/dense_matrix.hpp"
#include "lse/kernels.hpp"
#include "lse/vector.hpp"

namespace lse {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Compressed-row sparse matrix. Immutable after construction; the transpose
/// pattern is built once up front so both products are row-parallel.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Takes ownership of CSR arrays. Column indices must be strictly
    /// increasing within each row and below `cols`.
    SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                 std::vector<std::size_t> col_idx, std::vector<double> values);

    /// Duplicates are summed. Explicit zeros are kept.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);
    /// Entries with |value| <= drop_tol are omitted.
    static SparseMatrix from_dense(const DenseMatrix& m, double drop_tol = 0.0);
    static SparseMatrix identity(std::size_t n);
    static SparseMatrix zero(std::size_t rows, std::size_t cols);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    kernels::CsrView view() const noexcept;
    kernels::CsrView transpose_view() const noexcept;

    SparseMatrix transpose() const;
    DenseMatrix to_dense() const;
    std::vector<Triplet> triplets() const;

    /// Rows [first, first + count) as a new matrix.
    SparseMatrix row_block(std::size_t first, std::size_t count) const;
    /// Frobenius norm of the stored values.
    double frobenius_norm() const;

private:
    void build_transpose();

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;

    std::vector<std::size_t> t_row_ptr_{0};
    std::vector<std::size_t> t_col_idx_;
    std::vector<double> t_values_;
};

/// y = M x, or M^T x when `transpose` is set.
Vector spmv(const SparseMatrix& m, std::span<const double> x, bool transpose = false);
/// In-place variant; y must already have the output length.
void spmv_into(const SparseMatrix& m, std::span<const double> x, std::span<double> y, bool transpose = false);

/// [top; bottom]
SparseMatrix vstack(const SparseMatrix& top, const SparseMatrix& bottom);

}  // namespace lse
