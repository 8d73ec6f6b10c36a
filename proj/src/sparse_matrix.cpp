#include "lse/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lse/error.hpp"

namespace lse {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                           std::vector<std::size_t> col_idx, std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values))
{
    if (row_ptr_.size() != rows_ + 1 || row_ptr_.front() != 0) {
        throw DimensionError("SparseMatrix: row offsets must have rows + 1 entries starting at 0");
    }
    if (row_ptr_.back() != col_idx_.size() || col_idx_.size() != values_.size()) {
        throw DimensionError("SparseMatrix: entry count inconsistent with row offsets");
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        if (row_ptr_[i + 1] < row_ptr_[i]) {
            throw DimensionError("SparseMatrix: row offsets must be nondecreasing");
        }
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            if (col_idx_[k] >= cols_) {
                throw DimensionError("SparseMatrix: column index " + std::to_string(col_idx_[k]) +
                                     " out of range in row " + std::to_string(i));
            }
            if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1]) {
                throw DimensionError("SparseMatrix: column indices not strictly increasing in row " +
                                     std::to_string(i));
            }
        }
    }
    build_transpose();
}

void SparseMatrix::build_transpose()
{
    t_row_ptr_.assign(cols_ + 1, 0);
    for (std::size_t c : col_idx_) {
        ++t_row_ptr_[c + 1];
    }
    for (std::size_t j = 0; j < cols_; ++j) {
        t_row_ptr_[j + 1] += t_row_ptr_[j];
    }
    t_col_idx_.resize(col_idx_.size());
    t_values_.resize(values_.size());
    std::vector<std::size_t> next(t_row_ptr_.begin(), t_row_ptr_.end() - 1);
    // Row-major traversal keeps the transposed column indices sorted.
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            const std::size_t dst = next[col_idx_[k]]++;
            t_col_idx_[dst] = i;
            t_values_[dst] = values_[k];
        }
    }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries)
{
    for (const auto& t : entries) {
        if (t.row >= rows || t.col >= cols) {
            throw DimensionError("SparseMatrix::from_triplets: index (" + std::to_string(t.row) + ", " +
                                 std::to_string(t.col) + ") out of bounds");
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<std::size_t> row_ptr(rows + 1, 0);
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    col_idx.reserve(entries.size());
    values.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& t = entries[k];
        if (k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col) {
            values.back() += t.value;
            continue;
        }
        col_idx.push_back(t.col);
        values.push_back(t.value);
        ++row_ptr[t.row + 1];
    }
    for (std::size_t i = 0; i < rows; ++i) {
        row_ptr[i + 1] += row_ptr[i];
    }
    return SparseMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& m, double drop_tol)
{
    std::vector<std::size_t> row_ptr(m.rows() + 1, 0);
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (std::abs(m(i, j)) > drop_tol) {
                col_idx.push_back(j);
                values.push_back(m(i, j));
            }
        }
        row_ptr[i + 1] = col_idx.size();
    }
    return SparseMatrix(m.rows(), m.cols(), std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix SparseMatrix::identity(std::size_t n)
{
    std::vector<std::size_t> row_ptr(n + 1);
    std::vector<std::size_t> col_idx(n);
    for (std::size_t i = 0; i <= n; ++i) {
        row_ptr[i] = i;
    }
    for (std::size_t i = 0; i < n; ++i) {
        col_idx[i] = i;
    }
    return SparseMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::zero(std::size_t rows, std::size_t cols)
{
    return SparseMatrix(rows, cols, std::vector<std::size_t>(rows + 1, 0), {}, {});
}

kernels::CsrView SparseMatrix::view() const noexcept
{
    return {rows_, cols_, row_ptr_, col_idx_, values_};
}

kernels::CsrView SparseMatrix::transpose_view() const noexcept
{
    return {cols_, rows_, t_row_ptr_, t_col_idx_, t_values_};
}

SparseMatrix SparseMatrix::transpose() const
{
    return SparseMatrix(cols_, rows_, t_row_ptr_, t_col_idx_, t_values_);
}

DenseMatrix SparseMatrix::to_dense() const
{
    DenseMatrix d(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            d(i, col_idx_[k]) = values_[k];
        }
    }
    return d;
}

std::vector<Triplet> SparseMatrix::triplets() const
{
    std::vector<Triplet> out;
    out.reserve(nnz());
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            out.push_back({i, col_idx_[k], values_[k]});
        }
    }
    return out;
}

SparseMatrix SparseMatrix::row_block(std::size_t first, std::size_t count) const
{
    if (first + count > rows_) {
        throw DimensionError("SparseMatrix::row_block: range out of bounds");
    }
    const std::size_t lo = row_ptr_[first];
    const std::size_t hi = row_ptr_[first + count];
    std::vector<std::size_t> row_ptr(count + 1);
    for (std::size_t i = 0; i <= count; ++i) {
        row_ptr[i] = row_ptr_[first + i] - lo;
    }
    return SparseMatrix(count, cols_, std::move(row_ptr),
                        std::vector<std::size_t>(col_idx_.begin() + static_cast<std::ptrdiff_t>(lo),
                                                 col_idx_.begin() + static_cast<std::ptrdiff_t>(hi)),
                        std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(lo),
                                            values_.begin() + static_cast<std::ptrdiff_t>(hi)));
}

double SparseMatrix::frobenius_norm() const { return norm2(values_); }

void spmv_into(const SparseMatrix& m, std::span<const double> x, std::span<double> y, bool transpose)
{
    const std::size_t in = transpose ? m.rows() : m.cols();
    const std::size_t out = transpose ? m.cols() : m.rows();
    if (x.size() != in || y.size() != out) {
        throw DimensionError("spmv: operand length " + std::to_string(x.size()) + " does not match " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                             (transpose ? " matrix (transposed)" : " matrix"));
    }
    kernels::csr_matvec(transpose ? m.transpose_view() : m.view(), x, y);
}

Vector spmv(const SparseMatrix& m, std::span<const double> x, bool transpose)
{
    Vector y(transpose ? m.cols() : m.rows());
    spmv_into(m, x, y, transpose);
    return y;
}

SparseMatrix vstack(const SparseMatrix& top, const SparseMatrix& bottom)
{
    if (top.cols() != bottom.cols()) {
        throw DimensionError("vstack: column counts differ");
    }
    std::vector<std::size_t> row_ptr(top.row_ptr().begin(), top.row_ptr().end());
    for (std::size_t i = 1; i < bottom.row_ptr().size(); ++i) {
        row_ptr.push_back(top.nnz() + bottom.row_ptr()[i]);
    }
    std::vector<std::size_t> col_idx(top.col_idx().begin(), top.col_idx().end());
    col_idx.insert(col_idx.end(), bottom.col_idx().begin(), bottom.col_idx().end());
    std::vector<double> values(top.values().begin(), top.values().end());
    values.insert(values.end(), bottom.values().begin(), bottom.values().end());
    return SparseMatrix(top.rows() + bottom.rows(), top.cols(), std::move(row_ptr), std::move(col_idx),
                        std::move(values));
}

}  // namespace lse
