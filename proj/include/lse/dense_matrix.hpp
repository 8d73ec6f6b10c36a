#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "lse/vector.hpp"

namespace lse {

/// Column-major dense real matrix for desk-scale factorizations.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static DenseMatrix identity(std::size_t n);
    /// Row-wise literal, e.g. from_rows({{1, 2}, {3, 4}}).
    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    /// n x 1 matrix holding v.
    static DenseMatrix column(std::span<const double> v);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i + j * rows_]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i + j * rows_]; }

    std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
    std::span<const double> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    DenseMatrix transpose() const;
    /// Columns [first, first + count).
    DenseMatrix columns(std::size_t first, std::size_t count) const;
    /// Rows [first, first + count).
    DenseMatrix row_block(std::size_t first, std::size_t count) const;

    double frobenius_norm() const;
    /// Largest absolute entry.
    double max_abs() const;

    DenseMatrix& operator+=(const DenseMatrix& other);
    DenseMatrix& operator-=(const DenseMatrix& other);
    DenseMatrix& operator*=(double alpha);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double alpha, DenseMatrix a);

/// y = M x
Vector matvec(const DenseMatrix& m, std::span<const double> x);
/// y = M^T x
Vector matvec_transpose(const DenseMatrix& m, std::span<const double> x);

/// [top; bottom]
DenseMatrix vstack(const DenseMatrix& top, const DenseMatrix& bottom);
/// [left, right]
DenseMatrix hstack(const DenseMatrix& left, const DenseMatrix& right);

}  // namespace lse
