#include "lse/dense_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "lse/error.hpp"

namespace lse {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill)
{
}

DenseMatrix DenseMatrix::identity(std::size_t n)
{
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows)
{
    const std::size_t nr = rows.size();
    const std::size_t nc = nr ? rows.begin()->size() : 0;
    DenseMatrix m(nr, nc);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != nc) {
            throw DimensionError("DenseMatrix::from_rows: ragged rows");
        }
        std::size_t j = 0;
        for (double v : row) {
            m(i, j++) = v;
        }
        ++i;
    }
    return m;
}

DenseMatrix DenseMatrix::column(std::span<const double> v)
{
    DenseMatrix m(v.size(), 1);
    std::copy(v.begin(), v.end(), m.data_.begin());
    return m;
}

DenseMatrix DenseMatrix::transpose() const
{
    DenseMatrix t(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j) {
        for (std::size_t i = 0; i < rows_; ++i) {
            t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

DenseMatrix DenseMatrix::columns(std::size_t first, std::size_t count) const
{
    if (first + count > cols_) {
        throw DimensionError("DenseMatrix::columns: range out of bounds");
    }
    DenseMatrix out(rows_, count);
    std::copy(data_.begin() + static_cast<std::ptrdiff_t>(first * rows_),
              data_.begin() + static_cast<std::ptrdiff_t>((first + count) * rows_), out.data_.begin());
    return out;
}

DenseMatrix DenseMatrix::row_block(std::size_t first, std::size_t count) const
{
    if (first + count > rows_) {
        throw DimensionError("DenseMatrix::row_block: range out of bounds");
    }
    DenseMatrix out(count, cols_);
    for (std::size_t j = 0; j < cols_; ++j) {
        for (std::size_t i = 0; i < count; ++i) {
            out(i, j) = (*this)(first + i, j);
        }
    }
    return out;
}

double DenseMatrix::frobenius_norm() const { return norm2(data_); }

double DenseMatrix::max_abs() const
{
    double m = 0.0;
    for (double v : data_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other)
{
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw DimensionError("DenseMatrix +=: shape mismatch");
    }
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] += other.data_[k];
    }
    return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other)
{
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw DimensionError("DenseMatrix -=: shape mismatch");
    }
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] -= other.data_[k];
    }
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double alpha)
{
    for (double& v : data_) {
        v *= alpha;
    }
    return *this;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b)
{
    if (a.cols() != b.rows()) {
        throw DimensionError("DenseMatrix *: inner dimensions differ");
    }
    DenseMatrix c(a.rows(), b.cols());
    if (!c.empty() && a.cols() > 0) {
        kernels::gemm(a.rows(), b.cols(), a.cols(), a.data(), b.data(), c.data());
    }
    return c;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(double alpha, DenseMatrix a) { return a *= alpha; }

Vector matvec(const DenseMatrix& m, std::span<const double> x)
{
    if (x.size() != m.cols()) {
        throw DimensionError("matvec: length mismatch");
    }
    Vector y(m.rows(), 0.0);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        if (x[j] != 0.0) {
            axpy(x[j], m.col(j), y);
        }
    }
    return y;
}

Vector matvec_transpose(const DenseMatrix& m, std::span<const double> x)
{
    if (x.size() != m.rows()) {
        throw DimensionError("matvec_transpose: length mismatch");
    }
    Vector y(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) {
        y[j] = dot(m.col(j), x);
    }
    return y;
}

DenseMatrix vstack(const DenseMatrix& top, const DenseMatrix& bottom)
{
    if (top.cols() != bottom.cols()) {
        throw DimensionError("vstack: column counts differ");
    }
    DenseMatrix out(top.rows() + bottom.rows(), top.cols());
    for (std::size_t j = 0; j < top.cols(); ++j) {
        for (std::size_t i = 0; i < top.rows(); ++i) {
            out(i, j) = top(i, j);
        }
        for (std::size_t i = 0; i < bottom.rows(); ++i) {
            out(top.rows() + i, j) = bottom(i, j);
        }
    }
    return out;
}

DenseMatrix hstack(const DenseMatrix& left, const DenseMatrix& right)
{
    if (left.rows() != right.rows()) {
        throw DimensionError("hstack: row counts differ");
    }
    DenseMatrix out(left.rows(), left.cols() + right.cols());
    for (std::size_t j = 0; j < left.cols(); ++j) {
        std::copy(left.col(j).begin(), left.col(j).end(), out.col(j).begin());
    }
    for (std::size_t j = 0; j < right.cols(); ++j) {
        std::copy(right.col(j).begin(), right.col(j).end(), out.col(left.cols() + j).begin());
    }
    return out;
}

}  // namespace lse
