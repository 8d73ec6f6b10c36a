#pragma once

// Desk-scale dense factorizations: pivoted Householder QR, Golub-Kahan SVD,
// pseudoinverse, null-space bases and LU. Nothing here is meant for the
// large sparse operands; the Krylov solvers never call into it on their
// iterative paths.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lse/dense_matrix.hpp"
#include "lse/vector.hpp"

namespace lse {

struct QrFactorization {
    DenseMatrix q;                  ///< m x k, orthonormal columns, k = min(m, n)
    DenseMatrix r;                  ///< k x n, upper triangular
    std::vector<std::size_t> perm;  ///< column j of M P is column perm[j] of M

    /// Number of diagonal entries of R above tol * |R(0,0)|.
    std::size_t rank(double rel_tol) const;
    DenseMatrix permutation_matrix() const;
};

/// M P = Q R. With pivoting, |diag(R)| is nonincreasing.
QrFactorization dense_qr(const DenseMatrix& m, bool pivoting);

struct SvdFactorization {
    DenseMatrix u;   ///< m x k
    Vector sigma;    ///< k values, descending
    DenseMatrix v;   ///< n x k
};

/// Thin SVD, k = min(m, n). Throws NumericalError if the QR sweeps stall.
SvdFactorization dense_svd(const DenseMatrix& m);
Vector singular_values(const DenseMatrix& m);

/// Singular values of an upper bidiagonal matrix with diagonal `diag` and
/// superdiagonal `super`. `super` has diag.size() - 1 entries for a square
/// matrix, or diag.size() entries for the k x (k+1) case whose last
/// superdiagonal entry sits in the extra column.
Vector bidiagonal_singular_values(std::span<const double> diag, std::span<const double> super);

/// max(rows, cols) * machine epsilon, the default relative rank tolerance.
double default_rank_tol(const DenseMatrix& m);

/// Singular values <= rank_tol * sigma_max are treated as zero.
std::size_t numerical_rank(const DenseMatrix& m, std::optional<double> rank_tol = std::nullopt);
DenseMatrix dense_pinv(const DenseMatrix& m, std::optional<double> rank_tol = std::nullopt);

/// Orthonormal basis of N(M); n x (n - rank).
DenseMatrix null_basis(const DenseMatrix& m, std::optional<double> rank_tol = std::nullopt);
/// Orthonormal basis of R(M); rows x rank.
DenseMatrix range_basis(const DenseMatrix& m, std::optional<double> rank_tol = std::nullopt);

/// y - Q Q^T y for a matrix with orthonormal columns Q.
Vector project_out(const DenseMatrix& q, std::span<const double> y);
/// Q Q^T y.
Vector project_onto(const DenseMatrix& q, std::span<const double> y);

/// Partial-pivoting LU of a square matrix.
class LuFactorization {
public:
    /// Throws NumericalError when a pivot falls below n * eps * max|M|.
    explicit LuFactorization(const DenseMatrix& m);
    Vector solve(std::span<const double> rhs) const;
    std::size_t size() const noexcept { return lu_.rows(); }

private:
    DenseMatrix lu_;
    std::vector<std::size_t> piv_;
};

/// Solves R x = y for the leading k x k upper-triangular block of R.
Vector back_substitute(const DenseMatrix& r, std::span<const double> y, std::size_t k);

}  // namespace lse
