#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lse/dense_matrix.hpp"
#include "lse/sparse_matrix.hpp"
#include "lse/vector.hpp"

namespace lse {

/// Abstract real operator M with products y = M x and y = M^T x.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;
    virtual std::size_t rows() const = 0;
    virtual std::size_t cols() const = 0;
    virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
    virtual void apply_transpose(std::span<const double> x, std::span<double> y) const = 0;
    /// Sparse matrix products performed by one apply (for cost accounting).
    virtual std::size_t products_per_apply() const { return 1; }
};

class SparseOperator final : public LinearOperator {
public:
    explicit SparseOperator(const SparseMatrix& m) : m_(m) {}
    std::size_t rows() const override { return m_.rows(); }
    std::size_t cols() const override { return m_.cols(); }
    void apply(std::span<const double> x, std::span<double> y) const override { spmv_into(m_, x, y, false); }
    void apply_transpose(std::span<const double> x, std::span<double> y) const override
    {
        spmv_into(m_, x, y, true);
    }

private:
    const SparseMatrix& m_;
};

class DenseOperator final : public LinearOperator {
public:
    explicit DenseOperator(const DenseMatrix& m) : m_(m) {}
    std::size_t rows() const override { return m_.rows(); }
    std::size_t cols() const override { return m_.cols(); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    void apply_transpose(std::span<const double> x, std::span<double> y) const override;
    std::size_t products_per_apply() const override { return 0; }

private:
    const DenseMatrix& m_;
};

/// [top; bottom] applied blockwise, never assembled.
class StackedOperator final : public LinearOperator {
public:
    /// Throws DimensionError when the column counts differ.
    StackedOperator(const SparseMatrix& top, const SparseMatrix& bottom);
    std::size_t rows() const override { return top_.rows() + bottom_.rows(); }
    std::size_t cols() const override { return top_.cols(); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    void apply_transpose(std::span<const double> x, std::span<double> y) const override;
    std::size_t products_per_apply() const override { return 2; }

private:
    const SparseMatrix& top_;
    const SparseMatrix& bottom_;
};

enum class InnerMode { iterative, direct_dense };

/// Settings for an auxiliary least squares solve.
struct InnerSolverConfig {
    double tol = 1e-12;
    /// Unset means 4 * min(rows, cols) of the operator being solved.
    std::optional<std::size_t> max_iters;
    InnerMode mode = InnerMode::iterative;
    /// Throw ConvergenceError instead of recording a non-converged inner solve.
    bool strict = false;

    void validate() const;
};

enum class LsqrStop {
    zero_rhs,
    residual_small,         ///< ||r|| <= tol (||f|| + ||M|| ||x||)
    normal_residual_small,  ///< ||M^T r|| <= tol ||M|| ||r||
    machine_precision,
    max_iterations,
};

std::string to_string(LsqrStop stop);

struct LsqrResult {
    Vector x;
    std::size_t iterations = 0;
    std::size_t products = 0;  ///< sparse matrix products performed
    LsqrStop stop = LsqrStop::max_iterations;
    bool converged = false;
    double residual_norm = 0.0;          ///< ||f - M x|| estimate
    double normal_residual_norm = 0.0;   ///< ||M^T (f - M x)|| estimate
    double operator_norm_estimate = 0.0; ///< Frobenius norm of the projected bidiagonal
    std::vector<double> residual_history;
};

/// Minimum 2-norm least squares solution of min ||M x - f|| by LSQR.
LsqrResult lsqr_solve(const LinearOperator& m, std::span<const double> f, const InnerSolverConfig& cfg);

/// Result of one auxiliary solve.
struct InnerSolve {
    Vector x;
    std::size_t iterations = 0;
    std::size_t products = 0;
    bool converged = true;
};

/// Applies G^+ C^T to p-vectors, G = A^T A + C^T C, through the minimum-norm
/// solution of min || [C; A] x - [u; 0] ||. In direct mode the dense
/// pseudoinverse is computed at construction and reused for every call.
class GramInnerSolver {
public:
    GramInnerSolver(const SparseMatrix& a, const SparseMatrix& c, InnerSolverConfig cfg);
    InnerSolve solve(std::span<const double> u) const;
    const InnerSolverConfig& config() const noexcept { return cfg_; }

private:
    const SparseMatrix& a_;
    const SparseMatrix& c_;
    InnerSolverConfig cfg_;
    StackedOperator stacked_;
    std::optional<DenseMatrix> direct_;  // n x p block of [C; A]^+
};

/// Applies C^+ to p-vectors.
class ConstraintInnerSolver {
public:
    ConstraintInnerSolver(const SparseMatrix& c, InnerSolverConfig cfg);
    InnerSolve solve(std::span<const double> v) const;
    const SparseMatrix& matrix() const noexcept { return c_; }
    const InnerSolverConfig& config() const noexcept { return cfg_; }

private:
    const SparseMatrix& c_;
    InnerSolverConfig cfg_;
    SparseOperator op_;
    std::optional<DenseMatrix> direct_;  // C^+
};

/// G^+ C^T u with G = A^T A + C^T C.
Vector solve_inner_G(const SparseMatrix& a, const SparseMatrix& c, std::span<const double> u,
                     const InnerSolverConfig& cfg);
/// C^+ v.
Vector solve_inner_C(const SparseMatrix& c, std::span<const double> v, const InnerSolverConfig& cfg);

}  // namespace lse
