#pragma once

// Dense factorization-based LSE solvers and pseudoinverse oracles for
// desk-scale cross-checks. All inputs are densified.

#include <cstddef>
#include <optional>
#include <span>

#include "lse/dense_matrix.hpp"
#include "lse/problem.hpp"
#include "lse/vector.hpp"

namespace lse {

struct ReferenceOptions {
    /// Largest m + n + p accepted before densifying.
    std::size_t size_cap = 5000;
    std::optional<double> rank_tol;
    /// ||C C^+ d - d|| <= consistency_tol * ||d|| is required for Cx = d.
    double consistency_tol = 1e-8;
    /// When false, the null-space method uses x0 = C^+ d for inconsistent d
    /// (the least squares constraint of the generalized problem).
    bool require_consistent = true;
};

/// x = x0 + Z y with Z an orthonormal basis of N(C) and y the minimum-norm
/// minimizer of ||A Z y - (b - A x0)||. The result has no N(A) ∩ N(C) component.
Vector solve_nullspace(const LseProblem& problem, const ReferenceOptions& opts = {});

/// Eliminates p variables through a pivoted QR of C. Requires full row rank C.
Vector solve_direct_elim(const LseProblem& problem, const ReferenceOptions& opts = {});

struct AugmentedSolution {
    Vector x;
    Vector r;       ///< b - A x
    Vector lambda;  ///< multipliers with A^T r + C^T lambda = 0
};

/// LU solve of [0 A^T C^T; A I 0; C 0 0] (x; r; lambda) = (0; b; d).
AugmentedSolution solve_augmented_system(const LseProblem& problem, const ReferenceOptions& opts = {});
Vector solve_augmented(const LseProblem& problem, const ReferenceOptions& opts = {});

/// K_L^+ = (I - (L P_{N(K)})^+ L) K^+.
DenseMatrix weighted_pinv(const DenseMatrix& k, const DenseMatrix& l, std::optional<double> rank_tol = std::nullopt);
/// K_L^+ g, the minimum 2-norm solution of min ||L x|| over the minimizers of ||K x - g||.
Vector weighted_pinv_apply(const DenseMatrix& k, const DenseMatrix& l, std::span<const double> g,
                           std::optional<double> rank_tol = std::nullopt);

/// A_{N(C)}^+ = W (A W)^+ with W an orthonormal basis of N(C).
DenseMatrix restricted_pinv(const DenseMatrix& a, const DenseMatrix& c, std::optional<double> rank_tol = std::nullopt);
Vector restricted_pinv_apply(const DenseMatrix& a, const DenseMatrix& c, std::span<const double> b,
                             std::optional<double> rank_tol = std::nullopt);

/// C_A^+ d + A_{N(C)}^+ b evaluated densely.
Vector lse_oracle(const LseProblem& problem, std::optional<double> rank_tol = std::nullopt);

}  // namespace lse
