#pragma once

// Decomposed solvers for the LSE problem.
//   kids1: x = C_A^+ d + A_{N(C)}^+ b  (the two parts are independent)
//   kids2: x = C^+ d + A_{N(C)}^+ (b - A C^+ d)  (sequential)

#include <optional>
#include <span>

#include "lse/lsqr.hpp"
#include "lse/problem.hpp"
#include "lse/report.hpp"

namespace lse {

struct KidsOptions {
    double tol = 1e-10;
    /// 0 selects each sub-solver's default.
    std::size_t max_outer = 0;
    InnerSolverConfig inner;
    /// Settings for the min ||C x - d|| solve in kids2; defaults to `inner`.
    std::optional<InnerSolverConfig> constraint_solve;
    bool reorthogonalize = false;
    bool reproject = false;
    /// Run the two kids1 parts on separate threads.
    bool parallel = false;
    /// Known solution; when present the history records the true relative error.
    std::optional<Vector> x_true;
};

SolveReport kids1_solve(const LseProblem& problem, const KidsOptions& opts);
SolveReport kids2_solve(const LseProblem& problem, const KidsOptions& opts);

/// Optimality measures for a candidate x; all vanish at the minimum 2-norm solution.
struct OptimalityDiagnostics {
    double constraint_residual = 0.0;     ///< ||C^T (C x - d)||
    double projected_stationarity = 0.0;  ///< ||P_{N(C)} A^T (A x - b)||
    double min_norm_component = 0.0;      ///< ||P_{N(A) ∩ N(C)} x||
    /// Natural magnitudes of the three terms, used by scaled().
    double constraint_scale = 0.0;        ///< ||C||_F^2 ||x|| + ||C||_F ||d||
    double stationarity_scale = 0.0;      ///< ||A||_F^2 ||x|| + ||A||_F ||b||
    double x_norm = 0.0;

    /// The three measures divided by their scales (0/0 counts as 0).
    double scaled_constraint() const noexcept;
    double scaled_stationarity() const noexcept;
    double scaled_min_norm() const noexcept;
    double max_scaled() const noexcept;
};

/// Dense evaluation; intended for desk-scale problems.
OptimalityDiagnostics check_optimality(const LseProblem& problem, std::span<const double> x,
                                       std::optional<double> rank_tol = std::nullopt);

}  // namespace lse
