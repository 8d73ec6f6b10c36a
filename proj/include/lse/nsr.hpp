#pragma once

// Golub-Kahan bidiagonalization restricted to N(C) and the LSQR-type solver
// built on it, computing x2 = A_{N(C)}^+ b: the minimum 2-norm minimizer of
// ||A x - b|| over x in N(C). Only products with A, A^T, C, C^T are used;
// the projector onto N(C) applies C^+ through an inner solve.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lse/dense_matrix.hpp"
#include "lse/lsqr.hpp"
#include "lse/report.hpp"
#include "lse/sparse_matrix.hpp"
#include "lse/vector.hpp"

namespace lse {

/// P_{N(C)} y = y - C^+ (C y). Keeps a reference to C.
class NullProjector {
public:
    NullProjector(const SparseMatrix& c, InnerSolverConfig cfg);
    /// Projected vector in x; counters describe the inner work (the C y product included).
    InnerSolve apply(std::span<const double> y) const;
    Vector operator()(std::span<const double> y) const { return apply(y).x; }
    const SparseMatrix& matrix() const noexcept { return inner_.matrix(); }

private:
    ConstraintInnerSolver inner_;
};

/// Lower bidiagonal B_k, (k+1) x k: gammas on the diagonal, deltas (delta_2 ..
/// delta_{k+1}) below it. beta1 = ||b|| is the leading delta_1. After k steps
/// the process also holds gamma_{k+1}, which B_k does not use.
struct BidiagFactor {
    double beta1 = 0.0;
    std::vector<double> gammas;
    std::vector<double> deltas;

    std::size_t k() const noexcept { return deltas.size(); }
    DenseMatrix dense() const;
};

/// sigma_max(B_k). Nondecreasing in k and bounded by sigma_max(A W) for an
/// orthonormal basis W of N(C).
double estimate_op_norm(const BidiagFactor& b);

/// Knobs for the restricted bidiagonalization.
struct NsrGkbOptions {
    InnerSolverConfig inner;
    bool reorthogonalize = false;
    /// Apply the projector once more to each new q.
    bool reproject = false;
    bool keep_bases = false;
};

class NsrGkb {
public:
    /// Computes delta_1, p_1, gamma_1, q_1.
    NsrGkb(const SparseMatrix& a, const SparseMatrix& c, std::span<const double> b, const NsrGkbOptions& opts);

    bool terminated() const noexcept { return terminated_; }
    Termination termination() const noexcept { return termination_; }

    /// Computes delta_{i+1}, p_{i+1}, gamma_{i+1}, q_{i+1}. On breakdown the
    /// vanishing scalar is recorded as 0 and the process terminates.
    void step();

    std::size_t steps() const noexcept { return factor_.k(); }
    const BidiagFactor& factor() const noexcept { return factor_; }
    const Vector& p() const noexcept { return p_; }
    const Vector& q() const noexcept { return q_; }
    double gamma() const noexcept { return factor_.gammas.empty() ? 0.0 : factor_.gammas.back(); }
    double delta() const noexcept { return factor_.deltas.empty() ? factor_.beta1 : factor_.deltas.back(); }
    double breakdown_tol() const noexcept { return breakdown_tol_; }

    const std::vector<Vector>& p_basis() const noexcept { return p_basis_; }
    const std::vector<Vector>& q_basis() const noexcept { return q_basis_; }

    std::size_t inner_iterations() const noexcept { return inner_iterations_; }
    std::size_t matvecs() const noexcept { return matvecs_; }
    std::size_t inner_nonconverged() const noexcept { return inner_nonconverged_; }

private:
    Vector project(std::span<const double> y);
    void finish(Termination t);

    const SparseMatrix& a_;
    NullProjector proj_;
    NsrGkbOptions opts_;
    BidiagFactor factor_;
    Vector p_, q_;
    double breakdown_rel_ = 0.0;
    double breakdown_tol_ = 0.0;
    double local_orth_tol_ = 0.0;
    double scale_ = 0.0;
    bool terminated_ = false;
    Termination termination_ = Termination::max_iterations;
    std::size_t inner_iterations_ = 0;
    std::size_t matvecs_ = 0;
    std::size_t inner_nonconverged_ = 0;
    std::vector<Vector> p_basis_;
    std::vector<Vector> q_basis_;
};

/// Stepwise solver; x_k = Q_k y_k with y_k from the Givens-reduced subproblem.
class NsrLsqr {
public:
    NsrLsqr(const SparseMatrix& a, const SparseMatrix& c, std::span<const double> b, const NsrGkbOptions& opts);

    bool terminated() const noexcept { return terminated_; }
    Termination termination() const noexcept { return termination_; }
    void step();

    std::size_t iteration() const noexcept { return iteration_; }
    const Vector& x() const noexcept { return x_; }
    const NsrGkb& gkb() const noexcept { return gkb_; }
    double b_norm() const noexcept { return gkb_.factor().beta1; }

    /// ||P_{N(C)} A^T (b - A x_k)|| from the recurrence scalars.
    double normal_residual_norm() const noexcept { return normal_residual_; }
    /// ||b - A x_k|| from the recurrence scalars.
    double residual_norm() const noexcept { return phibar_; }
    /// sigma_max(B_k), refreshed on a geometric schedule; never overestimates.
    double op_norm_estimate() const noexcept { return op_norm_; }
    /// normal_residual_norm / (op_norm_estimate * ||b||).
    double stopping_quantity() const noexcept;

private:
    NsrGkb gkb_;
    Vector x_, z_;
    double phibar_ = 0.0;
    double rhobar_ = 0.0;
    double normal_residual_ = 0.0;
    double op_norm_ = 0.0;
    std::size_t iteration_ = 0;
    bool terminated_ = false;
    Termination termination_ = Termination::max_iterations;
};

/// Runs NsrLsqr until the normalized projected normal residual is at most
/// opts.tol, the process breaks down (exact solution) or max_outer is hit.
SolveReport nsr_lsqr_solve(const SparseMatrix& a, const SparseMatrix& c, std::span<const double> b,
                           const KrylovOptions& opts);

}  // namespace lse
