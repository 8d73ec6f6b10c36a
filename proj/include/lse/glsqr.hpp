#pragma once

// Generalized LSQR for x1 = C_A^+ d, the minimum 2-norm solution of
//   min ||A x||  subject to  ||C x - d|| = min.
// Golub-Kahan bidiagonalization of x -> C x where the domain carries the
// G-inner product, G = A^T A + C^T C. The adjoint is u -> G^+ C^T u and is
// applied by an inner least squares solve; G itself is never formed.

#include <cstddef>
#include <span>
#include <vector>

#include "lse/lsqr.hpp"
#include "lse/report.hpp"
#include "lse/sparse_matrix.hpp"
#include "lse/vector.hpp"

namespace lse {

/// Stepwise gLSQR state machine.
class Glsqr {
public:
    /// Runs the first bidiagonalization step (beta_1, u_1, alpha_1, v_1).
    Glsqr(const SparseMatrix& a, const SparseMatrix& c, std::span<const double> d, const KrylovOptions& opts);

    bool terminated() const noexcept { return terminated_; }
    Termination termination() const noexcept { return termination_; }

    /// One bidiagonalization step followed by the rotation and solution update.
    void step();

    std::size_t iteration() const noexcept { return iteration_; }
    const Vector& x() const noexcept { return x_; }
    const Vector& u() const noexcept { return u_; }
    const Vector& v() const noexcept { return v_; }
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double beta1() const noexcept { return beta1_; }
    double phibar() const noexcept { return phibar_; }

    /// ||C x - d|| estimate.
    double residual_norm() const noexcept { return phibar_; }
    /// ||T^* r|| in the G-norm, T = C restricted to R(G).
    double normal_residual_norm() const noexcept { return normal_residual_; }
    /// Frobenius norm of the projected bidiagonal, a lower bound on ||T||.
    double operator_norm_estimate() const noexcept;

    /// s^T G s evaluated as ||A s||^2 + ||C s||^2.
    double g_norm(std::span<const double> s);

    std::size_t inner_iterations() const noexcept { return inner_iterations_; }
    std::size_t matvecs() const noexcept { return matvecs_; }
    std::size_t inner_nonconverged() const noexcept { return inner_nonconverged_; }

    /// Stored bases (requires keep_bases or reorthogonalize).
    const std::vector<Vector>& u_basis() const noexcept { return u_basis_; }
    const std::vector<Vector>& v_basis() const noexcept { return v_basis_; }

    /// True when the stopping rule for `tol` holds at the current iterate.
    bool stopping_rule_met(double tol);

private:
    Vector apply_adjoint(std::span<const double> u);
    void g_reorthogonalize(Vector& s);
    void store_gv();
    void finish(Termination t);

    const SparseMatrix& a_;
    const SparseMatrix& c_;
    KrylovOptions opts_;
    GramInnerSolver inner_;

    Vector x_, u_, v_, w_;
    Vector av_, cv_;  // A v and C v for the current v
    double beta1_ = 0.0;
    double alpha_ = 0.0;
    double beta_ = 0.0;
    double phibar_ = 0.0;
    double rhobar_ = 0.0;
    double anorm2_ = 0.0;
    double normal_residual_ = 0.0;
    double breakdown_tol_ = 0.0;
    double local_orth_tol_ = 0.0;
    std::size_t iteration_ = 0;
    bool terminated_ = false;
    Termination termination_ = Termination::max_iterations;

    std::size_t inner_iterations_ = 0;
    std::size_t matvecs_ = 0;
    std::size_t inner_nonconverged_ = 0;

    std::vector<Vector> u_basis_;
    std::vector<Vector> v_basis_;
    std::vector<Vector> gv_basis_;  // G v_i, for G-reorthogonalization
};

/// Iterates until the stopping rule holds, the bidiagonalization breaks down
/// or max_outer is reached. The report's x equals x1.
SolveReport glsqr_solve(const SparseMatrix& a, const SparseMatrix& c, std::span<const double> d,
                        const KrylovOptions& opts);

}  // namespace lse
