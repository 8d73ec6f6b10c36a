#include "lse/lsqr.hpp"

#include <algorithm>
#include <cmath>

#include "lse/dense_linalg.hpp"
#include "lse/error.hpp"
#include "lse/givens.hpp"

namespace lse {

void DenseOperator::apply(std::span<const double> x, std::span<double> y) const
{
    const Vector r = matvec(m_, x);
    std::copy(r.begin(), r.end(), y.begin());
}

void DenseOperator::apply_transpose(std::span<const double> x, std::span<double> y) const
{
    const Vector r = matvec_transpose(m_, x);
    std::copy(r.begin(), r.end(), y.begin());
}

StackedOperator::StackedOperator(const SparseMatrix& top, const SparseMatrix& bottom)
    : top_(top), bottom_(bottom)
{
    if (top.cols() != bottom.cols()) {
        throw DimensionError("StackedOperator: blocks have " + std::to_string(top.cols()) + " and " +
                             std::to_string(bottom.cols()) + " columns");
    }
}

void StackedOperator::apply(std::span<const double> x, std::span<double> y) const
{
    spmv_into(top_, x, y.first(top_.rows()), false);
    spmv_into(bottom_, x, y.subspan(top_.rows()), false);
}

void StackedOperator::apply_transpose(std::span<const double> x, std::span<double> y) const
{
    spmv_into(top_, x.first(top_.rows()), y, true);
    Vector tail(bottom_.cols());
    spmv_into(bottom_, x.subspan(top_.rows()), tail, true);
    axpy(1.0, tail, y);
}

void InnerSolverConfig::validate() const
{
    if (!(tol >= 0.0)) {
        throw InputError("inner solver tolerance must be nonnegative");
    }
    if (max_iters && *max_iters < 1) {
        throw InputError("inner solver max_iters must be at least 1");
    }
}

std::string to_string(LsqrStop stop)
{
    switch (stop) {
    case LsqrStop::zero_rhs: return "zero_rhs";
    case LsqrStop::residual_small: return "residual_small";
    case LsqrStop::normal_residual_small: return "normal_residual_small";
    case LsqrStop::machine_precision: return "machine_precision";
    case LsqrStop::max_iterations: return "max_iterations";
    }
    return "unknown";
}

LsqrResult lsqr_solve(const LinearOperator& m, std::span<const double> f, const InnerSolverConfig& cfg)
{
    cfg.validate();
    const std::size_t nr = m.rows();
    const std::size_t nc = m.cols();
    if (f.size() != nr) {
        throw DimensionError("lsqr_solve: right-hand side has length " + std::to_string(f.size()) +
                             ", operator has " + std::to_string(nr) + " rows");
    }
    const std::size_t max_iters = cfg.max_iters.value_or(std::max<std::size_t>(4 * std::min(nr, nc), 1));
    const double tol = cfg.tol;
    const std::size_t ppa = m.products_per_apply();

    LsqrResult out;
    out.x.assign(nc, 0.0);

    Vector u(f.begin(), f.end());
    double beta = norm2(u);
    const double bnorm = beta;
    if (beta == 0.0) {
        out.stop = LsqrStop::zero_rhs;
        out.converged = true;
        return out;
    }
    scale(1.0 / beta, u);
    Vector v(nc);
    m.apply_transpose(u, v);
    out.products += ppa;
    double alpha = norm2(v);
    if (alpha == 0.0) {
        // f is orthogonal to R(M): x = 0 is the minimum-norm solution.
        out.stop = LsqrStop::normal_residual_small;
        out.converged = true;
        out.residual_norm = bnorm;
        return out;
    }
    scale(1.0 / alpha, v);
    Vector w = v;
    Vector mv(nr);
    Vector mtu(nc);
    double phibar = beta;
    double rhobar = alpha;
    double anorm2 = 0.0;
    out.residual_history.push_back(bnorm);

    for (std::size_t itn = 1; itn <= max_iters; ++itn) {
        m.apply(v, mv);
        for (std::size_t i = 0; i < nr; ++i) {
            u[i] = mv[i] - alpha * u[i];
        }
        beta = norm2(u);
        anorm2 += alpha * alpha + beta * beta;
        if (beta > 0.0) {
            scale(1.0 / beta, u);
            m.apply_transpose(u, mtu);
            for (std::size_t j = 0; j < nc; ++j) {
                v[j] = mtu[j] - beta * v[j];
            }
            alpha = norm2(v);
            if (alpha > 0.0) {
                scale(1.0 / alpha, v);
            }
        } else {
            alpha = 0.0;
        }
        out.products += 2 * ppa;

        double rho = 0.0;
        const GivensRotation rot = GivensRotation::make(rhobar, beta, rho);
        const double theta = rot.s * alpha;
        rhobar = -rot.c * alpha;
        const double phi = rot.c * phibar;
        phibar = rot.s * phibar;

        axpy(phi / rho, w, out.x);
        for (std::size_t j = 0; j < nc; ++j) {
            w[j] = v[j] - (theta / rho) * w[j];
        }

        const double anorm = std::sqrt(anorm2);
        const double rnorm = phibar;
        const double arnorm = alpha * std::abs(rot.c) * phibar;
        const double xnorm = norm2(out.x);
        out.iterations = itn;
        out.residual_norm = rnorm;
        out.normal_residual_norm = arnorm;
        out.operator_norm_estimate = anorm;
        out.residual_history.push_back(rnorm);

        const double test1 = rnorm / bnorm;
        const double test2 = rnorm > 0.0 ? arnorm / (anorm * rnorm) : 0.0;
        const double t1 = test1 / (1.0 + anorm * xnorm / bnorm);
        const double rtol = tol + tol * anorm * xnorm / bnorm;

        if (test1 <= rtol) {
            out.stop = LsqrStop::residual_small;
            out.converged = true;
            break;
        }
        if (test2 <= tol) {
            out.stop = LsqrStop::normal_residual_small;
            out.converged = true;
            break;
        }
        if (1.0 + test2 <= 1.0 || 1.0 + t1 <= 1.0 || alpha == 0.0) {
            out.stop = LsqrStop::machine_precision;
            out.converged = true;
            break;
        }
    }
    if (!out.converged) {
        out.stop = LsqrStop::max_iterations;
    }
    return out;
}

namespace {

void check_inner(const InnerSolve& s, const InnerSolverConfig& cfg, const char* what)
{
    if (!s.converged && cfg.strict) {
        throw ConvergenceError(std::string(what) + ": inner LSQR reached its iteration limit");
    }
}

}  // namespace

GramInnerSolver::GramInnerSolver(const SparseMatrix& a, const SparseMatrix& c, InnerSolverConfig cfg)
    : a_(a), c_(c), cfg_(cfg), stacked_(c, a)
{
    cfg_.validate();
    if (cfg_.mode == InnerMode::direct_dense) {
        const DenseMatrix k = vstack(c_.to_dense(), a_.to_dense());
        direct_ = dense_pinv(k).columns(0, c_.rows());
    }
}

InnerSolve GramInnerSolver::solve(std::span<const double> u) const
{
    if (u.size() != c_.rows()) {
        throw DimensionError("solve_inner_G: u has length " + std::to_string(u.size()) + ", C has " +
                             std::to_string(c_.rows()) + " rows");
    }
    if (direct_) {
        return {matvec(*direct_, u), 0, 0, true};
    }
    Vector rhs(c_.rows() + a_.rows(), 0.0);
    std::copy(u.begin(), u.end(), rhs.begin());
    LsqrResult r = lsqr_solve(stacked_, rhs, cfg_);
    InnerSolve out{std::move(r.x), r.iterations, r.products, r.converged};
    check_inner(out, cfg_, "G^+ C^T u");
    return out;
}

ConstraintInnerSolver::ConstraintInnerSolver(const SparseMatrix& c, InnerSolverConfig cfg)
    : c_(c), cfg_(cfg), op_(c)
{
    cfg_.validate();
    if (cfg_.mode == InnerMode::direct_dense) {
        direct_ = dense_pinv(c_.to_dense());
    }
}

InnerSolve ConstraintInnerSolver::solve(std::span<const double> v) const
{
    if (v.size() != c_.rows()) {
        throw DimensionError("solve_inner_C: v has length " + std::to_string(v.size()) + ", C has " +
                             std::to_string(c_.rows()) + " rows");
    }
    if (direct_) {
        return {matvec(*direct_, v), 0, 0, true};
    }
    LsqrResult r = lsqr_solve(op_, v, cfg_);
    InnerSolve out{std::move(r.x), r.iterations, r.products, r.converged};
    check_inner(out, cfg_, "C^+ v");
    return out;
}

Vector solve_inner_G(const SparseMatrix& a, const SparseMatrix& c, std::span<const double> u,
                     const InnerSolverConfig& cfg)
{
    return GramInnerSolver(a, c, cfg).solve(u).x;
}

Vector solve_inner_C(const SparseMatrix& c, std::span<const double> v, const InnerSolverConfig& cfg)
{
    return ConstraintInnerSolver(c, cfg).solve(v).x;
}

}  // namespace lse
