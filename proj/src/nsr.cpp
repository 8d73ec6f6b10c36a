#include "lse/nsr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "lse/dense_linalg.hpp"
#include "lse/error.hpp"
#include "lse/givens.hpp"

namespace lse {

NullProjector::NullProjector(const SparseMatrix& c, InnerSolverConfig cfg) : inner_(c, std::move(cfg)) {}

InnerSolve NullProjector::apply(std::span<const double> y) const
{
    const SparseMatrix& c = inner_.matrix();
    if (y.size() != c.cols())
        throw DimensionError("projector input has length " + std::to_string(y.size()) + ", expected " +
                             std::to_string(c.cols()));
    InnerSolve r = inner_.solve(spmv(c, y));
    r.products += 1;
    Vector out(y.begin(), y.end());
    axpy(-1.0, r.x, out);
    r.x = std::move(out);
    return r;
}

DenseMatrix BidiagFactor::dense() const
{
    const std::size_t kk = k();
    DenseMatrix m(kk + 1, kk);
    for (std::size_t i = 0; i < kk; ++i) {
        m(i, i) = gammas[i];
        m(i + 1, i) = deltas[i];
    }
    return m;
}

double estimate_op_norm(const BidiagFactor& b)
{
    const std::size_t k = b.k();
    if (k == 0)
        return b.gammas.empty() ? 0.0 : b.gammas.front();
    // B_k^T is k x (k+1) upper bidiagonal with the deltas on the superdiagonal.
    Vector sv = bidiagonal_singular_values(std::span<const double>(b.gammas.data(), k), b.deltas);
    return sv.empty() ? 0.0 : sv.front();
}

NsrGkb::NsrGkb(const SparseMatrix& a, const SparseMatrix& c, std::span<const double> b, const NsrGkbOptions& opts)
    : a_(a), proj_(c, opts.inner), opts_(opts)
{
    if (a.cols() != c.cols())
        throw DimensionError("A has " + std::to_string(a.cols()) + " columns but C has " + std::to_string(c.cols()));
    if (b.size() != a.rows())
        throw DimensionError("b has length " + std::to_string(b.size()) + ", expected " + std::to_string(a.rows()));

    factor_.beta1 = norm2(b);
    if (!std::isfinite(factor_.beta1))
        throw InputError("b contains non-finite values");
    q_.assign(a.cols(), 0.0);
    if (factor_.beta1 == 0.0) {
        finish(Termination::zero_rhs);
        return;
    }
    p_.assign(b.begin(), b.end());
    scale(1.0 / factor_.beta1, p_);
    if (opts_.keep_bases || opts_.reorthogonalize)
        p_basis_.push_back(p_);

    Vector s = project(spmv(a_, p_, true));
    matvecs_ += 1;
    const double gamma = norm2(s);
    // Rounding in the products and in the projector leaves scalars of a few
    // hundred n eps relative to the largest one when the space is exhausted.
    breakdown_rel_ = 100.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(a.rows(), a.cols()));
    breakdown_tol_ = breakdown_rel_ * a.frobenius_norm();
    // consecutive basis vectors stay orthogonal to well below this unless the
    // new one is dominated by noise
    local_orth_tol_ = opts.inner.mode == InnerMode::direct_dense ? 1e-6 : std::max(1e-6, std::sqrt(opts.inner.tol));
    if (gamma <= breakdown_tol_) {
        finish(Termination::immediate_breakdown);
        return;
    }
    scale_ = gamma;
    breakdown_tol_ = breakdown_rel_ * scale_;
    factor_.gammas.push_back(gamma);
    q_ = std::move(s);
    scale(1.0 / gamma, q_);
    if (opts_.keep_bases || opts_.reorthogonalize)
        q_basis_.push_back(q_);
}

void NsrGkb::finish(Termination t)
{
    terminated_ = true;
    termination_ = t;
}

Vector NsrGkb::project(std::span<const double> y)
{
    InnerSolve r = proj_.apply(y);
    inner_iterations_ += r.iterations;
    matvecs_ += r.products;
    if (!r.converged)
        ++inner_nonconverged_;
    return std::move(r.x);
}

void NsrGkb::step()
{
    if (terminated_)
        return;

    // delta_{i+1} p_{i+1} = A q_i - gamma_i p_i
    Vector r = spmv(a_, q_);
    matvecs_ += 1;
    axpy(-gamma(), p_, r);
    // measured before reorthogonalization, which would hide it
    const double p_overlap = dot(r, p_);
    if (opts_.reorthogonalize) {
        for (int pass = 0; pass < 2; ++pass)
            for (const Vector& pi : p_basis_)
                axpy(-dot(pi, r), pi, r);
    }
    const double delta = norm2(r);
    if (delta <= breakdown_tol_) {
        factor_.deltas.push_back(0.0);
        finish(Termination::exact_breakdown);
        return;
    }
    if (std::abs(p_overlap) > local_orth_tol_ * delta) {
        factor_.deltas.push_back(0.0);
        finish(Termination::noise_limited);
        return;
    }
    factor_.deltas.push_back(delta);
    scale_ = std::max(scale_, delta);
    p_ = std::move(r);
    scale(1.0 / delta, p_);
    if (opts_.keep_bases || opts_.reorthogonalize)
        p_basis_.push_back(p_);

    // gamma_{i+1} q_{i+1} = P_N A^T p_{i+1} - delta_{i+1} q_i. Subtracting before
    // projecting keeps the out-of-N(C) error of q_i from being amplified.
    Vector s = spmv(a_, p_, true);
    matvecs_ += 1;
    axpy(-delta, q_, s);
    s = project(s);
    const double q_overlap = dot(s, q_);
    if (opts_.reorthogonalize) {
        for (int pass = 0; pass < 2; ++pass)
            for (const Vector& qi : q_basis_)
                axpy(-dot(qi, s), qi, s);
    }
    if (opts_.reproject)
        s = project(s);
    const double gamma_next = norm2(s);
    if (gamma_next <= breakdown_tol_) {
        factor_.gammas.push_back(0.0);
        finish(Termination::exact_breakdown);
        return;
    }
    if (std::abs(q_overlap) > local_orth_tol_ * gamma_next) {
        factor_.gammas.push_back(0.0);
        finish(Termination::noise_limited);
        return;
    }
    factor_.gammas.push_back(gamma_next);
    scale_ = std::max(scale_, gamma_next);
    breakdown_tol_ = breakdown_rel_ * scale_;
    q_ = std::move(s);
    scale(1.0 / gamma_next, q_);
    if (opts_.keep_bases || opts_.reorthogonalize)
        q_basis_.push_back(q_);
}

NsrLsqr::NsrLsqr(const SparseMatrix& a, const SparseMatrix& c, std::span<const double> b, const NsrGkbOptions& opts)
    : gkb_(a, c, b, opts)
{
    x_.assign(a.cols(), 0.0);
    if (gkb_.terminated()) {
        terminated_ = true;
        termination_ = gkb_.termination();
        return;
    }
    z_ = gkb_.q();
    phibar_ = gkb_.factor().beta1;
    rhobar_ = gkb_.gamma();
    op_norm_ = rhobar_;
    normal_residual_ = phibar_ * rhobar_;
}

double NsrLsqr::stopping_quantity() const noexcept
{
    const double denom = op_norm_ * b_norm();
    return denom > 0.0 ? normal_residual_ / denom : 0.0;
}

void NsrLsqr::step()
{
    if (terminated_)
        return;
    ++iteration_;
    gkb_.step();
    const BidiagFactor& f = gkb_.factor();
    const std::size_t k = iteration_;
    const double delta_next = f.deltas[k - 1];
    const double gamma_next = f.gammas.size() > k ? f.gammas[k] : 0.0;

    // A rejected delta carries no information; closing the rotation on it
    // divides by whatever rounding is left in rhobar.
    if (gkb_.terminated() && gkb_.termination() == Termination::noise_limited && delta_next == 0.0) {
        terminated_ = true;
        termination_ = Termination::noise_limited;
        return;
    }

    double rho = 0.0;
    const GivensRotation g = GivensRotation::make(rhobar_, delta_next, rho);
    const double theta = g.s * gamma_next;
    rhobar_ = -g.c * gamma_next;
    const double phi = g.c * phibar_;
    phibar_ = g.s * phibar_;

    axpy(phi / rho, z_, x_);
    // gamma_{k+1} delta_{k+1} |e_k^T y_k| with e_k^T y_k = phi_k / rho_k
    normal_residual_ = gamma_next * delta_next * std::abs(phi / rho);

    if (k <= 32 || k % 16 == 0 || gkb_.terminated())
        op_norm_ = std::max(op_norm_, estimate_op_norm(f));

    if (gkb_.terminated()) {
        terminated_ = true;
        termination_ = gkb_.termination();
        normal_residual_ = 0.0;
        return;
    }
    // z_{k+1} = q_{k+1} - (theta_{k+1} / rho_k) z_k
    scale(-theta / rho, z_);
    axpy(1.0, gkb_.q(), z_);
}

SolveReport nsr_lsqr_solve(const SparseMatrix& a, const SparseMatrix& c, std::span<const double> b,
                           const KrylovOptions& opts)
{
    if (opts.tol < 0.0)
        throw InputError("tolerance must be nonnegative");
    const auto t0 = std::chrono::steady_clock::now();
    NsrGkbOptions gopts;
    gopts.inner = opts.inner;
    gopts.reorthogonalize = opts.reorthogonalize;
    gopts.reproject = opts.reproject;
    gopts.keep_bases = opts.keep_bases;
    NsrLsqr solver(a, c, b, gopts);
    const std::size_t max_outer =
        opts.max_outer ? opts.max_outer : std::max<std::size_t>(4 * std::min(a.rows(), a.cols()), 10);

    const double eps = std::numeric_limits<double>::epsilon();

    SolveReport rep;
    Termination term = Termination::max_iterations;
    if (solver.terminated()) {
        term = solver.termination();
    } else {
        while (solver.iteration() < max_outer) {
            solver.step();
            IterationRecord r;
            r.iter = solver.iteration();
            r.residual = solver.stopping_quantity();
            r.error_proxy = opts.reference ? relative_error(solver.x(), *opts.reference) : r.residual;
            r.inner_iters = solver.gkb().inner_iterations();
            r.cum_matvecs = solver.gkb().matvecs();
            rep.history.push_back(r);
            if (opts.observer)
                opts.observer(solver.iteration(), solver.x());
            if (solver.terminated()) {
                term = solver.termination();
                break;
            }
            // Below eps the recurrences only accumulate rounding, so tol=0 still stops here.
            if (solver.stopping_quantity() <= std::max(opts.tol, eps)) {
                term = Termination::converged;
                break;
            }
        }
    }

    rep.x = solver.x();
    rep.x1.assign(rep.x.size(), 0.0);
    rep.x2 = rep.x;
    rep.termination = term;
    rep.iterations = solver.iteration();
    rep.inner_iterations = solver.gkb().inner_iterations();
    rep.matvecs = solver.gkb().matvecs();
    rep.inner_nonconverged = solver.gkb().inner_nonconverged();
    rep.final_residual = solver.stopping_quantity();
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.components.push_back({"nsr-lsqr", term, rep.iterations, rep.inner_iterations, rep.matvecs,
                              rep.inner_nonconverged});
    return rep;
}

}  // namespace lse
