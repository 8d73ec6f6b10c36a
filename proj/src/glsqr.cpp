#include "lse/glsqr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "lse/error.hpp"
#include "lse/givens.hpp"

namespace lse {

std::string to_string(Termination t)
{
    switch (t) {
    case Termination::converged:
        return "converged";
    case Termination::exact_breakdown:
        return "terminated exactly";
    case Termination::immediate_breakdown:
        return "immediate breakdown";
    case Termination::zero_rhs:
        return "zero right-hand side";
    case Termination::max_iterations:
        return "maximum iterations reached";
    case Termination::direct:
        return "direct solve";
    case Termination::noise_limited:
        return "stopped at noise level";
    }
    return "unknown";
}

bool is_success(Termination t)
{
    return t != Termination::max_iterations;
}

Glsqr::Glsqr(const SparseMatrix& a, const SparseMatrix& c, std::span<const double> d, const KrylovOptions& opts)
    : a_(a), c_(c), opts_(opts), inner_(a, c, opts.inner)
{
    if (a.cols() != c.cols())
        throw DimensionError("A has " + std::to_string(a.cols()) + " columns but C has " + std::to_string(c.cols()));
    if (d.size() != c.rows())
        throw DimensionError("d has length " + std::to_string(d.size()) + ", expected " + std::to_string(c.rows()));
    if (opts.tol < 0.0)
        throw InputError("tolerance must be nonnegative");

    const std::size_t n = a.cols();
    x_.assign(n, 0.0);
    beta1_ = norm2(d);
    if (beta1_ == 0.0 || !std::isfinite(beta1_)) {
        if (!std::isfinite(beta1_))
            throw InputError("d contains non-finite values");
        finish(Termination::zero_rhs);
        return;
    }
    u_.assign(d.begin(), d.end());
    scale(1.0 / beta1_, u_);
    if (opts_.keep_bases || opts_.reorthogonalize)
        u_basis_.push_back(u_);

    Vector s = apply_adjoint(u_);
    Vector as = spmv(a_, s), cs = spmv(c_, s);
    matvecs_ += 2;
    alpha_ = std::hypot(norm2(as), norm2(cs));
    // In the G-geometry ||T|| <= 1, so the bidiagonal entries have unit scale.
    breakdown_tol_ = 1e-14;
    // Healthy steps keep consecutive v's G-orthogonal to about 100 times the
    // inner tolerance; a noise-dominated v loses that by orders of magnitude.
    local_orth_tol_ = opts.inner.mode == InnerMode::direct_dense ? 1e-6 : std::max(1e-6, std::sqrt(opts.inner.tol));
    if (alpha_ <= breakdown_tol_) {
        finish(Termination::immediate_breakdown);
        return;
    }
    v_ = std::move(s);
    scale(1.0 / alpha_, v_);
    av_ = std::move(as);
    cv_ = std::move(cs);
    scale(1.0 / alpha_, av_);
    scale(1.0 / alpha_, cv_);
    if (opts_.keep_bases || opts_.reorthogonalize)
        v_basis_.push_back(v_);
    if (opts_.reorthogonalize)
        store_gv();
    w_ = v_;
    phibar_ = beta1_;
    rhobar_ = alpha_;
    anorm2_ = alpha_ * alpha_;
    normal_residual_ = phibar_ * alpha_;
}

void Glsqr::finish(Termination t)
{
    terminated_ = true;
    termination_ = t;
}

Vector Glsqr::apply_adjoint(std::span<const double> u)
{
    InnerSolve r = inner_.solve(u);
    inner_iterations_ += r.iterations;
    matvecs_ += r.products;
    if (!r.converged)
        ++inner_nonconverged_;
    return std::move(r.x);
}

void Glsqr::store_gv()
{
    Vector gv = spmv(a_, av_, true);
    axpy(1.0, spmv(c_, cv_, true), gv);
    matvecs_ += 2;
    gv_basis_.push_back(std::move(gv));
}

double Glsqr::g_norm(std::span<const double> s)
{
    const double as = norm2(spmv(a_, s));
    const double cs = norm2(spmv(c_, s));
    matvecs_ += 2;
    return std::hypot(as, cs);
}

double Glsqr::operator_norm_estimate() const noexcept
{
    return std::sqrt(anorm2_);
}

void Glsqr::g_reorthogonalize(Vector& s)
{
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < v_basis_.size(); ++i)
            axpy(-dot(gv_basis_[i], s), v_basis_[i], s);
    }
}

void Glsqr::step()
{
    if (terminated_)
        return;
    ++iteration_;

    // beta_{i+1} u_{i+1} = C v_i - alpha_i u_i
    Vector r = spmv(c_, v_);
    matvecs_ += 1;
    axpy(-alpha_, u_, r);
    if (opts_.reorthogonalize) {
        for (int pass = 0; pass < 2; ++pass)
            for (const Vector& ui : u_basis_)
                axpy(-dot(ui, r), ui, r);
    }
    beta_ = norm2(r);
    const bool beta_zero = beta_ <= breakdown_tol_;

    double alpha_next = 0.0;
    bool noise_limited = false;
    Vector v_next, as_next, cs_next;
    if (!beta_zero) {
        u_ = std::move(r);
        scale(1.0 / beta_, u_);
        if (opts_.keep_bases || opts_.reorthogonalize)
            u_basis_.push_back(u_);
        // alpha_{i+1} v_{i+1} = G^+ C^T u_{i+1} - beta_{i+1} v_i
        Vector s = apply_adjoint(u_);
        axpy(-beta_, v_, s);
        // <s, v_i>_G against the newest v; reorthogonalization would hide it
        double overlap = 0.0;
        if (opts_.reorthogonalize) {
            overlap = dot(gv_basis_.back(), s);
            g_reorthogonalize(s);
        }
        as_next = spmv(a_, s);
        cs_next = spmv(c_, s);
        matvecs_ += 2;
        alpha_next = std::hypot(norm2(as_next), norm2(cs_next));
        if (!opts_.reorthogonalize)
            overlap = dot(as_next, av_) + dot(cs_next, cv_);
        if (alpha_next > breakdown_tol_) {
            if (std::abs(overlap) > local_orth_tol_ * alpha_next) {
                alpha_next = 0.0;
                noise_limited = true;
            } else {
                v_next = std::move(s);
                scale(1.0 / alpha_next, v_next);
            }
        } else {
            alpha_next = 0.0;
        }
    } else {
        beta_ = 0.0;
    }

    // Rotation eliminating beta_{i+1} from the bidiagonal.
    double rho = 0.0;
    const GivensRotation g = GivensRotation::make(rhobar_, beta_, rho);
    const double theta = g.s * alpha_next;
    rhobar_ = -g.c * alpha_next;
    const double phi = g.c * phibar_;
    phibar_ = g.s * phibar_;

    axpy(phi / rho, w_, x_);
    anorm2_ += beta_ * beta_ + alpha_next * alpha_next;
    normal_residual_ = phibar_ * alpha_next * std::abs(g.c);

    if (beta_zero || alpha_next == 0.0) {
        if (beta_zero)
            phibar_ = 0.0;
        normal_residual_ = 0.0;
        finish(noise_limited ? Termination::noise_limited : Termination::exact_breakdown);
        return;
    }

    // w_{i+1} = v_{i+1} - (theta_{i+1} / rho_i) w_i
    scale(-theta / rho, w_);
    axpy(1.0, v_next, w_);
    v_ = std::move(v_next);
    alpha_ = alpha_next;
    av_ = std::move(as_next);
    cv_ = std::move(cs_next);
    scale(1.0 / alpha_, av_);
    scale(1.0 / alpha_, cv_);
    if (opts_.keep_bases || opts_.reorthogonalize)
        v_basis_.push_back(v_);
    if (opts_.reorthogonalize)
        store_gv();
}

bool Glsqr::stopping_rule_met(double tol)
{
    if (terminated_)
        return termination_ != Termination::max_iterations;
    const double tnorm = operator_norm_estimate();
    if (phibar_ <= tol * beta1_)
        return true;
    return normal_residual_ <= tol * tnorm * phibar_;
}

namespace {

// The smaller of the two ratios tested by stopping_rule_met.
double normalized_residual(const Glsqr& s)
{
    const double denom = s.operator_norm_estimate() * s.phibar();
    if (denom == 0.0 || s.beta1() == 0.0)
        return 0.0;
    return std::min(s.phibar() / s.beta1(), s.normal_residual_norm() / denom);
}

}  // namespace

SolveReport glsqr_solve(const SparseMatrix& a, const SparseMatrix& c, std::span<const double> d,
                        const KrylovOptions& opts)
{
    const auto t0 = std::chrono::steady_clock::now();
    Glsqr solver(a, c, d, opts);
    const std::size_t max_outer = opts.max_outer ? opts.max_outer : std::max<std::size_t>(2 * c.rows(), 10);

    SolveReport rep;
    auto record = [&]() {
        IterationRecord r;
        r.iter = solver.iteration();
        r.residual = normalized_residual(solver);
        r.error_proxy = opts.reference ? relative_error(solver.x(), *opts.reference) : r.residual;
        r.inner_iters = solver.inner_iterations();
        r.cum_matvecs = solver.matvecs();
        rep.history.push_back(r);
        if (opts.observer)
            opts.observer(solver.iteration(), solver.x());
    };

    Termination term = Termination::max_iterations;
    if (solver.terminated()) {
        term = solver.termination();
    } else {
        while (solver.iteration() < max_outer) {
            solver.step();
            record();
            if (solver.terminated()) {
                term = solver.termination();
                break;
            }
            if (solver.stopping_rule_met(std::max(opts.tol, std::numeric_limits<double>::epsilon()))) {
                term = Termination::converged;
                break;
            }
        }
    }

    rep.x = solver.x();
    rep.x1 = rep.x;
    rep.x2.assign(rep.x.size(), 0.0);
    rep.termination = term;
    rep.iterations = solver.iteration();
    rep.inner_iterations = solver.inner_iterations();
    rep.matvecs = solver.matvecs();
    rep.inner_nonconverged = solver.inner_nonconverged();
    rep.final_residual = normalized_residual(solver);
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.components.push_back({"glsqr", term, rep.iterations, rep.inner_iterations, rep.matvecs,
                              rep.inner_nonconverged});
    return rep;
}

}  // namespace lse
