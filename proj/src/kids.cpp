#include "lse/kids.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <vector>

#include "lse/dense_linalg.hpp"
#include "lse/error.hpp"
#include "lse/glsqr.hpp"
#include "lse/nsr.hpp"

namespace lse {

namespace {

KrylovOptions krylov_options(const KidsOptions& opts)
{
    KrylovOptions k;
    k.tol = opts.tol;
    k.max_outer = opts.max_outer;
    k.inner = opts.inner;
    k.reorthogonalize = opts.reorthogonalize;
    k.reproject = opts.reproject;
    return k;
}

// Re-raises a sub-solver failure with the component named.
template <class F>
SolveReport attributed(const char* name, F&& f)
{
    try {
        return f();
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string(name) + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(name) + ": " + e.what());
    } catch (const DimensionError& e) {
        throw DimensionError(std::string(name) + ": " + e.what());
    } catch (const InputError& e) {
        throw InputError(std::string(name) + ": " + e.what());
    }
}

Termination combine(Termination a, Termination b)
{
    if (a == b)
        return a;
    if (a == Termination::max_iterations || b == Termination::max_iterations)
        return Termination::max_iterations;
    return Termination::converged;
}

// Keeps copies of the iterates when a true solution is available.
struct IterateLog {
    bool enabled = false;
    std::vector<Vector> iterates;

    IterateObserver observer()
    {
        if (!enabled)
            return {};
        return [this](std::size_t, std::span<const double> x) { iterates.emplace_back(x.begin(), x.end()); };
    }
    // Iterate after step k, holding the last one once the run ended.
    std::span<const double> at(std::size_t k, const Vector& final_x) const
    {
        if (k == 0 || iterates.empty())
            return k == 0 ? std::span<const double>() : std::span<const double>(final_x);
        return iterates[std::min(k, iterates.size()) - 1];
    }
};

const IterationRecord* record_at(const SolveReport& r, std::size_t k)
{
    if (r.history.empty() || k == 0)
        return nullptr;
    return &r.history[std::min(k, r.history.size()) - 1];
}

void finalize(SolveReport& rep, std::chrono::steady_clock::time_point t0)
{
    rep.x = add(rep.x1, rep.x2);
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SolveReport kids1_solve(const LseProblem& problem, const KidsOptions& opts)
{
    problem.validate();
    if (opts.x_true && opts.x_true->size() != problem.n())
        throw DimensionError("x_true has length " + std::to_string(opts.x_true->size()) + ", expected " +
                             std::to_string(problem.n()));
    const auto t0 = std::chrono::steady_clock::now();

    IterateLog log1, log2;
    log1.enabled = log2.enabled = opts.x_true.has_value();
    KrylovOptions k1 = krylov_options(opts);
    KrylovOptions k2 = krylov_options(opts);
    k1.observer = log1.observer();
    k2.observer = log2.observer();

    auto run1 = [&] { return attributed("gLSQR", [&] { return glsqr_solve(problem.A, problem.C, problem.d, k1); }); };
    auto run2 = [&] {
        return attributed("NSR-LSQR", [&] { return nsr_lsqr_solve(problem.A, problem.C, problem.b, k2); });
    };

    SolveReport r1, r2;
    if (opts.parallel) {
        auto f1 = std::async(std::launch::async, run1);
        r2 = run2();
        r1 = f1.get();
    } else {
        r1 = run1();
        r2 = run2();
    }

    SolveReport rep;
    rep.x1 = r1.x;
    rep.x2 = r2.x;
    const std::size_t kmax = std::max(r1.iterations, r2.iterations);
    const Vector zeros(problem.n(), 0.0);
    for (std::size_t k = 1; k <= kmax; ++k) {
        IterationRecord rec;
        rec.iter = k;
        const IterationRecord* h1 = record_at(r1, k);
        const IterationRecord* h2 = record_at(r2, k);
        rec.residual = std::max(h1 ? h1->residual : 0.0, h2 ? h2->residual : 0.0);
        rec.inner_iters = (h1 ? h1->inner_iters : r1.inner_iterations) + (h2 ? h2->inner_iters : r2.inner_iterations);
        rec.cum_matvecs = (h1 ? h1->cum_matvecs : r1.matvecs) + (h2 ? h2->cum_matvecs : r2.matvecs);
        if (opts.x_true) {
            auto x1 = log1.at(k, r1.x);
            auto x2 = log2.at(k, r2.x);
            Vector xk = add(x1.empty() ? std::span<const double>(zeros) : x1,
                            x2.empty() ? std::span<const double>(zeros) : x2);
            rec.error_proxy = relative_error(xk, *opts.x_true);
        } else {
            rec.error_proxy = rec.residual;
        }
        rep.history.push_back(rec);
    }

    rep.termination = combine(r1.termination, r2.termination);
    rep.iterations = kmax;
    rep.inner_iterations = r1.inner_iterations + r2.inner_iterations;
    rep.matvecs = r1.matvecs + r2.matvecs;
    rep.inner_nonconverged = r1.inner_nonconverged + r2.inner_nonconverged;
    rep.final_residual = std::max(r1.final_residual, r2.final_residual);
    rep.components = {r1.components.front(), r2.components.front()};
    finalize(rep, t0);
    return rep;
}

SolveReport kids2_solve(const LseProblem& problem, const KidsOptions& opts)
{
    problem.validate();
    if (opts.x_true && opts.x_true->size() != problem.n())
        throw DimensionError("x_true has length " + std::to_string(opts.x_true->size()) + ", expected " +
                             std::to_string(problem.n()));
    const auto t0 = std::chrono::steady_clock::now();

    const InnerSolverConfig ccfg = opts.constraint_solve.value_or(opts.inner);
    ccfg.validate();
    ComponentReport cc{"constraint-lsqr", Termination::converged, 0, 0, 0, 0};
    Vector x1;
    if (ccfg.mode == InnerMode::direct_dense) {
        x1 = matvec(dense_pinv(problem.C.to_dense()), problem.d);
        cc.termination = Termination::direct;
    } else {
        SparseOperator op(problem.C);
        LsqrResult r = lsqr_solve(op, problem.d, ccfg);
        if (!r.converged && ccfg.strict)
            throw ConvergenceError("constraint-lsqr: min ||C x - d|| did not reach tolerance in " +
                                   std::to_string(r.iterations) + " iterations");
        cc.termination = r.stop == LsqrStop::zero_rhs ? Termination::zero_rhs
                         : r.converged                ? Termination::converged
                                                      : Termination::max_iterations;
        cc.iterations = r.iterations;
        cc.matvecs = r.products;
        x1 = std::move(r.x);
    }

    Vector bt = spmv(problem.A, x1);
    for (std::size_t i = 0; i < bt.size(); ++i)
        bt[i] = problem.b[i] - bt[i];

    KrylovOptions k2 = krylov_options(opts);
    std::vector<double> errors;
    if (opts.x_true) {
        k2.observer = [&](std::size_t, std::span<const double> x2) {
            errors.push_back(relative_error(add(x1, x2), *opts.x_true));
        };
    }
    SolveReport r2 = attributed("NSR-LSQR", [&] { return nsr_lsqr_solve(problem.A, problem.C, bt, k2); });

    SolveReport rep;
    rep.x1 = std::move(x1);
    rep.x2 = r2.x;
    rep.history = r2.history;
    for (std::size_t i = 0; i < rep.history.size(); ++i) {
        IterationRecord& rec = rep.history[i];
        rec.cum_matvecs += cc.matvecs + 1;
        rec.inner_iters += cc.iterations;
        if (opts.x_true)
            rec.error_proxy = errors[i];
    }
    rep.termination = cc.termination == Termination::max_iterations ? Termination::max_iterations : r2.termination;
    rep.iterations = r2.iterations;
    rep.inner_iterations = r2.inner_iterations + cc.iterations;
    rep.matvecs = r2.matvecs + cc.matvecs + 1;
    rep.inner_nonconverged = r2.inner_nonconverged + (cc.termination == Termination::max_iterations ? 1 : 0);
    rep.final_residual = r2.final_residual;
    rep.components = {cc, r2.components.front()};
    finalize(rep, t0);
    return rep;
}

double OptimalityDiagnostics::scaled_constraint() const noexcept
{
    return constraint_scale > 0.0 ? constraint_residual / constraint_scale : constraint_residual;
}

double OptimalityDiagnostics::scaled_stationarity() const noexcept
{
    return stationarity_scale > 0.0 ? projected_stationarity / stationarity_scale : projected_stationarity;
}

double OptimalityDiagnostics::scaled_min_norm() const noexcept
{
    return x_norm > 0.0 ? min_norm_component / x_norm : min_norm_component;
}

double OptimalityDiagnostics::max_scaled() const noexcept
{
    return std::max({scaled_constraint(), scaled_stationarity(), scaled_min_norm()});
}

OptimalityDiagnostics check_optimality(const LseProblem& problem, std::span<const double> x,
                                       std::optional<double> rank_tol)
{
    problem.validate();
    if (x.size() != problem.n())
        throw DimensionError("x has length " + std::to_string(x.size()) + ", expected " +
                             std::to_string(problem.n()));
    OptimalityDiagnostics out;

    Vector cr = spmv(problem.C, x);
    for (std::size_t i = 0; i < cr.size(); ++i)
        cr[i] -= problem.d[i];
    out.constraint_residual = norm2(spmv(problem.C, cr, true));

    Vector ar = spmv(problem.A, x);
    for (std::size_t i = 0; i < ar.size(); ++i)
        ar[i] -= problem.b[i];
    const Vector g = spmv(problem.A, ar, true);
    const DenseMatrix cd = problem.C.to_dense();
    const DenseMatrix w = null_basis(cd, rank_tol);
    out.projected_stationarity = w.cols() ? norm2(project_onto(w, g)) : 0.0;

    const DenseMatrix ac = vstack(problem.A.to_dense(), cd);
    const DenseMatrix z = null_basis(ac, rank_tol);
    out.min_norm_component = z.cols() ? norm2(project_onto(z, x)) : 0.0;

    const double cn = problem.C.frobenius_norm();
    const double an = problem.A.frobenius_norm();
    out.x_norm = norm2(x);
    out.constraint_scale = cn * cn * out.x_norm + cn * norm2(problem.d);
    out.stationarity_scale = an * an * out.x_norm + an * norm2(problem.b);
    return out;
}

}  // namespace lse
