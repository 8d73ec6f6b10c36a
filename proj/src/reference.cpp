#include "lse/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "lse/dense_linalg.hpp"
#include "lse/error.hpp"

namespace lse {

namespace {

void check_size(const LseProblem& problem, const ReferenceOptions& opts)
{
    problem.validate();
    const std::size_t total = problem.m() + problem.n() + problem.p();
    if (total > opts.size_cap)
        throw InputError("reference solvers densify the problem; m + n + p = " + std::to_string(total) +
                         " exceeds the cap of " + std::to_string(opts.size_cap));
}

double constraint_residual(const DenseMatrix& c, std::span<const double> d, const Vector& x)
{
    Vector r = matvec(c, x);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] -= d[i];
    return norm2(r);
}

void require_consistent(const DenseMatrix& c, std::span<const double> d, const Vector& cpd, double tol)
{
    const double res = constraint_residual(c, d, cpd);
    if (res > tol * norm2(d)) {
        char message[160];
        std::snprintf(message, sizeof message,
                      "constraints C x = d are inconsistent: ||C C^+ d - d|| = %.6g exceeds %.3g * ||d||", res, tol);
        throw InconsistentConstraintsError(message, res);
    }
}

// Basic solution of C x = d from a pivoted QR, then stripped of its N(C) part.
Vector constrained_start(const DenseMatrix& c, std::span<const double> d, const DenseMatrix& z,
                         std::optional<double> rank_tol)
{
    const std::size_t n = c.cols();
    Vector x0(n, 0.0);
    if (c.rows() == 0)
        return x0;
    QrFactorization qr = dense_qr(c, true);
    const std::size_t r = qr.rank(rank_tol.value_or(default_rank_tol(c)));
    if (r > 0) {
        Vector qtd = matvec_transpose(qr.q, d);
        Vector y = back_substitute(qr.r, qtd, r);
        for (std::size_t j = 0; j < r; ++j)
            x0[qr.perm[j]] = y[j];
    }
    if (z.cols())
        x0 = project_out(z, x0);
    return x0;
}

}  // namespace

Vector solve_nullspace(const LseProblem& problem, const ReferenceOptions& opts)
{
    check_size(problem, opts);
    const DenseMatrix a = problem.A.to_dense();
    const DenseMatrix c = problem.C.to_dense();
    const DenseMatrix z = null_basis(c, opts.rank_tol);

    Vector x0 = constrained_start(c, problem.d, z, opts.rank_tol);
    if (constraint_residual(c, problem.d, x0) > opts.consistency_tol * norm2(problem.d)) {
        // The basic solution misses the range component only when d is inconsistent.
        const Vector cpd = matvec(dense_pinv(c, opts.rank_tol), problem.d);
        if (opts.require_consistent)
            require_consistent(c, problem.d, cpd, opts.consistency_tol);
        x0 = cpd;
    }
    if (z.cols() == 0)
        return x0;

    Vector rhs = matvec(a, x0);
    for (std::size_t i = 0; i < rhs.size(); ++i)
        rhs[i] = problem.b[i] - rhs[i];
    const DenseMatrix az = a * z;
    const Vector y = matvec(dense_pinv(az, opts.rank_tol), rhs);
    Vector x = matvec(z, y);
    axpy(1.0, x0, x);
    return x;
}

Vector solve_direct_elim(const LseProblem& problem, const ReferenceOptions& opts)
{
    check_size(problem, opts);
    const std::size_t n = problem.n(), p = problem.p();
    const DenseMatrix a = problem.A.to_dense();
    const DenseMatrix c = problem.C.to_dense();
    // rank-deficient C: report inconsistent data first, it is the more useful message
    auto check_data = [&] {
        require_consistent(c, problem.d, matvec(dense_pinv(c, opts.rank_tol), problem.d), opts.consistency_tol);
    };
    if (p > n) {
        check_data();
        throw NumericalError("direct elimination needs full row rank C, but C has more rows (" + std::to_string(p) +
                             ") than columns; use solve_nullspace");
    }
    if (p == 0)
        return matvec(dense_pinv(a, opts.rank_tol), problem.b);

    QrFactorization qr = dense_qr(c, true);
    const std::size_t rank = qr.rank(opts.rank_tol.value_or(default_rank_tol(c)));
    if (rank < p) {
        check_data();
        throw NumericalError("direct elimination needs full row rank C, but rank(C) = " + std::to_string(rank) +
                             " < " + std::to_string(p) + "; use solve_nullspace");
    }

    // C P = Q [R1 R2], A P = [A1 A2]
    const std::size_t t = n - p;
    const Vector qtd = matvec_transpose(qr.q, problem.d);
    const Vector c1d = back_substitute(qr.r, qtd, p);  // C1^{-1} d
    DenseMatrix c1c2(p, t);                             // C1^{-1} C2 = R1^{-1} R2
    for (std::size_t j = 0; j < t; ++j) {
        Vector col(qr.r.col(p + j).begin(), qr.r.col(p + j).end());
        Vector s = back_substitute(qr.r, col, p);
        std::copy(s.begin(), s.end(), c1c2.col(j).begin());
    }
    DenseMatrix a1(problem.m(), p), a2(problem.m(), t);
    for (std::size_t j = 0; j < p; ++j)
        std::copy(a.col(qr.perm[j]).begin(), a.col(qr.perm[j]).end(), a1.col(j).begin());
    for (std::size_t j = 0; j < t; ++j)
        std::copy(a.col(qr.perm[p + j]).begin(), a.col(qr.perm[p + j]).end(), a2.col(j).begin());

    Vector y2;
    if (t > 0) {
        const DenseMatrix at = a2 - a1 * c1c2;
        Vector rhs = matvec(a1, c1d);
        for (std::size_t i = 0; i < rhs.size(); ++i)
            rhs[i] = problem.b[i] - rhs[i];
        y2 = matvec(dense_pinv(at, opts.rank_tol), rhs);
    }
    Vector y1 = c1d;
    if (t > 0)
        axpy(-1.0, matvec(c1c2, y2), y1);

    Vector x(n, 0.0);
    for (std::size_t j = 0; j < p; ++j)
        x[qr.perm[j]] = y1[j];
    for (std::size_t j = 0; j < t; ++j)
        x[qr.perm[p + j]] = y2[j];
    return x;
}

AugmentedSolution solve_augmented_system(const LseProblem& problem, const ReferenceOptions& opts)
{
    check_size(problem, opts);
    const std::size_t m = problem.m(), n = problem.n(), p = problem.p();
    const std::size_t size = n + m + p;
    DenseMatrix k(size, size);
    for (const Triplet& e : problem.A.triplets()) {
        k(e.col, n + e.row) = e.value;  // A^T block
        k(n + e.row, e.col) = e.value;  // A block
    }
    for (const Triplet& e : problem.C.triplets()) {
        k(e.col, n + m + e.row) = e.value;
        k(n + m + e.row, e.col) = e.value;
    }
    for (std::size_t i = 0; i < m; ++i)
        k(n + i, n + i) = 1.0;

    Vector rhs(size, 0.0);
    std::copy(problem.b.begin(), problem.b.end(), rhs.begin() + static_cast<std::ptrdiff_t>(n));
    std::copy(problem.d.begin(), problem.d.end(), rhs.begin() + static_cast<std::ptrdiff_t>(n + m));

    Vector sol;
    try {
        sol = LuFactorization(k).solve(rhs);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("augmented system is singular (rank-deficient C or [A; C]): ") + e.what());
    }
    AugmentedSolution out;
    out.x.assign(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(n));
    out.r.assign(sol.begin() + static_cast<std::ptrdiff_t>(n), sol.begin() + static_cast<std::ptrdiff_t>(n + m));
    out.lambda.assign(sol.begin() + static_cast<std::ptrdiff_t>(n + m), sol.end());
    return out;
}

Vector solve_augmented(const LseProblem& problem, const ReferenceOptions& opts)
{
    return solve_augmented_system(problem, opts).x;
}

DenseMatrix weighted_pinv(const DenseMatrix& k, const DenseMatrix& l, std::optional<double> rank_tol)
{
    if (k.cols() != l.cols())
        throw DimensionError("K and L must have the same number of columns");
    const DenseMatrix kp = dense_pinv(k, rank_tol);
    const DenseMatrix z = null_basis(k, rank_tol);
    if (z.cols() == 0)
        return kp;
    // L P_{N(K)} = (L Z) Z^T
    const DenseMatrix lp = (l * z) * z.transpose();
    const DenseMatrix corr = dense_pinv(lp, rank_tol) * l;
    return kp - corr * kp;
}

Vector weighted_pinv_apply(const DenseMatrix& k, const DenseMatrix& l, std::span<const double> g,
                           std::optional<double> rank_tol)
{
    if (g.size() != k.rows())
        throw DimensionError("g has length " + std::to_string(g.size()) + ", expected " + std::to_string(k.rows()));
    Vector x = matvec(dense_pinv(k, rank_tol), g);
    const DenseMatrix z = null_basis(k, rank_tol);
    if (z.cols() == 0)
        return x;
    const DenseMatrix lp = (l * z) * z.transpose();
    axpy(-1.0, matvec(dense_pinv(lp, rank_tol), matvec(l, x)), x);
    return x;
}

DenseMatrix restricted_pinv(const DenseMatrix& a, const DenseMatrix& c, std::optional<double> rank_tol)
{
    if (a.cols() != c.cols())
        throw DimensionError("A and C must have the same number of columns");
    const DenseMatrix w = null_basis(c, rank_tol);
    if (w.cols() == 0)
        return DenseMatrix(a.cols(), a.rows());
    return w * dense_pinv(a * w, rank_tol);
}

Vector restricted_pinv_apply(const DenseMatrix& a, const DenseMatrix& c, std::span<const double> b,
                             std::optional<double> rank_tol)
{
    if (b.size() != a.rows())
        throw DimensionError("b has length " + std::to_string(b.size()) + ", expected " + std::to_string(a.rows()));
    const DenseMatrix w = null_basis(c, rank_tol);
    if (w.cols() == 0)
        return Vector(a.cols(), 0.0);
    return matvec(w, matvec(dense_pinv(a * w, rank_tol), b));
}

Vector lse_oracle(const LseProblem& problem, std::optional<double> rank_tol)
{
    problem.validate();
    const DenseMatrix a = problem.A.to_dense();
    const DenseMatrix c = problem.C.to_dense();
    Vector x = weighted_pinv_apply(c, a, problem.d, rank_tol);
    axpy(1.0, restricted_pinv_apply(a, c, problem.b, rank_tol), x);
    return x;
}

}  // namespace lse
