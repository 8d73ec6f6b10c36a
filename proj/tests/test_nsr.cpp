#include <cmath>
#include <random>

#include "doctest.h"
#include "lse/dense_linalg.hpp"
#include "lse/error.hpp"
#include "lse/nsr.hpp"
#include "lse/reference.hpp"
#include "support.hpp"

using namespace lse;

namespace {

KrylovOptions opts(double tol = 1e-10)
{
    KrylovOptions o;
    o.tol = tol;
    o.inner.tol = 1e-12;
    return o;
}

NsrGkbOptions gkb_opts(bool reorth = false, InnerMode mode = InnerMode::iterative)
{
    NsrGkbOptions o;
    o.inner.tol = 1e-12;
    o.inner.mode = mode;
    o.reorthogonalize = reorth;
    o.keep_bases = true;
    return o;
}

const double r2 = 1.0 / std::sqrt(2.0);

}  // namespace

TEST_CASE("null projector")
{
    SparseMatrix c = SparseMatrix::from_dense(DenseMatrix::from_rows({{1, 1}}));
    for (InnerMode mode : {InnerMode::iterative, InnerMode::direct_dense}) {
        InnerSolverConfig cfg;
        cfg.tol = 1e-12;
        cfg.mode = mode;
        NullProjector p(c, cfg);
        CHECK(relative_error(p(Vector{1, 0}), Vector{0.5, -0.5}) <= 1e-12);
        CHECK(relative_error(p(Vector{1, -1}), Vector{1, -1}) <= 1e-10);
        const SparseMatrix i3 = SparseMatrix::identity(3);
        NullProjector eye(i3, cfg);
        CHECK(norm2(eye(Vector{1, 2, 3})) <= 1e-14);
        CHECK_THROWS_AS(p(Vector{1, 2, 3}), DimensionError);
    }

    std::mt19937_64 rng(41);
    SparseMatrix cr = SparseMatrix::from_dense(testing::random_rank(7, 15, 5, rng));
    InnerSolverConfig cfg;
    cfg.tol = 1e-10;
    NullProjector p(cr, cfg);
    Vector y = testing::random_vector(15, rng);
    Vector py = p(y);
    CHECK(relative_error(p(py), py) <= 1e-8);
    CHECK(norm2(spmv(cr, py)) <= 1e-8 * cr.frobenius_norm() * norm2(y));
}

TEST_CASE("restricted bidiagonalization by hand")
{
    SparseMatrix a = SparseMatrix::identity(2);
    SparseMatrix c = SparseMatrix::from_dense(DenseMatrix::from_rows({{1, 1}}));
    NsrGkb g(a, c, Vector{1, 0}, gkb_opts());
    CHECK(g.factor().beta1 == doctest::Approx(1.0));
    CHECK(relative_error(g.p(), Vector{1, 0}) <= 1e-14);
    CHECK(g.gamma() == doctest::Approx(r2));
    CHECK(relative_error(g.q(), Vector{r2, -r2}) <= 1e-12);

    g.step();
    REQUIRE(g.factor().deltas.size() == 1);
    CHECK(g.factor().deltas[0] == doctest::Approx(r2));
    CHECK(relative_error(g.p(), Vector{0, -1}) <= 1e-12);
    // N(C) is one-dimensional, so the next gamma vanishes.
    CHECK(g.terminated());
    CHECK(g.termination() == Termination::exact_breakdown);
    CHECK(estimate_op_norm(g.factor()) == doctest::Approx(1.0));

    NsrGkb z(a, c, Vector{0, 0}, gkb_opts());
    CHECK(z.terminated());
    CHECK(z.termination() == Termination::zero_rhs);
    CHECK(z.steps() == 0);
}

TEST_CASE("estimate_op_norm")
{
    BidiagFactor f;
    f.beta1 = 1.0;
    f.gammas = {3.0};
    f.deltas = {4.0};
    CHECK(estimate_op_norm(f) == doctest::Approx(5.0));
    CHECK(f.dense().rows() == 2);
    CHECK(estimate_op_norm(BidiagFactor{}) == 0.0);
    f.gammas.push_back(7.0);  // gamma_{k+1} is not part of B_k
    CHECK(estimate_op_norm(f) == doctest::Approx(5.0));

    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        DenseMatrix ad = testing::random_dense(20, 30, rng);
        DenseMatrix cd = testing::random_dense(10, 30, rng);
        SparseMatrix a = SparseMatrix::from_dense(ad), c = SparseMatrix::from_dense(cd);
        NsrGkb g(a, c, testing::random_vector(20, rng), gkb_opts(true));
        double prev = 0.0;
        for (int k = 0; k < 15; ++k) {
            g.step();
            const double est = estimate_op_norm(g.factor());
            CHECK(est >= prev * (1 - 1e-14));
            prev = est;
        }
        const double exact = singular_values(ad * null_basis(cd)).front();
        CHECK(prev <= exact * (1 + 1e-12));
        CHECK(prev >= 0.99 * exact);
        // B_k matches its dense form
        DenseMatrix bk = g.factor().dense();
        CHECK(singular_values(bk).front() == doctest::Approx(prev).epsilon(1e-12));
    }
}

TEST_CASE("nsr_lsqr small cases")
{
    SparseMatrix a = SparseMatrix::identity(2);
    SparseMatrix c = SparseMatrix::from_dense(DenseMatrix::from_rows({{1, 1}}));
    SolveReport r = nsr_lsqr_solve(a, c, Vector{1, 0}, opts());
    CHECK(r.success());
    CHECK(relative_error(r.x, Vector{0.5, -0.5}) <= 1e-12);
    CHECK(r.x2 == r.x);

    const SparseMatrix i2 = SparseMatrix::identity(2);
    SolveReport z = nsr_lsqr_solve(a, i2, Vector{1, 0}, opts());
    CHECK(z.termination == Termination::immediate_breakdown);
    CHECK(norm2(z.x) == 0.0);

    SolveReport zr = nsr_lsqr_solve(a, c, Vector{0, 0}, opts());
    CHECK(zr.termination == Termination::zero_rhs);
    CHECK_THROWS_AS(nsr_lsqr_solve(a, c, Vector{1, 0, 0}, opts()), DimensionError);
}

TEST_CASE("nsr_lsqr matches the restricted pseudoinverse")
{
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        DenseMatrix ad = trial % 2 ? testing::random_rank(10, 14, 6, rng) : testing::random_dense(10, 14, rng);
        DenseMatrix cd = trial % 3 ? testing::random_dense(5, 14, rng) : testing::random_rank(5, 14, 3, rng);
        Vector b = testing::random_vector(10, rng);
        SparseMatrix a = SparseMatrix::from_dense(ad), c = SparseMatrix::from_dense(cd);
        Vector ref = restricted_pinv_apply(ad, cd, b);
        SolveReport r = nsr_lsqr_solve(a, c, b, opts());
        CHECK(r.success());
        CHECK(relative_error(r.x, ref) <= 1e-6);
    }
}

TEST_CASE("iterates stay in N(C)")
{
    std::mt19937_64 rng(44);
    DenseMatrix ad = testing::random_dense(25, 30, rng);
    DenseMatrix cd = testing::random_dense(12, 30, rng);
    SparseMatrix a = SparseMatrix::from_dense(ad), c = SparseMatrix::from_dense(cd);
    KrylovOptions o = opts();
    o.keep_bases = true;
    o.observer = [&](std::size_t, std::span<const double> x) {
        CHECK(norm2(spmv(c, x)) <= 1e-8 * norm2(x));
    };
    nsr_lsqr_solve(a, c, testing::random_vector(25, rng), o);

    NsrGkb g(a, c, testing::random_vector(25, rng), gkb_opts());
    for (int k = 0; k < 12 && !g.terminated(); ++k)
        g.step();
    for (const Vector& q : g.q_basis())
        CHECK(norm2(spmv(c, q)) <= 1e-8);
}

TEST_CASE("q vectors span the projected Krylov space")
{
    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 5; ++trial) {
        DenseMatrix ad = testing::random_dense(12, 16, rng);
        DenseMatrix cd = testing::random_dense(5, 16, rng);
        Vector b = testing::random_vector(12, rng);
        SparseMatrix a = SparseMatrix::from_dense(ad), c = SparseMatrix::from_dense(cd);
        const DenseMatrix w = null_basis(cd);
        const DenseMatrix pn = w * w.transpose();
        const std::size_t k = 5;

        NsrGkb g(a, c, b, gkb_opts(false, InnerMode::direct_dense));
        for (std::size_t i = 1; i < k; ++i)
            g.step();
        DenseMatrix q(16, k);
        for (std::size_t j = 0; j < k; ++j)
            std::copy(g.q_basis()[j].begin(), g.q_basis()[j].end(), q.col(j).begin());

        // (P_N A^T A)^i P_N A^T b, orthonormalized
        DenseMatrix kr(16, k);
        Vector v = matvec(pn, matvec_transpose(ad, b));
        const DenseMatrix op = pn * (ad.transpose() * ad);
        for (std::size_t j = 0; j < k; ++j) {
            std::copy(v.begin(), v.end(), kr.col(j).begin());
            v = matvec(op, v);
        }
        const DenseMatrix kq = dense_qr(kr, false).q;
        // largest principal angle: sin = ||(I - Q Q^T) K||
        const DenseMatrix diff = kq - q * (q.transpose() * kq);
        CHECK(singular_values(diff).front() <= 1e-6);
    }
}

TEST_CASE("matrix form relation A Q_k = P_{k+1} B_k")
{
    std::mt19937_64 rng(46);
    DenseMatrix ad = testing::random_dense(20, 30, rng);
    DenseMatrix cd = testing::random_dense(8, 30, rng);
    SparseMatrix a = SparseMatrix::from_dense(ad), c = SparseMatrix::from_dense(cd);
    Vector b = testing::random_vector(20, rng);
    NsrGkb g(a, c, b, gkb_opts(true));
    for (int i = 0; i < 10; ++i)
        g.step();
    const std::size_t k = 10;
    DenseMatrix q(30, k), p(20, k + 1);
    for (std::size_t j = 0; j < k; ++j)
        std::copy(g.q_basis()[j].begin(), g.q_basis()[j].end(), q.col(j).begin());
    for (std::size_t j = 0; j <= k; ++j)
        std::copy(g.p_basis()[j].begin(), g.p_basis()[j].end(), p.col(j).begin());
    DenseMatrix bk = g.factor().dense();
    REQUIRE(bk.rows() == k + 1);
    CHECK((ad * q - p * bk).frobenius_norm() <= 1e-10 * ad.frobenius_norm());
    // beta_1 P_{k+1} e_1 = b
    Vector p1(p.col(0).begin(), p.col(0).end());
    scale(g.factor().beta1, p1);
    CHECK(relative_error(p1, b) <= 1e-14);
}

TEST_CASE("breakdown gives the exact solution")
{
    std::mt19937_64 rng(47);
    int breakdowns = 0;
    for (int trial = 0; trial < 10; ++trial) {
        DenseMatrix ad = testing::random_dense(10, 14, rng);
        DenseMatrix cd = testing::random_dense(8, 14, rng);
        Vector b = testing::random_vector(10, rng);
        SparseMatrix a = SparseMatrix::from_dense(ad), c = SparseMatrix::from_dense(cd);
        KrylovOptions o = opts(0.0);
        o.reorthogonalize = true;
        o.inner.mode = InnerMode::direct_dense;
        o.max_outer = 20;
        SolveReport r = nsr_lsqr_solve(a, c, b, o);
        if (r.termination == Termination::exact_breakdown) {
            ++breakdowns;
            CHECK(relative_error(r.x, restricted_pinv_apply(ad, cd, b)) <= 1e-8);
            CHECK(r.iterations <= 7);
        }
    }
    CHECK(breakdowns >= 5);
}

TEST_CASE("cheap residual matches the directly computed one")
{
    std::mt19937_64 rng(48);
    DenseMatrix ad = testing::random_dense(30, 40, rng);
    DenseMatrix cd = testing::random_dense(10, 40, rng);
    Vector b = testing::random_vector(30, rng);
    SparseMatrix a = SparseMatrix::from_dense(ad), c = SparseMatrix::from_dense(cd);
    const DenseMatrix w = null_basis(cd);
    NsrLsqr s(a, c, b, gkb_opts(true));
    int checked = 0;
    while (!s.terminated() && s.stopping_quantity() > 1e-6) {
        s.step();
        if (s.terminated())
            break;  // exact termination leaves only rounding-level residuals
        Vector r = matvec(ad, s.x());
        axpy(-1.0, b, r);
        const double direct = norm2(project_onto(w, matvec_transpose(ad, r)));
        CHECK(std::abs(direct - s.normal_residual_norm()) <= 1e-8 * direct);
        // residual norm recurrence as well
        CHECK(norm2(r) == doctest::Approx(s.residual_norm()).epsilon(1e-10));
        ++checked;
    }
    CHECK(checked >= 10);
}

TEST_CASE("nsr history and cost accounting")
{
    std::mt19937_64 rng(49);
    DenseMatrix ad = testing::random_dense(15, 20, rng);
    DenseMatrix cd = testing::random_dense(6, 20, rng);
    Vector b = testing::random_vector(15, rng);
    SparseMatrix a = SparseMatrix::from_dense(ad), c = SparseMatrix::from_dense(cd);
    KrylovOptions o = opts();
    o.reference = restricted_pinv_apply(ad, cd, b);
    SolveReport r = nsr_lsqr_solve(a, c, b, o);
    REQUIRE(r.history.size() == r.iterations);
    CHECK(r.history.back().error_proxy <= 1e-6);
    for (std::size_t i = 1; i < r.history.size(); ++i) {
        CHECK(r.history[i].cum_matvecs > r.history[i - 1].cum_matvecs);
        CHECK(r.history[i].inner_iters >= r.history[i - 1].inner_iters);
    }
    CHECK(r.inner_iterations > 0);

    o.max_outer = 3;
    o.tol = 1e-15;
    SolveReport cut = nsr_lsqr_solve(a, c, b, o);
    CHECK(cut.termination == Termination::max_iterations);
    CHECK(cut.iterations == 3);
}

TEST_CASE("tol zero stops at rounding level instead of drifting")
{
    // rank-deficient A W; without a floor the iterates blow up past convergence
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 40; ++trial) {
        DenseMatrix ad = testing::random_rank(20, 30, 12, rng);
        DenseMatrix cd = testing::random_rank(12, 30, 9, rng);
        Vector b = testing::random_vector(20, rng);
        SparseMatrix a = SparseMatrix::from_dense(ad), c = SparseMatrix::from_dense(cd);
        const Vector want = restricted_pinv_apply(ad, cd, b);
        for (InnerMode mode : {InnerMode::iterative, InnerMode::direct_dense}) {
            KrylovOptions o = opts(0.0);
            o.inner.mode = mode;
            o.max_outer = 200;
            SolveReport r = nsr_lsqr_solve(a, c, b, o);
            CAPTURE(trial);
            CHECK(is_success(r.termination));
            CHECK(relative_error(r.x, want) <= 1e-7);
        }
    }
}
