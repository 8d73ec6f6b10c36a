#include <random>

#include "doctest.h"
#include "lse/dense_linalg.hpp"
#include "lse/error.hpp"
#include "lse/reference.hpp"
#include "support.hpp"

using namespace lse;
using lse::testing::dense_problem;

namespace {

// Random consistent problem with full-rank C and [A; C].
LseProblem random_consistent(std::size_t m, std::size_t n, std::size_t p, std::mt19937_64& rng)
{
    DenseMatrix a = testing::random_dense(m, n, rng);
    DenseMatrix c = testing::random_dense(p, n, rng);
    Vector d = matvec(c, testing::random_vector(n, rng));
    return dense_problem(a, c, testing::random_vector(m, rng), d);
}

}  // namespace

TEST_CASE("two-variable instance by every method")
{
    const LseProblem pr = testing::tiny_problem();
    const Vector expect{1.5, 0.5};
    CHECK(relative_error(solve_nullspace(pr), expect) <= 1e-14);
    CHECK(relative_error(solve_direct_elim(pr), expect) <= 1e-14);
    AugmentedSolution aug = solve_augmented_system(pr);
    CHECK(relative_error(aug.x, expect) <= 1e-14);
    CHECK(relative_error(aug.r, Vector{-0.5, -0.5}) <= 1e-14);
    CHECK(relative_error(lse_oracle(pr), expect) <= 1e-12);
}

TEST_CASE("square nonsingular constraints fix x")
{
    std::mt19937_64 rng(51);
    DenseMatrix c = testing::random_dense(4, 4, rng);
    Vector d = testing::random_vector(4, rng);
    LseProblem pr = dense_problem(testing::random_dense(3, 4, rng), c, testing::random_vector(3, rng), d);
    Vector expect = LuFactorization(c).solve(d);
    CHECK(relative_error(solve_nullspace(pr), expect) <= 1e-12);
    CHECK(relative_error(solve_direct_elim(pr), expect) <= 1e-12);
}

TEST_CASE("direct elimination with column permutation")
{
    LseProblem pr = dense_problem(DenseMatrix::identity(2), DenseMatrix::from_rows({{0, 1}}), {5, 0}, {1});
    CHECK(relative_error(solve_direct_elim(pr), Vector{5, 1}) <= 1e-14);
    CHECK(relative_error(solve_nullspace(pr), Vector{5, 1}) <= 1e-14);
}

TEST_CASE("augmented system with exact data")
{
    std::mt19937_64 rng(52);
    DenseMatrix a = testing::random_dense(8, 6, rng);
    DenseMatrix c = testing::random_dense(3, 6, rng);
    Vector x0 = testing::random_vector(6, rng);
    LseProblem pr = dense_problem(a, c, matvec(a, x0), matvec(c, x0));
    AugmentedSolution s = solve_augmented_system(pr);
    CHECK(relative_error(s.x, x0) <= 1e-12);
    CHECK(norm2(s.r) <= 1e-12 * norm2(pr.b));
    CHECK(norm2(s.lambda) <= 1e-12 * norm2(pr.b));
}

TEST_CASE("classical solvers agree pairwise")
{
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        LseProblem pr = random_consistent(12, 10, 4, rng);
        Vector ns = solve_nullspace(pr);
        Vector de = solve_direct_elim(pr);
        Vector au = solve_augmented(pr);
        CHECK(relative_error(ns, de) <= 1e-10);
        CHECK(relative_error(au, ns) <= 1e-8);
        CHECK(relative_error(au, de) <= 1e-8);
        CHECK(relative_error(lse_oracle(pr), ns) <= 1e-8);
    }
}

TEST_CASE("null-space method picks the minimum-norm solution")
{
    std::mt19937_64 rng(54);
    for (int trial = 0; trial < 5; ++trial) {
        // N(A) and N(C) intersect in 2 dimensions
        DenseMatrix a = testing::random_rank(6, 10, 4, rng);
        DenseMatrix c = testing::random_dense(4, 10, rng);
        LseProblem pr = dense_problem(a, c, testing::random_vector(6, rng), matvec(c, testing::random_vector(10, rng)));
        Vector x = solve_nullspace(pr);
        DenseMatrix z = null_basis(vstack(a, c));
        REQUIRE(z.cols() == 2);
        CHECK(norm2(project_onto(z, x)) <= 1e-10 * norm2(x));
        CHECK(relative_error(x, lse_oracle(pr)) <= 1e-8);
        CHECK_THROWS_AS(solve_augmented(pr), NumericalError);
    }
}

TEST_CASE("reference error paths")
{
    // x1 + x2 = 1 and x1 + x2 = 3
    LseProblem bad = dense_problem(DenseMatrix::identity(2), DenseMatrix::from_rows({{1, 1}, {1, 1}}), {0, 0}, {1, 3});
    try {
        solve_nullspace(bad);
        FAIL("expected an exception");
    } catch (const InconsistentConstraintsError& e) {
        CHECK(e.residual() == doctest::Approx(std::sqrt(2.0)));
        CHECK(std::string(e.what()).find("inconsistent") != std::string::npos);
    }
    CHECK_THROWS_AS(solve_direct_elim(bad), InconsistentConstraintsError);
    LseProblem dependent = bad;
    dependent.d = {2, 2};
    CHECK_THROWS_AS(solve_direct_elim(dependent), NumericalError);

    ReferenceOptions relaxed;
    relaxed.require_consistent = false;
    Vector x = solve_nullspace(bad, relaxed);
    CHECK(x[0] + x[1] == doctest::Approx(2.0));

    ReferenceOptions tiny_cap;
    tiny_cap.size_cap = 4;
    CHECK_THROWS_AS(solve_nullspace(testing::tiny_problem(), tiny_cap), InputError);

    LseProblem mismatch = testing::tiny_problem();
    mismatch.b.push_back(1.0);
    CHECK_THROWS_AS(solve_nullspace(mismatch), DimensionError);
}

TEST_CASE("weighted pseudoinverse")
{
    std::mt19937_64 rng(55);
    DenseMatrix k = testing::random_rank(5, 8, 3, rng);
    Vector g = testing::random_vector(5, rng);
    CHECK(relative_error(weighted_pinv_apply(k, DenseMatrix(2, 8), g), matvec(dense_pinv(k), g)) <= 1e-12);

    Vector hand = weighted_pinv_apply(DenseMatrix::from_rows({{1, 1}}), DenseMatrix::from_rows({{1, 0}}), Vector{2});
    CHECK(relative_error(hand, Vector{0, 2}) <= 1e-14);

    for (int trial = 0; trial < 10; ++trial) {
        DenseMatrix kk = trial % 2 ? testing::random_rank(6, 10, 4, rng) : testing::random_dense(6, 10, rng);
        DenseMatrix l = testing::random_rank(7, 10, 3 + trial % 4, rng);
        Vector gg = testing::random_vector(6, rng);
        Vector x = weighted_pinv_apply(kk, l, gg);
        // K^T (K x - g) = 0
        Vector r = matvec(kk, x);
        axpy(-1.0, gg, r);
        CHECK(norm2(matvec_transpose(kk, r)) <= 1e-10 * kk.frobenius_norm() * norm2(gg));
        // x^T M z = 0 for z in N(K)
        DenseMatrix z = null_basis(kk);
        DenseMatrix m = kk.transpose() * kk + l.transpose() * l;
        CHECK(norm2(matvec_transpose(m * z, x)) <= 1e-10 * m.frobenius_norm() * norm2(x));
        // x in R(M)
        DenseMatrix nm = null_basis(m);
        if (nm.cols())
            CHECK(norm2(project_onto(nm, x)) <= 1e-10 * norm2(x));
        // matrix form agrees
        CHECK(relative_error(matvec(weighted_pinv(kk, l), gg), x) <= 1e-10);
    }
}

TEST_CASE("restricted pseudoinverse")
{
    std::mt19937_64 rng(56);
    DenseMatrix a = testing::random_dense(9, 12, rng);
    DenseMatrix c = testing::random_dense(4, 12, rng);
    Vector b = testing::random_vector(9, rng);
    Vector x = restricted_pinv_apply(a, c, b);
    CHECK(norm2(matvec(c, x)) <= 1e-12 * norm2(x));
    CHECK(relative_error(matvec(restricted_pinv(a, c), b), x) <= 1e-12);
    // stationarity within N(C)
    DenseMatrix w = null_basis(c);
    Vector r = matvec(a, x);
    axpy(-1.0, b, r);
    CHECK(norm2(matvec_transpose(a * w, r)) <= 1e-10 * a.frobenius_norm() * norm2(b));
    CHECK(norm2(restricted_pinv_apply(a, DenseMatrix::identity(12), b)) == 0.0);
}
