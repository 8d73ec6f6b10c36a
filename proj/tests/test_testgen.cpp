#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lse/dense_linalg.hpp"
#include "lse/error.hpp"
#include "lse/kids.hpp"
#include "lse/reference.hpp"
#include "lse/testgen.hpp"
#include "support.hpp"

using namespace lse;

TEST_CASE("difference operators")
{
    DenseMatrix d1 = build_d1(3).to_dense();
    CHECK(testing::rel_diff(d1, DenseMatrix::from_rows({{1, -1, 0}, {0, 1, -1}})) == 0.0);
    DenseMatrix d2 = build_d2(4).to_dense();
    CHECK(testing::rel_diff(d2, DenseMatrix::from_rows({{-1, 2, -1, 0}, {0, -1, 2, -1}})) == 0.0);
    CHECK(norm2(spmv(build_d1(50), Vector(50, 1.0))) == 0.0);
    CHECK_THROWS_AS(build_d1(2), InputError);
    CHECK_THROWS_AS(build_d2(1), InputError);
}

TEST_CASE("profiles")
{
    const std::size_t n = 9;
    Vector ramp = ProfileSpec::parse("ramp").evaluate(n);
    Vector quad = ProfileSpec::parse("quad").evaluate(n);
    Vector sc = ProfileSpec::parse("sincos").evaluate(n);
    Vector scm = ProfileSpec::parse("sincos-minus").evaluate(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const double s = static_cast<double>(k - 1) / static_cast<double>(n - 1);
        CHECK(ramp[k - 1] == doctest::Approx(s));
        CHECK(quad[k - 1] == doctest::Approx(std::pow(2 * s - 1, 2)));
        const double t = 2 * std::numbers::pi * s - std::numbers::pi;
        CHECK(sc[k - 1] == doctest::Approx(std::sin(2 * t) + 3 * std::cos(t)));
        CHECK(scm[k - 1] == doctest::Approx(std::sin(4 * std::numbers::pi * s - 2 * std::numbers::pi) -
                                            3 * std::cos(2 * std::numbers::pi * s - std::numbers::pi)));
    }
    CHECK(ProfileSpec::parse("ones").evaluate(4) == Vector(4, 1.0));
    CHECK(ProfileSpec::custom_samples({1, 2, 3}).evaluate(3) == Vector{1, 2, 3});
    CHECK_THROWS_AS(ProfileSpec::custom_samples({1, 2}).evaluate(3), DimensionError);
    CHECK_THROWS_AS(ProfileSpec::parse("cubic"), InputError);
    CHECK(ProfileSpec::parse("sincos-minus").id() == "sincos-minus");
}

TEST_CASE("generator on the two-variable instance")
{
    SparseMatrix a = SparseMatrix::identity(2);
    SparseMatrix c = SparseMatrix::from_dense(DenseMatrix::from_rows({{1, 1}}));
    GenerateOptions o;
    o.add_noise = false;
    TestProblem tp = generate(a, c, ProfileSpec::parse("ones"), 1, o);
    CHECK(relative_error(tp.x1_true, Vector{1, 1}) <= 1e-14);
    CHECK(tp.problem.d[0] == doctest::Approx(2.0));
    CHECK(relative_error(tp.x2_true, Vector{0.5, -0.5}) <= 1e-14);
    CHECK(tp.x_true == add(tp.x1_true, tp.x2_true));
}

TEST_CASE("generated solutions match the dense oracles")
{
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t n = 30;
        DenseMatrix ad = trial % 2 ? testing::random_dense(25, n, rng) : testing::random_rank(25, n, 24, rng);
        DenseMatrix cd = trial % 3 ? testing::random_dense(12, n, rng) : testing::random_rank(12, n, 8, rng);
        SparseMatrix a = SparseMatrix::from_dense(ad), c = SparseMatrix::from_dense(cd);
        const char* profiles[] = {"ones", "ramp", "quad", "sincos"};
        TestProblem tp = generate(a, c, ProfileSpec::parse(profiles[trial % 4]), 100 + trial);
        const LseProblem& pr = tp.problem;
        CHECK(relative_error(tp.x1_true, weighted_pinv_apply(cd, ad, pr.d)) <= 1e-8);
        CHECK(relative_error(tp.x2_true, restricted_pinv_apply(ad, cd, pr.b)) <= 1e-8);
        CHECK(tp.x_true == add(tp.x1_true, tp.x2_true));
        CHECK(check_optimality(pr, tp.x_true).max_scaled() <= 1e-8);
        if (trial % 3 == 0) {
            // rank-deficient C: d has a component outside R(C)
            Vector res = spmv(c, tp.x_true);
            axpy(-1.0, pr.d, res);
            CHECK(norm2(res) > 1e-3);
        }
    }
}

TEST_CASE("generator is deterministic")
{
    RecipeSpec spec;
    spec.n = 60;
    spec.p = 20;
    spec.density = 0.1;
    spec.w1 = ProfileSpec::parse("ramp");
    spec.seed = 7;
    TestProblem t1 = generate_recipe(spec);
    TestProblem t2 = generate_recipe(spec);
    CHECK(t1.problem.b == t2.problem.b);
    CHECK(t1.problem.d == t2.problem.d);
    CHECK(t1.x_true == t2.x_true);
    CHECK(std::equal(t1.problem.C.values().begin(), t1.problem.C.values().end(), t2.problem.C.values().begin()));
    CHECK(t1.generator_id == "d1+sparse/w1=ramp/mt19937_64");
    spec.seed = 8;
    CHECK(generate_recipe(spec).problem.b != t1.problem.b);
}

TEST_CASE("generator degenerate cases")
{
    std::mt19937_64 rng(62);
    const SparseMatrix c = SparseMatrix::from_dense(testing::random_dense(6, 6, rng));
    const SparseMatrix a = SparseMatrix::from_dense(testing::random_dense(4, 6, rng));
    CHECK_THROWS_AS(generate(a, c, ProfileSpec::parse("ones"), 1), InputError);
    GenerateOptions o;
    o.allow_pseudoinverse = true;
    TestProblem tp = generate(a, c, ProfileSpec::parse("ones"), 1, o);
    CHECK(norm2(tp.x2_true) == 0.0);
    CHECK(tp.x_true == tp.x1_true);
    CHECK(relative_error(tp.problem.b, tp.problem.b) == 0.0);

    // N(A) and N(C) share a direction
    DenseMatrix ad = testing::random_dense(5, 8, rng);
    DenseMatrix cd = testing::random_dense(3, 8, rng);
    for (std::size_t i = 0; i < 5; ++i)
        ad(i, 7) = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        cd(i, 7) = 0.0;
    const SparseMatrix a2 = SparseMatrix::from_dense(ad), c2 = SparseMatrix::from_dense(cd);
    CHECK_THROWS_AS(generate(a2, c2, ProfileSpec::parse("ramp"), 2), InputError);
    TestProblem deg = generate(a2, c2, ProfileSpec::parse("ramp"), 2, o);
    CHECK(relative_error(deg.x_true, lse_oracle(deg.problem)) <= 1e-8);
    CHECK(check_optimality(deg.problem, deg.x_true).max_scaled() <= 1e-8);
}

TEST_CASE("random sparse matrices")
{
    SparseMatrix m = random_sparse(40, 60, 0.05, 3);
    CHECK(m.rows() == 40);
    for (std::size_t i = 0; i < 40; ++i)
        CHECK(m.row_ptr()[i + 1] - m.row_ptr()[i] == 3);
    SparseMatrix low = random_sparse(30, 50, 0.2, 4, 12);
    CHECK(numerical_rank(low.to_dense()) <= 12);
    SparseMatrix dd = random_sparse(20, 20, 0.1, 5, std::nullopt, true);
    DenseMatrix dense = dd.to_dense();
    for (std::size_t i = 0; i < 20; ++i) {
        double off = 0.0;
        for (std::size_t j = 0; j < 20; ++j)
            if (j != i)
                off += std::abs(dense(i, j));
        CHECK(dense(i, i) > off);
    }
    CHECK_THROWS_AS(random_sparse(3, 3, 0.0, 1), InputError);
}

TEST_CASE("recipes")
{
    RecipeSpec spec;
    spec.n = 50;
    spec.p = 15;
    spec.density = 0.1;
    spec.seed = 3;
    for (auto kind : {RecipeKind::d1_sparse, RecipeKind::d2_sparse, RecipeKind::split_square}) {
        spec.kind = kind;
        TestProblem tp = generate_recipe(spec);
        tp.problem.validate();
        CHECK(tp.problem.n() == 50);
        CHECK(tp.problem.p() == 15);
        if (kind == RecipeKind::split_square)
            CHECK(tp.problem.m() == 35);
        CHECK(check_optimality(tp.problem, tp.x_true).max_scaled() <= 1e-8);
        CHECK(parse_recipe(to_string(kind)) == kind);
    }
    spec.p = 50;
    spec.kind = RecipeKind::split_square;
    CHECK_THROWS_AS(generate_recipe(spec), InputError);
}

TEST_CASE("condition numbers")
{
    CHECK(condition_number(SparseMatrix::identity(5)) == doctest::Approx(1.0));
    CHECK(condition_number(SparseMatrix::from_dense(DenseMatrix::from_rows({{10, 0}, {0, 1}}))) ==
          doctest::Approx(10.0));
    // bidiagonal path against the dense SVD and the analytic values 2 sin(k pi / (2n))
    for (std::size_t n : {5, 17, 64}) {
        SparseMatrix d1 = build_d1(n);
        const double analytic = 1.0 / std::tan(std::numbers::pi / (2.0 * static_cast<double>(n)));
        CHECK(condition_number(d1) == doctest::Approx(analytic).epsilon(1e-10));
        Vector sv = singular_values(d1.to_dense());
        CHECK(sv.front() / sv.back() == doctest::Approx(analytic).epsilon(1e-10));
        CHECK(condition_number(d1.transpose()) == doctest::Approx(analytic).epsilon(1e-10));
    }
    // non-bidiagonal pattern goes through the dense path
    SparseMatrix d2 = build_d2(30);
    CHECK(condition_number(d2) == doctest::Approx([&] {
              Vector s = singular_values(d2.to_dense());
              return s.front() / s.back();
          }()));
}

TEST_CASE("bundle round trip")
{
    RecipeSpec spec;
    spec.n = 40;
    spec.p = 10;
    spec.seed = 11;
    spec.w1 = ProfileSpec::parse("quad");
    TestProblem tp = generate_recipe(spec);
    auto dir = testing::scratch_dir("bundle");
    write_bundle(dir / "b1", tp);
    for (const char* f : {"A.mtx", "C.mtx", "b.mtx", "d.mtx", "xtrue.mtx", "meta.json"})
        CHECK(std::filesystem::exists(dir / "b1" / f));
    TestProblem back = read_bundle(dir / "b1");
    CHECK(back.problem.b == tp.problem.b);
    CHECK(back.problem.d == tp.problem.d);
    CHECK(back.x_true == tp.x_true);
    CHECK(back.x1_true == tp.x1_true);
    CHECK(back.seed == 11);
    CHECK(back.generator_id == tp.generator_id);
    CHECK(back.problem.A.nnz() == tp.problem.A.nnz());
    CHECK_THROWS_AS(read_bundle(dir / "missing"), InputError);
}
