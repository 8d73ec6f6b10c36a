#include <random>

#include "doctest.h"
#include "lse/kernels.hpp"
#include "lse/sparse_matrix.hpp"
#include "support.hpp"

using namespace lse;

namespace {

SparseMatrix big_sparse(std::size_t rows, std::size_t cols, std::mt19937_64& rng)
{
    std::uniform_int_distribution<std::size_t> col(0, cols - 1);
    std::normal_distribution<double> val(0.0, 1.0);
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < rows; ++i)
        for (int k = 0; k < 8; ++k)
            t.push_back({i, col(rng), val(rng)});
    return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

}  // namespace

TEST_CASE("serial and OpenMP matvec agree")
{
    std::mt19937_64 rng(11);
    SparseMatrix m = big_sparse(50000, 30000, rng);
    Vector x = testing::random_vector(30000, rng);
    Vector ys(50000), yp(50000);
    kernels::serial::csr_matvec(m.view(), x, ys);
    kernels::parallel::csr_matvec(m.view(), x, yp);
    for (std::size_t i = 0; i < ys.size(); ++i)
        REQUIRE(ys[i] == yp[i]);  // row-wise sums are evaluated in the same order

    Vector zs(30000), zp(30000);
    kernels::serial::csr_matvec(m.transpose_view(), ys, zs);
    kernels::parallel::csr_matvec(m.transpose_view(), ys, zp);
    for (std::size_t i = 0; i < zs.size(); ++i)
        REQUIRE(zs[i] == zp[i]);
}

TEST_CASE("reductions agree to rounding and are reproducible")
{
    std::mt19937_64 rng(12);
    Vector a = testing::random_vector(200001, rng);
    Vector b = testing::random_vector(200001, rng);
    const double ds = kernels::serial::dot(a, b);
    const double dp = kernels::parallel::dot(a, b);
    CHECK(std::abs(ds - dp) <= 1e-12 * kernels::serial::nrm2(a) * kernels::serial::nrm2(b));
    CHECK(kernels::parallel::dot(a, b) == dp);
    CHECK(kernels::parallel::nrm2(a) == doctest::Approx(kernels::serial::nrm2(a)).epsilon(1e-13));
}

TEST_CASE("nrm2 avoids overflow and underflow")
{
    Vector big(4, 1e300), tiny(4, 1e-300);
    CHECK(kernels::serial::nrm2(big) == doctest::Approx(2e300));
    CHECK(kernels::parallel::nrm2(big) == doctest::Approx(2e300));
    CHECK(kernels::serial::nrm2(tiny) / 2e-300 == doctest::Approx(1.0));
    CHECK(kernels::parallel::nrm2(tiny) / 2e-300 == doctest::Approx(1.0));
    CHECK(kernels::nrm2(Vector{}) == 0.0);
}

TEST_CASE("axpy and scal match")
{
    std::mt19937_64 rng(13);
    Vector x = testing::random_vector(100000, rng);
    Vector y1 = testing::random_vector(100000, rng);
    Vector y2 = y1;
    kernels::serial::axpy(0.5, x, y1);
    kernels::parallel::axpy(0.5, x, y2);
    CHECK(y1 == y2);
    kernels::serial::scal(-3.0, y1);
    kernels::parallel::scal(-3.0, y2);
    CHECK(y1 == y2);
}

TEST_CASE("gemm variants agree")
{
    std::mt19937_64 rng(14);
    const std::size_t m = 70, n = 50, k = 90;
    DenseMatrix a = testing::random_dense(m, k, rng);
    DenseMatrix b = testing::random_dense(k, n, rng);
    Vector c1(m * n), c2(m * n);
    kernels::serial::gemm(m, n, k, a.data(), b.data(), c1);
    kernels::parallel::gemm(m, n, k, a.data(), b.data(), c2);
    for (std::size_t i = 0; i < c1.size(); ++i)
        CHECK(c1[i] == doctest::Approx(c2[i]).epsilon(1e-13));
    // spot check one entry by hand
    double ref = 0.0;
    for (std::size_t l = 0; l < k; ++l)
        ref += a(3, l) * b(l, 7);
    CHECK(c1[3 + 7 * m] == doctest::Approx(ref).epsilon(1e-13));
}
