#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "lse/dense_linalg.hpp"
#include "lse/dense_matrix.hpp"
#include "lse/problem.hpp"
#include "lse/sparse_matrix.hpp"
#include "lse/vector.hpp"

namespace lse::testing {

inline DenseMatrix random_dense(std::size_t rows, std::size_t cols, std::mt19937_64& rng)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    DenseMatrix m(rows, cols);
    for (double& v : m.data())
        v = dist(rng);
    return m;
}

/// rows x cols with rank at most `rank`, built as a product of Gaussian factors.
inline DenseMatrix random_rank(std::size_t rows, std::size_t cols, std::size_t rank, std::mt19937_64& rng)
{
    return random_dense(rows, rank, rng) * random_dense(rank, cols, rng);
}

inline Vector random_vector(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    Vector v(n);
    for (double& x : v)
        x = dist(rng);
    return v;
}

inline double rel_diff(const DenseMatrix& a, const DenseMatrix& b)
{
    const double nb = b.frobenius_norm();
    return (a - b).frobenius_norm() / (nb > 0 ? nb : 1.0);
}

inline LseProblem dense_problem(const DenseMatrix& a, const DenseMatrix& c, Vector b, Vector d)
{
    return LseProblem{SparseMatrix::from_dense(a), SparseMatrix::from_dense(c), std::move(b), std::move(d)};
}

/// 2-variable instance: A = I, C = [1 1], b = (1, 0), d = (2).
inline LseProblem tiny_problem()
{
    return dense_problem(DenseMatrix::identity(2), DenseMatrix::from_rows({{1.0, 1.0}}), {1.0, 0.0}, {2.0});
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("lse_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace lse::testing
