#pragma once

// Construction of LSE problems with known minimum 2-norm solutions, the
// difference operators D1 and D2, and synthetic sparse constraint matrices.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "lse/problem.hpp"
#include "lse/sparse_matrix.hpp"
#include "lse/vector.hpp"

namespace lse {

/// (n-1) x n with rows (.., 1, -1, ..).
SparseMatrix build_d1(std::size_t n);
/// (n-2) x n with rows (.., -1, 2, -1, ..).
SparseMatrix build_d2(std::size_t n);

enum class ProfileKind {
    ones,
    ramp,          ///< f(t) = t
    quad,          ///< f(t) = t^2
    sincos,        ///< f(t) = sin(2t) + 3 cos(t)
    sincos_minus,  ///< f(t) = sin(2t) - 3 cos(t)
    custom,        ///< explicit samples
};

/// A function sampled on a uniform grid of [t0, t1].
struct ProfileSpec {
    ProfileKind kind = ProfileKind::ones;
    double t0 = 0.0;
    double t1 = 1.0;
    Vector samples;  ///< custom only

    /// Standard intervals: ramp [0, 1], quad [-1, 1], sincos variants [-pi, pi].
    static ProfileSpec standard(ProfileKind kind);
    static ProfileSpec custom_samples(Vector samples);
    /// Accepts ones, ramp, quad, sincos, sincos-minus.
    static ProfileSpec parse(const std::string& name);

    /// Grid values for n >= 2 points; custom profiles require n == samples.size().
    Vector evaluate(std::size_t n) const;
    std::string id() const;
};

struct TestProblem {
    LseProblem problem;
    Vector x_true;
    Vector x1_true;  ///< C_A^+ d
    Vector x2_true;  ///< A_{N(C)}^+ b
    std::uint64_t seed = 0;
    std::string generator_id;
};

struct GenerateOptions {
    /// Replace the inverse of B^T G B by a pseudoinverse, allowing a nontrivial
    /// N(A) ∩ N(C) or N(C) = {0}.
    bool allow_pseudoinverse = false;
    /// Add the random components z1 and z2 (off gives consistent data).
    bool add_noise = true;
    /// Prefix for the recorded generator id.
    std::string recipe = "custom";
};

/// Builds d and b so that the minimum 2-norm LSE solution is known:
/// x1 = w1 - B (B^T G B)^{-1} B^T G w1 with w1 the profile projected onto R(G),
/// d = C x1 + z1 (z1 in R(C)^perp), x2 = B w2 with w2 the first column of
/// (A B)^T stripped of its N(A B) part, b = A x2 + z2 (z2 in R(A B)^perp).
/// Dense internally. Throws InputError when B^T G B is singular and the
/// pseudoinverse variant is off.
TestProblem generate(const SparseMatrix& a, const SparseMatrix& c, const ProfileSpec& w1, std::uint64_t seed,
                     const GenerateOptions& opts = {});

/// Random sparse matrix with normally distributed values. Every row has at
/// least one entry. With `rank` < rows, the trailing rows are combinations of
/// two leading rows, so the row rank is at most `rank`. With `diagonal`, the
/// leading square block is made strictly diagonally dominant.
SparseMatrix random_sparse(std::size_t rows, std::size_t cols, double density, std::uint64_t seed,
                           std::optional<std::size_t> rank = std::nullopt, bool diagonal = false);

enum class RecipeKind { d1_sparse, d2_sparse, split_square };

std::string to_string(RecipeKind k);
/// Accepts d1+sparse, d2+sparse, split-square.
RecipeKind parse_recipe(const std::string& name);

struct RecipeSpec {
    RecipeKind kind = RecipeKind::d1_sparse;
    std::size_t n = 100;
    std::size_t p = 40;
    double density = 0.05;
    ProfileSpec w1;
    std::uint64_t seed = 0;
    std::optional<std::size_t> c_rank;
    GenerateOptions options;
};

/// d1+sparse / d2+sparse: A = D1(n) or D2(n), C random sparse p x n.
/// split-square: random sparse diagonally dominant n x n M; A = first n - p
/// rows, C = last p rows.
TestProblem generate_recipe(const RecipeSpec& spec);

/// sigma_max / sigma_min over the nonzero singular values. Bidiagonal
/// patterns (square or with one extra column, or their transposes) use an
/// O(n^2) bidiagonal path; other matrices are densified, up to
/// max_dense_dim in the smaller dimension.
double condition_number(const SparseMatrix& m, std::size_t max_dense_dim = 3000);

/// Directory with A.mtx, C.mtx, b.mtx, d.mtx, xtrue.mtx, x1true.mtx,
/// x2true.mtx and meta.json.
void write_bundle(const std::filesystem::path& dir, const TestProblem& tp);
/// x1true/x2true are optional on read.
TestProblem read_bundle(const std::filesystem::path& dir);

}  // namespace lse
