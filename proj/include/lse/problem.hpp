#pragma once

#include <cstddef>

#include "lse/sparse_matrix.hpp"
#include "lse/vector.hpp"

namespace lse {

/// min ||A x - b|| over the minimizers of ||C x - d||.
struct LseProblem {
    SparseMatrix A;  ///< m x n
    SparseMatrix C;  ///< p x n
    Vector b;        ///< length m
    Vector d;        ///< length p

    std::size_t m() const noexcept { return A.rows(); }
    std::size_t n() const noexcept { return A.cols(); }
    std::size_t p() const noexcept { return C.rows(); }

    /// Throws DimensionError on any shape mismatch and InputError on non-finite data.
    void validate() const;
};

}  // namespace lse
