#pragma once

#include <filesystem>
#include <variant>

#include "lse/sparse_matrix.hpp"
#include "lse/vector.hpp"

namespace lse {

/// Matrices are stored as `coordinate real general`, vectors as
/// `array real general` with a single column.
using MatrixMarketObject = std::variant<SparseMatrix, Vector>;

/// Coordinate files yield a SparseMatrix; array files with one column yield
/// a Vector, wider array files a SparseMatrix.
MatrixMarketObject mm_read(const std::filesystem::path& path);
SparseMatrix mm_read_matrix(const std::filesystem::path& path);
/// Accepts an n x 1 array or coordinate file.
Vector mm_read_vector(const std::filesystem::path& path);

void mm_write(const std::filesystem::path& path, const SparseMatrix& m);
void mm_write(const std::filesystem::path& path, std::span<const double> v);

}  // namespace lse
