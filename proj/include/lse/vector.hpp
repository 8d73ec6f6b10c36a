#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lse/kernels.hpp"

namespace lse {

using Vector = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) { return kernels::dot(a, b); }
inline double norm2(std::span<const double> a) { return kernels::nrm2(a); }

/// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) { kernels::axpy(alpha, x, y); }
inline void scale(double alpha, std::span<double> x) { kernels::scal(alpha, x); }

Vector add(std::span<const double> a, std::span<const double> b);
Vector subtract(std::span<const double> a, std::span<const double> b);

/// ||a - b|| / ||b||, or ||a|| when b is zero.
double relative_error(std::span<const double> a, std::span<const double> b);

bool all_finite(std::span<const double> a);

}  // namespace lse
