#pragma once

// Vector and CSR kernels. Each kernel has a serial reference version and an
// OpenMP version; the unqualified entry points pick one by problem size.
//
// Parallel reductions accumulate one partial sum per thread over a static
// partition and combine them in thread order, so results are reproducible
// for a fixed team size.

#include <cstddef>
#include <span>

namespace lse::kernels {

/// Borrowed view of compressed-row storage.
struct CsrView {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::span<const std::size_t> row_ptr;
    std::span<const std::size_t> col_idx;
    std::span<const double> values;
};

namespace serial {
void csr_matvec(const CsrView& m, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
double nrm2(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scal(double alpha, std::span<double> x);
void gemm(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
          std::span<const double> b, std::span<double> c);
}  // namespace serial

namespace parallel {
void csr_matvec(const CsrView& m, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
double nrm2(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scal(double alpha, std::span<double> x);
void gemm(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
          std::span<const double> b, std::span<double> c);
}  // namespace parallel

/// Length (or nnz, or flop count) above which the dispatching kernels go parallel.
inline constexpr std::size_t kParallelThreshold = 32768;

void csr_matvec(const CsrView& m, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
double nrm2(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scal(double alpha, std::span<double> x);

/// C = A * B for column-major A (m x k), B (k x n), C (m x n).
void gemm(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
          std::span<const double> b, std::span<double> c);

}  // namespace lse::kernels
