#include "lse/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace lse::kernels {

namespace {

// sqrt of the plain sum of squares unless it overflowed or may have lost
// digits to underflow; then rescale by the largest magnitude.
double finish_nrm2(std::span<const double> a, double sumsq)
{
    if (std::isfinite(sumsq) && sumsq > 1e-280)
        return std::sqrt(sumsq);
    double amax = 0.0;
    for (double v : a)
        amax = std::max(amax, std::abs(v));
    if (amax == 0.0 || !std::isfinite(amax))
        return amax;
    double s = 0.0;
    for (double v : a) {
        const double t = v / amax;
        s += t * t;
    }
    return amax * std::sqrt(s);
}

}  // namespace

namespace serial {

void csr_matvec(const CsrView& m, std::span<const double> x, std::span<double> y)
{
    for (std::size_t i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            s += m.values[k] * x[m.col_idx[k]];
        }
        y[i] = s;
    }
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double nrm2(std::span<const double> a) { return finish_nrm2(a, dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] += alpha * x[i];
    }
}

void scal(double alpha, std::span<double> x)
{
    for (double& v : x) {
        v *= alpha;
    }
}

void gemm(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
          std::span<const double> b, std::span<double> c)
{
    for (std::size_t j = 0; j < n; ++j) {
        double* cj = c.data() + j * m;
        for (std::size_t i = 0; i < m; ++i) {
            cj[i] = 0.0;
        }
        for (std::size_t l = 0; l < k; ++l) {
            const double blj = b[l + j * k];
            if (blj == 0.0) {
                continue;
            }
            const double* al = a.data() + l * m;
            for (std::size_t i = 0; i < m; ++i) {
                cj[i] += al[i] * blj;
            }
        }
    }
}

}  // namespace serial

namespace parallel {

void csr_matvec(const CsrView& m, std::span<const double> x, std::span<double> y)
{
    const auto rows = static_cast<std::ptrdiff_t>(m.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        double s = 0.0;
        for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            s += m.values[k] * x[m.col_idx[k]];
        }
        y[i] = s;
    }
}

double dot(std::span<const double> a, std::span<const double> b)
{
    std::vector<double> partial(static_cast<std::size_t>(omp_get_max_threads()), 0.0);
    const std::size_t n = a.size();
#pragma omp parallel
    {
        const auto nt = static_cast<std::size_t>(omp_get_num_threads());
        const auto t = static_cast<std::size_t>(omp_get_thread_num());
        const std::size_t lo = n * t / nt;
        const std::size_t hi = n * (t + 1) / nt;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            s += a[i] * b[i];
        }
        partial[t] = s;
    }
    double s = 0.0;
    for (double p : partial) {
        s += p;
    }
    return s;
}

double nrm2(std::span<const double> a) { return finish_nrm2(a, dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
    const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

void scal(double alpha, std::span<double> x)
{
    const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        x[i] *= alpha;
    }
}

void gemm(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
          std::span<const double> b, std::span<double> c)
{
    const auto cols = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < cols; ++j) {
        double* cj = c.data() + j * m;
        for (std::size_t i = 0; i < m; ++i) {
            cj[i] = 0.0;
        }
        for (std::size_t l = 0; l < k; ++l) {
            const double blj = b[l + j * k];
            if (blj == 0.0) {
                continue;
            }
            const double* al = a.data() + l * m;
            for (std::size_t i = 0; i < m; ++i) {
                cj[i] += al[i] * blj;
            }
        }
    }
}

}  // namespace parallel

void csr_matvec(const CsrView& m, std::span<const double> x, std::span<double> y)
{
    if (m.values.size() + m.rows >= kParallelThreshold) {
        parallel::csr_matvec(m, x, y);
    } else {
        serial::csr_matvec(m, x, y);
    }
}

double dot(std::span<const double> a, std::span<const double> b)
{
    return a.size() >= kParallelThreshold ? parallel::dot(a, b) : serial::dot(a, b);
}

double nrm2(std::span<const double> a)
{
    return a.size() >= kParallelThreshold ? parallel::nrm2(a) : serial::nrm2(a);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
    if (x.size() >= kParallelThreshold) {
        parallel::axpy(alpha, x, y);
    } else {
        serial::axpy(alpha, x, y);
    }
}

void scal(double alpha, std::span<double> x)
{
    if (x.size() >= kParallelThreshold) {
        parallel::scal(alpha, x);
    } else {
        serial::scal(alpha, x);
    }
}

void gemm(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
          std::span<const double> b, std::span<double> c)
{
    if (m * n * k >= 64 * kParallelThreshold) {
        parallel::gemm(m, n, k, a, b, c);
    } else {
        serial::gemm(m, n, k, a, b, c);
    }
}

}  // namespace lse::kernels
