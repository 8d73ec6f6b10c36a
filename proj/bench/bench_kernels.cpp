// Times the serial and OpenMP kernels on the same data and checks that they agree.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include <omp.h>

#include "CLI11.hpp"
#include "lse/kernels.hpp"
#include "lse/testgen.hpp"

namespace {

template <class F>
double best_of(int reps, F&& f)
{
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

double rel_gap(std::span<const double> a, std::span<const double> b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(a[i]));
    }
    return den > 0 ? num / den : num;
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); }

bool report(const char* name, double ts, double tp, double gap)
{
    const bool ok = gap <= 1e-12;
    std::printf("%-10s serial %10.3e s  parallel %10.3e s  speedup %6.2f  gap %.1e %s\n", name, ts, tp, ts / tp, gap,
                ok ? "" : "MISMATCH");
    return ok;
}

}  // namespace

int main(int argc, char** argv)
{
    std::size_t rows = 20000, cols = 15000, gemm_dim = 200;
    double density = 0.001;
    int reps = 5;
    CLI::App app{"serial vs OpenMP kernel timings"};
    app.add_option("--rows", rows)->capture_default_str();
    app.add_option("--cols", cols)->capture_default_str();
    app.add_option("--density", density)->capture_default_str();
    app.add_option("--gemm", gemm_dim, "square gemm size")->capture_default_str();
    app.add_option("--reps", reps)->check(CLI::PositiveNumber)->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    namespace k = lse::kernels;
    const lse::SparseMatrix a = lse::random_sparse(rows, cols, density, 1);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    std::vector<double> x(cols), y1(rows), y2(rows), u(rows), v(rows);
    for (auto& e : x)
        e = nd(rng);
    for (auto& e : u)
        e = nd(rng);
    for (auto& e : v)
        e = nd(rng);

    std::printf("threads %d, A %zu x %zu, nnz %zu, reps %d\n", omp_get_max_threads(), rows, cols, a.nnz(), reps);
    bool ok = true;

    const auto view = a.view();
    double ts = best_of(reps, [&] { k::serial::csr_matvec(view, x, y1); });
    double tp = best_of(reps, [&] { k::parallel::csr_matvec(view, x, y2); });
    ok &= report("spmv", ts, tp, rel_gap(y1, y2));

    double d1 = 0.0, d2 = 0.0;
    ts = best_of(reps, [&] { d1 = k::serial::dot(u, v); });
    tp = best_of(reps, [&] { d2 = k::parallel::dot(u, v); });
    ok &= report("dot", ts, tp, rel_gap(d1, d2));

    ts = best_of(reps, [&] { d1 = k::serial::nrm2(u); });
    tp = best_of(reps, [&] { d2 = k::parallel::nrm2(u); });
    ok &= report("nrm2", ts, tp, rel_gap(d1, d2));

    std::vector<double> w1 = v, w2 = v;
    ts = best_of(reps, [&] { k::serial::axpy(1e-3, u, w1); });
    tp = best_of(reps, [&] { k::parallel::axpy(1e-3, u, w2); });
    ok &= report("axpy", ts, tp, rel_gap(w1, w2));

    const std::size_t g = gemm_dim;
    std::vector<double> ga(g * g), gb(g * g), gc1(g * g), gc2(g * g);
    for (auto& e : ga)
        e = nd(rng);
    for (auto& e : gb)
        e = nd(rng);
    ts = best_of(reps, [&] { k::serial::gemm(g, g, g, ga, gb, gc1); });
    tp = best_of(reps, [&] { k::parallel::gemm(g, g, g, ga, gb, gc2); });
    ok &= report("gemm", ts, tp, rel_gap(gc1, gc2));

    return ok ? 0 : 1;
}
