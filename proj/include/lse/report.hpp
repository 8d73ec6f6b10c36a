#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lse/lsqr.hpp"
#include "lse/vector.hpp"

namespace lse {

enum class Termination {
    converged,            ///< stopping rule satisfied
    exact_breakdown,      ///< bidiagonalization ran out of directions; iterate is exact
    immediate_breakdown,  ///< first direction vanished; solution is zero
    zero_rhs,
    max_iterations,
    direct,               ///< produced by a factorization-based solver
    /// The next basis vector was dominated by rounding or inner-solve error,
    /// so the process stopped; the iterate is as accurate as that noise allows.
    noise_limited,
};

std::string to_string(Termination t);
/// Everything except max_iterations counts as success.
bool is_success(Termination t);

struct IterationRecord {
    std::size_t iter = 0;
    /// Relative error against a known solution when one was supplied,
    /// otherwise the normalized residual quantity.
    double error_proxy = 0.0;
    double residual = 0.0;
    std::size_t inner_iters = 0;
    std::size_t cum_matvecs = 0;
};

/// Summary of one sub-solve inside a composite solver.
struct ComponentReport {
    std::string name;
    Termination termination = Termination::max_iterations;
    std::size_t iterations = 0;
    std::size_t inner_iterations = 0;
    std::size_t matvecs = 0;
    std::size_t inner_nonconverged = 0;
};

struct SolveReport {
    Vector x;
    Vector x1;  ///< component from the constraint part
    Vector x2;  ///< component confined to N(C)
    std::vector<IterationRecord> history;
    Termination termination = Termination::max_iterations;
    std::size_t iterations = 0;
    std::size_t inner_iterations = 0;
    std::size_t matvecs = 0;
    std::size_t inner_nonconverged = 0;
    double final_residual = 0.0;  ///< last normalized residual quantity
    double wall_time = 0.0;       ///< seconds
    std::vector<ComponentReport> components;

    bool success() const { return is_success(termination); }
};

/// Called after every outer iteration with the iteration number and iterate.
using IterateObserver = std::function<void(std::size_t iter, std::span<const double> x)>;

/// Settings shared by the two Krylov solvers.
struct KrylovOptions {
    double tol = 1e-10;
    /// 0 means a default derived from the problem dimensions.
    std::size_t max_outer = 0;
    InnerSolverConfig inner;
    bool reorthogonalize = false;
    /// Restricted solver only: project each new basis vector onto N(C) twice.
    bool reproject = false;
    /// Retain the generated bases (needed only for diagnostics).
    bool keep_bases = false;
    /// When set, history records the relative error against this vector.
    std::optional<Vector> reference;
    IterateObserver observer;
};

}  // namespace lse
