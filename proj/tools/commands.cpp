#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "lse/error.hpp"
#include "lse/glsqr.hpp"
#include "lse/kids.hpp"
#include "lse/matrix_market.hpp"
#include "lse/nsr.hpp"
#include "lse/reference.hpp"
#include "lse/testgen.hpp"

namespace lse::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Optimality diagnostics densify the problem; skip them above this many entries.
constexpr double desk_scale_entries = 4e6;

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool desk_scale(const LseProblem& pr)
{
    return static_cast<double>(pr.m() + pr.p()) * static_cast<double>(pr.n()) <= desk_scale_entries;
}

json diagnostics_json(const OptimalityDiagnostics& d)
{
    return {{"constraint_residual", d.constraint_residual},
            {"projected_stationarity", d.projected_stationarity},
            {"min_norm_component", d.min_norm_component},
            {"scaled_constraint", d.scaled_constraint()},
            {"scaled_stationarity", d.scaled_stationarity()},
            {"scaled_min_norm", d.scaled_min_norm()}};
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

void write_history(const fs::path& path, const std::vector<IterationRecord>& history)
{
    std::ofstream f(path);
    if (!f)
        throw InputError("cannot open '" + path.string() + "' for writing");
    f << "iter,error_or_residual,inner_iters,cum_matvecs\n";
    f << std::setprecision(17);
    for (const auto& h : history)
        f << h.iter << ',' << h.error_proxy << ',' << h.inner_iters << ',' << h.cum_matvecs << '\n';
}

void write_json(const fs::path& path, const json& j)
{
    std::ofstream f(path);
    if (!f)
        throw InputError("cannot open '" + path.string() + "' for writing");
    f << j.dump(2) << '\n';
}

struct SolveArgs {
    std::string a, c, b, d, xtrue, out;
    std::string method = "kids1";
    double tol = 1e-10;
    double inner_tol = 1e-12;
    std::string inner_mode = "lsqr";
    std::size_t max_outer = 0;
    bool reorth = false;
    bool parallel = false;
};

struct GenerateArgs {
    std::string gen = "d1+sparse";
    std::size_t n = 100;
    std::size_t p = 40;
    double density = 0.05;
    std::string w1 = "ones";
    std::uint64_t seed = 0;
    std::string out;
    std::string a, c;
    std::size_t c_rank = 0;
    bool allow_pinv = false;
    bool no_noise = false;
};

struct VerifyArgs {
    std::string bundle, x;
    double rtol = 1e-6;
    double opt_tol = -1.0;
};

int cmd_solve(const SolveArgs& args, std::ostream& out)
{
    const auto t_start = std::chrono::steady_clock::now();
    LseProblem pr{mm_read_matrix(args.a), mm_read_matrix(args.c), mm_read_vector(args.b), mm_read_vector(args.d)};
    pr.validate();
    std::optional<Vector> xtrue;
    if (!args.xtrue.empty()) {
        xtrue = mm_read_vector(args.xtrue);
        if (xtrue->size() != pr.n())
            throw DimensionError("xtrue has length " + std::to_string(xtrue->size()) + " but A has " +
                                 std::to_string(pr.n()) + " columns");
    }
    const double read_time = seconds_since(t_start);
    spdlog::info("read problem m={} n={} p={} nnz(A)={} nnz(C)={}", pr.m(), pr.n(), pr.p(), pr.A.nnz(), pr.C.nnz());

    InnerSolverConfig inner;
    inner.tol = args.inner_tol;
    inner.mode = args.inner_mode == "direct" ? InnerMode::direct_dense : InnerMode::iterative;
    inner.validate();

    json method_keys = json::object();
    SolveReport rep;
    const auto t_solve = std::chrono::steady_clock::now();
    const std::string& m = args.method;
    if (m == "kids1" || m == "kids2") {
        KidsOptions o;
        o.tol = args.tol;
        o.max_outer = args.max_outer;
        o.inner = inner;
        o.reorthogonalize = args.reorth;
        o.parallel = args.parallel;
        o.x_true = xtrue;
        rep = m == "kids1" ? kids1_solve(pr, o) : kids2_solve(pr, o);
        json comps = json::array();
        for (const auto& c : rep.components)
            comps.push_back({{"name", c.name},
                             {"termination", to_string(c.termination)},
                             {"iterations", c.iterations},
                             {"inner_iterations", c.inner_iterations},
                             {"matvecs", c.matvecs},
                             {"inner_nonconverged", c.inner_nonconverged}});
        method_keys = {{"components", comps}, {"x1_norm", norm2(rep.x1)}, {"x2_norm", norm2(rep.x2)}};
    } else if (m == "glsqr" || m == "nsrlsqr") {
        KrylovOptions o;
        o.tol = args.tol;
        o.max_outer = args.max_outer;
        o.inner = inner;
        o.reorthogonalize = args.reorth;
        o.reference = xtrue;
        if (m == "glsqr") {
            rep = glsqr_solve(pr.A, pr.C, pr.d, o);
            method_keys = {{"computes", "C_A^+ d"}};
        } else {
            rep = nsr_lsqr_solve(pr.A, pr.C, pr.b, o);
            method_keys = {{"computes", "A_N(C)^+ b"}};
        }
    } else {
        ReferenceOptions o;
        if (m == "ns") {
            o.require_consistent = false;
            rep.x = solve_nullspace(pr, o);
        } else if (m == "de") {
            rep.x = solve_direct_elim(pr, o);
        } else {
            AugmentedSolution s = solve_augmented_system(pr, o);
            rep.x = std::move(s.x);
            method_keys = {{"multiplier_norm", norm2(s.lambda)}, {"residual_norm", norm2(s.r)}};
        }
        rep.termination = Termination::direct;
    }
    const double solve_time = seconds_since(t_solve);

    // the single-part methods do not solve the full problem
    json optimality = nullptr;
    if (desk_scale(pr) && m != "glsqr" && m != "nsrlsqr")
        optimality = diagnostics_json(check_optimality(pr, rep.x));

    const auto t_write = std::chrono::steady_clock::now();
    const fs::path dir(args.out);
    ensure_dir(dir);
    mm_write(dir / "x.mtx", rep.x);
    write_history(dir / "history.csv", rep.history);

    json report;
    report["method"] = m;
    report["termination"] = to_string(rep.termination);
    report["converged"] = rep.success();
    report["iterations"] = rep.iterations;
    report["inner_iterations"] = rep.inner_iterations;
    report["matvecs"] = rep.matvecs;
    report["inner_nonconverged"] = rep.inner_nonconverged;
    report["final_residual"] = rep.final_residual;
    report["dimensions"] = {{"m", pr.m()}, {"n", pr.n()}, {"p", pr.p()}, {"nnz_A", pr.A.nnz()}, {"nnz_C", pr.C.nnz()}};
    report["settings"] = {{"tol", args.tol},
                          {"inner_tol", args.inner_tol},
                          {"inner_mode", args.inner_mode},
                          {"max_outer", args.max_outer},
                          {"reorth", args.reorth}};
    report["x_norm"] = norm2(rep.x);
    report["relative_error"] = xtrue ? json(relative_error(rep.x, *xtrue)) : json(nullptr);
    report["optimality"] = optimality;
    report[m] = method_keys;
    report["timings"] = {{"read_s", read_time}, {"solve_s", solve_time}, {"write_s", seconds_since(t_write)},
                         {"total_s", seconds_since(t_start)}};
    write_json(dir / "report.json", report);

    out << m << ": " << to_string(rep.termination) << " after " << rep.iterations << " iterations";
    if (xtrue)
        out << ", relative error " << std::setprecision(3) << std::scientific << relative_error(rep.x, *xtrue)
            << std::defaultfloat;
    out << '\n';
    if (!rep.success()) {
        spdlog::error("{} did not converge within {} outer iterations", m, rep.iterations);
        return exit_not_converged;
    }
    return exit_ok;
}

int cmd_generate(const GenerateArgs& args, std::ostream& out)
{
    const ProfileSpec w1 = ProfileSpec::parse(args.w1);
    GenerateOptions go;
    go.allow_pseudoinverse = args.allow_pinv;
    go.add_noise = !args.no_noise;
    TestProblem tp;
    if (args.gen == "from-files") {
        if (args.a.empty() || args.c.empty())
            throw InputError("--gen from-files needs --A and --C");
        const SparseMatrix a = mm_read_matrix(args.a);
        const SparseMatrix c = mm_read_matrix(args.c);
        if (a.cols() != c.cols())
            throw DimensionError("A has " + std::to_string(a.cols()) + " columns but C has " +
                                 std::to_string(c.cols()));
        go.recipe = "from-files";
        tp = generate(a, c, w1, args.seed, go);
    } else {
        RecipeSpec spec;
        spec.kind = parse_recipe(args.gen);
        spec.n = args.n;
        spec.p = args.p;
        spec.density = args.density;
        spec.w1 = w1;
        spec.seed = args.seed;
        if (args.c_rank > 0)
            spec.c_rank = args.c_rank;
        spec.options = go;
        tp = generate_recipe(spec);
    }
    write_bundle(args.out, tp);
    out << "wrote " << tp.generator_id << " m=" << tp.problem.m() << " n=" << tp.problem.n()
        << " p=" << tp.problem.p() << " to " << args.out << '\n';
    return exit_ok;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out)
{
    const TestProblem tp = read_bundle(args.bundle);
    const Vector x = mm_read_vector(args.x);
    if (x.size() != tp.problem.n())
        throw DimensionError("x has length " + std::to_string(x.size()) + " but the bundle has n = " +
                             std::to_string(tp.problem.n()));
    const double opt_tol = args.opt_tol >= 0 ? args.opt_tol : args.rtol;

    struct Row {
        std::string name;
        double value;
        double limit;
    };
    std::vector<Row> rows{{"relative_error", relative_error(x, tp.x_true), args.rtol}};
    if (desk_scale(tp.problem)) {
        const OptimalityDiagnostics d = check_optimality(tp.problem, x);
        rows.push_back({"scaled_constraint", d.scaled_constraint(), opt_tol});
        rows.push_back({"scaled_stationarity", d.scaled_stationarity(), opt_tol});
        rows.push_back({"scaled_min_norm", d.scaled_min_norm(), opt_tol});
    } else {
        spdlog::info("problem too large for dense optimality diagnostics; checking the error only");
    }

    bool ok = true;
    char line[128];
    std::snprintf(line, sizeof line, "%-22s %12s %12s  %s\n", "quantity", "value", "limit", "status");
    out << line;
    for (const auto& r : rows) {
        const bool pass = r.value <= r.limit;
        ok = ok && pass;
        std::snprintf(line, sizeof line, "%-22s %12.4e %12.4e  %s\n", r.name.c_str(), r.value, r.limit,
                      pass ? "ok" : "FAIL");
        out << line;
    }
    out << (ok ? "verified" : "verification failed") << '\n';
    return ok ? exit_ok : exit_verify_failed;
}

int cmd_cond(const std::string& path, std::ostream& out)
{
    const double k = condition_number(mm_read_matrix(path));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g\n", k);
    out << buf;
    return exit_ok;
}

}  // namespace

void configure_logging()
{
    auto logger = spdlog::stderr_color_mt("lse");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::err);
    if (const char* env = std::getenv("LSE_LOG")) {
        const std::string v(env);
        if (v == "debug")
            spdlog::set_level(spdlog::level::debug);
        else if (v == "info")
            spdlog::set_level(spdlog::level::info);
        else if (v != "error")
            spdlog::warn("ignoring LSE_LOG={} (expected error, info or debug)", v);
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Least squares with linear equality constraints"};
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Solve an LSE problem given as Matrix Market files");
    solve->add_option("--A", sa.a, "m x n matrix")->required();
    solve->add_option("--C", sa.c, "p x n constraint matrix")->required();
    solve->add_option("--b", sa.b, "length-m right-hand side")->required();
    solve->add_option("--d", sa.d, "length-p constraint right-hand side")->required();
    solve->add_option("--method", sa.method)
        ->check(CLI::IsMember({"kids1", "kids2", "glsqr", "nsrlsqr", "ns", "de", "aug"}))
        ->capture_default_str();
    solve->add_option("--tol", sa.tol, "outer tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    solve->add_option("--inner-tol", sa.inner_tol)->check(CLI::PositiveNumber)->capture_default_str();
    solve->add_option("--inner-mode", sa.inner_mode)
        ->check(CLI::IsMember({"lsqr", "direct"}))
        ->capture_default_str();
    solve->add_option("--max-outer", sa.max_outer, "0 picks the solver default")->capture_default_str();
    solve->add_option("--xtrue", sa.xtrue, "known solution, turns the history into an error curve");
    solve->add_flag("--reorth", sa.reorth, "full reorthogonalization");
    solve->add_flag("--parallel", sa.parallel, "kids1: run both parts concurrently");
    solve->add_option("--out", sa.out, "output directory")->required();

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "Write a test problem bundle with known solution");
    gen->add_option("--gen", ga.gen)
        ->check(CLI::IsMember({"d1+sparse", "d2+sparse", "split-square", "from-files"}))
        ->capture_default_str();
    gen->add_option("--n", ga.n)->capture_default_str();
    gen->add_option("--p", ga.p)->capture_default_str();
    gen->add_option("--density", ga.density)->capture_default_str();
    gen->add_option("--w1", ga.w1, "ones, ramp, quad, sincos or sincos-minus")->capture_default_str();
    gen->add_option("--seed", ga.seed)->capture_default_str();
    gen->add_option("--A", ga.a, "from-files: matrix A");
    gen->add_option("--C", ga.c, "from-files: matrix C");
    gen->add_option("--c-rank", ga.c_rank, "row rank of the random C (0 = full)");
    gen->add_flag("--allow-pinv", ga.allow_pinv, "allow N(C) = {0} or N(A) and N(C) intersecting");
    gen->add_flag("--no-noise", ga.no_noise, "consistent data (z1 = z2 = 0)");
    gen->add_option("--out", ga.out, "bundle directory")->required();

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Compare a solution with a bundle's known solution");
    verify->add_option("--bundle", va.bundle)->required();
    verify->add_option("--x", va.x)->required();
    verify->add_option("--rtol", va.rtol)->capture_default_str();
    verify->add_option("--opt-tol", va.opt_tol, "limit for scaled optimality measures (default rtol)");

    std::string cond_path;
    auto* cond = app.add_subcommand("cond", "Print the condition number of a matrix");
    cond->add_option("--matrix", cond_path)->required();

    std::vector<std::string> argv_store{"lse"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store)
        argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_bad_input;
    }

    try {
        if (*solve)
            return cmd_solve(sa, out);
        if (*gen)
            return cmd_generate(ga, out);
        if (*verify)
            return cmd_verify(va, out);
        return cmd_cond(cond_path, out);
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << '\n';
        return exit_dimension;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_bad_input;
    }
}

}  // namespace lse::cli
