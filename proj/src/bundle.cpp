#include <fstream>

#include "json.hpp"

#include "lse/error.hpp"
#include "lse/matrix_market.hpp"
#include "lse/testgen.hpp"

namespace lse {

void write_bundle(const std::filesystem::path& dir, const TestProblem& tp)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw InputError("cannot create bundle directory " + dir.string() + ": " + ec.message());
    const LseProblem& pr = tp.problem;
    mm_write(dir / "A.mtx", pr.A);
    mm_write(dir / "C.mtx", pr.C);
    mm_write(dir / "b.mtx", pr.b);
    mm_write(dir / "d.mtx", pr.d);
    mm_write(dir / "xtrue.mtx", tp.x_true);
    mm_write(dir / "x1true.mtx", tp.x1_true);
    mm_write(dir / "x2true.mtx", tp.x2_true);

    nlohmann::ordered_json meta;
    meta["seed"] = tp.seed;
    meta["generator_id"] = tp.generator_id;
    meta["m"] = pr.m();
    meta["n"] = pr.n();
    meta["p"] = pr.p();
    meta["nnz_A"] = pr.A.nnz();
    meta["nnz_C"] = pr.C.nnz();
    std::ofstream out(dir / "meta.json");
    if (!out)
        throw InputError("cannot write " + (dir / "meta.json").string());
    out << meta.dump(2) << '\n';
}

TestProblem read_bundle(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir))
        throw InputError("bundle directory " + dir.string() + " does not exist");
    TestProblem tp;
    tp.problem.A = mm_read_matrix(dir / "A.mtx");
    tp.problem.C = mm_read_matrix(dir / "C.mtx");
    tp.problem.b = mm_read_vector(dir / "b.mtx");
    tp.problem.d = mm_read_vector(dir / "d.mtx");
    tp.x_true = mm_read_vector(dir / "xtrue.mtx");
    if (std::filesystem::exists(dir / "x1true.mtx"))
        tp.x1_true = mm_read_vector(dir / "x1true.mtx");
    if (std::filesystem::exists(dir / "x2true.mtx"))
        tp.x2_true = mm_read_vector(dir / "x2true.mtx");
    tp.problem.validate();
    if (tp.x_true.size() != tp.problem.n())
        throw DimensionError("xtrue has length " + std::to_string(tp.x_true.size()) + ", expected " +
                             std::to_string(tp.problem.n()));

    std::ifstream in(dir / "meta.json");
    if (in) {
        try {
            const auto meta = nlohmann::json::parse(in);
            tp.seed = meta.value("seed", std::uint64_t{0});
            tp.generator_id = meta.value("generator_id", std::string());
        } catch (const nlohmann::json::exception& e) {
            throw InputError("malformed meta.json in " + dir.string() + ": " + e.what());
        }
    }
    return tp;
}

}  // namespace lse
