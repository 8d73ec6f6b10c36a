#include "lse/testgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "lse/dense_linalg.hpp"
#include "lse/error.hpp"

namespace lse {

SparseMatrix build_d1(std::size_t n)
{
    if (n < 3)
        throw InputError("D1 needs n >= 3, got " + std::to_string(n));
    std::vector<Triplet> t;
    t.reserve(2 * (n - 1));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        t.push_back({i, i, 1.0});
        t.push_back({i, i + 1, -1.0});
    }
    return SparseMatrix::from_triplets(n - 1, n, std::move(t));
}

SparseMatrix build_d2(std::size_t n)
{
    if (n < 3)
        throw InputError("D2 needs n >= 3, got " + std::to_string(n));
    std::vector<Triplet> t;
    t.reserve(3 * (n - 2));
    for (std::size_t i = 0; i + 2 < n; ++i) {
        t.push_back({i, i, -1.0});
        t.push_back({i, i + 1, 2.0});
        t.push_back({i, i + 2, -1.0});
    }
    return SparseMatrix::from_triplets(n - 2, n, std::move(t));
}

ProfileSpec ProfileSpec::standard(ProfileKind kind)
{
    ProfileSpec s;
    s.kind = kind;
    switch (kind) {
    case ProfileKind::ones:
    case ProfileKind::ramp:
    case ProfileKind::custom:
        s.t0 = 0.0;
        s.t1 = 1.0;
        break;
    case ProfileKind::quad:
        s.t0 = -1.0;
        s.t1 = 1.0;
        break;
    case ProfileKind::sincos:
    case ProfileKind::sincos_minus:
        s.t0 = -std::numbers::pi;
        s.t1 = std::numbers::pi;
        break;
    }
    return s;
}

ProfileSpec ProfileSpec::custom_samples(Vector samples)
{
    ProfileSpec s = standard(ProfileKind::custom);
    s.samples = std::move(samples);
    return s;
}

ProfileSpec ProfileSpec::parse(const std::string& name)
{
    if (name == "ones")
        return standard(ProfileKind::ones);
    if (name == "ramp")
        return standard(ProfileKind::ramp);
    if (name == "quad")
        return standard(ProfileKind::quad);
    if (name == "sincos")
        return standard(ProfileKind::sincos);
    if (name == "sincos-minus")
        return standard(ProfileKind::sincos_minus);
    throw InputError("unknown profile '" + name + "' (expected ones, ramp, quad, sincos, sincos-minus)");
}

Vector ProfileSpec::evaluate(std::size_t n) const
{
    if (kind == ProfileKind::custom) {
        if (samples.size() != n)
            throw DimensionError("custom profile has " + std::to_string(samples.size()) + " samples, need " +
                                 std::to_string(n));
        return samples;
    }
    if (n < 2)
        throw InputError("profiles need at least 2 grid points");
    Vector w(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n - 1);
        switch (kind) {
        case ProfileKind::ones:
            w[k] = 1.0;
            break;
        case ProfileKind::ramp:
            w[k] = t;
            break;
        case ProfileKind::quad:
            w[k] = t * t;
            break;
        case ProfileKind::sincos:
            w[k] = std::sin(2.0 * t) + 3.0 * std::cos(t);
            break;
        case ProfileKind::sincos_minus:
            w[k] = std::sin(2.0 * t) - 3.0 * std::cos(t);
            break;
        case ProfileKind::custom:
            break;
        }
    }
    return w;
}

std::string ProfileSpec::id() const
{
    switch (kind) {
    case ProfileKind::ones:
        return "ones";
    case ProfileKind::ramp:
        return "ramp";
    case ProfileKind::quad:
        return "quad";
    case ProfileKind::sincos:
        return "sincos";
    case ProfileKind::sincos_minus:
        return "sincos-minus";
    case ProfileKind::custom:
        return "custom";
    }
    return "unknown";
}

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32), stream};
    return std::mt19937_64(seq);
}

Vector randn(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    Vector v(n);
    for (double& x : v)
        x = dist(rng);
    return v;
}

}  // namespace

TestProblem generate(const SparseMatrix& a, const SparseMatrix& c, const ProfileSpec& w1spec, std::uint64_t seed,
                     const GenerateOptions& opts)
{
    if (a.cols() != c.cols())
        throw DimensionError("A has " + std::to_string(a.cols()) + " columns but C has " + std::to_string(c.cols()));
    const std::size_t m = a.rows(), n = a.cols(), p = c.rows();
    const DenseMatrix ad = a.to_dense();
    const DenseMatrix cd = c.to_dense();

    const DenseMatrix basis = null_basis(cd);
    const std::size_t t = basis.cols();
    if (t == 0 && !opts.allow_pseudoinverse)
        throw InputError("N(C) = {0}: the A-part of the solution is trivial; enable the pseudoinverse variant to "
                         "generate anyway");
    const DenseMatrix ab = ad * basis;
    if (t > 0 && numerical_rank(ab) < t && !opts.allow_pseudoinverse)
        throw InputError("B^T G B is singular because N(A) and N(C) intersect nontrivially; enable the "
                         "pseudoinverse variant");

    // w1 restricted to R(G) = N([A; C])^perp
    Vector w1 = w1spec.evaluate(n);
    const DenseMatrix ng = null_basis(vstack(ad, cd));
    if (ng.cols())
        w1 = project_out(ng, w1);

    // B (B^T G B)^+ B^T G w1 = B (A B)^+ A w1, since C B = 0.
    Vector x1 = w1;
    DenseMatrix ab_pinv;
    if (t > 0) {
        ab_pinv = dense_pinv(ab);
        axpy(-1.0, matvec(basis, matvec(ab_pinv, matvec(ad, w1))), x1);
    }

    std::mt19937_64 rng1 = make_rng(seed, 1);
    std::mt19937_64 rng2 = make_rng(seed, 2);

    Vector d = matvec(cd, x1);
    if (opts.add_noise && p > 0) {
        const DenseMatrix rc = range_basis(cd);
        Vector z1 = randn(p, rng1);
        if (rc.cols())
            z1 = project_out(rc, z1);
        axpy(1.0, z1, d);
    }

    Vector x2(n, 0.0);
    Vector b(m, 0.0);
    if (t > 0) {
        Vector w2(t);
        for (std::size_t j = 0; j < t; ++j)
            w2[j] = m > 0 ? ab(0, j) : 0.0;
        const DenseMatrix nab = null_basis(ab);
        if (nab.cols())
            w2 = project_out(nab, w2);
        x2 = matvec(basis, w2);
        b = matvec(ad, x2);
    }
    if (opts.add_noise && m > 0) {
        Vector z2 = randn(m, rng2);
        if (t > 0) {
            const DenseMatrix rab = range_basis(ab);
            if (rab.cols())
                z2 = project_out(rab, z2);
        }
        axpy(1.0, z2, b);
    }

    TestProblem tp;
    tp.problem = LseProblem{a, c, std::move(b), std::move(d)};
    tp.x1_true = std::move(x1);
    tp.x2_true = std::move(x2);
    tp.x_true = add(tp.x1_true, tp.x2_true);
    tp.seed = seed;
    tp.generator_id = opts.recipe + "/w1=" + w1spec.id() + "/mt19937_64";
    if (opts.allow_pseudoinverse)
        tp.generator_id += "/pinv";
    if (!opts.add_noise)
        tp.generator_id += "/consistent";
    return tp;
}

SparseMatrix random_sparse(std::size_t rows, std::size_t cols, double density, std::uint64_t seed,
                           std::optional<std::size_t> rank, bool diagonal)
{
    if (cols == 0)
        throw InputError("random_sparse needs at least one column");
    if (!(density > 0.0 && density <= 1.0))
        throw InputError("density must lie in (0, 1]");
    std::mt19937_64 rng = make_rng(seed, 3);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick_col(0, cols - 1);

    const std::size_t independent = std::min(rank.value_or(rows), rows);
    if (rank && independent == 0 && rows > 0)
        throw InputError("rank must be at least 1");
    const auto per_row = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(density * static_cast<double>(cols))));

    std::vector<std::vector<std::pair<std::size_t, double>>> row_entries(rows);
    for (std::size_t i = 0; i < independent; ++i) {
        std::set<std::size_t> chosen;
        while (chosen.size() < std::min(per_row, cols))
            chosen.insert(pick_col(rng));
        for (std::size_t j : chosen)
            row_entries[i].emplace_back(j, normal(rng));
    }
    std::uniform_int_distribution<std::size_t> pick_row(0, independent ? independent - 1 : 0);
    for (std::size_t i = independent; i < rows; ++i) {
        const std::size_t r1 = pick_row(rng), r2 = pick_row(rng);
        const double c1 = normal(rng), c2 = normal(rng);
        std::vector<std::pair<std::size_t, double>> combo;
        for (auto [j, v] : row_entries[r1])
            combo.emplace_back(j, c1 * v);
        for (auto [j, v] : row_entries[r2])
            combo.emplace_back(j, c2 * v);
        row_entries[i] = std::move(combo);
    }

    std::vector<Triplet> t;
    for (std::size_t i = 0; i < rows; ++i)
        for (auto [j, v] : row_entries[i])
            t.push_back({i, j, v});
    SparseMatrix out = SparseMatrix::from_triplets(rows, cols, std::move(t));
    if (!diagonal)
        return out;

    std::vector<Triplet> td = out.triplets();
    const std::size_t k = std::min(rows, cols);
    std::vector<double> abs_sum(rows, 0.0);
    for (const Triplet& e : td)
        if (e.row != e.col)
            abs_sum[e.row] += std::abs(e.value);
    std::vector<Triplet> kept;
    kept.reserve(td.size() + k);
    for (const Triplet& e : td)
        if (e.row != e.col || e.row >= k)
            kept.push_back(e);
    for (std::size_t i = 0; i < k; ++i)
        kept.push_back({i, i, abs_sum[i] + 1.0});
    return SparseMatrix::from_triplets(rows, cols, std::move(kept));
}

std::string to_string(RecipeKind k)
{
    switch (k) {
    case RecipeKind::d1_sparse:
        return "d1+sparse";
    case RecipeKind::d2_sparse:
        return "d2+sparse";
    case RecipeKind::split_square:
        return "split-square";
    }
    return "unknown";
}

RecipeKind parse_recipe(const std::string& name)
{
    if (name == "d1+sparse")
        return RecipeKind::d1_sparse;
    if (name == "d2+sparse")
        return RecipeKind::d2_sparse;
    if (name == "split-square")
        return RecipeKind::split_square;
    throw InputError("unknown generator '" + name + "' (expected d1+sparse, d2+sparse, split-square, from-files)");
}

TestProblem generate_recipe(const RecipeSpec& spec)
{
    if (spec.n < 3)
        throw InputError("n must be at least 3");
    SparseMatrix a, c;
    switch (spec.kind) {
    case RecipeKind::d1_sparse:
    case RecipeKind::d2_sparse:
        if (spec.p == 0)
            throw InputError("p must be positive");
        a = spec.kind == RecipeKind::d1_sparse ? build_d1(spec.n) : build_d2(spec.n);
        c = random_sparse(spec.p, spec.n, spec.density, spec.seed, spec.c_rank);
        break;
    case RecipeKind::split_square: {
        if (spec.p == 0 || spec.p >= spec.n)
            throw InputError("split-square needs 0 < p < n");
        SparseMatrix msq = random_sparse(spec.n, spec.n, spec.density, spec.seed, std::nullopt, true);
        a = msq.row_block(0, spec.n - spec.p);
        c = msq.row_block(spec.n - spec.p, spec.p);
        break;
    }
    }
    GenerateOptions opts = spec.options;
    opts.recipe = to_string(spec.kind);
    return generate(a, c, spec.w1, spec.seed, opts);
}

namespace {

// Upper bidiagonal pattern with cols == rows or cols == rows + 1.
bool upper_bidiagonal(const SparseMatrix& m)
{
    if (!(m.cols() == m.rows() || m.cols() == m.rows() + 1))
        return false;
    const auto rp = m.row_ptr();
    const auto ci = m.col_idx();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
            if (ci[k] != i && ci[k] != i + 1)
                return false;
    return true;
}

Vector bidiagonal_values(const SparseMatrix& m)
{
    const std::size_t k = m.rows();
    Vector diag(k, 0.0);
    Vector super(m.cols() == k ? (k ? k - 1 : 0) : k, 0.0);
    const auto rp = m.row_ptr();
    const auto ci = m.col_idx();
    const auto v = m.values();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t e = rp[i]; e < rp[i + 1]; ++e)
            (ci[e] == i ? diag[i] : super[i]) = v[e];
    return bidiagonal_singular_values(diag, super);
}

}  // namespace

double condition_number(const SparseMatrix& m, std::size_t max_dense_dim)
{
    Vector sv;
    if (upper_bidiagonal(m)) {
        sv = bidiagonal_values(m);
    } else if (SparseMatrix mt = m.transpose(); upper_bidiagonal(mt)) {
        sv = bidiagonal_values(mt);
    } else {
        if (std::min(m.rows(), m.cols()) > max_dense_dim)
            throw InputError("matrix is too large for the dense SVD path (" + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ")");
        sv = singular_values(m.to_dense());
    }
    if (sv.empty() || sv.front() == 0.0)
        throw InputError("condition number of a zero matrix is undefined");
    const double smax = *std::max_element(sv.begin(), sv.end());
    const double cutoff = static_cast<double>(std::max(m.rows(), m.cols())) *
                          std::numeric_limits<double>::epsilon() * smax;
    double smin = smax;
    for (double s : sv)
        if (s > cutoff)
            smin = std::min(smin, s);
    return smax / smin;
}

}  // namespace lse
