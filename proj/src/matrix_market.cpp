#include "lse/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "lse/error.hpp"

namespace lse {

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

struct Header {
    bool coordinate = true;
};

Header read_header(std::istream& in, const std::string& where)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw InputError(where + ": empty file");
    }
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (tag != "%%MatrixMarket") {
        throw InputError(where + ": missing %%MatrixMarket banner");
    }
    if (lower(object) != "matrix") {
        throw InputError(where + ": unsupported object '" + object + "'");
    }
    const std::string fmt = lower(format);
    if (fmt != "coordinate" && fmt != "array") {
        throw InputError(where + ": unsupported format '" + format + "'");
    }
    if (lower(field) != "real") {
        throw InputError(where + ": only real fields are supported, got '" + field + "'");
    }
    if (lower(symmetry) != "general") {
        throw InputError(where + ": only general symmetry is supported, got '" + symmetry + "'");
    }
    return {fmt == "coordinate"};
}

/// Next non-comment, non-blank line.
bool next_data_line(std::istream& in, std::string& line)
{
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '%') {
            continue;
        }
        return true;
    }
    return false;
}

double parse_value(const std::string& token, const std::string& where)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        throw InputError(where + ": cannot parse value '" + token + "'");
    }
    if (used != token.size()) {
        throw InputError(where + ": trailing characters in value '" + token + "'");
    }
    if (!std::isfinite(v)) {
        throw InputError(where + ": non-finite value '" + token + "'");
    }
    return v;
}

MatrixMarketObject read_stream(std::istream& in, const std::string& where)
{
    const Header header = read_header(in, where);
    std::string line;
    if (!next_data_line(in, line)) {
        throw InputError(where + ": missing size line");
    }
    std::istringstream size_line(line);
    long long rows = -1, cols = -1, entries = -1;
    size_line >> rows >> cols;
    if (header.coordinate) {
        size_line >> entries;
    }
    if (!size_line || rows < 0 || cols < 0 || (header.coordinate && entries < 0)) {
        throw InputError(where + ": malformed size line '" + line + "'");
    }
    const auto nr = static_cast<std::size_t>(rows);
    const auto nc = static_cast<std::size_t>(cols);

    if (header.coordinate) {
        std::vector<Triplet> trips;
        trips.reserve(static_cast<std::size_t>(entries));
        for (long long k = 0; k < entries; ++k) {
            if (!next_data_line(in, line)) {
                throw InputError(where + ": expected " + std::to_string(entries) + " entries, found " +
                                 std::to_string(k));
            }
            std::istringstream entry(line);
            long long i = 0, j = 0;
            std::string value;
            if (!(entry >> i >> j >> value)) {
                throw InputError(where + ": malformed entry '" + line + "'");
            }
            if (i < 1 || j < 1 || i > rows || j > cols) {
                throw InputError(where + ": index (" + std::to_string(i) + ", " + std::to_string(j) +
                                 ") out of bounds for " + std::to_string(rows) + "x" + std::to_string(cols));
            }
            trips.push_back({static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1),
                             parse_value(value, where)});
        }
        return SparseMatrix::from_triplets(nr, nc, std::move(trips));
    }

    std::vector<double> values;
    values.reserve(nr * nc);
    while (values.size() < nr * nc && next_data_line(in, line)) {
        std::istringstream tokens(line);
        std::string token;
        while (tokens >> token) {
            values.push_back(parse_value(token, where));
        }
    }
    if (values.size() != nr * nc) {
        throw InputError(where + ": expected " + std::to_string(nr * nc) + " array values, found " +
                         std::to_string(values.size()));
    }
    if (nc == 1) {
        return Vector(std::move(values));
    }
    DenseMatrix dense(nr, nc);
    std::copy(values.begin(), values.end(), dense.data().begin());
    return SparseMatrix::from_dense(dense);
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path.string() + "' for reading");
    }
    return in;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

std::string format_value(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

MatrixMarketObject mm_read(const std::filesystem::path& path)
{
    auto in = open_in(path);
    return read_stream(in, path.string());
}

SparseMatrix mm_read_matrix(const std::filesystem::path& path)
{
    auto obj = mm_read(path);
    if (auto* m = std::get_if<SparseMatrix>(&obj)) {
        return std::move(*m);
    }
    const Vector& v = std::get<Vector>(obj);
    return SparseMatrix::from_dense(DenseMatrix::column(v));
}

Vector mm_read_vector(const std::filesystem::path& path)
{
    auto obj = mm_read(path);
    if (auto* v = std::get_if<Vector>(&obj)) {
        return std::move(*v);
    }
    const SparseMatrix& m = std::get<SparseMatrix>(obj);
    if (m.cols() != 1) {
        throw InputError(path.string() + ": expected a vector (one column), got " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()));
    }
    const DenseMatrix d = m.to_dense();
    return Vector(d.data().begin(), d.data().end());
}

void mm_write(const std::filesystem::path& path, const SparseMatrix& m)
{
    auto out = open_out(path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
    for (const auto& t : m.triplets()) {
        out << t.row + 1 << ' ' << t.col + 1 << ' ' << format_value(t.value) << '\n';
    }
    if (!out) {
        throw InputError("failed writing '" + path.string() + "'");
    }
}

void mm_write(const std::filesystem::path& path, std::span<const double> v)
{
    auto out = open_out(path);
    out << "%%MatrixMarket matrix array real general\n";
    out << v.size() << " 1\n";
    for (double x : v) {
        out << format_value(x) << '\n';
    }
    if (!out) {
        throw InputError("failed writing '" + path.string() + "'");
    }
}

}  // namespace lse
