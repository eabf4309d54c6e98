#include "precond_lab/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "precond_lab/error.hpp"

namespace precond_lab {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

[[noreturn]] void parse_error(const std::string& source, long line, const std::string& what) {
    throw Error(ErrorCode::parse, source + ":" + std::to_string(line) + ": " + what);
}

bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path.string() + " for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
    out << std::setprecision(17);
    return out;
}

} // namespace

CsrMatrix read_matrix_market(std::istream& in, const std::string& source) {
    std::string line;
    long lineno = 0;

    if (!std::getline(in, line)) parse_error(source, 1, "empty file");
    ++lineno;
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket") parse_error(source, lineno, "missing %%MatrixMarket banner");
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix") parse_error(source, lineno, "unsupported object '" + object + "'");
    if (format != "coordinate") parse_error(source, lineno, "only coordinate format is supported");
    if (field == "pattern") parse_error(source, lineno, "pattern-only matrices are not supported");
    if (field == "complex") parse_error(source, lineno, "complex matrices are not supported");
    if (field != "real" && field != "integer" && field != "double")
        parse_error(source, lineno, "unsupported field '" + field + "'");
    if (symmetry != "general" && symmetry != "symmetric")
        parse_error(source, lineno, "unsupported symmetry '" + symmetry + "'");
    const bool symmetric = symmetry == "symmetric";

    Index rows = -1, cols = -1, entries = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%' || blank(line)) continue;
        std::istringstream size_line(line);
        if (!(size_line >> rows >> cols >> entries) || rows < 0 || cols < 0 || entries < 0)
            parse_error(source, lineno, "malformed size line");
        break;
    }
    if (rows < 0) parse_error(source, lineno, "missing size line");
    if (rows != cols) parse_error(source, lineno, "matrix is not square");

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(symmetric ? 2 * entries : entries));
    Index read = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%' || blank(line)) continue;
        if (read == entries) parse_error(source, lineno, "more entries than declared");
        std::istringstream entry(line);
        Index i = 0, j = 0;
        double v = 0.0;
        if (!(entry >> i >> j >> v)) parse_error(source, lineno, "malformed entry");
        std::string extra;
        if (entry >> extra) parse_error(source, lineno, "unexpected trailing token '" + extra + "'");
        if (i < 1 || i > rows || j < 1 || j > cols) parse_error(source, lineno, "index out of range");
        if (symmetric && j > i) parse_error(source, lineno, "symmetric file stores an upper-triangle entry");
        triplets.push_back({i - 1, j - 1, v});
        if (symmetric && i != j) triplets.push_back({j - 1, i - 1, v});
        ++read;
    }
    if (read != entries)
        parse_error(source, lineno, "expected " + std::to_string(entries) + " entries, found " + std::to_string(read));
    return CsrMatrix::from_triplets(rows, std::move(triplets));
}

CsrMatrix read_matrix_market(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_matrix_market(in, path.string());
}

void write_matrix_market(const CsrMatrix& a, std::ostream& out) {
    const auto flags = out.flags();
    const auto precision = out.precision(17);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.size() << ' ' << a.size() << ' ' << a.nnz() << '\n';
    for (const auto& [i, j, v] : a.triplets()) out << i + 1 << ' ' << j + 1 << ' ' << v << '\n';
    out.precision(precision);
    out.flags(flags);
}

void write_matrix_market(const CsrMatrix& a, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_matrix_market(a, out);
    if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

std::vector<double> read_vector(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<double> v;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        std::istringstream s(line);
        double x = 0.0;
        std::string extra;
        if (!(s >> x) || (s >> extra)) parse_error(path.string(), lineno, "expected one real value");
        v.push_back(x);
    }
    return v;
}

void write_vector(std::span<const double> v, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (double x : v) out << x << '\n';
    if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

Permutation read_permutation(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<Index> p;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        std::istringstream s(line);
        Index k = 0;
        std::string extra;
        if (!(s >> k) || (s >> extra) || k < 1) parse_error(path.string(), lineno, "expected one positive index");
        p.push_back(k - 1);
    }
    try {
        return Permutation(std::move(p));
    } catch (const Error& e) {
        throw Error(ErrorCode::parse, path.string() + ": " + e.what());
    }
}

} // namespace precond_lab
