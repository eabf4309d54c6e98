#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "precond_lab/sparse.hpp"

namespace precond_lab {

/// Reads a real (or integer) coordinate Matrix Market file, general or
/// symmetric. Symmetric files are expanded to full storage and duplicate
/// coordinates are summed. Failures carry "source:line:" diagnostics.
CsrMatrix read_matrix_market(const std::filesystem::path& path);
CsrMatrix read_matrix_market(std::istream& in, const std::string& source = "<stream>");

/// Writes general coordinate format with 17 significant digits.
void write_matrix_market(const CsrMatrix& a, const std::filesystem::path& path);
void write_matrix_market(const CsrMatrix& a, std::ostream& out);

/// One real per line.
std::vector<double> read_vector(const std::filesystem::path& path);
void write_vector(std::span<const double> v, const std::filesystem::path& path);

/// One 1-based index per line; line k holds the new position of old index k.
Permutation read_permutation(const std::filesystem::path& path);

} // namespace precond_lab
