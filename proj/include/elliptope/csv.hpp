#pragma once

#include <iosfwd>
#include <string>

#include "elliptope/mat.hpp"
#include "elliptope/sym.hpp"

namespace elliptope::numerics {

// Shared matrix format: one row per line, comma-separated decimals, no header.

Mat read_csv_matrix(std::istream& in);
Mat read_csv_matrix_file(const std::string& path);
Mat parse_csv_matrix(const std::string& text);

/// Reads a matrix and converts to SymMatrix, validating symmetry within 1e-9
/// and averaging the triangles.
SymMatrix read_csv_sym_file(const std::string& path);

std::string to_csv(const Mat& m);
std::string to_csv(const SymMatrix& m);
std::string to_csv_row(const std::vector<double>& v);
void write_csv_file(const std::string& path, const Mat& m);

} // namespace elliptope::numerics
