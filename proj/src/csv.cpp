#include "elliptope/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "elliptope/errors.hpp"

namespace elliptope::numerics {

namespace {

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

Mat read_csv_matrix(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw UsageError("csv: cannot parse value '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw UsageError("csv: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw UsageError("csv: empty matrix");

    Mat m(int(rows.size()), int(rows.front().size()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return m;
}

Mat read_csv_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open file: " + path);
    return read_csv_matrix(in);
}

Mat parse_csv_matrix(const std::string& text) {
    std::istringstream in(text);
    return read_csv_matrix(in);
}

SymMatrix read_csv_sym_file(const std::string& path) {
    return SymMatrix::from_dense(read_csv_matrix_file(path), 1e-9);
}

std::string to_csv(const Mat& m) {
    std::string out;
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += format_value(m(i, j));
        }
        out += '\n';
    }
    return out;
}

std::string to_csv(const SymMatrix& m) { return to_csv(m.to_dense()); }

std::string to_csv_row(const std::vector<double>& v) {
    std::string out;
    for (size_t j = 0; j < v.size(); ++j) {
        if (j) out += ',';
        out += format_value(v[j]);
    }
    out += '\n';
    return out;
}

void write_csv_file(const std::string& path, const Mat& m) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write file: " + path);
    out << to_csv(m);
}

} // namespace elliptope::numerics
