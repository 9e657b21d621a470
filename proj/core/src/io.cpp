#include "rangekit/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace rangekit {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw IoError(path + ": " + why);
}

void check_read_finite(const std::string& path, const Matrix& m) {
  if (!m.allFinite()) fail(path, "matrix entries must be finite");
}

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         lower(s.substr(s.size() - suffix.size())) == suffix;
}

}  // namespace

Matrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");

  std::string banner;
  if (!std::getline(in, banner)) fail(path, "empty file");
  std::istringstream bs(banner);
  std::string tag, object, format, field, symmetry;
  bs >> tag >> object >> format >> field >> symmetry;
  if (lower(tag) != "%%matrixmarket" || lower(object) != "matrix") {
    fail(path, "not a Matrix Market matrix file");
  }
  if (lower(format) != "array") {
    fail(path, "only the dense 'array' format is supported");
  }
  if (lower(field) != "real" && lower(field) != "integer") {
    fail(path, "only real-valued matrices are supported");
  }
  if (lower(symmetry) != "general") {
    fail(path, "only 'general' symmetry is supported");
  }

  std::string line;
  Index rows = -1, cols = -1;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '%') continue;
    std::istringstream ls(line);
    if (!(ls >> rows >> cols)) continue;  // skip blank lines before the size line
    break;
  }
  if (rows < 0 || cols < 0) fail(path, "missing size line");
  if (rows == 0 || cols == 0) fail(path, "matrix dimensions must be positive");

  Matrix m(rows, cols);
  // Array format stores entries in column-major order.
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      double v;
      if (!(in >> v)) fail(path, "fewer entries than the size line promises");
      m(i, j) = v;
    }
  }
  check_read_finite(path, m);
  return m;
}

void write_matrix_market(const std::string& path, const Matrix& m,
                         const std::string& comment) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw DimensionError("write_matrix_market: matrix dimensions must be positive");
  }
  require_finite(m, "write_matrix_market");
  std::ofstream out(path);
  if (!out) fail(path, "cannot open file for writing");
  out << "%%MatrixMarket matrix array real general\n";
  if (!comment.empty()) out << "% " << comment << "\n";
  out << m.rows() << " " << m.cols() << "\n";
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      out << format_value(m(i, j)) << "\n";
    }
  }
  if (!out) fail(path, "write failed");
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) fail(path, "malformed numeric cell '" + cell + "'");
        row.push_back(v);
      } catch (const std::logic_error&) {
        fail(path, "malformed numeric cell '" + cell + "'");
      }
    }
    if (row.empty()) fail(path, "empty CSV row");
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(path, "inconsistent column counts");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(path, "no data rows");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  check_read_finite(path, m);
  return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw DimensionError("write_matrix_csv: matrix dimensions must be positive");
  }
  require_finite(m, "write_matrix_csv");
  std::ofstream out(path);
  if (!out) fail(path, "cannot open file for writing");
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      out << format_value(m(i, j)) << (j + 1 < m.cols() ? "," : "");
    }
    out << "\n";
  }
  if (!out) fail(path, "write failed");
}

Matrix read_matrix(const std::string& path) {
  if (has_suffix(path, ".csv")) return read_matrix_csv(path);
  return read_matrix_market(path);
}

void write_matrix(const std::string& path, const Matrix& m) {
  if (has_suffix(path, ".csv")) {
    write_matrix_csv(path, m);
  } else {
    write_matrix_market(path, m);
  }
}

Vector read_vector(const std::string& path) {
  const Matrix m = read_matrix(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  fail(path, "expected a vector (one column or one row)");
}

void write_vector(const std::string& path, const Vector& v) {
  write_matrix(path, Matrix(v));
}

}  // namespace rangekit
