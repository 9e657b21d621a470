#pragma once

#include "rangekit/types.hpp"

#include <string>

namespace rangekit {

/// Malformed or unreadable input files (missing file, bad banner, short
/// data, non-finite entries).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense Matrix Market interchange ("array real general", column-major
/// entries). Values are written with 17 significant digits so that
/// write/read round-trips are bit exact.
Matrix read_matrix_market(const std::string& path);
void write_matrix_market(const std::string& path, const Matrix& m,
                         const std::string& comment = "");

/// Headerless CSV, one matrix row per line.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);

/// Dispatch on extension: .csv uses CSV, everything else Matrix Market.
Matrix read_matrix(const std::string& path);
void write_matrix(const std::string& path, const Matrix& m);

/// Vectors are single-column matrices on disk; single-row files are
/// accepted and flattened on read.
Vector read_vector(const std::string& path);
void write_vector(const std::string& path, const Vector& v);

}  // namespace rangekit
