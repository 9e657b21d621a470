#include "rangekit/io.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <string>

using namespace rangekit;

namespace {

/// Self-cleaning scratch file in the system temp directory.
class TempFile {
 public:
  explicit TempFile(const std::string& name)
      : path_(std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
              "/rangekit_io_" + name) {}
  ~TempFile() { std::remove(path_.c_str()); }
  const std::string& path() const { return path_; }

  void fill(const std::string& text) const {
    std::ofstream out(path_);
    out << text;
  }

 private:
  std::string path_;
};

Matrix random_matrix(Index rows, Index cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

}  // namespace

TEST_CASE("matrix market round trip is bit exact") {
  const Matrix m = random_matrix(5, 3, 77);
  const TempFile f("roundtrip.mtx");
  write_matrix_market(f.path(), m, "scratch matrix");
  const Matrix back = read_matrix_market(f.path());
  REQUIRE(back.rows() == 5);
  REQUIRE(back.cols() == 3);
  CHECK((back - m).norm() == 0.0);
}

TEST_CASE("csv round trip is bit exact") {
  const Matrix m = random_matrix(4, 6, 78);
  const TempFile f("roundtrip.csv");
  write_matrix_csv(f.path(), m);
  const Matrix back = read_matrix_csv(f.path());
  CHECK((back - m).norm() == 0.0);
}

TEST_CASE("extension dispatch routes csv and matrix market") {
  const Matrix m = random_matrix(3, 3, 79);
  const TempFile csv("dispatch.csv");
  const TempFile mtx("dispatch.mtx");
  write_matrix(csv.path(), m);
  write_matrix(mtx.path(), m);
  CHECK((read_matrix(csv.path()) - m).norm() == 0.0);
  CHECK((read_matrix(mtx.path()) - m).norm() == 0.0);

  // the csv file must really be headerless csv
  std::ifstream in(csv.path());
  std::string first;
  std::getline(in, first);
  CHECK(first.find(',') != std::string::npos);
}

TEST_CASE("vector io flattens single-row files") {
  Vector v(4);
  v << 1.5, -2.0, 0.0, 42.0;
  const TempFile col("vec.csv");
  write_vector(col.path(), v);
  CHECK((read_vector(col.path()) - v).norm() == 0.0);

  const TempFile row("rowvec.csv");
  row.fill("1.5,-2,0,42\n");
  CHECK((read_vector(row.path()) - v).norm() == 0.0);

  const TempFile rect("rect.csv");
  rect.fill("1,2\n3,4\n");
  CHECK_THROWS_AS(read_vector(rect.path()), IoError);
}

TEST_CASE("matrix market reader tolerates comments and integer fields") {
  const TempFile f("comments.mtx");
  f.fill(
      "%%MatrixMarket matrix array integer general\n"
      "% produced by hand\n"
      "% another comment\n"
      "2 2\n"
      "1\n2\n3\n4\n");
  const Matrix m = read_matrix_market(f.path());
  CHECK(m(0, 0) == 1.0);
  CHECK(m(1, 0) == 2.0);  // column-major entry order
  CHECK(m(0, 1) == 3.0);
  CHECK(m(1, 1) == 4.0);
}

TEST_CASE("matrix market reader rejects malformed input") {
  const TempFile f("bad.mtx");

  f.fill("not a banner\n1 1\n1\n");
  CHECK_THROWS_AS(read_matrix_market(f.path()), IoError);

  // coordinate format is a different interchange flavor, refuse loudly
  f.fill("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 1.0\n");
  CHECK_THROWS_AS(read_matrix_market(f.path()), IoError);

  f.fill("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n");
  CHECK_THROWS_AS(read_matrix_market(f.path()), IoError);  // short data

  f.fill("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\nnan\n");
  CHECK_THROWS_AS(read_matrix_market(f.path()), IoError);  // non-finite

  CHECK_THROWS_AS(read_matrix_market("/nonexistent/rangekit.mtx"), IoError);
}

TEST_CASE("csv reader rejects ragged rows and trailing garbage") {
  const TempFile f("bad.csv");

  f.fill("1,2\n3\n");
  CHECK_THROWS_AS(read_matrix_csv(f.path()), IoError);

  f.fill("1,2\n3,4x\n");
  CHECK_THROWS_AS(read_matrix_csv(f.path()), IoError);

  f.fill("");
  CHECK_THROWS_AS(read_matrix_csv(f.path()), IoError);
}

TEST_CASE("writers refuse empty matrices") {
  const TempFile f("empty.mtx");
  CHECK_THROWS_AS(write_matrix_market(f.path(), Matrix(0, 0)), DimensionError);
}

TEST_CASE("error messages name the offending file") {
  const TempFile f("named.mtx");
  f.fill("junk\n");
  try {
    read_matrix_market(f.path());
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find(f.path()) != std::string::npos);
  }
}
