#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace rangekit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative cutoffs shared by every rank decision and residual test.
///
/// A singular value sigma_i counts towards the rank iff
///   sigma_i > rank_rel * sigma_max,
/// and residual tests are of the form
///   residual <= residual_rel * max(1, scale).
struct Tolerances {
  double rank_rel = 1e-10;
  double residual_rel = 1e-8;

  /// Throws std::invalid_argument unless both cutoffs lie in (0, 1).
  void validate() const;
};

/// Inputs whose shapes cannot be combined (or are empty where forbidden).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A dense kernel failed in a way that no input validation can excuse
/// (e.g. an SVD did not converge).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exact constraint (or a required range/kernel inclusion) does not hold.
/// Carries the offending residual so callers can report how far off it was.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_ = 0.0;
};

/// The run itself succeeded but a requested tolerance was not met.
/// Carries the achieved value.
class ToleranceError : public std::runtime_error {
 public:
  ToleranceError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_ = 0.0;
};

/// Largest singular value; 0 for matrices with an empty dimension.
double spectral_norm(const Matrix& t);

/// Throws DimensionError when `t` contains NaN or infinite entries.
/// `name` identifies the offending operand in the message.
void require_finite(const Matrix& t, const char* name);

}  // namespace rangekit
