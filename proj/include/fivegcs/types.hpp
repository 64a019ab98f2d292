#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fivegcs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One d-vector per client; index is the client id (0-based).
using BlockVector = std::vector<Vector>;

/// Raised when a schedule, config or solver precondition does not hold.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative oracle fails to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Selects the serial reference path or the OpenMP path for per-client work.
/// Both produce bit-identical results: per-client results are written to
/// their own slot and reduced in ascending client order.
enum class Execution { serial, parallel };

inline double squared_norm(const BlockVector& blocks) {
  double s = 0.0;
  for (const auto& b : blocks) s += b.squaredNorm();
  return s;
}

inline Vector block_sum(const BlockVector& blocks, Eigen::Index d) {
  Vector s = Vector::Zero(d);
  for (const auto& b : blocks) s += b;
  return s;
}

}  // namespace fivegcs
