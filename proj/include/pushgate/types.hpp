#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace pushgate {

// Phase-space objects live in at most 2n = 8 dimensions (n <= 4 degrees of
// freedom), so storage is inline and the RK4 loops never touch the heap.
inline constexpr int kMaxPhaseDim = 8;

using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxPhaseDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0,
                             kMaxPhaseDim, kMaxPhaseDim>;

/// Raised when an integration or a matrix function produces something
/// unusable (non-finite values, branch-cut eigenvalues, collisions).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for invalid user input (configuration, parameter ranges).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest absolute entry.
inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace pushgate
