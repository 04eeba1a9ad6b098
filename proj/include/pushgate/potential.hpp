#pragma once

#include "pushgate/gate_params.hpp"

#include <Eigen/Dense>

#include <array>

namespace pushgate {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Two-ion pushing-gate potential in oscillator units,
///
///   V = 1/2 (x1^2 + x2^2) + (eps/4)(d/a)^2 [1/(1 + (a/d)(x2 - x1)) - 1]
///       + sum_i f_i [-(-1)^i x_i + G x_i^2] - V_eq,
///
/// with x_i measured from trap centre i. V_eq is the unpushed equilibrium
/// energy, so the 00 branch accumulates no phase.
class PushPotential {
 public:
  explicit PushPotential(const GateParams& params);

  struct Derivatives {
    double value = 0.0;
    Vec2 gradient = Vec2::Zero();
    Mat2 hessian = Mat2::Zero();
    /// third[k](i, j) = d^3 V / dx_i dx_j dx_k
    std::array<Mat2, 2> third{Mat2::Zero(), Mat2::Zero()};
  };

  /// Throws NumericalError("Coulomb singularity crossed") when
  /// 1 + (a/d)(x2 - x1) <= 0.
  Derivatives evaluate(const Vec2& x, double f1, double f2) const;

  /// Push-only part P(x) = sum_i w_i [-(-1)^i x_i + G x_i^2] and its
  /// derivatives; w_i are the per-ion push weights (0 or 1 for a branch).
  Derivatives push_part(const Vec2& x, double w1, double w2) const;

  double separation_factor(const Vec2& x) const { return 1.0 + kappa_ * (x(1) - x(0)); }

  /// Unpushed force balance, solved once at construction.
  const Vec2& equilibrium() const { return equilibrium_; }
  const GateParams& params() const { return params_; }

 private:
  Derivatives raw(const Vec2& x, double f1, double f2) const;
  Vec2 solve_equilibrium() const;

  GateParams params_;
  double kappa_;
  Vec2 equilibrium_;
  double energy_offset_ = 0.0;
};

}  // namespace pushgate
