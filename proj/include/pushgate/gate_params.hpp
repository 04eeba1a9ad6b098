#pragma once

#include "pushgate/propagate.hpp"

namespace pushgate {

/// Dimensionless configuration of the two-ion pushing gate. Oscillator units
/// throughout: hbar = m = omega = 1, lengths in a0, time in 1/omega.
struct GateParams {
  double epsilon = 0.04;     ///< Coulomb / trap energy ratio
  double a_over_d = 0.001;   ///< oscillator length over trap separation
  double G = 0.0;            ///< quadratic push nonlinearity
  double omega_tau = 5.5;    ///< pulse width (1/omega units)
  double kT = 1.0;           ///< temperature in hbar*omega/k_B
  double t_window = 5.0;     ///< simulate t in [-t_window*tau, +t_window*tau]
  int steps_per_period = 500;

  /// Throws ConfigError on out-of-range values. Negative G is accepted only
  /// when `allow_negative_g` is set (sign-changing breathing-correction runs).
  void validate(bool allow_negative_g = false) const;

  double tau() const { return omega_tau; }
  /// Uniform grid over the simulation window with at least
  /// `steps_per_period` steps per trap period 2*pi.
  TimeGrid grid() const;
};

}  // namespace pushgate
