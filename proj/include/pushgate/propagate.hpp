#pragma once

#include "pushgate/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace pushgate {

/// Uniform time grid t_k = t0 + k dt, k = 0..steps. Shared by the pulse, the
/// forward trajectories and the adjoints.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  int steps = 0;

  static TimeGrid uniform(double t_begin, double t_end, int steps);

  double time(int k) const { return t0 + k * dt; }
  double t_end() const { return time(steps); }
  int size() const { return steps + 1; }
};

/// V_so(t, x) = E - x^T F + 1/2 x^T K x with kinetic term 1/2 p^T M_inv p.
/// Units: E in hbar*omega, F in hbar*omega/a0, K in hbar*omega/a0^2.
struct QuadraticExpansion {
  double E = 0.0;
  Vector F;
  Matrix K;
  Matrix M_inv;

  QuadraticExpansion() = default;
  /// Symmetrizes K on construction.
  QuadraticExpansion(double energy, Vector force, const Matrix& curvature, Matrix inverse_mass);

  int dof() const { return static_cast<int>(F.size()); }
  /// h = [[K, 0], [0, M_inv]].
  Matrix h() const;
};

/// The expansion at time t. `x_bar` is the current centre x-part of q_bar;
/// closures that expand a full potential around the classical trajectory use
/// it, plain time-dependent quadratic Hamiltonians ignore it.
using ExpansionFn = std::function<QuadraticExpansion(double t, const Vector& x_bar)>;

/// Parameters of U(t) = exp(-i phi) D_{q_bar} W_b with S = exp(J b).
struct GaussianEvolution {
  double phi = 0.0;
  Vector q_bar;
  Matrix S;

  /// phi = 0, S = I, q_bar = the given starting point.
  static GaussianEvolution identity(const Vector& q_bar0);
};

/// Time derivative of (phi, q_bar, S) under `ex`.
GaussianEvolution evolution_rate(const QuadraticExpansion& ex, const GaussianEvolution& state);

/// One classical RK4 step of the (phi, q_bar, S) equations.
GaussianEvolution rk4_step(const ExpansionFn& expansion, double t, double dt,
                           const GaussianEvolution& state);

struct PropagationResult {
  TimeGrid grid;
  std::vector<GaussianEvolution> samples;
  std::vector<std::string> warnings;

  const GaussianEvolution& final_state() const { return samples.back(); }
};

/// Integrates (phi, q_bar, S) from `initial` at t0 to t1 with `steps` uniform
/// RK4 steps. Throws NumericalError naming the step if anything goes
/// non-finite. Appends a warning when dt * sqrt(max eig K) > 0.5.
PropagationResult propagate(const ExpansionFn& expansion, double t0, double t1, int steps,
                            const GaussianEvolution& initial);

}  // namespace pushgate
