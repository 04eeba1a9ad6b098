#pragma once

#include "pushgate/fidelity.hpp"

#include <array>
#include <string>
#include <vector>

namespace pushgate {

/// J = J_phi + J_q + J_S with
///   J_phi = 1/2 (phi_00 - phi_01 - phi_10 + phi_11 - pi)^2
///   J_q   = 1/2 sum_b |q_b - q_00|^2
///   J_S   = 1/2 sum_b ||S_b - S_00||_F^2
struct ObjectiveValue {
  double total = 0.0;
  double phi = 0.0;
  double q = 0.0;
  double S = 0.0;
};

ObjectiveValue objective(const std::array<GaussianEvolution, 4>& finals);
ObjectiveValue objective(const BranchSet& results);

/// Costate of (phi, q_bar, S) for one branch at one time.
struct AdjointSample {
  double phi_tilde = 0.0;
  Vector q_tilde;
  Matrix S_tilde;
};

/// -dJ/d(final state) for every branch.
std::array<AdjointSample, 4> terminal_conditions(const std::array<GaussianEvolution, 4>& finals);

struct AdjointState {
  TimeGrid grid;
  std::array<std::vector<AdjointSample>, 4> branches;
};

/// Integrates the costates backwards from T over the forward run's grid.
/// Forward x_bar and S between nodes come from cubic Hermite interpolation.
AdjointState backward_propagate(const GateRun& forward, const PulseSpec& pulse,
                                const std::array<AdjointSample, 4>& terminal);

/// dJ/df(t_k) on the grid: minus the sum over branches of dH/df.
std::vector<double> pulse_gradient(const AdjointState& adjoints, const GateRun& forward,
                                   const PulseSpec& pulse);

struct KrotovConfig {
  double step_weight = 1e3;  ///< lambda; f <- f - (1/lambda) dJ/df
  int max_iters = 100;
  double objective_tol = 1e-12;
  bool allow_negative_pulse = false;
  SloshForm slosh_form = SloshForm::appendix;
};

struct IterationRecord {
  std::string stage;
  int iteration = 0;
  ObjectiveValue objective;
  ErrorBudget budget;
};

using IterationLog = std::vector<IterationRecord>;

struct KrotovResult {
  PulseSpec pulse;  ///< tabulated on params.grid()
  IterationLog log;
};

/// Immediate-update first-order Krotov sweeps. Throws NumericalError after
/// five consecutive objective increases.
KrotovResult krotov_iterate(const GateParams& params, const PulseSpec& pulse0,
                            const KrotovConfig& config);

}  // namespace pushgate
