#pragma once

#include "pushgate/pushing_gate.hpp"
#include "pushgate/types.hpp"

#include <array>

namespace pushgate {

/// Thermal covariance of the two-ion crystal in (x1, x2, p1, p2), built from
/// independent thermal CM and relative modes. kT = 0 is the ground state.
struct ThermalCovariance {
  Matrix gamma;
};

ThermalCovariance thermal_covariance(double epsilon, double kT);

/// (x1, x2, p1, p2) -> (x_cm, x_rel, p_cm, p_rel) with x_cm = (x1+x2)/2,
/// x_rel = x2 - x1, p_cm = p1 + p2, p_rel = (p2 - p1)/2. Symplectic.
Matrix mode_transform();

/// Final-time data of one branch.
struct BranchResult {
  double phi_T = 0.0;
  Vector q_bar_T;
  Matrix S_T;
  Matrix b_T;
  double theta = 0.0;  ///< -phi_T + Tr[b_T gamma]
};

using BranchSet = std::array<BranchResult, 4>;

BranchResult branch_result(const GaussianEvolution& final_state, const Matrix& gamma);
BranchSet branch_results(const GateRun& run, const Matrix& gamma);

/// phi_00 - phi_01 - phi_10 + phi_11 (the same combination serves for theta).
double nonlocal_combination(const std::array<double, 4>& v);

/// Maps an angle into (-pi, pi].
double wrap_angle(double a);

/// (1/20) wrap(theta_00 - theta_01 - theta_10 + theta_11 - pi)^2
double phase_error(double theta_00, double theta_01, double theta_10, double theta_11);

/// appendix: dq^T J gamma J^T dq (default); body: dq^T gamma dq.
enum class SloshForm { appendix, body };

/// (1/20) sum_{a<b} of the chosen quadratic form of q_a - q_b.
double sloshing_error(const std::array<Vector, 4>& q_bar, const Matrix& gamma,
                      SloshForm form = SloshForm::appendix);

/// sum_{a<b} Tr[db g db g]/40 + Tr[db J db J]/160 with db = b_a - b_b.
double breathing_error(const std::array<Matrix, 4>& b, const Matrix& gamma);

struct ErrorBudget {
  double e_theta = 0.0;
  double e_slosh = 0.0;
  double e_breath = 0.0;
  double total = 0.0;
  double gate_phase = 0.0;  ///< theta combination
  double phi_phase = 0.0;   ///< phi combination (no Tr[b gamma] correction)
};

ErrorBudget error_budget(const BranchSet& results, const Matrix& gamma,
                         SloshForm form = SloshForm::appendix);

/// Lowest-order closed form of E_S for a Gaussian push; an estimate only.
double perturbative_breathing(double G, double xi, double omega_tau, double epsilon, double kT);

/// Simulate all branches and assemble the budget at params.kT.
struct GateEvaluation {
  GateRun run;
  BranchSet results;
  ErrorBudget budget;
};

GateEvaluation evaluate_gate(const GateParams& params, const PulseSpec& pulse,
                             SloshForm form = SloshForm::appendix);

}  // namespace pushgate
