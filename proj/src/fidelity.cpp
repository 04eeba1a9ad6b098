#include "pushgate/fidelity.hpp"

#include "pushgate/symplectic.hpp"

#include <cmath>
#include <numbers>

namespace pushgate {

namespace {

// Thermal variance scale 1/2 coth(w / 2kT); the kT = 0 limit is 1/2.
double thermal_scale(double omega, double kT) {
  if (kT == 0.0) return 0.5;
  return 0.5 / std::tanh(omega / (2.0 * kT));
}

double inv_sinh2(double x) {
  if (std::isinf(x)) return 0.0;
  const double s = std::sinh(x);
  return 1.0 / (s * s);
}

}  // namespace

Matrix mode_transform() {
  Matrix T = Matrix::Zero(4, 4);
  T(0, 0) = 0.5;  T(0, 1) = 0.5;
  T(1, 0) = -1.0; T(1, 1) = 1.0;
  T(2, 2) = 1.0;  T(2, 3) = 1.0;
  T(3, 2) = -0.5; T(3, 3) = 0.5;
  return T;
}

ThermalCovariance thermal_covariance(double epsilon, double kT) {
  const double w_rel = std::sqrt(1.0 + epsilon);
  const double c_cm = thermal_scale(1.0, kT);
  const double c_rel = thermal_scale(w_rel, kT);
  // mode ordering (x_cm, x_rel, p_cm, p_rel)
  Matrix g_mode = Matrix::Zero(4, 4);
  g_mode(0, 0) = c_cm * 0.5;
  g_mode(2, 2) = c_cm * 2.0;
  g_mode(1, 1) = c_rel * 2.0 / w_rel;
  g_mode(3, 3) = c_rel * 0.5 * w_rel;

  const Matrix T = mode_transform();
  const Matrix Tinv = T.inverse();
  Matrix g = Tinv * g_mode * Tinv.transpose();
  return ThermalCovariance{0.5 * (g + g.transpose())};
}

BranchResult branch_result(const GaussianEvolution& final_state, const Matrix& gamma) {
  BranchResult r;
  r.phi_T = final_state.phi;
  r.q_bar_T = final_state.q_bar;
  r.S_T = final_state.S;
  r.b_T = extract_squeeze(final_state.S).b;
  r.theta = -r.phi_T + (r.b_T * gamma).trace();
  return r;
}

BranchSet branch_results(const GateRun& run, const Matrix& gamma) {
  BranchSet out;
  for (int i = 0; i < 4; ++i) {
    out[i] = branch_result(run.branches[i].final_state(), gamma);
  }
  return out;
}

double nonlocal_combination(const std::array<double, 4>& v) {
  return v[0] - v[1] - v[2] + v[3];
}

double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::remainder(a, two_pi);  // [-pi, pi]
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

double phase_error(double theta_00, double theta_01, double theta_10, double theta_11) {
  const double d = wrap_angle(theta_00 - theta_01 - theta_10 + theta_11 - std::numbers::pi);
  return d * d / 20.0;
}

double sloshing_error(const std::array<Vector, 4>& q_bar, const Matrix& gamma, SloshForm form) {
  Matrix metric = gamma;
  if (form == SloshForm::appendix) {
    const Matrix J = symplectic_j(static_cast<int>(gamma.rows()) / 2);
    metric = J * gamma * J.transpose();
  }
  double sum = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      const Vector d = q_bar[a] - q_bar[b];
      sum += d.dot(metric * d);
    }
  }
  return sum / 20.0;
}

double breathing_error(const std::array<Matrix, 4>& b, const Matrix& gamma) {
  const Matrix J = symplectic_j(static_cast<int>(gamma.rows()) / 2);
  double sum = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int c = a + 1; c < 4; ++c) {
      const Matrix d = b[a] - b[c];
      const Matrix dg = d * gamma;
      const Matrix dJ = d * J;
      sum += (dg * dg).trace() / 40.0 + (dJ * dJ).trace() / 160.0;
    }
  }
  return sum;
}

ErrorBudget error_budget(const BranchSet& results, const Matrix& gamma, SloshForm form) {
  std::array<double, 4> theta{}, phi{};
  std::array<Vector, 4> q;
  std::array<Matrix, 4> b;
  for (int i = 0; i < 4; ++i) {
    theta[i] = results[i].theta;
    phi[i] = results[i].phi_T;
    q[i] = results[i].q_bar_T;
    b[i] = results[i].b_T;
  }
  ErrorBudget e;
  e.e_theta = phase_error(theta[0], theta[1], theta[2], theta[3]);
  e.e_slosh = sloshing_error(q, gamma, form);
  // Round-off can leave the vacuum-cancelling J term a hair above the gamma
  // term for nearly identical branches.
  e.e_breath = std::max(0.0, breathing_error(b, gamma));
  e.total = e.e_theta + e.e_slosh + e.e_breath;
  e.gate_phase = nonlocal_combination(theta);
  e.phi_phase = nonlocal_combination(phi);
  return e;
}

double perturbative_breathing(double G, double xi, double omega_tau, double epsilon, double kT) {
  const double wt2 = omega_tau * omega_tau;
  const double s2 = kT == 0.0 ? 0.0 : inv_sinh2(1.0 / (2.0 * kT));
  const double braces = s2 * (1.0 + std::exp(-epsilon * epsilon * wt2 / 8.0)) +
                        2.0 * (s2 + 2.0) * std::exp(-2.0 * wt2);
  return std::numbers::pi / 20.0 * G * G * xi * xi * wt2 * braces;
}

GateEvaluation evaluate_gate(const GateParams& params, const PulseSpec& pulse, SloshForm form) {
  const Matrix gamma = thermal_covariance(params.epsilon, params.kT).gamma;
  GateEvaluation ev{simulate_gate(params, pulse), {}, {}};
  ev.results = branch_results(ev.run, gamma);
  ev.budget = error_budget(ev.results, gamma, form);
  return ev;
}

}  // namespace pushgate
