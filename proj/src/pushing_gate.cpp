#include "pushgate/pushing_gate.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace pushgate {

void GateParams::validate(bool allow_negative_g) const {
  auto fail = [](const char* what) { throw ConfigError(what); };
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail("epsilon must be > 0");
  if (!(a_over_d > 0.0 && a_over_d < 1.0)) fail("a_over_d must be in (0, 1)");
  if (!std::isfinite(G)) fail("G must be finite");
  if (G < 0.0 && !allow_negative_g) fail("G must be >= 0 (negative G needs allow_negative_pulse)");
  if (!(omega_tau > 0.0) || !std::isfinite(omega_tau)) fail("omega_tau must be > 0");
  if (!(kT >= 0.0) || !std::isfinite(kT)) fail("kT must be >= 0");
  if (!(t_window >= 1.0) || !std::isfinite(t_window)) fail("t_window must be >= 1");
  if (steps_per_period < 8) fail("steps_per_period must be >= 8");
}

TimeGrid GateParams::grid() const {
  const double half = t_window * tau();
  const int steps =
      static_cast<int>(std::ceil(2.0 * half / (2.0 * std::numbers::pi) * steps_per_period));
  return TimeGrid::uniform(-half, half, std::max(steps, 2));
}

std::string_view label(Branch b) {
  switch (b) {
    case Branch::b00: return "00";
    case Branch::b01: return "01";
    case Branch::b10: return "10";
    case Branch::b11: return "11";
  }
  return "??";
}

std::array<double, 2> push_flags(Branch b) {
  const int i = index(b);
  return {static_cast<double>((i >> 1) & 1), static_cast<double>(i & 1)};
}

int parity(Branch b) { return (b == Branch::b00 || b == Branch::b11) ? 1 : -1; }

double default_amplitude(double epsilon, double omega_tau) {
  const double pi = std::numbers::pi;
  const double xi2 =
      pi / (std::sqrt(pi / 8.0) * epsilon * std::sqrt(1.0 + 0.5 * epsilon) * omega_tau);
  return std::sqrt(xi2);
}

double nonlinearity_from_waist(double a, double w, double x0) {
  return 4.0 * (a / w) * (w / (2.0 * x0) - 2.0 * x0 / w);
}

Vec2 equilibrium_positions(const GateParams& params) {
  return PushPotential(params).equilibrium();
}

namespace {

using State4 = Eigen::Vector4d;

State4 newton_rate(const PushPotential& V, const std::array<double, 2>& w, double f,
                   const State4& y) {
  const auto d = V.evaluate(y.head<2>(), w[0] * f, w[1] * f);
  State4 r;
  r << y.tail<2>(), -d.gradient;
  return r;
}

}  // namespace

Trajectory classical_trajectory(const GateParams& params, const PulseSpec& pulse, Branch branch) {
  const PushPotential V(params);
  const TimeGrid grid = params.grid();
  const auto w = push_flags(branch);

  Trajectory out{grid, {}, {}};
  out.x_bar.reserve(grid.size());
  out.p_bar.reserve(grid.size());

  State4 y;
  y << V.equilibrium(), 0.0, 0.0;
  out.x_bar.push_back(y.head<2>());
  out.p_bar.push_back(y.tail<2>());
  const double h = grid.dt;
  for (int k = 0; k < grid.steps; ++k) {
    const double t = grid.time(k);
    const double f0 = pulse.value(t);
    const double fm = pulse.value(t + 0.5 * h);
    const double f1 = pulse.value(t + h);
    const State4 k1 = newton_rate(V, w, f0, y);
    const State4 k2 = newton_rate(V, w, fm, y + 0.5 * h * k1);
    const State4 k3 = newton_rate(V, w, fm, y + 0.5 * h * k2);
    const State4 k4 = newton_rate(V, w, f1, y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite()) {
      std::ostringstream os;
      os << "classical_trajectory: non-finite state at step " << k + 1;
      throw NumericalError(os.str());
    }
    out.x_bar.push_back(y.head<2>());
    out.p_bar.push_back(y.tail<2>());
  }
  return out;
}

QuadraticExpansion taylor_expansion(const PushPotential& potential, Branch branch, double f,
                                    const Vec2& x_bar) {
  const auto w = push_flags(branch);
  const auto d = potential.evaluate(x_bar, w[0] * f, w[1] * f);
  // V(x) ~ V + g.(x - x0) + 1/2 (x - x0).K.(x - x0)
  const Vec2 Kx = d.hessian * x_bar;
  const double E = d.value - d.gradient.dot(x_bar) + 0.5 * x_bar.dot(Kx);
  Vector F = Kx - d.gradient;
  Matrix K = d.hessian;
  return QuadraticExpansion(E, std::move(F), K, Matrix::Identity(2, 2));
}

std::vector<QuadraticExpansion> taylor_coefficients(const GateParams& params,
                                                    const PulseSpec& pulse, Branch branch,
                                                    const Trajectory& trajectory) {
  const PushPotential V(params);
  std::vector<QuadraticExpansion> out;
  out.reserve(trajectory.x_bar.size());
  for (std::size_t k = 0; k < trajectory.x_bar.size(); ++k) {
    const double t = trajectory.grid.time(static_cast<int>(k));
    out.push_back(taylor_expansion(V, branch, pulse.value(t), trajectory.x_bar[k]));
  }
  return out;
}

ExpansionFn branch_expansion(std::shared_ptr<const PushPotential> potential,
                             std::shared_ptr<const PulseSpec> pulse, Branch branch) {
  return [potential = std::move(potential), pulse = std::move(pulse), branch](
             double t, const Vector& x_bar) {
    return taylor_expansion(*potential, branch, pulse->value(t), Vec2(x_bar(0), x_bar(1)));
  };
}

GaussianEvolution initial_evolution(const PushPotential& potential) {
  Vector q0 = Vector::Zero(4);
  q0.head(2) = potential.equilibrium();
  return GaussianEvolution::identity(q0);
}

PropagationResult simulate_branch(const GateParams& params, const PulseSpec& pulse,
                                  Branch branch) {
  auto V = std::make_shared<const PushPotential>(params);
  auto p = std::make_shared<const PulseSpec>(pulse);
  const TimeGrid grid = params.grid();
  return propagate(branch_expansion(V, p, branch), grid.t0, grid.t_end(), grid.steps,
                   initial_evolution(*V));
}

GateRun simulate_gate(const GateParams& params, const PulseSpec& pulse) {
  auto V = std::make_shared<const PushPotential>(params);
  auto p = std::make_shared<const PulseSpec>(pulse);
  const TimeGrid grid = params.grid();
  GateRun run{params, {}};
  for (Branch b : kBranches) {
    run.branches[index(b)] = propagate(branch_expansion(V, p, b), grid.t0, grid.t_end(),
                                       grid.steps, initial_evolution(*V));
  }
  return run;
}

}  // namespace pushgate
