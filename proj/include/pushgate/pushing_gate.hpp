#pragma once

#include "pushgate/gate_params.hpp"
#include "pushgate/potential.hpp"
#include "pushgate/propagate.hpp"
#include "pushgate/pulse.hpp"

#include <array>
#include <memory>
#include <string_view>
#include <vector>

namespace pushgate {

/// Logical state of the two qubits; an ion is pushed iff its bit is 1.
/// Labels read "b1 b2", so 01 pushes ion 2 only.
enum class Branch { b00 = 0, b01 = 1, b10 = 2, b11 = 3 };

inline constexpr std::array<Branch, 4> kBranches{Branch::b00, Branch::b01, Branch::b10,
                                                 Branch::b11};

inline int index(Branch b) { return static_cast<int>(b); }
std::string_view label(Branch b);
/// (ion 1 pushed, ion 2 pushed) as 0/1 weights.
std::array<double, 2> push_flags(Branch b);
/// (-1)^beta: +1 for 00 and 11, -1 for 01 and 10.
int parity(Branch b);

/// Positive root of xi^2 = pi / (sqrt(pi/8) eps sqrt(1 + eps/2) omega_tau):
/// the Gaussian amplitude that gives gate phase pi to lowest order.
double default_amplitude(double epsilon, double omega_tau);

/// G = 4 (a/w) (w/(2 x0) - 2 x0/w) for a Gaussian beam of waist w with the
/// ion sitting x0 off the beam axis.
double nonlinearity_from_waist(double a, double w, double x0);

/// Newton-converged unpushed positions (x1*, x2*) = (-x2*, x2*).
Vec2 equilibrium_positions(const GateParams& params);

struct Trajectory {
  TimeGrid grid;
  std::vector<Vec2> x_bar;
  std::vector<Vec2> p_bar;
};

/// Direct RK4 of Newton's equations for the full potential, starting at rest
/// at equilibrium.
Trajectory classical_trajectory(const GateParams& params, const PulseSpec& pulse, Branch branch);

/// Second-order expansion of the branch potential about x_bar,
/// V(x) ~ E - F.x + 1/2 x.K.x.
QuadraticExpansion taylor_expansion(const PushPotential& potential, Branch branch, double f,
                                    const Vec2& x_bar);

/// taylor_expansion along a precomputed trajectory, one per grid node.
std::vector<QuadraticExpansion> taylor_coefficients(const GateParams& params,
                                                    const PulseSpec& pulse, Branch branch,
                                                    const Trajectory& trajectory);

/// Closure expanding about the propagated centre, so q_bar follows the exact
/// classical motion.
ExpansionFn branch_expansion(std::shared_ptr<const PushPotential> potential,
                             std::shared_ptr<const PulseSpec> pulse, Branch branch);

/// Initial state of every branch: centre at equilibrium, S = I, phi = 0.
GaussianEvolution initial_evolution(const PushPotential& potential);

PropagationResult simulate_branch(const GateParams& params, const PulseSpec& pulse,
                                  Branch branch);

/// All four branches on params.grid(), indexed by index(Branch).
struct GateRun {
  GateParams params;
  std::array<PropagationResult, 4> branches;
};

GateRun simulate_gate(const GateParams& params, const PulseSpec& pulse);

}  // namespace pushgate
