#include "pushgate/krotov.hpp"

#include "pushgate/symplectic.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace pushgate {

namespace {

Vec2 head2(const Vector& q) { return Vec2(q(0), q(1)); }

std::array<GaussianEvolution, 4> finals_of(const GateRun& run) {
  std::array<GaussianEvolution, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = run.branches[i].final_state();
  return out;
}

Matrix h_of(const Mat2& K) {
  Matrix h = Matrix::Identity(4, 4);
  h.topLeftCorner(2, 2) = K;
  return h;
}

// Forward data needed between nodes, per branch and node.
struct ForwardNode {
  Vec2 x;
  Vec2 p;
  Matrix S;
  Matrix S_dot;
};

std::vector<ForwardNode> forward_nodes(const PushPotential& V, const PropagationResult& fwd,
                                       const PulseSpec& pulse, Branch b, const Matrix& J) {
  const auto w = push_flags(b);
  std::vector<ForwardNode> out;
  out.reserve(fwd.samples.size());
  for (std::size_t k = 0; k < fwd.samples.size(); ++k) {
    const auto& s = fwd.samples[k];
    const double f = pulse.value(fwd.grid.time(static_cast<int>(k)));
    ForwardNode n{head2(s.q_bar), Vec2(s.q_bar(2), s.q_bar(3)), s.S, {}};
    const auto d = V.evaluate(n.x, w[0] * f, w[1] * f);
    n.S_dot = J * h_of(d.hessian) * n.S;
    out.push_back(std::move(n));
  }
  return out;
}

// Cubic Hermite value at the interval midpoint.
template <class T>
T hermite_mid(const T& y0, const T& d0, const T& y1, const T& d1, double dt) {
  return 0.5 * (y0 + y1) + (dt / 8.0) * (d0 - d1);
}

AdjointSample costate_rate(const PushPotential& V, Branch b, double f, const Vec2& x,
                           const Matrix& S, const AdjointSample& a, const Matrix& J) {
  const auto w = push_flags(b);
  const auto d = V.evaluate(x, w[0] * f, w[1] * f);
  const Vec2 xt = head2(a.q_tilde);
  const Vec2 pt(a.q_tilde(2), a.q_tilde(3));
  const Matrix N = S * a.S_tilde.transpose() * J;
  const Mat2 Nxx = N.topLeftCorner(2, 2);

  Vec2 curv;  // sum_ij V_ijk N_ji
  for (int k = 0; k < 2; ++k) curv(k) = d.third[k].cwiseProduct(Nxx.transpose()).sum();

  AdjointSample r;
  r.phi_tilde = 0.0;
  r.q_tilde.resize(4);
  r.q_tilde.head(2) =
      -a.phi_tilde * 0.5 * (d.gradient - d.hessian * x) + d.hessian * pt - curv;
  r.q_tilde.tail(2) = -xt;
  r.S_tilde = h_of(d.hessian) * J * a.S_tilde;
  return r;
}

AdjointSample axpy(const AdjointSample& y, double s, const AdjointSample& k) {
  return AdjointSample{y.phi_tilde + s * k.phi_tilde, y.q_tilde + s * k.q_tilde,
                       y.S_tilde + s * k.S_tilde};
}

// dH/df for one branch at one node.
double hamiltonian_slope(const PushPotential& V, Branch b, const Vec2& x, const Matrix& S,
                         const AdjointSample& a, const Matrix& J) {
  const auto w = push_flags(b);
  if (w[0] == 0.0 && w[1] == 0.0) return 0.0;
  const auto P = V.push_part(x, w[0], w[1]);
  const Vec2 pt(a.q_tilde(2), a.q_tilde(3));
  const Matrix N = S * a.S_tilde.transpose() * J;
  double tr = 0.0;
  for (int i = 0; i < 2; ++i) tr += P.hessian(i, i) * N(i, i);
  return a.phi_tilde * (P.value - 0.5 * x.dot(P.gradient)) - pt.dot(P.gradient) + tr;
}

}  // namespace

ObjectiveValue objective(const std::array<GaussianEvolution, 4>& finals) {
  ObjectiveValue o;
  const double comb = nonlocal_combination(
      {finals[0].phi, finals[1].phi, finals[2].phi, finals[3].phi});
  o.phi = 0.5 * (comb - std::numbers::pi) * (comb - std::numbers::pi);
  for (int b = 1; b < 4; ++b) {
    o.q += 0.5 * (finals[b].q_bar - finals[0].q_bar).squaredNorm();
    o.S += 0.5 * (finals[b].S - finals[0].S).squaredNorm();
  }
  o.total = o.phi + o.q + o.S;
  return o;
}

ObjectiveValue objective(const BranchSet& results) {
  std::array<GaussianEvolution, 4> finals;
  for (int i = 0; i < 4; ++i) {
    finals[i] = GaussianEvolution{results[i].phi_T, results[i].q_bar_T, results[i].S_T};
  }
  return objective(finals);
}

std::array<AdjointSample, 4> terminal_conditions(const std::array<GaussianEvolution, 4>& finals) {
  const double comb = nonlocal_combination(
      {finals[0].phi, finals[1].phi, finals[2].phi, finals[3].phi});
  const double dphi = comb - std::numbers::pi;
  std::array<AdjointSample, 4> out;
  Vector q_sum = Vector::Zero(finals[0].q_bar.size());
  Matrix S_sum = Matrix::Zero(finals[0].S.rows(), finals[0].S.cols());
  for (int b = 1; b < 4; ++b) {
    const Vector dq = finals[b].q_bar - finals[0].q_bar;
    const Matrix dS = finals[b].S - finals[0].S;
    out[b] = AdjointSample{-parity(kBranches[b]) * dphi, -dq, -dS};
    q_sum += dq;
    S_sum += dS;
  }
  // d/d(state_00) of the pair sums is -(sum of differences)
  out[0] = AdjointSample{-dphi, q_sum, S_sum};
  return out;
}

AdjointState backward_propagate(const GateRun& forward, const PulseSpec& pulse,
                                const std::array<AdjointSample, 4>& terminal) {
  const PushPotential V(forward.params);
  const Matrix J = symplectic_j(2);
  const TimeGrid grid = forward.branches[0].grid;
  const double dt = grid.dt;

  AdjointState out{grid, {}};
  for (Branch b : kBranches) {
    const int bi = index(b);
    const auto nodes = forward_nodes(V, forward.branches[bi], pulse, b, J);
    std::vector<AdjointSample> adj(grid.size());
    adj[grid.steps] = terminal[bi];
    for (int k = grid.steps - 1; k >= 0; --k) {
      const ForwardNode& n0 = nodes[k];
      const ForwardNode& n1 = nodes[k + 1];
      const double t0 = grid.time(k);
      const double t1 = grid.time(k + 1);
      const double tm = 0.5 * (t0 + t1);
      const Vec2 xm = hermite_mid(n0.x, n0.p, n1.x, n1.p, dt);
      const Matrix Sm = hermite_mid(n0.S, n0.S_dot, n1.S, n1.S_dot, dt);
      const double f0 = pulse.value(t0);
      const double fm = pulse.value(tm);
      const double f1 = pulse.value(t1);

      const AdjointSample& y = adj[k + 1];
      const AdjointSample k1 = costate_rate(V, b, f1, n1.x, n1.S, y, J);
      const AdjointSample k2 = costate_rate(V, b, fm, xm, Sm, axpy(y, -0.5 * dt, k1), J);
      const AdjointSample k3 = costate_rate(V, b, fm, xm, Sm, axpy(y, -0.5 * dt, k2), J);
      const AdjointSample k4 = costate_rate(V, b, f0, n0.x, n0.S, axpy(y, -dt, k3), J);
      AdjointSample next = y;
      next.q_tilde -= dt / 6.0 * (k1.q_tilde + 2.0 * k2.q_tilde + 2.0 * k3.q_tilde + k4.q_tilde);
      next.S_tilde -= dt / 6.0 * (k1.S_tilde + 2.0 * k2.S_tilde + 2.0 * k3.S_tilde + k4.S_tilde);
      if (!next.q_tilde.allFinite() || !next.S_tilde.allFinite()) {
        std::ostringstream os;
        os << "backward_propagate: non-finite adjoint in branch " << label(b) << " at step " << k
           << " (t=" << t0 << ")";
        throw NumericalError(os.str());
      }
      adj[k] = std::move(next);
    }
    out.branches[bi] = std::move(adj);
  }
  return out;
}

std::vector<double> pulse_gradient(const AdjointState& adjoints, const GateRun& forward,
                                   const PulseSpec& /*pulse*/) {
  const PushPotential V(forward.params);
  const Matrix J = symplectic_j(2);
  const TimeGrid& grid = adjoints.grid;
  std::vector<double> g(grid.size(), 0.0);
  for (Branch b : kBranches) {
    const int bi = index(b);
    const auto& fwd = forward.branches[bi].samples;
    for (int k = 0; k < grid.size(); ++k) {
      g[k] -= hamiltonian_slope(V, b, head2(fwd[k].q_bar), fwd[k].S, adjoints.branches[bi][k], J);
    }
  }
  return g;
}

KrotovResult krotov_iterate(const GateParams& params, const PulseSpec& pulse0,
                            const KrotovConfig& config) {
  if (!(config.step_weight > 0.0)) throw ConfigError("krotov: step_weight must be > 0");
  if (config.max_iters < 0) throw ConfigError("krotov: max_iters must be >= 0");

  const TimeGrid grid = params.grid();
  const Matrix gamma = thermal_covariance(params.epsilon, params.kT).gamma;
  const Matrix J = symplectic_j(2);
  auto V = std::make_shared<const PushPotential>(params);

  auto pulse = std::make_shared<PulseSpec>(pulse0.is_tabulated() ? pulse0
                                                                 : PulseSpec(pulse0.tabulate(grid)));
  const TabulatedPulse& tab = pulse->tabulated();
  if (tab.grid.steps != grid.steps || tab.grid.t0 != grid.t0 || tab.grid.dt != grid.dt) {
    throw ConfigError("krotov: tabulated start pulse is not on the run grid");
  }

  KrotovResult result{*pulse, {}};
  auto record = [&](int it, const GateRun& run) {
    const BranchSet res = branch_results(run, gamma);
    result.log.push_back(
        IterationRecord{"krotov", it, objective(res), error_budget(res, gamma, config.slosh_form)});
  };

  GateRun run = simulate_gate(params, *pulse);
  record(0, run);
  if (result.log.back().objective.total < config.objective_tol) return result;

  std::array<ExpansionFn, 4> expansions;
  for (Branch b : kBranches) expansions[index(b)] = branch_expansion(V, pulse, b);

  int increases = 0;
  for (int it = 1; it <= config.max_iters; ++it) {
    const AdjointState adj = backward_propagate(run, *pulse, terminal_conditions(finals_of(run)));

    // Sweep forward: update f_k from the new states and old costates, then step.
    std::vector<double>& f = pulse->tabulated().samples;
    std::array<GaussianEvolution, 4> y;
    for (int i = 0; i < 4; ++i) y[i] = run.branches[i].samples.front();
    for (int k = 0; k <= grid.steps; ++k) {
      double dH = 0.0;
      for (Branch b : kBranches) {
        const int bi = index(b);
        dH += hamiltonian_slope(*V, b, head2(y[bi].q_bar), y[bi].S, adj.branches[bi][k], J);
      }
      // dJ/df = -sum dH/df
      double fk = f[k] + dH / config.step_weight;
      if (!config.allow_negative_pulse) fk = std::max(fk, 0.0);
      f[k] = fk;
      if (k == grid.steps) break;
      for (int i = 0; i < 4; ++i) {
        y[i] = rk4_step(expansions[i], grid.time(k), grid.dt, y[i]);
        if (!std::isfinite(y[i].phi) || !y[i].q_bar.allFinite() || !y[i].S.allFinite()) {
          std::ostringstream os;
          os << "krotov iteration " << it << ": non-finite state in sweep at step " << k + 1;
          throw NumericalError(os.str());
        }
      }
    }

    const double prev = result.log.back().objective.total;
    run = simulate_gate(params, *pulse);
    record(it, run);
    const double now = result.log.back().objective.total;

    if (now > prev * (1.0 + 1e-12)) {
      if (++increases >= 5) {
        std::ostringstream os;
        os << "krotov: objective increased for 5 consecutive iterations (at iteration " << it
           << ", J=" << now << "); try a larger step_weight";
        throw NumericalError(os.str());
      }
    } else {
      increases = 0;
    }
    if (std::abs(now - prev) < config.objective_tol) break;
  }
  result.pulse = *pulse;
  return result;
}

}  // namespace pushgate
