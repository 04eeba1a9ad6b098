#include "pushgate/propagate.hpp"

#include "pushgate/symplectic.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace pushgate {

TimeGrid TimeGrid::uniform(double t_begin, double t_end, int steps) {
  if (steps < 1 || !(t_end > t_begin)) {
    throw ConfigError("TimeGrid: need t_end > t_begin and at least one step");
  }
  return TimeGrid{t_begin, (t_end - t_begin) / steps, steps};
}

QuadraticExpansion::QuadraticExpansion(double energy, Vector force, const Matrix& curvature,
                                       Matrix inverse_mass)
    : E(energy),
      F(std::move(force)),
      K(0.5 * (curvature + curvature.transpose())),
      M_inv(std::move(inverse_mass)) {}

Matrix QuadraticExpansion::h() const {
  const int n = dof();
  Matrix out = Matrix::Zero(2 * n, 2 * n);
  out.topLeftCorner(n, n) = K;
  out.bottomRightCorner(n, n) = M_inv;
  return out;
}

GaussianEvolution GaussianEvolution::identity(const Vector& q_bar0) {
  const auto dim = q_bar0.size();
  return GaussianEvolution{0.0, q_bar0, Matrix::Identity(dim, dim)};
}

GaussianEvolution evolution_rate(const QuadraticExpansion& ex, const GaussianEvolution& state) {
  const int n = ex.dof();
  const auto x = state.q_bar.head(n);
  const auto p = state.q_bar.tail(n);

  GaussianEvolution rate;
  rate.phi = ex.E - 0.5 * ex.F.dot(x);
  // J h q + (0, F) = (M_inv p, -K x + F)
  rate.q_bar.resize(2 * n);
  rate.q_bar.head(n) = ex.M_inv * p;
  rate.q_bar.tail(n) = -ex.K * x + ex.F;
  // J h S: top rows M_inv S_p, bottom rows -K S_x
  rate.S.resize(2 * n, 2 * n);
  rate.S.topRows(n) = ex.M_inv * state.S.bottomRows(n);
  rate.S.bottomRows(n) = -ex.K * state.S.topRows(n);
  return rate;
}

namespace {

GaussianEvolution axpy(const GaussianEvolution& y, double a, const GaussianEvolution& k) {
  return GaussianEvolution{y.phi + a * k.phi, y.q_bar + a * k.q_bar, y.S + a * k.S};
}

Vector x_part(const GaussianEvolution& y) { return y.q_bar.head(y.q_bar.size() / 2); }

bool all_finite(const GaussianEvolution& y) {
  return std::isfinite(y.phi) && y.q_bar.allFinite() && y.S.allFinite();
}

double max_curvature(const QuadraticExpansion& ex) {
  const Eigen::MatrixXd K = ex.K;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(K, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

}  // namespace

GaussianEvolution rk4_step(const ExpansionFn& expansion, double t, double dt,
                           const GaussianEvolution& state) {
  const double half = 0.5 * dt;
  const GaussianEvolution k1 = evolution_rate(expansion(t, x_part(state)), state);
  const GaussianEvolution y2 = axpy(state, half, k1);
  const GaussianEvolution k2 = evolution_rate(expansion(t + half, x_part(y2)), y2);
  const GaussianEvolution y3 = axpy(state, half, k2);
  const GaussianEvolution k3 = evolution_rate(expansion(t + half, x_part(y3)), y3);
  const GaussianEvolution y4 = axpy(state, dt, k3);
  const GaussianEvolution k4 = evolution_rate(expansion(t + dt, x_part(y4)), y4);

  GaussianEvolution next;
  next.phi = state.phi + dt / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
  next.q_bar = state.q_bar + dt / 6.0 * (k1.q_bar + 2.0 * k2.q_bar + 2.0 * k3.q_bar + k4.q_bar);
  next.S = state.S + dt / 6.0 * (k1.S + 2.0 * k2.S + 2.0 * k3.S + k4.S);
  return next;
}

PropagationResult propagate(const ExpansionFn& expansion, double t0, double t1, int steps,
                            const GaussianEvolution& initial) {
  if (steps < 2) {
    throw ConfigError("propagate: steps must be >= 2");
  }
  if (initial.q_bar.size() % 2 != 0 || initial.S.rows() != initial.q_bar.size()) {
    throw ConfigError("propagate: inconsistent initial state dimensions");
  }
  PropagationResult result;
  result.grid = TimeGrid::uniform(t0, t1, steps);
  result.samples.reserve(steps + 1);
  result.samples.push_back(initial);

  const double dt = result.grid.dt;
  double worst_resolution = 0.0;
  double worst_time = t0;
  for (int k = 0; k < steps; ++k) {
    const double t = result.grid.time(k);
    const GaussianEvolution& current = result.samples.back();
    const double resolution = dt * std::sqrt(std::max(0.0, max_curvature(expansion(t, x_part(current)))));
    if (resolution > worst_resolution) {
      worst_resolution = resolution;
      worst_time = t;
    }
    GaussianEvolution next = rk4_step(expansion, t, dt, current);
    if (!all_finite(next)) {
      std::ostringstream msg;
      msg << "propagate: non-finite state at step " << k + 1 << " (t = " << t + dt << ")";
      throw NumericalError(msg.str());
    }
    result.samples.push_back(std::move(next));
  }
  if (worst_resolution > 0.5) {
    std::ostringstream msg;
    msg << "time step under-resolves the fastest curvature: dt*sqrt(max eig K) = "
        << worst_resolution << " at t = " << worst_time;
    result.warnings.push_back(msg.str());
  }
  return result;
}

}  // namespace pushgate
