#include "pushgate/potential.hpp"

#include <cmath>

namespace pushgate {

namespace {

// Direction of the push on ion i: -(-1)^i, i.e. ion 1 left, ion 2 right.
constexpr std::array<double, 2> kPushSign{+1.0, -1.0};
// d r / d x_i for r = x2 - x1.
constexpr std::array<double, 2> kSeparationGrad{-1.0, +1.0};

}  // namespace

PushPotential::PushPotential(const GateParams& params)
    : params_(params), kappa_(params.a_over_d), equilibrium_(solve_equilibrium()) {
  energy_offset_ = raw(equilibrium_, 0.0, 0.0).value;
}

PushPotential::Derivatives PushPotential::raw(const Vec2& x, double f1, double f2) const {
  const double s = separation_factor(x);
  if (!(s > 0.0)) {
    throw NumericalError("Coulomb singularity crossed: 1 + (a/d)(x2 - x1) <= 0");
  }
  const double eps = params_.epsilon;
  const double r = x(1) - x(0);
  // C(r) = (eps/4) kappa^-2 (1/s - 1) = -(eps/4) kappa^-1 r / s
  const double c0 = -0.25 * eps / kappa_ * r / s;
  const double c1 = -0.25 * eps / kappa_ / (s * s);
  const double c2 = 0.5 * eps / (s * s * s);
  const double c3 = -1.5 * eps * kappa_ / (s * s * s * s);

  const std::array<double, 2> f{f1, f2};
  const double G = params_.G;

  Derivatives d;
  d.value = 0.5 * x.squaredNorm() + c0;
  for (int i = 0; i < 2; ++i) {
    d.value += f[i] * (kPushSign[i] * x(i) + G * x(i) * x(i));
    d.gradient(i) = x(i) + c1 * kSeparationGrad[i] + f[i] * (kPushSign[i] + 2.0 * G * x(i));
    for (int j = 0; j < 2; ++j) {
      d.hessian(i, j) = c2 * kSeparationGrad[i] * kSeparationGrad[j];
      for (int k = 0; k < 2; ++k) {
        d.third[k](i, j) = c3 * kSeparationGrad[i] * kSeparationGrad[j] * kSeparationGrad[k];
      }
    }
    d.hessian(i, i) += 1.0 + 2.0 * f[i] * G;
  }
  return d;
}

PushPotential::Derivatives PushPotential::evaluate(const Vec2& x, double f1, double f2) const {
  Derivatives d = raw(x, f1, f2);
  d.value -= energy_offset_;
  return d;
}

PushPotential::Derivatives PushPotential::push_part(const Vec2& x, double w1, double w2) const {
  const std::array<double, 2> w{w1, w2};
  const double G = params_.G;
  Derivatives d;
  for (int i = 0; i < 2; ++i) {
    d.value += w[i] * (kPushSign[i] * x(i) + G * x(i) * x(i));
    d.gradient(i) = w[i] * (kPushSign[i] + 2.0 * G * x(i));
    d.hessian(i, i) = 2.0 * w[i] * G;
  }
  return d;
}

Vec2 PushPotential::solve_equilibrium() const {
  const double eps = params_.epsilon;
  if (eps == 0.0) {
    return Vec2::Zero();
  }
  Vec2 x(-0.25 * eps / kappa_, 0.25 * eps / kappa_);
  for (int iter = 0; iter < 100; ++iter) {
    const Derivatives d = raw(x, 0.0, 0.0);
    if (d.gradient.cwiseAbs().maxCoeff() < 1e-12) {
      // A couple of polishing steps bring the residual to round-off, so an
      // unpushed branch stays put to ~1e-15 over the whole window.
      for (int polish = 0; polish < 2; ++polish) {
        const Derivatives e = raw(x, 0.0, 0.0);
        const Vec2 trial = x - e.hessian.ldlt().solve(e.gradient);
        if (raw(trial, 0.0, 0.0).gradient.cwiseAbs().maxCoeff() >=
            e.gradient.cwiseAbs().maxCoeff()) {
          break;
        }
        x = trial;
      }
      x(0) = -x(1);
      return x;
    }
    x -= d.hessian.ldlt().solve(d.gradient);
  }
  const Derivatives d = raw(x, 0.0, 0.0);
  if (d.gradient.cwiseAbs().maxCoeff() < 1e-12) {
    return x;
  }
  throw NumericalError("equilibrium_positions: Newton iteration did not converge in 100 steps");
}

}  // namespace pushgate
