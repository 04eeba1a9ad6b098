#pragma once

#include "pushgate/propagate.hpp"

#include <concepts>
#include <string>
#include <variant>
#include <vector>

namespace pushgate {

/// f(t) = xi exp(-t^2/tau^2)
struct GaussianPulse {
  double xi = 0.0;
  double tau = 1.0;
};

/// f(t) = [xi + A cos(omega_mod t)] exp(-t^2/tau^2)
struct ModulatedGaussianPulse {
  double xi = 0.0;
  double tau = 1.0;
  double amplitude = 0.0;
  double omega_mod = 1.0;
};

/// f(t) = [xi + A_b cos(carrier t)] exp(-t^2/tau^2), carrier = epsilon/2.
struct BreathingCorrectedPulse {
  double xi = 0.0;
  double tau = 1.0;
  double breath_amplitude = 0.0;
  double carrier = 0.0;
};

/// Samples on a grid; off-node values come from 4-point cubic Lagrange
/// interpolation (one-sided at the ends).
struct TabulatedPulse {
  TimeGrid grid;
  std::vector<double> samples;

  double value(double t) const;
};

class PulseSpec {
 public:
  using Shape = std::variant<GaussianPulse, ModulatedGaussianPulse, BreathingCorrectedPulse,
                             TabulatedPulse>;

  PulseSpec() : shape_(GaussianPulse{}) {}
  PulseSpec(Shape shape);  // NOLINT: implicit from any shape
  template <class T>
    requires(!std::same_as<std::remove_cvref_t<T>, Shape> &&
             std::constructible_from<Shape, T>)
  PulseSpec(T&& shape) : PulseSpec(Shape(std::forward<T>(shape))) {}  // NOLINT

  static PulseSpec gaussian(double xi, double tau) { return GaussianPulse{xi, tau}; }
  static PulseSpec zero() { return GaussianPulse{0.0, 1.0}; }

  double value(double t) const;
  /// Every amplitude multiplied by `factor`.
  PulseSpec scaled(double factor) const;
  /// Samples on `grid`.
  TabulatedPulse tabulate(const TimeGrid& grid) const;

  bool is_tabulated() const { return std::holds_alternative<TabulatedPulse>(shape_); }
  const TabulatedPulse& tabulated() const { return std::get<TabulatedPulse>(shape_); }
  TabulatedPulse& tabulated() { return std::get<TabulatedPulse>(shape_); }
  const Shape& shape() const { return shape_; }

  /// Short human-readable description for run summaries.
  std::string describe() const;

 private:
  Shape shape_;
};

}  // namespace pushgate
