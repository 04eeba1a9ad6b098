#include "pushgate/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pushgate {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double envelope(double t, double tau) { return std::exp(-(t * t) / (tau * tau)); }

}  // namespace

double TabulatedPulse::value(double t) const {
  const int n = grid.steps;
  if (static_cast<int>(samples.size()) != n + 1 || n < 3) {
    throw ConfigError("TabulatedPulse: need steps+1 >= 4 samples matching the grid");
  }
  const double s = (t - grid.t0) / grid.dt;
  if (s < -1e-9 || s > n + 1e-9) {
    throw ConfigError("TabulatedPulse: evaluation outside the tabulated window");
  }
  const int k = std::clamp(static_cast<int>(std::floor(s)), 0, n - 1);
  const int first = std::clamp(k - 1, 0, n - 3);
  const double u = s - first;
  // Lagrange basis on nodes 0,1,2,3 in local coordinates.
  const double l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
  const double l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
  const double l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
  const double l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
  return l0 * samples[first] + l1 * samples[first + 1] + l2 * samples[first + 2] +
         l3 * samples[first + 3];
}

PulseSpec::PulseSpec(Shape shape) : shape_(std::move(shape)) {
  if (const auto* tab = std::get_if<TabulatedPulse>(&shape_)) {
    for (double v : tab->samples) {
      if (!std::isfinite(v)) {
        throw ConfigError("PulseSpec: tabulated samples must be finite");
      }
    }
  }
}

double PulseSpec::value(double t) const {
  return std::visit(
      Overloaded{
          [t](const GaussianPulse& p) { return p.xi * envelope(t, p.tau); },
          [t](const ModulatedGaussianPulse& p) {
            return (p.xi + p.amplitude * std::cos(p.omega_mod * t)) * envelope(t, p.tau);
          },
          [t](const BreathingCorrectedPulse& p) {
            return (p.xi + p.breath_amplitude * std::cos(p.carrier * t)) * envelope(t, p.tau);
          },
          [t](const TabulatedPulse& p) { return p.value(t); },
      },
      shape_);
}

PulseSpec PulseSpec::scaled(double factor) const {
  return std::visit(
      Overloaded{
          [factor](GaussianPulse p) -> PulseSpec {
            p.xi *= factor;
            return p;
          },
          [factor](ModulatedGaussianPulse p) -> PulseSpec {
            p.xi *= factor;
            p.amplitude *= factor;
            return p;
          },
          [factor](BreathingCorrectedPulse p) -> PulseSpec {
            p.xi *= factor;
            p.breath_amplitude *= factor;
            return p;
          },
          [factor](TabulatedPulse p) -> PulseSpec {
            for (double& v : p.samples) v *= factor;
            return p;
          },
      },
      shape_);
}

TabulatedPulse PulseSpec::tabulate(const TimeGrid& grid) const {
  TabulatedPulse out{grid, {}};
  out.samples.resize(grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    out.samples[k] = value(grid.time(k));
  }
  return out;
}

std::string PulseSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&os](const GaussianPulse& p) {
                   os << "gaussian xi=" << p.xi << " tau=" << p.tau;
                 },
                 [&os](const ModulatedGaussianPulse& p) {
                   os << "modulated xi=" << p.xi << " tau=" << p.tau << " A=" << p.amplitude
                      << " omega_mod=" << p.omega_mod;
                 },
                 [&os](const BreathingCorrectedPulse& p) {
                   os << "breathing xi=" << p.xi << " tau=" << p.tau
                      << " A_b=" << p.breath_amplitude << " carrier=" << p.carrier;
                 },
                 [&os](const TabulatedPulse& p) {
                   os << "tabulated samples=" << p.samples.size() << " t0=" << p.grid.t0
                      << " dt=" << p.grid.dt;
                 },
             },
             shape_);
  return os.str();
}

}  // namespace pushgate
