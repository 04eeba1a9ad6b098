#include "pushgate/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pushgate {

PulseSpec rescale_amplitude(const PulseSpec& pulse, double observed_phase) {
  if (!(observed_phase > 0.0)) {
    std::ostringstream os;
    os << "rescale_amplitude: observed gate phase " << observed_phase
       << " <= 0, the pulse produces no usable phase";
    throw NumericalError(os.str());
  }
  return pulse.scaled(std::sqrt(std::numbers::pi / observed_phase));
}

StageResult rescale_iterations(const GateParams& params, const PulseSpec& pulse, int rounds,
                               SloshForm form) {
  StageResult out{pulse, evaluate_gate(params, pulse, form), {}};
  out.log.push_back(IterationRecord{"rescale", 0, objective(out.evaluation.results),
                                    out.evaluation.budget});
  for (int r = 1; r <= rounds; ++r) {
    out.pulse = rescale_amplitude(out.pulse, out.evaluation.budget.phi_phase);
    out.evaluation = evaluate_gate(params, out.pulse, form);
    out.log.push_back(IterationRecord{"rescale", r, objective(out.evaluation.results),
                                      out.evaluation.budget});
  }
  return out;
}

BreathingCorrectedPulse normalized_breathing_pulse(const GateParams& params,
                                                   const GaussianPulse& base, double a_b) {
  const double carrier = 0.5 * params.epsilon;
  const double alpha = a_b / base.xi;
  // int (1 + alpha cos ct)^2 e^{-2t^2/tau^2} dt relative to int e^{-2t^2/tau^2} dt
  const double ct2 = carrier * carrier * base.tau * base.tau;
  const double rel = 1.0 + 2.0 * alpha * std::exp(-ct2 / 8.0) +
                     0.5 * alpha * alpha * (1.0 + std::exp(-ct2 / 2.0));
  const double xi = base.xi / std::sqrt(rel);
  return BreathingCorrectedPulse{xi, base.tau, alpha * xi, carrier};
}

PulseSpec breathing_corrected_pulse(const GateParams& params, const GaussianPulse& base) {
  GateParams p = params;
  auto breath = [&](double a_b) {
    return evaluate_gate(p, normalized_breathing_pulse(p, base, a_b)).budget.e_breath;
  };
  const double lo = -2.0 * base.xi;
  const double hi = 0.0;

  // Coarse scan to land in the right basin, then golden section.
  constexpr int kScan = 40;
  int best = 0;
  double best_val = breath(lo);
  for (int i = 1; i <= kScan; ++i) {
    const double v = breath(lo + (hi - lo) * i / kScan);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(best - 1, 0) / kScan;
  double b = lo + (hi - lo) * std::min(best + 1, kScan) / kScan;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = breath(c);
  double fd = breath(d);
  while (b - a > 1e-9 * base.xi) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = breath(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = breath(d);
    }
  }
  const double a_b = fc < fd ? c : d;
  const double f_best = std::min(fc, fd);
  // The scan point may still beat the bracket interior (flat ends).
  if (best_val < f_best) {
    return normalized_breathing_pulse(p, base, lo + (hi - lo) * best / kScan);
  }
  return normalized_breathing_pulse(p, base, a_b);
}

CombinedResult combined_strategy(const GateParams& params, const KrotovConfig& config,
                                 int rescale_rounds) {
  const GaussianPulse base{default_amplitude(params.epsilon, params.omega_tau), params.tau()};
  CombinedResult out{PulseSpec(base), {}, {}};

  const GateEvaluation start = evaluate_gate(params, out.pulse, config.slosh_form);
  out.log.push_back(IterationRecord{"initial", 0, objective(start.results), start.budget});

  out.pulse = breathing_corrected_pulse(params, base);
  const GateEvaluation corrected = evaluate_gate(params, out.pulse, config.slosh_form);
  out.log.push_back(IterationRecord{"breathing", 0, objective(corrected.results),
                                    corrected.budget});

  StageResult rescaled = rescale_iterations(params, out.pulse, rescale_rounds, config.slosh_form);
  for (std::size_t i = 1; i < rescaled.log.size(); ++i) out.log.push_back(rescaled.log[i]);

  KrotovConfig kc = config;
  kc.allow_negative_pulse = true;
  KrotovResult kr = krotov_iterate(params, rescaled.pulse, kc);
  for (std::size_t i = 1; i < kr.log.size(); ++i) out.log.push_back(kr.log[i]);

  out.pulse = kr.pulse;
  out.budget = out.log.back().budget;
  return out;
}

PulseDiff emit_pulse_diff(const PulseSpec& initial, const PulseSpec& optimized,
                          const TimeGrid& grid, double xi, double omega_tau) {
  for (const PulseSpec* p : {&initial, &optimized}) {
    if (!p->is_tabulated()) continue;
    const TimeGrid& g = p->tabulated().grid;
    if (g.steps != grid.steps || std::abs(g.t0 - grid.t0) > 1e-12 ||
        std::abs(g.dt - grid.dt) > 1e-15 * std::max(1.0, std::abs(grid.dt))) {
      throw ConfigError("emit_pulse_diff: pulse grid does not match the output grid");
    }
  }
  const double scale = 0.5 * xi * std::exp(-omega_tau * omega_tau / 4.0);
  PulseDiff out;
  out.t.reserve(grid.size());
  out.raw.reserve(grid.size());
  out.normalized.reserve(grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    const double t = grid.time(k);
    const double d = optimized.value(t) - initial.value(t);
    out.t.push_back(t);
    out.raw.push_back(d);
    out.normalized.push_back(d / scale);
  }
  return out;
}

double extremum(const std::vector<double>& v) {
  double best = 0.0;
  for (double x : v) {
    if (std::abs(x) > std::abs(best)) best = x;
  }
  return best;
}

}  // namespace pushgate
