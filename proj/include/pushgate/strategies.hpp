#pragma once

#include "pushgate/krotov.hpp"

#include <vector>

namespace pushgate {

/// Multiplies every amplitude by sqrt(pi / observed_phase), observed_phase
/// being the phi combination (the Tr[b gamma] part is ignored).
/// Throws NumericalError if observed_phase <= 0.
PulseSpec rescale_amplitude(const PulseSpec& pulse, double observed_phase);

struct StageResult {
  PulseSpec pulse;
  GateEvaluation evaluation;  ///< of `pulse`
  IterationLog log;
};

/// Up to `rounds` rescale steps; the log holds the starting point (iteration
/// 0) and every rescaled pulse.
StageResult rescale_iterations(const GateParams& params, const PulseSpec& pulse, int rounds,
                               SloshForm form = SloshForm::appendix);

/// [xi' + A_b' cos(eps t / 2)] exp(-t^2/tau^2) for a Gaussian base pulse.
/// A_b minimizes E_S over [-2 xi, 0] by golden-section search; every trial
/// pulse is rescaled to the base pulse's integral of f^2 so the gate phase
/// (to lowest order) stays fixed while the shape changes.
PulseSpec breathing_corrected_pulse(const GateParams& params, const GaussianPulse& base);

/// Trial pulse for a given raw A_b, normalized as above.
BreathingCorrectedPulse normalized_breathing_pulse(const GateParams& params,
                                                   const GaussianPulse& base, double a_b);

struct CombinedResult {
  PulseSpec pulse;
  ErrorBudget budget;
  IterationLog log;
};

/// Breathing correction -> up to 3 rescale rounds -> Krotov (sign changes
/// allowed throughout).
CombinedResult combined_strategy(const GateParams& params, const KrotovConfig& config,
                                 int rescale_rounds = 3);

/// f_opt - f_0 on `grid`, raw and divided by 1/2 xi exp(-omega_tau^2/4), so a
/// perfect match of the lowest-order prediction -cos(t) exp(-t^2/tau^2) has
/// extremum -1.
struct PulseDiff {
  std::vector<double> t;
  std::vector<double> raw;
  std::vector<double> normalized;
};

PulseDiff emit_pulse_diff(const PulseSpec& initial, const PulseSpec& optimized,
                          const TimeGrid& grid, double xi, double omega_tau);

/// Entry of largest magnitude (sign kept).
double extremum(const std::vector<double>& v);

}  // namespace pushgate
