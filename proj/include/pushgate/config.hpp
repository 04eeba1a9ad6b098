#pragma once

#include "pushgate/krotov.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pushgate {

enum class Mode { simulate, sweep, optimize, combined };
enum class PulseKind { gaussian, modulated, breathing };
enum class SweepScale { linear, log };

struct SweepAxis {
  std::string parameter;  ///< empty unless mode = sweep
  double min = 0.0;
  double max = 0.0;
  int points = 50;
  SweepScale scale = SweepScale::linear;

  double value(int i) const;
};

struct RunConfig {
  Mode mode = Mode::simulate;
  GateParams params;
  PulseKind pulse = PulseKind::gaussian;
  std::optional<double> xi;  ///< unset: amplitude for gate phase pi to lowest order
  double pulse_amplitude = 0.0;
  double pulse_omega_mod = 1.0;
  SweepAxis sweep;
  SloshForm slosh_form = SloshForm::appendix;
  KrotovConfig krotov;
  int rescale_rounds = 3;
  std::string output = "pushgate_out";

  /// Pulse for the given (possibly swept) parameters.
  PulseSpec pulse_spec(const GateParams& p, double xi_value, double amplitude,
                       double omega_mod) const;
  PulseSpec pulse_spec() const;
  double resolved_xi(const GateParams& p) const;

  /// Every key with its effective value, one "key = value" per line, in a
  /// fixed order.
  std::string echo() const;
};

/// Parses the flat "key = value" format ('#' starts a comment). Errors
/// (ConfigError) carry the line number.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Keys accepted by parse_config, in echo order.
const std::vector<std::string>& config_keys();

}  // namespace pushgate
