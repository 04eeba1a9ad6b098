#include "pushgate/config.hpp"

#include "pushgate/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace pushgate {

namespace {

// Thrown by value parsers; parse_config adds key and line.
struct BadValue {
  std::string message;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if (!v.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || v.empty()) {
    throw BadValue{"cannot parse '" + v + "' as a number"};
  }
  if (!std::isfinite(out)) throw BadValue{"value must be finite"};
  return out;
}

int to_int(const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw BadValue{"cannot parse '" + v + "' as an integer"};
  }
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw BadValue{"cannot parse '" + v + "' as a boolean (true/false)"};
}

template <class T>
void require(bool ok, const char* what, T got) {
  if (!ok) {
    std::ostringstream os;
    os.precision(17);
    os << what << " (got " << got << ")";
    throw BadValue{os.str()};
  }
}

std::string fmt(double v) { return format_double(v); }

struct KeySpec {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

// Sweepable keys write through these so sweep endpoints get the same checks.
const std::map<std::string, std::function<void(RunConfig&, double)>>& sweep_setters() {
  static const std::map<std::string, std::function<void(RunConfig&, double)>> table{
      {"epsilon",
       [](RunConfig& c, double v) {
         require(v > 0.0, "must be > 0", v);
         c.params.epsilon = v;
       }},
      {"a_over_d",
       [](RunConfig& c, double v) {
         require(v > 0.0 && v < 1.0, "must be in (0, 1)", v);
         c.params.a_over_d = v;
       }},
      {"G", [](RunConfig& c, double v) { c.params.G = v; }},
      {"omega_tau",
       [](RunConfig& c, double v) {
         require(v > 0.0, "must be > 0", v);
         c.params.omega_tau = v;
       }},
      {"kT",
       [](RunConfig& c, double v) {
         require(v >= 0.0, "must be >= 0", v);
         c.params.kT = v;
       }},
      {"t_window",
       [](RunConfig& c, double v) {
         require(v >= 1.0, "must be >= 1", v);
         c.params.t_window = v;
       }},
      {"xi",
       [](RunConfig& c, double v) {
         require(v >= 0.0, "must be >= 0", v);
         c.xi = v;
       }},
      {"pulse_amplitude", [](RunConfig& c, double v) { c.pulse_amplitude = v; }},
      {"pulse_omega_mod",
       [](RunConfig& c, double v) {
         require(v > 0.0, "must be > 0", v);
         c.pulse_omega_mod = v;
       }},
  };
  return table;
}

KeySpec numeric(const std::string& name, std::function<double(const RunConfig&)> get) {
  return KeySpec{name,
                 [name](RunConfig& c, const std::string& v) {
                   sweep_setters().at(name)(c, to_double(v));
                 },
                 [get = std::move(get)](const RunConfig& c) { return fmt(get(c)); }};
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table{
      {"mode",
       [](RunConfig& c, const std::string& v) {
         if (v == "simulate") c.mode = Mode::simulate;
         else if (v == "sweep") c.mode = Mode::sweep;
         else if (v == "optimize") c.mode = Mode::optimize;
         else if (v == "combined") c.mode = Mode::combined;
         else throw BadValue{"expected simulate, sweep, optimize or combined, got '" + v + "'"};
       },
       [](const RunConfig& c) -> std::string {
         switch (c.mode) {
           case Mode::simulate: return "simulate";
           case Mode::sweep: return "sweep";
           case Mode::optimize: return "optimize";
           case Mode::combined: return "combined";
         }
         return "?";
       }},
      numeric("epsilon", [](const RunConfig& c) { return c.params.epsilon; }),
      numeric("a_over_d", [](const RunConfig& c) { return c.params.a_over_d; }),
      numeric("G", [](const RunConfig& c) { return c.params.G; }),
      numeric("omega_tau", [](const RunConfig& c) { return c.params.omega_tau; }),
      numeric("kT", [](const RunConfig& c) { return c.params.kT; }),
      numeric("t_window", [](const RunConfig& c) { return c.params.t_window; }),
      {"steps_per_period",
       [](RunConfig& c, const std::string& v) {
         const int n = to_int(v);
         require(n >= 8, "must be >= 8", n);
         c.params.steps_per_period = n;
       },
       [](const RunConfig& c) { return std::to_string(c.params.steps_per_period); }},
      {"pulse",
       [](RunConfig& c, const std::string& v) {
         if (v == "gaussian") c.pulse = PulseKind::gaussian;
         else if (v == "modulated") c.pulse = PulseKind::modulated;
         else if (v == "breathing") c.pulse = PulseKind::breathing;
         else throw BadValue{"expected gaussian, modulated or breathing, got '" + v + "'"};
       },
       [](const RunConfig& c) -> std::string {
         switch (c.pulse) {
           case PulseKind::gaussian: return "gaussian";
           case PulseKind::modulated: return "modulated";
           case PulseKind::breathing: return "breathing";
         }
         return "?";
       }},
      {"xi",
       [](RunConfig& c, const std::string& v) {
         if (v == "auto") {
           c.xi.reset();
           return;
         }
         sweep_setters().at("xi")(c, to_double(v));
       },
       [](const RunConfig& c) { return c.xi ? fmt(*c.xi) : std::string("auto"); }},
      numeric("pulse_amplitude", [](const RunConfig& c) { return c.pulse_amplitude; }),
      numeric("pulse_omega_mod", [](const RunConfig& c) { return c.pulse_omega_mod; }),
      {"sweep_param",
       [](RunConfig& c, const std::string& v) {
         if (v == "none") {
           c.sweep.parameter.clear();
           return;
         }
         if (!sweep_setters().count(v)) {
           throw BadValue{"'" + v + "' is not a sweepable parameter"};
         }
         c.sweep.parameter = v;
       },
       [](const RunConfig& c) { return c.sweep.parameter.empty() ? "none" : c.sweep.parameter; }},
      {"sweep_min", [](RunConfig& c, const std::string& v) { c.sweep.min = to_double(v); },
       [](const RunConfig& c) { return fmt(c.sweep.min); }},
      {"sweep_max", [](RunConfig& c, const std::string& v) { c.sweep.max = to_double(v); },
       [](const RunConfig& c) { return fmt(c.sweep.max); }},
      {"sweep_points",
       [](RunConfig& c, const std::string& v) {
         const int n = to_int(v);
         require(n >= 2, "must be >= 2", n);
         c.sweep.points = n;
       },
       [](const RunConfig& c) { return std::to_string(c.sweep.points); }},
      {"sweep_scale",
       [](RunConfig& c, const std::string& v) {
         if (v == "linear") c.sweep.scale = SweepScale::linear;
         else if (v == "log") c.sweep.scale = SweepScale::log;
         else throw BadValue{"expected linear or log, got '" + v + "'"};
       },
       [](const RunConfig& c) {
         return std::string(c.sweep.scale == SweepScale::log ? "log" : "linear");
       }},
      {"slosh_form",
       [](RunConfig& c, const std::string& v) {
         if (v == "appendix") c.slosh_form = SloshForm::appendix;
         else if (v == "body") c.slosh_form = SloshForm::body;
         else throw BadValue{"expected appendix or body, got '" + v + "'"};
       },
       [](const RunConfig& c) {
         return std::string(c.slosh_form == SloshForm::body ? "body" : "appendix");
       }},
      {"step_weight",
       [](RunConfig& c, const std::string& v) {
         const double x = to_double(v);
         require(x > 0.0, "must be > 0", x);
         c.krotov.step_weight = x;
       },
       [](const RunConfig& c) { return fmt(c.krotov.step_weight); }},
      {"max_iters",
       [](RunConfig& c, const std::string& v) {
         const int n = to_int(v);
         require(n >= 0, "must be >= 0", n);
         c.krotov.max_iters = n;
       },
       [](const RunConfig& c) { return std::to_string(c.krotov.max_iters); }},
      {"objective_tol",
       [](RunConfig& c, const std::string& v) {
         const double x = to_double(v);
         require(x >= 0.0, "must be >= 0", x);
         c.krotov.objective_tol = x;
       },
       [](const RunConfig& c) { return fmt(c.krotov.objective_tol); }},
      {"allow_negative_pulse",
       [](RunConfig& c, const std::string& v) { c.krotov.allow_negative_pulse = to_bool(v); },
       [](const RunConfig& c) {
         return std::string(c.krotov.allow_negative_pulse ? "true" : "false");
       }},
      {"rescale_rounds",
       [](RunConfig& c, const std::string& v) {
         const int n = to_int(v);
         require(n >= 0 && n <= 100, "must be in [0, 100]", n);
         c.rescale_rounds = n;
       },
       [](const RunConfig& c) { return std::to_string(c.rescale_rounds); }},
      {"output",
       [](RunConfig& c, const std::string& v) {
         if (v.empty()) throw BadValue{"must not be empty"};
         c.output = v;
       },
       [](const RunConfig& c) { return c.output; }},
  };
  return table;
}

[[noreturn]] void fail_at(int line, const std::string& key, const std::string& msg) {
  std::ostringstream os;
  os << "line " << line << ": " << key << ": " << msg;
  throw ConfigError(os.str());
}

}  // namespace

double SweepAxis::value(int i) const {
  const double u = points > 1 ? static_cast<double>(i) / (points - 1) : 0.0;
  if (scale == SweepScale::log) return min * std::pow(max / min, u);
  return min + (max - min) * u;
}

double RunConfig::resolved_xi(const GateParams& p) const {
  return xi ? *xi : default_amplitude(p.epsilon, p.omega_tau);
}

PulseSpec RunConfig::pulse_spec(const GateParams& p, double xi_value, double amplitude,
                                double omega_mod) const {
  switch (pulse) {
    case PulseKind::gaussian: return GaussianPulse{xi_value, p.tau()};
    case PulseKind::modulated:
      return ModulatedGaussianPulse{xi_value, p.tau(), amplitude, omega_mod};
    case PulseKind::breathing:
      return BreathingCorrectedPulse{xi_value, p.tau(), amplitude, 0.5 * p.epsilon};
  }
  return GaussianPulse{xi_value, p.tau()};
}

PulseSpec RunConfig::pulse_spec() const {
  return pulse_spec(params, resolved_xi(params), pulse_amplitude, pulse_omega_mod);
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  for (const auto& k : key_table()) os << k.name << " = " << k.get(*this) << "\n";
  return os.str();
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& k : key_table()) out.push_back(k.name);
    return out;
  }();
  return keys;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, int> seen;  // key -> line

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "line " << line_no << ": expected 'key = value', got '" << line << "'";
      throw ConfigError(os.str());
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) {
      std::ostringstream os;
      os << "line " << line_no << ": missing key before '='";
      throw ConfigError(os.str());
    }

    const auto& table = key_table();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const KeySpec& k) { return k.name == key; });
    if (it == table.end()) fail_at(line_no, key, "unknown key");
    if (const auto prev = seen.find(key); prev != seen.end()) {
      std::ostringstream os;
      os << "line " << line_no << ": duplicate key '" << key << "' (first set on line "
         << prev->second << ")";
      throw ConfigError(os.str());
    }
    seen[key] = line_no;
    try {
      it->set(cfg, value);
    } catch (const BadValue& e) {
      fail_at(line_no, key, e.message);
    }
  }

  if (!seen.count("mode")) throw ConfigError("missing required key 'mode'");

  if (cfg.params.G < 0.0 && !cfg.krotov.allow_negative_pulse) {
    fail_at(seen.at("G"), "G", "must be >= 0 unless allow_negative_pulse = true");
  }

  if (cfg.mode == Mode::sweep) {
    for (const char* k : {"sweep_param", "sweep_min", "sweep_max"}) {
      if (!seen.count(k) || cfg.sweep.parameter.empty()) {
        throw ConfigError(std::string("missing required key '") + k + "' for mode = sweep");
      }
    }
    if (!(cfg.sweep.min < cfg.sweep.max)) {
      fail_at(seen.at("sweep_max"), "sweep_max", "must be greater than sweep_min");
    }
    if (cfg.sweep.scale == SweepScale::log && !(cfg.sweep.min > 0.0)) {
      fail_at(seen.at("sweep_min"), "sweep_min", "log sweeps need sweep_min > 0");
    }
    for (const char* k : {"sweep_min", "sweep_max"}) {
      RunConfig scratch = cfg;
      try {
        const double v = k == std::string("sweep_min") ? cfg.sweep.min : cfg.sweep.max;
        sweep_setters().at(cfg.sweep.parameter)(scratch, v);
        if (cfg.sweep.parameter == "G" && v < 0.0 && !cfg.krotov.allow_negative_pulse) {
          throw BadValue{"G must be >= 0 unless allow_negative_pulse = true"};
        }
      } catch (const BadValue& e) {
        fail_at(seen.at(k), k, "out of range for " + cfg.sweep.parameter + ": " + e.message);
      }
    }
  }

  try {
    cfg.params.validate(cfg.krotov.allow_negative_pulse);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("invalid parameters: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace pushgate
