#include "pushgate/run.hpp"

#include "pushgate/csv.hpp"
#include "pushgate/strategies.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace pushgate {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::string> budget_columns() {
  return {"e_theta", "e_slosh", "e_breath", "total", "gate_phase", "phi_phase"};
}

std::vector<double> budget_values(const ErrorBudget& b) {
  return {b.e_theta, b.e_slosh, b.e_breath, b.total, b.gate_phase, b.phi_phase};
}

void write_budget(const fs::path& dir, const ErrorBudget& b) {
  CsvTable t("budget", budget_columns());
  t.add_row(budget_values(b));
  t.write((dir / "budget.csv").string());
}

void write_iterations(const fs::path& dir, const IterationLog& log) {
  std::vector<std::string> cols{"stage", "iteration", "J", "J_phi", "J_q", "J_S"};
  for (auto& c : budget_columns()) cols.push_back(c);
  CsvTable t("iterations", cols);
  for (const auto& r : log) {
    std::vector<std::string> row{r.stage, std::to_string(r.iteration),
                                 format_double(r.objective.total), format_double(r.objective.phi),
                                 format_double(r.objective.q), format_double(r.objective.S)};
    for (double v : budget_values(r.budget)) row.push_back(format_double(v));
    t.add_row(row);
  }
  t.write((dir / "iterations.csv").string());
}

void write_pulse(const fs::path& dir, const GateParams& params, const PulseSpec& initial,
                 const PulseSpec& final_pulse, double xi) {
  const TimeGrid grid = params.grid();
  const PulseDiff d = emit_pulse_diff(initial, final_pulse, grid, xi, params.omega_tau);
  CsvTable t("pulse", {"t", "f_initial", "f_final", "diff_raw", "diff_normalized"});
  for (int k = 0; k < grid.size(); ++k) {
    t.add_row(std::vector<double>{d.t[k], initial.value(d.t[k]), final_pulse.value(d.t[k]),
                                  d.raw[k], d.normalized[k]});
  }
  t.write((dir / "pulse.csv").string());
}

std::string budget_text(const ErrorBudget& b) {
  std::ostringstream os;
  os << "e_theta = " << format_double(b.e_theta) << "\n"
     << "e_slosh = " << format_double(b.e_slosh) << "\n"
     << "e_breath = " << format_double(b.e_breath) << "\n"
     << "total = " << format_double(b.total) << "\n"
     << "gate_phase = " << format_double(b.gate_phase) << "\n"
     << "phi_phase = " << format_double(b.phi_phase) << "\n";
  return os.str();
}

// Amplitude the pulse-difference normalization refers to.
double base_amplitude(const PulseSpec& p, double fallback) {
  if (const auto* g = std::get_if<GaussianPulse>(&p.shape())) return g->xi;
  return fallback;
}

std::string run_simulate(const RunConfig& cfg, const fs::path& dir) {
  const PulseSpec pulse = cfg.pulse_spec();
  const GateEvaluation ev = evaluate_gate(cfg.params, pulse, cfg.slosh_form);
  write_budget(dir, ev.budget);
  for (Branch b : kBranches) {
    const auto& pr = ev.run.branches[index(b)];
    CsvTable t("trajectory", {"t", "x1", "p1", "x2", "p2", "phi"});
    for (int k = 0; k < pr.grid.size(); ++k) {
      const auto& s = pr.samples[k];
      t.add_row(std::vector<double>{pr.grid.time(k), s.q_bar(0), s.q_bar(2), s.q_bar(1),
                                    s.q_bar(3), s.phi});
    }
    t.write((dir / ("trajectory_" + std::string(label(b)) + ".csv")).string());
  }
  std::ostringstream os;
  os << "pulse: " << pulse.describe() << "\n" << budget_text(ev.budget);
  for (const auto& br : ev.run.branches) {
    for (const auto& w : br.warnings) os << "warning: " << w << "\n";
  }
  return os.str();
}

struct SweepPoint {
  double value = 0.0;
  ErrorBudget budget;
  double seconds = 0.0;
  std::string error;
  bool numerical = false;
};

SweepPoint sweep_point(const RunConfig& cfg, double value) {
  RunConfig c = cfg;
  if (c.sweep.parameter == "epsilon") c.params.epsilon = value;
  else if (c.sweep.parameter == "a_over_d") c.params.a_over_d = value;
  else if (c.sweep.parameter == "G") c.params.G = value;
  else if (c.sweep.parameter == "omega_tau") c.params.omega_tau = value;
  else if (c.sweep.parameter == "kT") c.params.kT = value;
  else if (c.sweep.parameter == "t_window") c.params.t_window = value;
  else if (c.sweep.parameter == "xi") c.xi = value;
  else if (c.sweep.parameter == "pulse_amplitude") c.pulse_amplitude = value;
  else if (c.sweep.parameter == "pulse_omega_mod") c.pulse_omega_mod = value;
  else throw ConfigError("sweep: unknown parameter '" + c.sweep.parameter + "'");

  SweepPoint out;
  out.value = value;
  const auto t0 = Clock::now();
  out.budget = evaluate_gate(c.params, c.pulse_spec(), c.slosh_form).budget;
  out.seconds = seconds_since(t0);
  return out;
}

std::string run_sweep(const RunConfig& cfg, const fs::path& dir, int threads) {
  const int n = cfg.sweep.points;
  std::vector<SweepPoint> points(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      const double v = cfg.sweep.value(i);
      try {
        points[i] = sweep_point(cfg, v);
      } catch (const NumericalError& e) {
        points[i].value = v;
        points[i].error = e.what();
        points[i].numerical = true;
      } catch (const std::exception& e) {
        points[i].value = v;
        points[i].error = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min(threads, n));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (int i = 0; i < n; ++i) {
    if (points[i].error.empty()) continue;
    std::ostringstream os;
    os << "sweep point " << i << " (" << cfg.sweep.parameter << " = "
       << format_double(points[i].value) << "): " << points[i].error;
    if (points[i].numerical) throw NumericalError(os.str());
    throw ConfigError(os.str());
  }

  std::vector<std::string> cols{"index", cfg.sweep.parameter};
  for (auto& c : budget_columns()) cols.push_back(c);
  CsvTable t("sweep", cols);
  std::ostringstream summary;
  summary << "sweep: " << cfg.sweep.parameter << " over " << n << " points\n";
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> row{std::to_string(i), format_double(points[i].value)};
    for (double v : budget_values(points[i].budget)) row.push_back(format_double(v));
    t.add_row(row);
    summary << "point " << i << " wall_seconds = " << points[i].seconds << "\n";
  }
  t.write((dir / "sweep.csv").string());
  return summary.str();
}

std::string run_optimize(const RunConfig& cfg, const fs::path& dir) {
  const PulseSpec start = cfg.pulse_spec();
  StageResult rescaled = rescale_iterations(cfg.params, start, cfg.rescale_rounds, cfg.slosh_form);
  KrotovConfig kc = cfg.krotov;
  kc.slosh_form = cfg.slosh_form;
  KrotovResult kr = krotov_iterate(cfg.params, rescaled.pulse, kc);

  IterationLog log = rescaled.log;
  for (std::size_t i = 1; i < kr.log.size(); ++i) log.push_back(kr.log[i]);
  write_iterations(dir, log);
  write_budget(dir, log.back().budget);
  write_pulse(dir, cfg.params, rescaled.pulse, kr.pulse,
              base_amplitude(rescaled.pulse, cfg.resolved_xi(cfg.params)));

  std::ostringstream os;
  os << "start pulse: " << start.describe() << "\n"
     << "rescaled pulse: " << rescaled.pulse.describe() << "\n"
     << "krotov iterations: " << kr.log.size() - 1 << "\n"
     << budget_text(log.back().budget);
  return os.str();
}

std::string run_combined(const RunConfig& cfg, const fs::path& dir) {
  KrotovConfig kc = cfg.krotov;
  kc.slosh_form = cfg.slosh_form;
  const CombinedResult res = combined_strategy(cfg.params, kc, cfg.rescale_rounds);
  write_iterations(dir, res.log);
  write_budget(dir, res.budget);
  const double xi = default_amplitude(cfg.params.epsilon, cfg.params.omega_tau);
  write_pulse(dir, cfg.params, PulseSpec::gaussian(xi, cfg.params.tau()), res.pulse, xi);

  std::ostringstream os;
  os << "final pulse: " << res.pulse.describe() << "\n" << budget_text(res.budget);
  return os.str();
}

}  // namespace

void run(const RunConfig& config, const RunOptions& options) {
  const fs::path dir = options.out_dir.empty() ? fs::path(config.output) : fs::path(options.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("cannot create output directory '" + dir.string() + "'");
  }

  const std::string echo = config.echo();
  {
    std::ofstream f(dir / "config.echo", std::ios::binary | std::ios::trunc);
    f << echo;
  }

  const auto t0 = Clock::now();
  std::string body;
  switch (config.mode) {
    case Mode::simulate: body = run_simulate(config, dir); break;
    case Mode::sweep: body = run_sweep(config, dir, options.threads); break;
    case Mode::optimize: body = run_optimize(config, dir); break;
    case Mode::combined: body = run_combined(config, dir); break;
  }
  const double wall = seconds_since(t0);

  std::ofstream f(dir / "summary.txt", std::ios::binary | std::ios::trunc);
  f << "# pushgate run summary\n" << echo << "\n" << body << "wall_seconds = " << wall << "\n";
  if (!f) throw ConfigError("cannot write summary.txt in '" + dir.string() + "'");
}

int run_cli(const std::string& config_path, const RunOptions& options, std::ostream& err) {
  try {
    if (options.threads < 1) throw ConfigError("--threads must be >= 1");
    const RunConfig cfg = load_config(config_path);
    run(cfg, options);
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pushgate
