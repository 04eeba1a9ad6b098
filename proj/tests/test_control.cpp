#include "pushgate/strategies.hpp"
#include "pushgate/symplectic.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace pushgate;

namespace {

constexpr double kPi = std::numbers::pi;

std::array<GaussianEvolution, 4> finals_of(const GateRun& run) {
  std::array<GaussianEvolution, 4> f;
  for (int i = 0; i < 4; ++i) f[i] = run.branches[i].final_state();
  return f;
}

std::array<GaussianEvolution, 4> ideal_finals() {
  std::array<GaussianEvolution, 4> f;
  for (auto& s : f) s = GaussianEvolution::identity(Vector::Zero(4));
  f[3].phi = kPi;
  return f;
}

GateParams fast_params(double G, double wt = 3.5) {
  GateParams p;
  p.G = G;
  p.omega_tau = wt;
  return p;
}

PulseSpec gaussian_for(const GateParams& p, double scale = 1.0) {
  return PulseSpec::gaussian(scale * default_amplitude(p.epsilon, p.omega_tau), p.tau());
}

}  // namespace

TEST_CASE("objective") {
  auto f = ideal_finals();
  auto v = objective(f);
  CHECK(v.total == 0.0);

  f[3].q_bar(0) = 1.0;
  v = objective(f);
  CHECK(v.q == doctest::Approx(0.5));
  CHECK(v.phi == 0.0);
  CHECK(v.S == 0.0);
  CHECK(v.total == v.phi + v.q + v.S);

  f = ideal_finals();
  f[0].phi = 0.2;
  CHECK(objective(f).phi == doctest::Approx(0.02));

  // J_S grows quadratically in a small squeeze of one branch
  f = ideal_finals();
  Matrix b = Matrix::Zero(4, 4);
  b(0, 0) = 1.0;
  b(1, 3) = b(3, 1) = 0.5;
  const Matrix J = symplectic_j(2);
  auto js = [&](double s) {
    auto g = ideal_finals();
    g[2].S = expm(s * J * b);
    return objective(g).S;
  };
  const double r = js(2e-4) / js(1e-4);
  CHECK(r == doctest::Approx(4.0).epsilon(1e-3));
  CHECK(js(1e-4) == doctest::Approx(0.5 * 1e-8 * (J * b).squaredNorm()).epsilon(1e-3));
}

TEST_CASE("terminal conditions") {
  SUBCASE("zero at the optimum") {
    const auto t = terminal_conditions(ideal_finals());
    for (const auto& a : t) {
      CHECK(a.phi_tilde == 0.0);
      CHECK(a.q_tilde.cwiseAbs().maxCoeff() == 0.0);
      CHECK(max_abs(a.S_tilde) == 0.0);
    }
  }
  SUBCASE("phase offset") {
    auto f = ideal_finals();
    const double d = 0.037;
    f[3].phi += d;
    const auto t = terminal_conditions(f);
    for (Branch b : kBranches) {
      CHECK(t[index(b)].phi_tilde == doctest::Approx(-parity(b) * d).epsilon(1e-14));
    }
  }
  SUBCASE("match finite differences of J") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    std::array<GaussianEvolution, 4> f = ideal_finals();
    for (auto& s : f) {
      s.phi += u(rng);
      for (int i = 0; i < 4; ++i) s.q_bar(i) += u(rng);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s.S(i, j) += u(rng);
    }
    const auto t = terminal_conditions(f);
    Vector qsum = Vector::Zero(4);
    for (const auto& a : t) qsum += a.q_tilde;
    CHECK(qsum.cwiseAbs().maxCoeff() < 1e-15);

    const double h = 1e-6;
    auto fd = [&](auto&& bump) {
      auto p = f, m = f;
      bump(p, h);
      bump(m, -h);
      return -(objective(p).total - objective(m).total) / (2.0 * h);
    };
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)); };
    for (int b = 0; b < 4; ++b) {
      CHECK(close(fd([&](auto& s, double e) { s[b].phi += e; }), t[b].phi_tilde));
      for (int i = 0; i < 4; ++i) {
        CHECK(close(fd([&](auto& s, double e) { s[b].q_bar(i) += e; }), t[b].q_tilde(i)));
        for (int j = 0; j < 4; ++j) {
          CHECK(close(fd([&](auto& s, double e) { s[b].S(i, j) += e; }), t[b].S_tilde(i, j)));
        }
      }
    }
  }
}

TEST_CASE("backward propagation") {
  const GateParams p = fast_params(0.01);
  const PulseSpec pulse = gaussian_for(p);
  const GateRun run = simulate_gate(p, pulse);

  SUBCASE("zero terminal data stays zero") {
    std::array<AdjointSample, 4> zero;
    for (auto& a : zero) a = AdjointSample{0.0, Vector::Zero(4), Matrix::Zero(4, 4)};
    const auto adj = backward_propagate(run, pulse, zero);
    for (const auto& br : adj.branches)
      for (const auto& s : br) {
        CHECK(s.phi_tilde == 0.0);
        CHECK(s.q_tilde.cwiseAbs().maxCoeff() == 0.0);
        CHECK(max_abs(s.S_tilde) == 0.0);
      }
    for (double g : pulse_gradient(adj, run, pulse)) CHECK(g == 0.0);
  }
  SUBCASE("phase costate is constant") {
    const auto term = terminal_conditions(finals_of(run));
    const auto adj = backward_propagate(run, pulse, term);
    for (int b = 0; b < 4; ++b) {
      CHECK(term[b].phi_tilde != 0.0);
      for (const auto& s : adj.branches[b]) CHECK(s.phi_tilde == term[b].phi_tilde);
      for (const auto& s : adj.branches[b]) {
        CHECK(s.q_tilde.allFinite());
        CHECK(s.S_tilde.allFinite());
      }
    }
  }
}

TEST_CASE("adjoint gradient matches finite differences") {
  for (double G : {0.0, 0.01}) {
    const GateParams p = fast_params(G);
    const TimeGrid grid = p.grid();
    const PulseSpec tab = gaussian_for(p, 0.97).tabulate(grid);
    const GateRun run = simulate_gate(p, tab);
    const auto adj = backward_propagate(run, tab, terminal_conditions(finals_of(run)));
    const auto grad = pulse_gradient(adj, run, tab);

    auto J_with = [&](int k, double bump) {
      PulseSpec q = tab;
      q.tabulated().samples[k] += bump;
      return objective(finals_of(simulate_gate(p, q))).total;
    };
    std::mt19937 rng(23);
    // nodes where the pulse and the branch motion are non-negligible
    std::uniform_int_distribution<int> pick(grid.steps / 5, 4 * grid.steps / 5);
    // J carries ~1e-12 relative round-off from the propagation; a 1e-6 bump
    // puts that noise at the 1e-4 level of the quotient, 1e-4 keeps it far below.
    const double h = 1e-4;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int k = pick(rng);
      // a unit bump at one node has weight dt in the time integral
      const double fd = (J_with(k, h) - J_with(k, -h)) / (2.0 * h) / grid.dt;
      worst = std::max(worst, std::abs(grad[k] - fd) / std::abs(fd));
    }
    MESSAGE("G = ", G, ": worst relative gradient error ", worst);
    CHECK(worst < 1e-3);
  }
}

TEST_CASE("without nonlinearity only the force channel couples to f") {
  const GateParams p = fast_params(0.0);
  const PulseSpec pulse = gaussian_for(p);
  const GateRun run = simulate_gate(p, pulse);
  const auto adj = backward_propagate(run, pulse, terminal_conditions(finals_of(run)));
  const auto grad = pulse_gradient(adj, run, pulse);
  // push part w_i s_i x_i with s = (+1, -1); dH/df = phi~ (P - x.dP/2) - p~.dP
  const std::array<double, 2> s{1.0, -1.0};
  double worst = 0.0, scale = 0.0;
  for (int k = 0; k < adj.grid.size(); k += 7) {
    double expected = 0.0;
    for (Branch b : kBranches) {
      const auto w = push_flags(b);
      const auto& fwd = run.branches[index(b)].samples[k];
      const auto& a = adj.branches[index(b)][k];
      for (int i = 0; i < 2; ++i) {
        expected -= a.phi_tilde * 0.5 * w[i] * s[i] * fwd.q_bar(i) - a.q_tilde(2 + i) * w[i] * s[i];
      }
    }
    worst = std::max(worst, std::abs(grad[k] - expected));
    scale = std::max(scale, std::abs(expected));
  }
  CHECK(scale > 0.0);
  CHECK(worst <= 1e-12 * scale);
}

TEST_CASE("krotov iteration") {
  SUBCASE("objective never increases") {
    const GateParams p = fast_params(0.002);
    KrotovConfig kc;
    kc.max_iters = 8;
    const auto res = krotov_iterate(p, rescale_iterations(p, gaussian_for(p), 2).pulse, kc);
    REQUIRE(res.log.size() == 9);
    for (std::size_t i = 1; i < res.log.size(); ++i) {
      const double prev = res.log[i - 1].objective.total;
      CHECK(res.log[i].objective.total <= prev * (1.0 + 1e-12));
      CHECK(res.log[i].iteration == static_cast<int>(i));
      CHECK(res.log[i].stage == "krotov");
    }
    CHECK(res.log.back().objective.total < 0.5 * res.log.front().objective.total);
    for (double f : res.pulse.tabulated().samples) CHECK(f >= 0.0);
  }
  SUBCASE("already optimal input is returned unchanged") {
    const GateParams p = fast_params(0.002);
    KrotovConfig kc;
    kc.objective_tol = 1e3;
    const PulseSpec start = gaussian_for(p);
    const auto res = krotov_iterate(p, start, kc);
    CHECK(res.log.size() == 1);
    const TimeGrid g = p.grid();
    for (int k = 0; k < g.size(); k += 11) {
      CHECK(res.pulse.value(g.time(k)) == doctest::Approx(start.value(g.time(k))).epsilon(1e-14));
    }
  }
  SUBCASE("bad step weight") {
    KrotovConfig kc;
    kc.step_weight = 0.0;
    CHECK_THROWS_AS(krotov_iterate(fast_params(0.0), gaussian_for(fast_params(0.0)), kc),
                    ConfigError);
  }
  SUBCASE("a too small step weight is diagnosed") {
    KrotovConfig kc;
    kc.step_weight = 1e-3;
    kc.max_iters = 20;
    const GateParams p = fast_params(0.002);
    try {
      krotov_iterate(p, gaussian_for(p), kc);
      FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
      const std::string msg = e.what();
      CHECK((msg.find("step_weight") != std::string::npos ||
             msg.find("Coulomb") != std::string::npos || msg.find("non-perturbative") != std::string::npos));
    }
  }
}

TEST_CASE("amplitude rescaling") {
  const PulseSpec g = PulseSpec::gaussian(4.0, 5.5);
  CHECK(rescale_amplitude(g, kPi).value(0.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(rescale_amplitude(g, 4.0 * kPi).value(0.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(rescale_amplitude(g, 4.0 * kPi).value(1.3) == doctest::Approx(0.5 * g.value(1.3)));
  CHECK_THROWS_AS(rescale_amplitude(g, 0.0), NumericalError);
  CHECK_THROWS_AS(rescale_amplitude(g, -1.0), NumericalError);

  SUBCASE("iteration approaches the ideal phase") {
    for (double G : {0.0, 0.002, 0.01}) {
      const GateParams p = fast_params(G, 5.5);
      const auto st = rescale_iterations(p, gaussian_for(p), 3);
      REQUIRE(st.log.size() == 4);
      double last = std::abs(st.log[0].budget.phi_phase - kPi);
      for (std::size_t i = 1; i < st.log.size(); ++i) {
        const double d = std::abs(st.log[i].budget.phi_phase - kPi);
        CHECK((d < last || d < 1e-12));
        last = d;
      }
      CHECK(st.log.back().budget.e_theta < 1e-6);
    }
  }
}

TEST_CASE("breathing-corrected pulse family") {
  GateParams p;
  p.omega_tau = 7.5;
  const GaussianPulse base{default_amplitude(p.epsilon, p.omega_tau), p.tau()};
  const auto zero = normalized_breathing_pulse(p, base, 0.0);
  CHECK(zero.xi == base.xi);
  CHECK(zero.breath_amplitude == 0.0);
  const PulseSpec as_spec = zero;
  for (double t : {-5.0, 0.0, 2.0}) {
    CHECK(as_spec.value(t) == doctest::Approx(PulseSpec(base).value(t)).epsilon(1e-15));
  }
  // every member carries the base pulse's integral of f^2
  auto energy = [&](const PulseSpec& f) {
    const TimeGrid g = TimeGrid::uniform(-60.0, 60.0, 24000);
    double s = 0.0;
    for (int k = 0; k < g.size(); ++k) {
      const double w = (k == 0 || k == g.steps) ? 0.5 : 1.0;
      s += w * f.value(g.time(k)) * f.value(g.time(k));
    }
    return s * g.dt;
  };
  const double e0 = energy(PulseSpec(base));
  CHECK(e0 == doctest::Approx(base.xi * base.xi * base.tau * std::sqrt(kPi / 2.0)).epsilon(1e-10));
  for (double a : {-0.3, -1.0, -1.9}) {
    const PulseSpec s = normalized_breathing_pulse(p, base, a * base.xi);
    CHECK(energy(s) == doctest::Approx(e0).epsilon(1e-10));
  }
}

TEST_CASE("pulse difference") {
  const GateParams p = fast_params(0.0);
  const TimeGrid g = p.grid();
  const PulseSpec a = gaussian_for(p).tabulate(g);
  const auto same = emit_pulse_diff(a, a, g, 4.0, p.omega_tau);
  REQUIRE(same.t.size() == static_cast<std::size_t>(g.size()));
  for (double v : same.raw) CHECK(v == 0.0);
  for (double v : same.normalized) CHECK(v == 0.0);

  // a lowest-order-shaped difference normalizes to extremum -1
  const double xi = 4.0;
  const double A = -0.5 * xi * std::exp(-p.omega_tau * p.omega_tau / 4.0);
  const PulseSpec b = ModulatedGaussianPulse{xi, p.tau(), A, 1.0};
  const auto d = emit_pulse_diff(PulseSpec::gaussian(xi, p.tau()), b, g, xi, p.omega_tau);
  CHECK(extremum(d.normalized) == doctest::Approx(-1.0).epsilon(1e-9));

  GateParams q = p;
  q.steps_per_period = 100;
  CHECK_THROWS_AS(emit_pulse_diff(a, a, q.grid(), 4.0, p.omega_tau), ConfigError);
  CHECK(extremum({0.5, -2.0, 1.5}) == -2.0);
  CHECK(extremum({}) == 0.0);
}
