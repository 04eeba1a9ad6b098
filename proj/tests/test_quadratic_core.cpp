#include "pushgate/pushing_gate.hpp"
#include "pushgate/symplectic.hpp"

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>

using namespace pushgate;

namespace {

constexpr double kPi = std::numbers::pi;

ExpansionFn constant(double E, Vector F, Matrix K, Matrix M_inv) {
  QuadraticExpansion ex(E, std::move(F), K, std::move(M_inv));
  return [ex](double, const Vector&) { return ex; };
}

Matrix random_symmetric(std::mt19937& rng, int dim, double norm) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix b(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) b(i, j) = u(rng);
  b = 0.5 * (b + b.transpose()).eval();
  return b * (norm / b.norm());
}

Eigen::MatrixXd dyn(const Matrix& m) { return Eigen::MatrixXd(m); }

}  // namespace

TEST_CASE("J has the canonical block form") {
  for (int n = 1; n <= 4; ++n) {
    const SymplecticForm form(n);
    const Matrix& J = form.J;
    CHECK(form.n == n);
    CHECK(J.rows() == 2 * n);
    CHECK(max_abs(J.topLeftCorner(n, n)) == 0.0);
    CHECK(max_abs(J.bottomRightCorner(n, n)) == 0.0);
    CHECK(max_abs(J.topRightCorner(n, n) - Matrix::Identity(n, n)) == 0.0);
    CHECK(max_abs(J.bottomLeftCorner(n, n) + Matrix::Identity(n, n)) == 0.0);
    CHECK(max_abs(J * J + Matrix::Identity(2 * n, 2 * n)) == 0.0);
    CHECK(max_abs(J.transpose() + J) == 0.0);
  }
}

TEST_CASE("harmonic oscillator S is a rotation") {
  const Matrix one = Matrix::Identity(1, 1);
  const auto res = propagate(constant(0.0, Vector::Zero(1), one, one), 0.0, 2.0 * kPi, 2000,
                             GaussianEvolution::identity(Vector::Zero(2)));
  for (int k : {0, 500, 1000, 2000}) {
    const double t = res.grid.time(k);
    Matrix R(2, 2);
    R << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
    CHECK(max_abs(res.samples[k].S - R) < 1e-8);
  }
  CHECK(res.warnings.empty());
}

TEST_CASE("zero generator leaves the state alone") {
  const Matrix zero = Matrix::Zero(2, 2);
  Vector q0(4);
  q0 << 0.3, -1.2, 0.7, 2.0;
  const auto res =
      propagate(constant(0.0, Vector::Zero(2), zero, zero), -1.0, 3.0, 17,
                GaussianEvolution::identity(q0));
  for (const auto& s : res.samples) {
    CHECK(s.phi == 0.0);
    CHECK(max_abs(s.q_bar - q0) == 0.0);
    CHECK(max_abs(s.S - Matrix::Identity(4, 4)) == 0.0);
  }
}

TEST_CASE("constant force on an oscillator matches the analytic solution") {
  const double f0 = 0.8;
  const Matrix one = Matrix::Identity(1, 1);
  Vector F(1);
  F << f0;
  // 4096 steps put pi/2, pi and 2 pi on grid nodes.
  const auto res = propagate(constant(0.0, F, one, one), 0.0, 2.0 * kPi, 4096,
                             GaussianEvolution::identity(Vector::Zero(2)));
  for (int k : {1024, 2048, 4096}) {
    const double t = res.grid.time(k);
    const auto& s = res.samples[k];
    CHECK(std::abs(s.q_bar(0) - f0 * (1.0 - std::cos(t))) < 1e-8);
    CHECK(std::abs(s.q_bar(1) - f0 * std::sin(t)) < 1e-8);
    // phi' = -1/2 f0 x(t)
    CHECK(std::abs(s.phi + 0.5 * f0 * f0 * (t - std::sin(t))) < 1e-8);
  }
}

TEST_CASE("steps below two are rejected") {
  const Matrix one = Matrix::Identity(1, 1);
  CHECK_THROWS_AS(propagate(constant(0.0, Vector::Zero(1), one, one), 0.0, 1.0, 1,
                            GaussianEvolution::identity(Vector::Zero(2))),
                  ConfigError);
}

TEST_CASE("non-finite expansion reports the failing step") {
  const Matrix one = Matrix::Identity(1, 1);
  ExpansionFn bad = [one](double t, const Vector&) {
    Matrix K = one;
    if (t > 0.52) K(0, 0) = std::numeric_limits<double>::quiet_NaN();
    return QuadraticExpansion(0.0, Vector::Zero(1), K, one);
  };
  try {
    propagate(bad, 0.0, 1.0, 10, GaussianEvolution::identity(Vector::Zero(2)));
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("step 6") != std::string::npos);
  }
}

TEST_CASE("coarse steps trigger the resolution warning") {
  Matrix K = Matrix::Identity(1, 1) * 1e4;
  const auto res = propagate(constant(0.0, Vector::Zero(1), K, Matrix::Identity(1, 1)), 0.0,
                             0.2, 20, GaussianEvolution::identity(Vector::Zero(2)));
  REQUIRE(res.warnings.size() == 1);
  CHECK(res.warnings[0].find("dt*sqrt") != std::string::npos);
}

TEST_CASE("propagation composes over adjacent intervals") {
  // Time-dependent two-mode quadratic Hamiltonian with coupling and drive.
  ExpansionFn ex = [](double t, const Vector&) {
    Matrix K(2, 2);
    K << 1.0 + 0.3 * std::sin(t), -0.1 * std::cos(0.7 * t), -0.1 * std::cos(0.7 * t),
        1.2 + 0.2 * t;
    Vector F(2);
    F << 0.5 * std::exp(-t * t), -0.2 * t;
    return QuadraticExpansion(0.1 * t, F, K, Matrix::Identity(2, 2));
  };
  Vector q0(4);
  q0 << 0.1, -0.2, 0.3, 0.05;
  const auto whole = propagate(ex, 0.0, 2.0, 700, GaussianEvolution::identity(q0));
  const auto first = propagate(ex, 0.0, 1.0, 300, GaussianEvolution::identity(q0));
  const auto second = propagate(ex, 1.0, 2.0, 500,
                                GaussianEvolution::identity(first.final_state().q_bar));
  const auto& w = whole.final_state();
  CHECK(std::abs(first.final_state().phi + second.final_state().phi - w.phi) < 1e-8);
  CHECK(max_abs(second.final_state().S * first.final_state().S - w.S) < 1e-8);
  CHECK(max_abs(second.final_state().q_bar - w.q_bar) < 1e-8);
  for (const auto& s : whole.samples) {
    CHECK(symplectic_residual(s.S) < 1e-9);
    CHECK(std::abs(Eigen::MatrixXd(s.S).determinant() - 1.0) < 1e-9);
  }
}

TEST_CASE("symplectic residual") {
  CHECK(symplectic_residual(Matrix::Identity(4, 4)) == 0.0);
  std::mt19937 rng(7);
  const Matrix J = symplectic_j(2);
  const Matrix S = expm(J * random_symmetric(rng, 4, 0.8));
  CHECK(symplectic_residual(S) < 1e-12);

  // One off-symplectic entry: S = I + d e_1 e_1^T gives S^T J S - J with
  // entries of size d.
  Matrix P = Matrix::Identity(4, 4);
  P(0, 0) += 1e-3;
  const double r = symplectic_residual(P);
  CHECK(r == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK_THROWS_AS(symplectic_residual(Matrix::Identity(3, 3)), ConfigError);
  CHECK_THROWS_AS(symplectic_residual(Matrix::Zero(2, 4)), ConfigError);
}

TEST_CASE("expm and logm agree with the reference matrix functions") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 2 * (1 + trial % 4);
    const Matrix A = random_symmetric(rng, dim, 0.3 + 0.4 * trial) *
                     symplectic_j(dim / 2);  // generic, non-normal
    const Eigen::MatrixXd ref = dyn(A).exp();
    CHECK((dyn(expm(A)) - ref).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, ref.norm()));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 2 * (1 + trial % 4);
    const Matrix S = expm(symplectic_j(dim / 2) * random_symmetric(rng, dim, 0.45));
    const Eigen::MatrixXd ref = dyn(S).log();
    CHECK((dyn(logm_principal(S)) - ref).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("extract_squeeze") {
  SUBCASE("identity") {
    const auto sq = extract_squeeze(Matrix::Identity(4, 4));
    CHECK(max_abs(sq.b) < 1e-15);
  }
  SUBCASE("rotation by t gives b = t I") {
    for (double t : {0.1, 1.0, 2.5}) {
      Matrix R(2, 2);
      R << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
      const auto sq = extract_squeeze(R);
      CHECK(max_abs(sq.b - t * Matrix::Identity(2, 2)) < 1e-12);
    }
  }
  SUBCASE("round trip from random small generators") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 1 + trial % 2;
      const Matrix b0 = random_symmetric(rng, 2 * n, 0.49);
      const Eigen::MatrixXd Sref = (dyn(symplectic_j(n)) * dyn(b0)).exp();
      const auto sq = extract_squeeze(Matrix(Sref));
      CHECK(max_abs(sq.b - b0) < 1e-10);
      CHECK(max_abs(sq.b - sq.b.transpose()) < 1e-15);
      CHECK(sq.roundtrip_residual < 1e-10);
    }
  }
  SUBCASE("branch cut is reported") {
    // rotation by pi: both eigenvalues at -1
    Matrix R(2, 2);
    R << -1.0, 0.0, 0.0, -1.0;
    try {
      extract_squeeze(R);
      FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
      CHECK(std::string(e.what()).find("non-perturbative") != std::string::npos);
    }
  }
}

TEST_CASE("pushing-gate propagation stays symplectic at every stored time") {
  for (double wt : {3.5, 7.5}) {
    GateParams p;
    p.omega_tau = wt;
    p.G = 0.01;
    const auto run =
        simulate_gate(p, PulseSpec::gaussian(default_amplitude(p.epsilon, wt), p.tau()));
    double worst = 0.0;
    for (const auto& br : run.branches)
      for (const auto& s : br.samples) worst = std::max(worst, symplectic_residual(s.S));
    CHECK(worst < 1e-9);
  }
}
