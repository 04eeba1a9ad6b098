#include "pushgate/symplectic.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace pushgate {

SymplecticForm::SymplecticForm(int degrees_of_freedom)
    : n(degrees_of_freedom), J(Matrix::Zero(2 * n, 2 * n)) {
  if (n <= 0 || 2 * n > kMaxPhaseDim) {
    throw ConfigError("SymplecticForm: unsupported number of degrees of freedom");
  }
  J.topRightCorner(n, n).setIdentity();
  J.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
}

Matrix symplectic_j(int n) { return SymplecticForm(n).J; }

double symplectic_residual(const Matrix& S) {
  if (S.rows() != S.cols() || S.rows() % 2 != 0) {
    throw ConfigError("symplectic_residual: matrix must be square with even dimension");
  }
  const Matrix J = symplectic_j(static_cast<int>(S.rows() / 2));
  return max_abs(S.transpose() * J * S - J);
}

Matrix expm(const Matrix& A) {
  // Pade [6/6] coefficients c_k = (12-k)! 6! / (12! k! (6-k)!).
  static constexpr double c[] = {1.0,
                                 1.0 / 2.0,
                                 5.0 / 44.0,
                                 1.0 / 66.0,
                                 1.0 / 792.0,
                                 1.0 / 15840.0,
                                 1.0 / 665280.0};
  const double norm = A.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  }
  const Matrix X = A / std::ldexp(1.0, squarings);
  const Matrix I = Matrix::Identity(A.rows(), A.cols());

  Matrix power = I;
  Matrix even = c[0] * I;
  Matrix odd = Matrix::Zero(A.rows(), A.cols());
  for (int k = 1; k <= 6; ++k) {
    power = power * X;
    if (k % 2 == 0) {
      even += c[k] * power;
    } else {
      odd += c[k] * power;
    }
  }
  Matrix result = (even - odd).partialPivLu().solve(even + odd);
  for (int i = 0; i < squarings; ++i) {
    result = result * result;
  }
  return result;
}

Matrix logm_principal(const Matrix& S, double cut_tolerance) {
  const Eigen::MatrixXd dense = S;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("logm_principal: eigendecomposition failed");
  }
  const Eigen::VectorXcd lambda = solver.eigenvalues();
  const Eigen::MatrixXcd V = solver.eigenvectors();

  Eigen::VectorXcd log_lambda(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const std::complex<double> z = lambda(i);
    if (std::abs(z) == 0.0) {
      throw NumericalError("logm_principal: singular matrix has no logarithm");
    }
    if (std::abs(std::arg(z)) > std::numbers::pi - cut_tolerance) {
      std::ostringstream msg;
      msg << "logm_principal: eigenvalue " << z.real() << (z.imag() < 0 ? "" : "+")
          << z.imag() << "i lies on the principal branch cut; reduce the "
          << "propagation interval or treat the squeezing as non-perturbative";
      throw NumericalError(msg.str());
    }
    log_lambda(i) = std::log(z);
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(V);
  const double inv_cond = 1.0 / (V.norm() * lu.inverse().norm());
  if (!(inv_cond > 1e-12)) {
    throw NumericalError("logm_principal: eigenbasis is numerically defective");
  }
  const Eigen::MatrixXcd L = V * log_lambda.asDiagonal() * lu.inverse();
  return Matrix(L.real());
}

SqueezeMatrix extract_squeeze(const Matrix& S) {
  const int n = static_cast<int>(S.rows() / 2);
  const Matrix J = symplectic_j(n);
  const Matrix log_s = logm_principal(S);
  Matrix b = -J * log_s;
  b = 0.5 * (b + b.transpose()).eval();
  SqueezeMatrix out;
  out.roundtrip_residual = max_abs(expm(J * b) - S);
  out.b = std::move(b);
  return out;
}

}  // namespace pushgate
