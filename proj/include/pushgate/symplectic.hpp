#pragma once

#include "pushgate/types.hpp"

namespace pushgate {

/// Canonical symplectic form J = [[0, I_n], [-I_n, 0]] on (x, p) ordering.
struct SymplecticForm {
  int n;
  Matrix J;

  explicit SymplecticForm(int degrees_of_freedom);
};

/// Shorthand for SymplecticForm(n).J.
Matrix symplectic_j(int n);

/// max |S^T J S - J| over all entries. S must be square of even dimension.
double symplectic_residual(const Matrix& S);

/// Matrix exponential by scaling and squaring with a [6/6] Pade approximant.
Matrix expm(const Matrix& A);

/// Principal real logarithm via eigendecomposition. Throws NumericalError if
/// an eigenvalue sits on (or within `cut_tolerance` rad of) the negative real
/// axis, or if the eigenbasis is too ill-conditioned to trust.
Matrix logm_principal(const Matrix& S, double cut_tolerance = 1e-8);

/// Symmetric generator b of a symplectic S = exp(J b), principal branch.
struct SqueezeMatrix {
  Matrix b;
  /// max |exp(J b) - S| after symmetrization.
  double roundtrip_residual = 0.0;
};

SqueezeMatrix extract_squeeze(const Matrix& S);

}  // namespace pushgate
