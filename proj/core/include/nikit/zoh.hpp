#pragma once

#include "nikit/lin_core.hpp"

namespace nikit {

/// Sampling period in seconds; positive and finite.
class SamplePeriod {
 public:
  explicit SamplePeriod(double seconds);
  double seconds() const noexcept { return seconds_; }

 private:
  double seconds_;
};

/// Symmetric positive definite P of the storage V(x) = 1/2 x^T P x.
class ContinuousQuadraticStorage {
 public:
  explicit ContinuousQuadraticStorage(const Matrix& P);
  const Matrix& P() const noexcept { return P_; }

 private:
  Matrix P_;
};

/// exp(M) by scaling and squaring with the degree-13 diagonal Pade approximant.
/// Throws Overflow when the squaring phase would leave the double range.
Matrix matrix_exponential(const Matrix& M);

/// Zero-order-hold sampling: the top blocks of exp([[A, B], [0, 0]] T).
DiscreteStateSpace discretize_zoh(const ContinuousStateSpace& csys, SamplePeriod T);

struct ContinuousNiVerdict {
  bool pass = false;
  double min_eig = 0.0;
  /// Symmetric matrix Q with u^T ydot - Vdot = [x; u]^T Q [x; u].
  Matrix supply_form;
};

/// Checks Vdot <= u^T ydot for all (x, u), which for linear dynamics and
/// quadratic storage is positive semidefiniteness of one fixed quadratic form.
ContinuousNiVerdict audit_continuous_ni(const ContinuousStateSpace& csys,
                                        const ContinuousQuadraticStorage& storage,
                                        double tol_psd = 1e-9);

}  // namespace nikit
