#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace nikit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Default eigen-distance margin used to decide that a point sits on a pole.
inline constexpr double kPoleTolerance = 1e-9;

/// x_{k+1} = A x_k + B u_k,  y_k = C x_k + D u_k  with square p x p D.
///
/// Immutable once constructed; the constructor validates dimensions and
/// finiteness. An empty D means the zero feedthrough.
class DiscreteStateSpace {
 public:
  DiscreteStateSpace(Matrix A, Matrix B, Matrix C, Matrix D = Matrix());

  const Matrix& A() const noexcept { return A_; }
  const Matrix& B() const noexcept { return B_; }
  const Matrix& C() const noexcept { return C_; }
  const Matrix& D() const noexcept { return D_; }

  Eigen::Index states() const noexcept { return A_.rows(); }
  Eigen::Index ports() const noexcept { return B_.cols(); }

  /// True when D is exactly zero.
  bool strictly_proper() const noexcept;

 private:
  Matrix A_, B_, C_, D_;
};

/// xdot = A x + B u,  y = C x.
class ContinuousStateSpace {
 public:
  ContinuousStateSpace(Matrix A, Matrix B, Matrix C);

  const Matrix& A() const noexcept { return A_; }
  const Matrix& B() const noexcept { return B_; }
  const Matrix& C() const noexcept { return C_; }

  Eigen::Index states() const noexcept { return A_.rows(); }
  Eigen::Index ports() const noexcept { return B_.cols(); }

 private:
  Matrix A_, B_, C_;
};

struct TransferEval {
  Complex z;
  ComplexMatrix value;
};

/// Evaluates G(z) repeatedly for one system; the spectrum used for the pole
/// test is computed once.
class TransferEvaluator {
 public:
  explicit TransferEvaluator(const DiscreteStateSpace& sys);

  /// Same contract as eval_transfer().
  ComplexMatrix operator()(Complex z, double pole_tol = kPoleTolerance) const;

 private:
  ComplexMatrix A_, B_, C_, D_;
  ComplexVector spectrum_;
};

/// C (zI - A)^{-1} B + D via an LU solve. Throws SingularEvaluation when z is
/// within `pole_tol` of an eigenvalue of A or zI - A is numerically singular
/// (reciprocal condition estimate below 1e-12).
ComplexMatrix eval_transfer(const DiscreteStateSpace& sys, Complex z,
                            double pole_tol = kPoleTolerance);

/// G(1) as a real matrix. Throws PoleAtOne when 1 is (numerically) a pole.
Matrix dc_gain(const DiscreteStateSpace& sys, double pole_tol = kPoleTolerance);

/// lim z G(z) = CB for strictly proper realizations.
Matrix feedthrough_limit(const DiscreteStateSpace& sys);

struct MinimalityReport {
  bool controllable = false;
  bool observable = false;
  Eigen::Index controllability_rank = 0;
  Eigen::Index observability_rank = 0;

  bool minimal() const noexcept { return controllable && observable; }
};

MinimalityReport minimality(const DiscreteStateSpace& sys);

struct Pole {
  Complex value;
  bool on_unit_circle = false;
};

struct PoleReport {
  /// Sorted by modulus, largest first; repeated eigenvalues repeat.
  std::vector<Pole> poles;
  bool all_inside_or_on_unit_circle = true;

  double max_modulus() const noexcept {
    return poles.empty() ? 0.0 : std::abs(poles.front().value);
  }
};

PoleReport poles(const DiscreteStateSpace& sys, double circle_tol = kPoleTolerance);

/// Smallest distance between z and the spectrum of A.
double pole_distance(const Matrix& A, Complex z);

// Shared dense helpers.

/// Smallest eigenvalue of the symmetric part of M.
double min_eig_sym(const Matrix& M);

/// Spectral norm (largest singular value).
double spectral_norm(const Matrix& M);

/// Numerical rank with threshold min(rows, cols) * sigma_max * rel.
Eigen::Index numerical_rank(const Matrix& M, double rel = 1e-10);

/// (M + M^T) / 2.
Matrix symmetrized(const Matrix& M);

}  // namespace nikit
