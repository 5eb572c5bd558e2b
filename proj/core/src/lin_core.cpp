#include "nikit/lin_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nikit/error.hpp"

namespace nikit {
namespace {

std::string dims(const Matrix& M) {
  return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
}

void require_finite(const Matrix& M, const char* name) {
  if (!M.allFinite()) {
    throw Error(ErrorKind::NonFinite, std::string(name) + " has non-finite entries");
  }
}

void validate(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D) {
  const auto n = A.rows();
  const auto p = B.cols();
  if (n < 1 || p < 1) {
    throw Error(ErrorKind::DimensionMismatch, "need at least one state and one port");
  }
  if (A.cols() != n || B.rows() != n || C.rows() != p || C.cols() != n ||
      D.rows() != p || D.cols() != p) {
    throw Error(ErrorKind::DimensionMismatch,
                "A " + dims(A) + ", B " + dims(B) + ", C " + dims(C) + ", D " + dims(D));
  }
  require_finite(A, "A");
  require_finite(B, "B");
  require_finite(C, "C");
  require_finite(D, "D");
}

Matrix block_krylov(const Matrix& A, const Matrix& B) {
  const auto n = A.rows();
  const auto p = B.cols();
  Matrix K(n, n * p);
  K.leftCols(p) = B;
  for (Eigen::Index i = 1; i < n; ++i) {
    K.middleCols(i * p, p) = A * K.middleCols((i - 1) * p, p);
  }
  return K;
}

}  // namespace

DiscreteStateSpace::DiscreteStateSpace(Matrix A, Matrix B, Matrix C, Matrix D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
  if (D_.size() == 0) D_ = Matrix::Zero(B_.cols(), B_.cols());
  validate(A_, B_, C_, D_);
}

bool DiscreteStateSpace::strictly_proper() const noexcept {
  return (D_.array() == 0.0).all();
}

ContinuousStateSpace::ContinuousStateSpace(Matrix A, Matrix B, Matrix C)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)) {
  validate(A_, B_, C_, Matrix::Zero(B_.cols(), B_.cols()));
}

double pole_distance(const Matrix& A, Complex z) {
  const ComplexVector ev = A.eigenvalues();
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) best = std::min(best, std::abs(ev(i) - z));
  return best;
}

TransferEvaluator::TransferEvaluator(const DiscreteStateSpace& sys)
    : A_(sys.A().cast<Complex>()),
      B_(sys.B().cast<Complex>()),
      C_(sys.C().cast<Complex>()),
      D_(sys.D().cast<Complex>()),
      spectrum_(sys.A().eigenvalues()) {}

ComplexMatrix TransferEvaluator::operator()(Complex z, double pole_tol) const {
  const auto n = A_.rows();
  for (Eigen::Index i = 0; i < spectrum_.size(); ++i) {
    if (std::abs(spectrum_(i) - z) <= pole_tol) {
      throw Error(ErrorKind::SingularEvaluation, "evaluation point lies on a pole");
    }
  }
  const ComplexMatrix shifted = z * ComplexMatrix::Identity(n, n) - A_;
  Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
  if (!(lu.rcond() >= 1e-12)) {
    throw Error(ErrorKind::SingularEvaluation, "zI - A is numerically singular");
  }
  return C_ * lu.solve(B_) + D_;
}

ComplexMatrix eval_transfer(const DiscreteStateSpace& sys, Complex z, double pole_tol) {
  return TransferEvaluator(sys)(z, pole_tol);
}

Matrix dc_gain(const DiscreteStateSpace& sys, double pole_tol) {
  ComplexMatrix G;
  try {
    G = eval_transfer(sys, Complex(1.0, 0.0), pole_tol);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SingularEvaluation) {
      throw Error(ErrorKind::PoleAtOne, "det(I - A) is numerically zero");
    }
    throw;
  }
  if (G.imag().cwiseAbs().maxCoeff() >= 1e-12) {
    throw Error(ErrorKind::InternalInconsistency, "G(1) has an imaginary part");
  }
  return G.real();
}

Matrix feedthrough_limit(const DiscreteStateSpace& sys) {
  if (!sys.strictly_proper()) {
    throw Error(ErrorKind::NotStrictlyProper, "lim zG(z) is unbounded when D != 0");
  }
  return sys.C() * sys.B();
}

MinimalityReport minimality(const DiscreteStateSpace& sys) {
  const auto n = sys.states();
  MinimalityReport r;
  r.controllability_rank = numerical_rank(block_krylov(sys.A(), sys.B()));
  r.observability_rank =
      numerical_rank(block_krylov(sys.A().transpose(), sys.C().transpose()));
  r.controllable = r.controllability_rank == n;
  r.observable = r.observability_rank == n;
  return r;
}

PoleReport poles(const DiscreteStateSpace& sys, double circle_tol) {
  const ComplexVector ev = sys.A().eigenvalues();
  PoleReport r;
  r.poles.reserve(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double mod = std::abs(ev(i));
    r.poles.push_back({ev(i), std::abs(mod - 1.0) <= circle_tol});
  }
  // Ties broken by argument so the order is reproducible.
  std::sort(r.poles.begin(), r.poles.end(), [](const Pole& a, const Pole& b) {
    const double ma = std::abs(a.value), mb = std::abs(b.value);
    if (ma != mb) return ma > mb;
    return std::arg(a.value) > std::arg(b.value);
  });
  r.all_inside_or_on_unit_circle = r.max_modulus() <= 1.0 + circle_tol;
  return r;
}

double min_eig_sym(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(M), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

Eigen::Index numerical_rank(const Matrix& M, double rel) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& s = svd.singularValues();
  const double thresh = static_cast<double>(std::min(M.rows(), M.cols())) * s(0) * rel;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > thresh) ++rank;
  }
  return rank;
}

Matrix symmetrized(const Matrix& M) { return 0.5 * (M + M.transpose()); }

}  // namespace nikit
