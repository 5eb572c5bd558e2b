#include "nikit/zoh.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <string>

#include "nikit/error.hpp"

namespace nikit {
namespace {

// Higham, "The scaling and squaring method for the matrix exponential
// revisited", degree-13 coefficients and 1-norm threshold.
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

SamplePeriod::SamplePeriod(double seconds) : seconds_(seconds) {
  if (!(seconds > 0.0) || !std::isfinite(seconds)) {
    throw Error(ErrorKind::InvalidArgument, "sample period must be positive and finite");
  }
}

ContinuousQuadraticStorage::ContinuousQuadraticStorage(const Matrix& P) {
  if (P.rows() != P.cols() || P.rows() < 1) {
    throw Error(ErrorKind::DimensionMismatch, "storage matrix must be square");
  }
  if (!P.allFinite()) throw Error(ErrorKind::NonFinite, "storage matrix");
  P_ = symmetrized(P);
  if (!(min_eig_sym(P_) > 0.0)) {
    throw Error(ErrorKind::NotPositiveDefinite, "storage matrix must be positive definite");
  }
}

Matrix matrix_exponential(const Matrix& M) {
  if (M.rows() != M.cols()) throw Error(ErrorKind::DimensionMismatch, "exp of non-square matrix");
  if (!M.allFinite()) throw Error(ErrorKind::NonFinite, "exp argument");
  const auto n = M.rows();
  const double norm1 = M.cwiseAbs().colwise().sum().maxCoeff();

  int squarings = 0;
  if (norm1 > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
  }
  if (squarings > 1000) throw Error(ErrorKind::Overflow, "matrix norm out of range");
  const Matrix S = M / std::ldexp(1.0, squarings);

  const Matrix I = Matrix::Identity(n, n);
  const Matrix S2 = S * S;
  const Matrix S4 = S2 * S2;
  const Matrix S6 = S4 * S2;
  const auto& b = kPade13;
  const Matrix U =
      S * (S6 * (b[13] * S6 + b[11] * S4 + b[9] * S2) + b[7] * S6 + b[5] * S4 +
           b[3] * S2 + b[1] * I);
  const Matrix V = S6 * (b[12] * S6 + b[10] * S4 + b[8] * S2) + b[6] * S6 +
                   b[4] * S4 + b[2] * S2 + b[0] * I;
  Matrix E = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < squarings; ++i) {
    E = E * E;
    if (!E.allFinite()) throw Error(ErrorKind::Overflow, "exp overflowed while squaring");
  }
  if (!E.allFinite()) throw Error(ErrorKind::Overflow, "exp is not representable");
  return E;
}

DiscreteStateSpace discretize_zoh(const ContinuousStateSpace& csys, SamplePeriod T) {
  const auto n = csys.states();
  const auto p = csys.ports();
  Matrix aug = Matrix::Zero(n + p, n + p);
  aug.topLeftCorner(n, n) = csys.A();
  aug.topRightCorner(n, p) = csys.B();
  const Matrix E = matrix_exponential(aug * T.seconds());
  return DiscreteStateSpace(E.topLeftCorner(n, n), E.topRightCorner(n, p), csys.C());
}

ContinuousNiVerdict audit_continuous_ni(const ContinuousStateSpace& csys,
                                        const ContinuousQuadraticStorage& storage,
                                        double tol_psd) {
  const auto n = csys.states();
  const auto p = csys.ports();
  const Matrix& P = storage.P();
  if (P.rows() != n) {
    throw Error(ErrorKind::DimensionMismatch,
                "storage is " + std::to_string(P.rows()) + "x" + std::to_string(P.cols()) +
                    " for " + std::to_string(n) + " states");
  }
  const Matrix& A = csys.A();
  const Matrix& B = csys.B();
  const Matrix& C = csys.C();

  // u^T C (A x + B u) - x^T P (A x + B u)
  Matrix Q(n + p, n + p);
  Q.topLeftCorner(n, n) = -0.5 * (A.transpose() * P + P * A);
  Q.topRightCorner(n, p) = 0.5 * (A.transpose() * C.transpose() - P * B);
  Q.bottomLeftCorner(p, n) = Q.topRightCorner(n, p).transpose();
  Q.bottomRightCorner(p, p) = 0.5 * (C * B + B.transpose() * C.transpose());

  ContinuousNiVerdict v;
  v.min_eig = min_eig_sym(Q);
  // Relative to the terms that build Q: Q vanishes identically for lossless
  // plants, where a ||Q||-relative margin would reject pure roundoff.
  const double scale = (spectral_norm(P) + spectral_norm(C)) * (spectral_norm(A) + spectral_norm(B));
  v.pass = v.min_eig >= -tol_psd * std::max(scale, spectral_norm(Q));
  v.supply_form = std::move(Q);
  return v;
}

}  // namespace nikit
