#include "nikit/ni_cert.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "nikit/error.hpp"
#include "nikit/parallel.hpp"

namespace nikit {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

/// Frobenius-orthonormal coordinates on symmetric n x n matrices.
class SymmetricCoordinates {
 public:
  explicit SymmetricCoordinates(Eigen::Index n) : n_(n) {}

  Eigen::Index size() const { return n_ * (n_ + 1) / 2; }

  Matrix matrix(const Vector& p) const {
    Matrix S(n_, n_);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n_; ++j) {
      S(j, j) = p(k++);
      for (Eigen::Index i = j + 1; i < n_; ++i) {
        S(i, j) = S(j, i) = p(k++) * kInvSqrt2;
      }
    }
    return S;
  }

  Vector coords(const Matrix& S) const {
    Vector p(size());
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n_; ++j) {
      p(k++) = S(j, j);
      for (Eigen::Index i = j + 1; i < n_; ++i) p(k++) = (S(i, j) + S(j, i)) * kInvSqrt2;
    }
    return p;
  }

  Matrix unit(Eigen::Index k) const {
    Vector e = Vector::Zero(size());
    e(k) = 1.0;
    return matrix(e);
  }

 private:
  Eigen::Index n_;
};

void require_strictly_proper(const DiscreteStateSpace& sys) {
  if (!sys.strictly_proper()) {
    throw Error(ErrorKind::NotStrictlyProper, "NI certification needs D = 0");
  }
}

void require_storage_dims(const DiscreteStateSpace& sys, const Matrix& P) {
  if (P.rows() != sys.states() || P.cols() != sys.states()) {
    throw Error(ErrorKind::DimensionMismatch,
                "storage matrix must be " + std::to_string(sys.states()) + "x" +
                    std::to_string(sys.states()));
  }
}

/// The P-linear part of M(P).
Matrix storage_part(const DiscreteStateSpace& sys, const Matrix& P) {
  const auto n = sys.states();
  const auto p = sys.ports();
  const Matrix& A = sys.A();
  const Matrix& B = sys.B();
  const Matrix PA = P * A;
  const Matrix PB = P * B;
  Matrix M(n + p, n + p);
  M.topLeftCorner(n, n) = P - A.transpose() * PA;
  M.topRightCorner(n, p) = -A.transpose() * PB;
  M.bottomLeftCorner(p, n) = -PB.transpose() * A;
  M.bottomRightCorner(p, p) = -B.transpose() * PB;
  return M;
}

/// The P-independent part of M(P).
Matrix supply_part(const DiscreteStateSpace& sys) {
  const auto n = sys.states();
  const auto p = sys.ports();
  const Matrix& A = sys.A();
  const Matrix& C = sys.C();
  const Matrix CB = C * sys.B();
  const Matrix CAmI = C * (A - Matrix::Identity(n, n));
  Matrix M = Matrix::Zero(n + p, n + p);
  M.topRightCorner(n, p) = CAmI.transpose();
  M.bottomLeftCorner(p, n) = CAmI;
  M.bottomRightCorner(p, p) = CB + CB.transpose();
  return M;
}

/// Magnitude of the terms that build M(P). M itself vanishes for lossless
/// systems, so PSD margins are taken relative to this instead of ||M||.
double dissipation_scale(const DiscreteStateSpace& sys, const Matrix& P) {
  const double a = spectral_norm(sys.A());
  const double b = spectral_norm(sys.B());
  const double c = spectral_norm(sys.C());
  return spectral_norm(P) * (1.0 + (a + b) * (a + b)) + 2.0 * c * (1.0 + a + b);
}

Eigen::Map<const Vector> flat(const Matrix& M) { return {M.data(), M.size()}; }

Matrix reshape(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix clip_below(const Matrix& S, double floor) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(S));
  const Vector lam = es.eigenvalues().cwiseMax(floor);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

/// (I - A)^{-1} B, or PoleAtOne.
Matrix dc_state_map(const DiscreteStateSpace& sys) {
  const auto n = sys.states();
  if (pole_distance(sys.A(), Complex(1.0, 0.0)) <= kPoleTolerance) {
    throw Error(ErrorKind::PoleAtOne, "det(I - A) = 0");
  }
  Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(n, n) - sys.A());
  if (!(lu.rcond() >= 1e-12)) throw Error(ErrorKind::PoleAtOne, "I - A is ill-conditioned");
  return lu.solve(sys.B());
}

double storage_residual(const DiscreteStateSpace& sys, const Matrix& P, const Matrix& Q) {
  return (P * Q - sys.C().transpose()).norm();
}

double equality_tolerance(const DiscreteStateSpace& sys) {
  return 1e-8 * (1.0 + sys.C().norm());
}

// ---- Route A: barrier method over the equality-constrained set ----
//
// Maximizes s subject to P(t) - sI > 0 and P(t) - A^T P(t) A - sI > 0 with
// P(t) = P0 + sum t_i E_i, inside a ball |t| < R.

struct BarrierBlock {
  Matrix F0;
  std::vector<Matrix> Ft;  // derivative along each t_i; the s-derivative is -I
};

struct RouteASearch {
  const DiscreteStateSpace& sys;
  const AffineStorageSet& set;
  std::array<BarrierBlock, 2> blocks;
  double radius;

  RouteASearch(const DiscreteStateSpace& s, const AffineStorageSet& a) : sys(s), set(a) {
    const Matrix& A = sys.A();
    blocks[0].F0 = set.P0;
    blocks[1].F0 = set.P0 - A.transpose() * set.P0 * A;
    for (const Matrix& E : set.basis) {
      blocks[0].Ft.push_back(E);
      blocks[1].Ft.push_back(E - A.transpose() * E * A);
    }
    radius = 1e3 * std::max(1.0, set.P0.norm());
  }

  std::size_t dim() const { return set.basis.size() + 1; }

  Matrix value(const BarrierBlock& b, const Vector& x) const {
    const auto d = static_cast<Eigen::Index>(b.Ft.size());
    Matrix F = b.F0;
    for (Eigen::Index i = 0; i < d; ++i) F += x(i) * b.Ft[i];
    F.diagonal().array() -= x(d);
    return symmetrized(F);
  }

  /// Barrier objective at x, or +inf outside the domain.
  double objective(const Vector& x, double tau) const {
    const auto d = x.size() - 1;
    const double ball = radius * radius - x.head(d).squaredNorm();
    if (!(ball > 0.0)) return std::numeric_limits<double>::infinity();
    double phi = -tau * x(d) - std::log(ball);
    for (const auto& b : blocks) {
      Eigen::LLT<Matrix> llt(value(b, x));
      if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
      phi -= 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    }
    return phi;
  }

  void derivatives(const Vector& x, double tau, Vector& g, Matrix& H) const {
    const auto d = x.size() - 1;
    const auto n = x.size();
    g = Vector::Zero(n);
    H = Matrix::Zero(n, n);
    g(d) = -tau;
    const double ball = radius * radius - x.head(d).squaredNorm();
    g.head(d) += 2.0 * x.head(d) / ball;
    H.topLeftCorner(d, d) += 2.0 * Matrix::Identity(d, d) / ball +
                             4.0 * x.head(d) * x.head(d).transpose() / (ball * ball);
    for (const auto& b : blocks) {
      const Matrix Finv = value(b, x).llt().solve(Matrix::Identity(b.F0.rows(), b.F0.cols()));
      std::vector<Matrix> W;
      for (Eigen::Index i = 0; i < d; ++i) W.push_back(Finv * b.Ft[i]);
      W.push_back(-Finv);
      for (Eigen::Index i = 0; i < n; ++i) {
        g(i) -= W[i].trace();
        for (Eigen::Index j = 0; j <= i; ++j) {
          const double h = (W[i].array() * W[j].transpose().array()).sum();
          H(i, j) += h;
          if (j != i) H(j, i) += h;
        }
      }
    }
  }

  Matrix P_of(const Vector& x) const {
    std::vector<double> t(x.data(), x.data() + x.size() - 1);
    return symmetrized(set.at(t));
  }

  Matrix run(const CertifyOptions& opts, int& newton_steps) const {
    const auto d = static_cast<Eigen::Index>(set.basis.size());
    Vector x = Vector::Zero(d + 1);
    const double scale = std::max(1.0, spectral_norm(set.P0));
    x(d) = std::min(min_eig_sym(blocks[0].F0), min_eig_sym(blocks[1].F0)) - scale;
    const double constraints = static_cast<double>(2 * set.P0.rows() + 1);
    for (double tau = 1.0 / scale; constraints / tau > 1e-14 * scale; tau *= 20.0) {
      for (int it = 0; it < 100; ++it) {
        Vector g;
        Matrix H;
        derivatives(x, tau, g, H);
        const Vector step = -H.ldlt().solve(g);
        const double decrement = -g.dot(step);
        if (!std::isfinite(decrement) || decrement < 1e-12) break;
        ++newton_steps;
        const double phi = objective(x, tau);
        double alpha = 1.0;
        while (alpha > 1e-12 && !(objective(x + alpha * step, tau) <=
                                  phi - 0.25 * alpha * decrement)) {
          alpha *= 0.5;
        }
        if (alpha <= 1e-12) break;
        x += alpha * step;
      }
      if (x(d) >= 0.0 && check_ni_with_P(sys, P_of(x), opts.tol_psd).valid) break;
    }
    return P_of(x);
  }
};

// ---- Route B: Dykstra alternating projections ----

struct AffineLift {
  SymmetricCoordinates coords;
  Matrix storage_cols;  // column k: vec(storage_part(E_k))
  Vector supply;        // vec(supply_part)
  Eigen::LLT<Matrix> normal;
  Eigen::Index dim_M;

  explicit AffineLift(const DiscreteStateSpace& sys)
      : coords(sys.states()), dim_M(sys.states() + sys.ports()) {
    const auto d = coords.size();
    storage_cols.resize(dim_M * dim_M, d);
    for (Eigen::Index k = 0; k < d; ++k) {
      storage_cols.col(k) = flat(storage_part(sys, coords.unit(k)));
    }
    const Matrix M0 = supply_part(sys);
    supply = flat(M0);
    normal.compute(Matrix::Identity(d, d) + storage_cols.transpose() * storage_cols);
  }

  Matrix M_of(const Vector& p) const {
    return reshape(storage_cols * p + supply, dim_M, dim_M);
  }

  /// Nearest point of {(P, M(P))} to (P_hat, M_hat) in the Frobenius metric.
  Vector project(const Matrix& P_hat, const Matrix& M_hat) const {
    const Vector rhs =
        coords.coords(P_hat) + storage_cols.transpose() * (flat(M_hat) - supply);
    return normal.solve(rhs);
  }

  /// Pins M(P) V = 0 for the near-null eigenvectors V of M(P), then moves P
  /// minimally onto that face.
  std::optional<Vector> face_step(const Vector& p, double eta) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(M_of(p)));
    const Vector& lam = es.eigenvalues();
    const double scale = lam.cwiseAbs().maxCoeff();
    Eigen::Index r = 0;
    while (r < lam.size() && lam(r) <= eta * scale) ++r;
    if (r == 0 || r == lam.size()) return std::nullopt;
    const Matrix V = es.eigenvectors().leftCols(r);
    const auto d = coords.size();
    Matrix J(dim_M * r, d);
    for (Eigen::Index k = 0; k < d; ++k) {
      const Matrix Mk = reshape(storage_cols.col(k), dim_M, dim_M);
      const Matrix MkV = Mk * V;
      J.col(k) = flat(MkV);
    }
    const Matrix M0V = reshape(supply, dim_M, dim_M) * V;
    const Vector target = -flat(M0V);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(J);
    const Vector next = p + cod.solve(target - J * p);
    if ((J * next - target).norm() > 1e-9 * (1.0 + target.norm() + J.norm() * next.norm())) {
      return std::nullopt;
    }
    return next;
  }
};

bool better(const StorageCertificate& a, const StorageCertificate& b) {
  return std::min(a.min_eig_P, a.min_eig_M + a.psd_threshold) >
         std::min(b.min_eig_P, b.min_eig_M + b.psd_threshold);
}

CertifyResult route_b(const DiscreteStateSpace& sys, const Matrix& start,
                      const CertifyOptions& opts, CertifyResult best) {
  constexpr int kFaceEvery = 20;
  constexpr double kFaceThresholds[] = {1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 5e-2};

  const AffineLift lift(sys);
  Vector p = lift.coords.coords(symmetrized(start));
  Matrix xP = lift.coords.matrix(p);
  Matrix xM = lift.M_of(p);
  Matrix incP_cone = Matrix::Zero(xP.rows(), xP.cols());
  Matrix incM_cone = Matrix::Zero(xM.rows(), xM.cols());
  Matrix incP_aff = incP_cone;
  Matrix incM_aff = incM_cone;

  auto accept = [&](const Matrix& P, int it) -> bool {
    StorageCertificate c = check_ni_with_P(sys, P, opts.tol_psd);
    if (c.valid) {
      best.status = CertifyStatus::Certified;
      best.route = CertifyRoute::AlternatingProjection;
      best.certificate = std::move(c);
      best.iterations = it;
      best.detail = "alternating projections";
      return true;
    }
    if (better(c, best.certificate)) best.certificate = std::move(c);
    return false;
  };

  if (accept(xP, 0)) return best;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const Matrix yP = clip_below(xP + incP_cone, opts.delta);
    const Matrix yM = clip_below(xM + incM_cone, 0.0);
    incP_cone = xP + incP_cone - yP;
    incM_cone = xM + incM_cone - yM;

    const Matrix zP = yP + incP_aff;
    const Matrix zM = yM + incM_aff;
    p = lift.project(zP, zM);
    xP = lift.coords.matrix(p);
    xM = lift.M_of(p);
    incP_aff = zP - xP;
    incM_aff = zM - xM;

    if (accept(xP, it)) return best;
    if (it % kFaceEvery == 0) {
      for (double eta : kFaceThresholds) {
        if (auto q = lift.face_step(p, eta)) {
          if (accept(lift.coords.matrix(*q), it)) return best;
        }
      }
    }
  }
  best.status = CertifyStatus::SearchFailed;
  best.route = CertifyRoute::AlternatingProjection;
  best.iterations = opts.max_iterations;
  best.detail = "alternating projections did not reach a certificate";
  return best;
}

StepAdvanceResult certify_step_advanced(const DiscreteStateSpace& sys, const CertifyOptions& opts,
                                        bool strict) {
  StepAdvanceRealization r = recover_step_advance(sys);
  StepAdvanceResult out{r.inner, certify_ni(r.inner, opts), std::nullopt};
  if (out.inner_result.certified()) {
    const double eps = max_output_strictness(r.inner, out.inner_result.certificate.P, opts.tol_psd);
    out.epsilon_max = eps;
    out.inner_result.certificate.epsilon = eps;
    if (strict && !(eps > 0.0)) {
      out.inner_result.status = CertifyStatus::SearchFailed;
      out.inner_result.detail = "inner storage found but its output strictness is zero";
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(CertifyRoute route) noexcept {
  return route == CertifyRoute::EqualityConstrained ? "A" : "B";
}

std::string_view to_string(CertifyStatus status) noexcept {
  switch (status) {
    case CertifyStatus::Certified: return "certified";
    case CertifyStatus::ProvedInfeasible: return "proved_infeasible";
    case CertifyStatus::SearchFailed: return "search_failed";
  }
  return "unknown";
}

DissipationMatrix build_M(const DiscreteStateSpace& sys, const Matrix& P) {
  require_strictly_proper(sys);
  require_storage_dims(sys, P);
  return {symmetrized(storage_part(sys, P) + supply_part(sys))};
}

Matrix output_increment_map(const DiscreteStateSpace& sys) {
  const auto n = sys.states();
  Matrix N(sys.ports(), n + sys.ports());
  N.leftCols(n) = sys.C() * (sys.A() - Matrix::Identity(n, n));
  N.rightCols(sys.ports()) = sys.C() * sys.B();
  return N;
}

StorageCertificate check_ni_with_P(const DiscreteStateSpace& sys, const Matrix& P,
                                   double tol_psd) {
  const Matrix M = build_M(sys, P).M;
  StorageCertificate c;
  c.P = symmetrized(P);
  c.min_eig_P = min_eig_sym(c.P);
  c.min_eig_M = min_eig_sym(M);
  c.psd_threshold = tol_psd * dissipation_scale(sys, P);
  c.valid = c.min_eig_P > 0.0 && c.min_eig_M >= -c.psd_threshold;
  return c;
}

StorageCertificate check_osni_with_P(const DiscreteStateSpace& sys, const Matrix& P,
                                     double epsilon, double tol_psd) {
  if (!(epsilon >= 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be nonnegative");
  const Matrix M = build_M(sys, P).M;
  const Matrix N = output_increment_map(sys);
  const Matrix NtN = N.transpose() * N;
  StorageCertificate c;
  c.P = symmetrized(P);
  c.epsilon = epsilon;
  c.min_eig_P = min_eig_sym(c.P);
  c.min_eig_M = min_eig_sym(M - epsilon * NtN);
  c.psd_threshold = tol_psd * (dissipation_scale(sys, P) + epsilon * spectral_norm(NtN));
  c.valid = c.min_eig_P > 0.0 && c.min_eig_M >= -c.psd_threshold;
  return c;
}

Matrix AffineStorageSet::at(const std::vector<double>& t) const {
  Matrix P = P0;
  for (std::size_t i = 0; i < t.size() && i < basis.size(); ++i) P += t[i] * basis[i];
  return P;
}

AffineStorageSet solve_storage_equality(const DiscreteStateSpace& sys) {
  const auto n = sys.states();
  const auto p = sys.ports();
  const Matrix Q = dc_state_map(sys);
  const SymmetricCoordinates coords(n);
  const auto d = coords.size();

  // Column k: vec(E_k Q)
  Matrix L(n * p, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Matrix EQ = coords.unit(k) * Q;
    L.col(k) = flat(EQ);
  }
  const Matrix Ct = sys.C().transpose();
  const Vector rhs = flat(Ct);

  Eigen::JacobiSVD<Matrix> svd(L, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double thresh =
      s.size() > 0 ? static_cast<double>(std::max(L.rows(), L.cols())) * s(0) * 1e-10 : 0.0;
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > thresh) ++rank;

  Vector x = Vector::Zero(d);
  for (Eigen::Index i = 0; i < rank; ++i) {
    x += (svd.matrixU().col(i).dot(rhs) / s(i)) * svd.matrixV().col(i);
  }

  AffineStorageSet set;
  set.Q = Q;
  set.P0 = coords.matrix(x);
  set.residual = storage_residual(sys, set.P0, Q);
  if (set.residual > equality_tolerance(sys)) {
    throw Error(ErrorKind::InconsistentConstraint,
                "no symmetric P satisfies P (I - A)^{-1} B = C^T (residual " +
                    std::to_string(set.residual) + ")");
  }
  for (Eigen::Index i = rank; i < d; ++i) {
    set.basis.push_back(coords.matrix(svd.matrixV().col(i)));
  }
  return set;
}

double factorization_check(const DiscreteStateSpace& sys, const Matrix& P) {
  require_strictly_proper(sys);
  require_storage_dims(sys, P);
  const auto n = sys.states();
  const Matrix Q = dc_state_map(sys);
  if (storage_residual(sys, P, Q) > equality_tolerance(sys)) {
    throw Error(ErrorKind::ConstraintNotSatisfied, "P misses P (I - A)^{-1} B = C^T");
  }
  Matrix G(n, n + sys.ports());
  G.leftCols(n) = -Matrix::Identity(n, n);
  G.rightCols(sys.ports()) = Q;
  const Matrix core = P - sys.A().transpose() * P * sys.A();
  return (build_M(sys, P).M - G.transpose() * core * G).norm();
}

CertifyResult certify_ni(const DiscreteStateSpace& sys, const CertifyOptions& opts) {
  require_strictly_proper(sys);
  CertifyResult result;
  result.certificate.min_eig_P = -std::numeric_limits<double>::infinity();
  result.certificate.min_eig_M = -std::numeric_limits<double>::infinity();
  Matrix start = Matrix::Identity(sys.states(), sys.states());

  const bool try_a = opts.only_route != CertifyRoute::AlternatingProjection;
  const bool try_b = opts.only_route != CertifyRoute::EqualityConstrained;

  if (try_a) {
    std::optional<AffineStorageSet> set;
    try {
      set = solve_storage_equality(sys);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InconsistentConstraint) {
        result.status = CertifyStatus::ProvedInfeasible;
        result.route = CertifyRoute::EqualityConstrained;
        result.detail = e.what();
        return result;
      }
      if (e.kind() != ErrorKind::PoleAtOne) throw;
      result.detail = "equality route unavailable: det(I - A) = 0";
    }
    if (set) {
      int evaluations = 0;
      const Matrix P = set->basis.empty() ? symmetrized(set->P0)
                                          : RouteASearch(sys, *set).run(opts, evaluations);
      result.route = CertifyRoute::EqualityConstrained;
      result.iterations = evaluations;
      result.certificate = check_ni_with_P(sys, P, opts.tol_psd);
      if (result.certificate.valid) {
        result.status = CertifyStatus::Certified;
        result.detail = "equality-constrained search";
        return result;
      }
      if (set->basis.empty()) {
        result.status = CertifyStatus::ProvedInfeasible;
        result.detail = "the unique P solving the equality constraint is not a valid storage";
        return result;
      }
      result.status = CertifyStatus::SearchFailed;
      result.detail = "equality-constrained search found no certificate";
      start = P;
    }
  }
  if (!try_b) return result;
  return route_b(sys, start, opts, std::move(result));
}

double max_output_strictness(const DiscreteStateSpace& sys, const Matrix& P, double tol_psd) {
  const Matrix M = build_M(sys, P).M;
  const Matrix N = output_increment_map(sys);
  const double n_norm = spectral_norm(N);
  const double m_norm = dissipation_scale(sys, P);
  if (n_norm <= 1e-14 * (1.0 + m_norm)) return std::numeric_limits<double>::infinity();

  // A null direction of M that moves the output rules out any eps > 0.
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > tol_psd * m_norm) break;
    if ((N * es.eigenvectors().col(i)).norm() > std::sqrt(tol_psd) * n_norm) return 0.0;
  }

  if (!check_ni_with_P(sys, P, tol_psd).valid) return 0.0;
  // The tolerance that accepts M itself would also stretch eps past the true
  // boundary, so larger eps must keep lambda_min within roundoff of M's.
  const Matrix NtN = N.transpose() * N;
  const double floor = std::min(0.0, es.eigenvalues()(0));
  const double roundoff = 1e-14 * (m_norm + spectral_norm(NtN));
  const auto feasible = [&](double eps) {
    return min_eig_sym(M - eps * NtN) >= floor - roundoff * (1.0 + eps);
  };
  double lo = 0.0, hi = 1.0;
  int doublings = 0;
  while (feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 1000) return std::numeric_limits<double>::infinity();
  }
  while (hi - lo > 1e-8 && hi - lo > 1e-15 * hi) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

StepAdvanceRealization recover_step_advance(const DiscreteStateSpace& sys) {
  const Matrix& A = sys.A();
  Eigen::JacobiSVD<Matrix> svd(A);
  const Vector& s = svd.singularValues();
  if (!(s(s.size() - 1) > 1e-9 * s(0))) {
    throw Error(ErrorKind::SingularA, "step-advance recovery needs an invertible A");
  }
  // C_hat = C A^{-1}  <=>  A^T C_hat^T = C^T
  const Matrix C_hat = A.transpose().partialPivLu().solve(sys.C().transpose()).transpose();
  const double residual = (sys.D() - C_hat * sys.B()).norm();
  if (residual > 1e-8 * (1.0 + sys.D().norm())) {
    throw Error(ErrorKind::NotStepAdvance,
                "D != C A^{-1} B (residual " + std::to_string(residual) + ")");
  }
  return {DiscreteStateSpace(A, sys.B(), C_hat), C_hat, residual};
}

StepAdvanceResult certify_sani(const DiscreteStateSpace& sys, const CertifyOptions& opts) {
  return certify_step_advanced(sys, opts, false);
}

StepAdvanceResult certify_saosni(const DiscreteStateSpace& sys, const CertifyOptions& opts) {
  return certify_step_advanced(sys, opts, true);
}

std::vector<Violation> audit_dissipation(const DissipationModel& dynamics,
                                         const StorageFunction& storage,
                                         const Sampler& sampler, const AuditOptions& opts) {
  if (opts.count < 1) throw Error(ErrorKind::InvalidArgument, "audit needs at least one sample");
  std::mt19937_64 rng(opts.seed);
  std::vector<AuditSample> samples;
  samples.reserve(opts.count);
  for (std::size_t i = 0; i < opts.count; ++i) samples.push_back(sampler(rng));

  std::vector<std::optional<double>> excess(opts.count);
  const auto evaluate = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& [x, u] = samples[i];
      const Vector x_next = dynamics.step(x, u);
      const Vector dy = dynamics.output(x_next) - dynamics.output(x);
      const double v0 = storage(x);
      const double v1 = storage(x_next);
      const double supply = u.dot(dy);
      const double penalty = opts.epsilon * dy.squaredNorm();
      const double value = v1 - v0 - supply + penalty;
      if (!std::isfinite(value)) {
        throw Error(ErrorKind::NonFiniteEvaluation,
                    "sample " + std::to_string(i) + " produced a non-finite value");
      }
      const double scale = 1.0 + std::abs(v0) + std::abs(v1) + std::abs(supply) + penalty;
      if (value > opts.rel_tol * scale) excess[i] = value;
    }
  };
  parallel_for(opts.count, opts.parallel ? thread_budget() : 1, evaluate);

  std::vector<Violation> out;
  for (std::size_t i = 0; i < opts.count; ++i) {
    if (excess[i]) out.push_back({i, samples[i].x, samples[i].u, *excess[i]});
  }
  return out;
}

DissipationModel linear_dynamics(const DiscreteStateSpace& sys) {
  const Matrix A = sys.A(), B = sys.B(), C = sys.C();
  return {[A, B](const Vector& x, const Vector& u) -> Vector { return A * x + B * u; },
          [C](const Vector& x) -> Vector { return C * x; }};
}

StorageFunction quadratic_storage(const Matrix& P) {
  return [P](const Vector& x) { return 0.5 * x.dot(P * x); };
}

Sampler uniform_box_sampler(Eigen::Index states, Eigen::Index ports, double lo, double hi) {
  return [=](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(lo, hi);
    AuditSample s{Vector(states), Vector(ports)};
    for (Eigen::Index i = 0; i < states; ++i) s.x(i) = dist(rng);
    for (Eigen::Index i = 0; i < ports; ++i) s.u(i) = dist(rng);
    return s;
  };
}

}  // namespace nikit
