#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nikit/lin_core.hpp"

namespace nikit {

inline constexpr double kPsdTolerance = 1e-9;

/// Quadratic storage V(x) = 1/2 x^T P x together with the eigenvalue evidence
/// that it witnesses the NI (or, with epsilon, OSNI) inequality.
///
/// The strictness epsilon follows the LMI convention M - eps N^T N >= 0. In
/// terms of the dissipation inequality with V = 1/2 x^T P x this is the
/// penalty eps/2 ||y_{k+1} - y_k||^2; see definition_strictness().
struct StorageCertificate {
  Matrix P;
  std::optional<double> epsilon;
  double min_eig_P = 0.0;
  double min_eig_M = 0.0;
  /// Absolute threshold min_eig_M was compared against: tol_psd times the
  /// magnitude of the terms that build M (plus eps ||N^T N|| for OSNI).
  double psd_threshold = 0.0;
  bool valid = false;
};

/// Strictness to use in the literal inequality
/// V(x+) - V(x) <= u^T dy - s ||dy||^2 with V = 1/2 x^T P x.
constexpr double definition_strictness(double lmi_epsilon) { return 0.5 * lmi_epsilon; }

/// Symmetric matrix acting on xi = [x; u] with u^T dy - dV = 1/2 xi^T M xi.
struct DissipationMatrix {
  Matrix M;
};

DissipationMatrix build_M(const DiscreteStateSpace& sys, const Matrix& P);

/// N = [C(A - I), CB], so y_{k+1} - y_k = N xi.
Matrix output_increment_map(const DiscreteStateSpace& sys);

StorageCertificate check_ni_with_P(const DiscreteStateSpace& sys, const Matrix& P,
                                   double tol_psd = kPsdTolerance);

StorageCertificate check_osni_with_P(const DiscreteStateSpace& sys, const Matrix& P,
                                     double epsilon, double tol_psd = kPsdTolerance);

/// All symmetric P with P (I - A)^{-1} B = C^T, written P0 + sum t_i Z_i with
/// the Z_i Frobenius-orthonormal.
struct AffineStorageSet {
  Matrix P0;
  std::vector<Matrix> basis;
  /// (I - A)^{-1} B
  Matrix Q;
  double residual = 0.0;

  Matrix at(const std::vector<double>& t) const;
};

AffineStorageSet solve_storage_equality(const DiscreteStateSpace& sys);

/// ||M - G^T (P - A^T P A) G||_F with G = [-I, (I - A)^{-1} B]. Throws
/// ConstraintNotSatisfied when P misses the equality constraint.
double factorization_check(const DiscreteStateSpace& sys, const Matrix& P);

enum class CertifyRoute { EqualityConstrained, AlternatingProjection };
enum class CertifyStatus { Certified, ProvedInfeasible, SearchFailed };

std::string_view to_string(CertifyRoute route) noexcept;
std::string_view to_string(CertifyStatus status) noexcept;

struct CertifyOptions {
  double tol_psd = kPsdTolerance;
  /// Lower bound on P used by the cone projection.
  double delta = 1e-8;
  int max_iterations = 5000;
  /// Skips the other route; used to exercise each route on its own.
  std::optional<CertifyRoute> only_route;
};

struct CertifyResult {
  CertifyStatus status = CertifyStatus::SearchFailed;
  CertifyRoute route = CertifyRoute::EqualityConstrained;
  /// The certificate when certified, otherwise the best candidate seen.
  StorageCertificate certificate;
  int iterations = 0;
  std::string detail;

  bool certified() const noexcept { return status == CertifyStatus::Certified; }
};

CertifyResult certify_ni(const DiscreteStateSpace& sys, const CertifyOptions& opts = {});

/// Largest eps with M(P) - eps N^T N >= 0, by doubling then bisection
/// (absolute accuracy 1e-8, approached from below up to roundoff). Returns 0
/// when M(P) has a null direction that moves the output, and +inf when N = 0.
double max_output_strictness(const DiscreteStateSpace& sys, const Matrix& P,
                             double tol_psd = kPsdTolerance);

struct StepAdvanceRealization {
  /// (A, B, C A^{-1}) with no feedthrough.
  DiscreteStateSpace inner;
  Matrix C_hat;
  double consistency_residual = 0.0;
};

StepAdvanceRealization recover_step_advance(const DiscreteStateSpace& sys);

struct StepAdvanceResult {
  DiscreteStateSpace inner;
  CertifyResult inner_result;
  std::optional<double> epsilon_max;

  bool certified() const noexcept { return inner_result.certified(); }
};

StepAdvanceResult certify_sani(const DiscreteStateSpace& sys, const CertifyOptions& opts = {});
StepAdvanceResult certify_saosni(const DiscreteStateSpace& sys, const CertifyOptions& opts = {});

// Trajectory-level dissipation audit.

struct DissipationModel {
  std::function<Vector(const Vector& x, const Vector& u)> step;
  std::function<Vector(const Vector& x)> output;
};

using StorageFunction = std::function<double(const Vector& x)>;

struct AuditSample {
  Vector x;
  Vector u;
};

using Sampler = std::function<AuditSample(std::mt19937_64&)>;

struct AuditOptions {
  /// Penalty s in V(x+) - V(x) - u^T dy + s ||dy||^2 <= 0.
  double epsilon = 0.0;
  std::size_t count = 10000;
  std::uint64_t seed = 0;
  /// Callables must be safe for concurrent invocation unless this is false.
  bool parallel = true;
  double rel_tol = 1e-9;
};

struct Violation {
  std::size_t index = 0;
  Vector x;
  Vector u;
  double excess = 0.0;
};

/// Samples are drawn in order from one seeded engine, then evaluated; the
/// result is identical for serial and parallel runs.
std::vector<Violation> audit_dissipation(const DissipationModel& dynamics,
                                         const StorageFunction& storage,
                                         const Sampler& sampler,
                                         const AuditOptions& opts = {});

/// Maps of a strictly proper linear system (feedthrough is ignored).
DissipationModel linear_dynamics(const DiscreteStateSpace& sys);

/// V(x) = 1/2 x^T P x
StorageFunction quadratic_storage(const Matrix& P);

/// Independent uniform draws of every x and u entry from [lo, hi].
Sampler uniform_box_sampler(Eigen::Index states, Eigen::Index ports, double lo, double hi);

}  // namespace nikit
