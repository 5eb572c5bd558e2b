#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "error_kind.hpp"
#include "fixtures.hpp"
#include "nikit/ni_cert.hpp"
#include "nikit/zoh.hpp"

namespace nikit {
namespace {

using testing::kind_of;
using testing::S1;
using testing::S2;
using testing::scalar;
using testing::scalar_system;

Matrix mat2(double a, double b, double c, double d) {
  Matrix M(2, 2);
  M << a, b, c, d;
  return M;
}

DiscreteStateSpace sampled_spring() {
  return discretize_zoh(testing::undamped_spring(), SamplePeriod(std::numbers::pi / 2));
}

/// Integrating mode that neither input nor output sees; det(I - A) = 0.
DiscreteStateSpace hidden_integrator() {
  Matrix A = Matrix::Zero(2, 2), B(2, 1), C(1, 2);
  A.diagonal() << 1.0, 0.5;
  B << 0, 0.5;
  C << 0, 1;
  return DiscreteStateSpace(A, B, C);
}

std::vector<Violation> audit_linear(const DiscreteStateSpace& sys, const Matrix& P,
                                    double epsilon, std::uint64_t seed = 0,
                                    std::size_t count = 10000) {
  AuditOptions opts;
  opts.epsilon = epsilon;
  opts.seed = seed;
  opts.count = count;
  return audit_dissipation(linear_dynamics(sys), quadratic_storage(P),
                           uniform_box_sampler(sys.states(), sys.ports(), -10, 10), opts);
}

/// Largest eps with M - eps N^T N >= 0 from the generalized eigenproblem on range(M).
double pseudo_inverse_eps(const Matrix& M, const Matrix& N) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::Index r = 0;
  while (r < es.eigenvalues().size() && es.eigenvalues()(r) <= 1e-10 * top) ++r;
  const auto k = es.eigenvalues().size() - r;
  const Matrix V = es.eigenvectors().rightCols(k);
  const Vector inv_sqrt = es.eigenvalues().tail(k).cwiseSqrt().cwiseInverse();
  const Matrix NV = N * V * inv_sqrt.asDiagonal();
  const double s = spectral_norm(NV);
  return 1.0 / (s * s);
}

TEST(BuildM, Fixtures) {
  const Matrix M1 = build_M(S1(), scalar(1)).M;
  EXPECT_LE((M1 - mat2(0.75, -0.75, -0.75, 0.75)).norm(), 1e-15);
  Eigen::SelfAdjointEigenSolver<Matrix> es(M1);
  EXPECT_NEAR(es.eigenvalues()(0), 0.0, 1e-15);
  EXPECT_NEAR(es.eigenvalues()(1), 1.5, 1e-15);

  const Matrix M2 = build_M(S2(), scalar(1)).M;
  EXPECT_LE((M2 - mat2(0.75, -1.5, -1.5, 3.0)).norm(), 1e-15);
  EXPECT_NEAR(M2.determinant(), 0.0, 1e-14);

  Matrix C(2, 3);
  C << 1, 2, 3, 4, 5, 6;
  const DiscreteStateSpace zero_dyn(Matrix::Zero(3, 3), Matrix::Zero(3, 2), C);
  Matrix expected(5, 5);
  expected << Matrix::Identity(3, 3), -C.transpose(), -C, Matrix::Zero(2, 2);
  EXPECT_EQ(build_M(zero_dyn, Matrix::Identity(3, 3)).M, expected);
}

TEST(BuildM, Errors) {
  EXPECT_EQ(kind_of([] { build_M(scalar_system(0.5, 0.5, 0.25, 0.25), scalar(1)); }),
            ErrorKind::NotStrictlyProper);
  EXPECT_EQ(kind_of([] { build_M(S1(), Matrix::Identity(2, 2)); }), ErrorKind::DimensionMismatch);
}

TEST(BuildM, QuadraticFormIdentity) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 1 + trial % 5, p = 1 + trial % 3;
    const auto sys = testing::random_system(rng, n, p, 0.9);
    const Matrix P = testing::random_spd(rng, n, 0.1);
    const Matrix M = build_M(sys, P).M;
    EXPECT_EQ(M, M.transpose());
    for (int s = 0; s < 5; ++s) {
      Vector x(n), u(p);
      for (auto& e : x) e = g(rng);
      for (auto& e : u) e = g(rng);
      const Vector x1 = sys.A() * x + sys.B() * u;
      const double dV = 0.5 * x1.dot(P * x1) - 0.5 * x.dot(P * x);
      const double supply = u.dot(sys.C() * x1 - sys.C() * x);
      Vector xi(n + p);
      xi << x, u;
      const double q = xi.dot(M * xi);
      EXPECT_NEAR(dV - supply, -0.5 * q, 1e-10 * (1.0 + std::abs(q)));
      const Vector dy = output_increment_map(sys) * xi;
      EXPECT_LE((dy - (sys.C() * x1 - sys.C() * x)).norm(), 1e-12 * (1.0 + dy.norm()));
    }
  }
}

TEST(CheckNi, Fixtures) {
  const auto a = check_ni_with_P(S1(), scalar(1));
  EXPECT_TRUE(a.valid);
  EXPECT_NEAR(a.min_eig_M, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(a.min_eig_P, 1.0);

  const auto b = check_ni_with_P(S1(), scalar(-1));
  EXPECT_FALSE(b.valid);
  EXPECT_DOUBLE_EQ(b.min_eig_P, -1.0);

  EXPECT_TRUE(check_ni_with_P(S2(), scalar(1)).valid);
  EXPECT_FALSE(check_ni_with_P(scalar_system(0.5, 0.5, -1.0), scalar(1)).valid);
}

TEST(CheckNi, StoresSymmetrizedP) {
  const auto c = check_ni_with_P(sampled_spring(), mat2(1, 1e-13, 0, 1));
  EXPECT_EQ(c.P, c.P.transpose());
}

TEST(StorageEquality, ScalarFixtures) {
  const auto s1 = solve_storage_equality(S1());
  EXPECT_NEAR(s1.P0(0, 0), 1.0, 1e-14);
  EXPECT_TRUE(s1.basis.empty());
  const auto s2 = solve_storage_equality(S2());
  EXPECT_NEAR(s2.P0(0, 0), 1.0, 1e-14);
  EXPECT_TRUE(s2.basis.empty());
}

TEST(StorageEquality, BasisDimensionCount) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 4;
    const auto sys = testing::random_system(rng, n, 1, 0.8);
    const auto set = solve_storage_equality(sys);
    EXPECT_EQ(set.basis.size(), static_cast<std::size_t>(n * (n + 1) / 2 - n));
    EXPECT_LE(set.residual, 1e-10 * (1.0 + sys.C().norm()));
    std::vector<double> t;
    for (std::size_t i = 0; i < set.basis.size(); ++i) t.push_back(std::normal_distribution<>()(rng));
    const Matrix P = set.at(t);
    EXPECT_LE((P * set.Q - sys.C().transpose()).norm(), 1e-10 * (1.0 + P.norm()));
    for (const auto& Z : set.basis) {
      EXPECT_EQ(Z, Z.transpose());
      EXPECT_NEAR(Z.norm(), 1.0, 1e-12);
      EXPECT_LE((Z * set.Q).norm(), 1e-10);
    }
  }
}

TEST(StorageEquality, InconsistentWhenDcGainIsNotSymmetric) {
  const DiscreteStateSpace sys(Matrix::Identity(2, 2) * 0.5, mat2(1, 2, 0, 1), mat2(1, 0, 0, 1));
  EXPECT_EQ(kind_of([&] { solve_storage_equality(sys); }), ErrorKind::InconsistentConstraint);
}

TEST(StorageEquality, PoleAtOne) {
  EXPECT_EQ(kind_of([] { solve_storage_equality(hidden_integrator()); }), ErrorKind::PoleAtOne);
}

TEST(CertifyNi, ScalarUniqueStorage) {
  const auto r = certify_ni(S1());
  ASSERT_TRUE(r.certified());
  EXPECT_EQ(r.route, CertifyRoute::EqualityConstrained);
  EXPECT_NEAR(r.certificate.P(0, 0), 1.0, 1e-12);
}

TEST(CertifyNi, SampledSpringLiesInAffineSetContainingIdentity) {
  const auto sys = sampled_spring();
  const auto set = solve_storage_equality(sys);
  EXPECT_LE((Matrix::Identity(2, 2) * set.Q - sys.C().transpose()).norm(), 1e-12);
  const auto r = certify_ni(sys);
  ASSERT_TRUE(r.certified()) << r.detail;
  EXPECT_LE((r.certificate.P * set.Q - sys.C().transpose()).norm(), 1e-8);
  EXPECT_TRUE(check_ni_with_P(sys, r.certificate.P).valid);
}

TEST(CertifyNi, NegatedOutputIsProvedInfeasible) {
  const auto r = certify_ni(scalar_system(0.5, 0.5, -1.0));
  EXPECT_EQ(r.status, CertifyStatus::ProvedInfeasible);
  EXPECT_NEAR(r.certificate.P(0, 0), -1.0, 1e-12);
}

TEST(CertifyNi, InconsistentConstraintIsProvedInfeasible) {
  const DiscreteStateSpace sys(Matrix::Identity(2, 2) * 0.5, mat2(1, 2, 0, 1), mat2(1, 0, 0, 1));
  EXPECT_EQ(certify_ni(sys).status, CertifyStatus::ProvedInfeasible);
}

TEST(CertifyNi, RouteBHandlesPoleAtOne) {
  const auto r = certify_ni(hidden_integrator());
  ASSERT_TRUE(r.certified()) << r.detail;
  EXPECT_EQ(r.route, CertifyRoute::AlternatingProjection);
  EXPECT_TRUE(check_ni_with_P(hidden_integrator(), r.certificate.P).valid);
  EXPECT_NEAR(r.certificate.P(1, 1), 1.0, 1e-6);
}

TEST(CertifyNi, RouteBAloneCertifiesFixtures) {
  CertifyOptions opts;
  opts.only_route = CertifyRoute::AlternatingProjection;
  for (const auto& sys : {S1(), S2(), sampled_spring()}) {
    const auto r = certify_ni(sys, opts);
    ASSERT_TRUE(r.certified()) << r.detail;
    EXPECT_EQ(r.route, CertifyRoute::AlternatingProjection);
  }
  const auto bad = certify_ni(scalar_system(0.5, 0.5, -1.0), opts);
  EXPECT_EQ(bad.status, CertifyStatus::SearchFailed);
  EXPECT_FALSE(bad.certificate.valid);
}

TEST(CertifyNi, SampledMassSpringDampers) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 25; ++trial) {
    const auto msd = testing::random_mass_spring_damper(rng, 1 + trial % 3);
    const auto sys = discretize_zoh(msd.plant, SamplePeriod(0.2 + 0.1 * trial));
    const auto r = certify_ni(sys);
    ASSERT_TRUE(r.certified()) << "trial " << trial << ": " << r.detail;
    EXPECT_TRUE(check_ni_with_P(sys, r.certificate.P).valid);
    EXPECT_TRUE(audit_linear(sys, r.certificate.P, 0.0, trial, 2000).empty());
  }
}

TEST(CertifyNi, RequiresStrictlyProper) {
  EXPECT_EQ(kind_of([] { certify_ni(scalar_system(0.5, 0.5, 0.25, 0.25)); }),
            ErrorKind::NotStrictlyProper);
}

TEST(Factorization, Fixtures) {
  EXPECT_LE(factorization_check(S1(), scalar(1)), 1e-12);
  EXPECT_LE(factorization_check(S2(), scalar(1)), 1e-12);
  EXPECT_EQ(kind_of([] { factorization_check(S1(), scalar(2)); }),
            ErrorKind::ConstraintNotSatisfied);
}

TEST(Factorization, EqualitySetVerdictsAgree) {
  std::mt19937_64 rng(61);
  std::normal_distribution<double> g;
  int agreements = 0, certified = 0;
  for (int trial = 0; trial < 60; ++trial) {
    DiscreteStateSpace sys = trial % 2 == 0
        ? discretize_zoh(testing::random_mass_spring_damper(rng, 1 + trial % 3).plant,
                         SamplePeriod(0.5))
        : testing::random_system(rng, 1 + trial % 5, 1, 0.9);
    // Alternate between a perturbed point of the equality set and the certified storage.
    Matrix P;
    const auto found = certify_ni(sys);
    if (trial % 4 < 2 && found.certified()) {
      P = found.certificate.P;
    } else {
      const auto set = solve_storage_equality(sys);
      std::vector<double> t;
      for (std::size_t i = 0; i < set.basis.size(); ++i) t.push_back(0.1 * g(rng));
      P = symmetrized(set.at(t));
    }
    const Matrix M = build_M(sys, P).M;
    EXPECT_LE(factorization_check(sys, P), 1e-9 * (1.0 + M.norm()));

    const Matrix S = P - sys.A().transpose() * P * sys.A();
    const double tol = 1e-9 * spectral_norm(P) *
                       std::pow(1.0 + spectral_norm(sys.A()) + spectral_norm(sys.B()), 2);
    const bool via_conditions = min_eig_sym(S) >= -tol;
    const bool via_M = min_eig_sym(M) >= -tol;
    agreements += via_conditions == via_M;
    certified += via_M && min_eig_sym(P) > 0;
  }
  EXPECT_EQ(agreements, 60);
  EXPECT_GT(certified, 0);
}

TEST(Osni, Fixtures) {
  const auto at3 = check_osni_with_P(S1(), scalar(1), 3.0);
  EXPECT_TRUE(at3.valid);
  EXPECT_NEAR(at3.min_eig_M, 0.0, 1e-14);
  EXPECT_FALSE(check_osni_with_P(S1(), scalar(1), 3.5).valid);
  EXPECT_EQ(kind_of([] { check_osni_with_P(S1(), scalar(1), -1.0); }), ErrorKind::InvalidArgument);
}

TEST(Osni, ClosedFormOnScalarFixture) {
  for (double eps : {0.0, 0.5, 1.0, 2.0, 2.9, 3.2, 5.0}) {
    const auto c = check_osni_with_P(S1(), scalar(1), eps);
    // M - eps N^T N = (0.75 - 0.25 eps) [[1, -1], [-1, 1]]
    const double factor = 0.75 - 0.25 * eps;
    EXPECT_NEAR(c.min_eig_M, std::min(0.0, 2.0 * factor), 1e-14);
    EXPECT_EQ(c.valid, eps <= 3.0);
  }
}

TEST(Osni, ZeroEpsilonMatchesNi) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 30; ++trial) {
    const auto sys = testing::random_system(rng, 1 + trial % 4, 1 + trial % 2, 0.9);
    const Matrix P = testing::random_spd(rng, sys.states(), 0.1);
    const auto a = check_ni_with_P(sys, P);
    const auto b = check_osni_with_P(sys, P, 0.0);
    EXPECT_EQ(a.valid, b.valid);
    EXPECT_DOUBLE_EQ(a.min_eig_M, b.min_eig_M);
  }
}

TEST(Osni, MonotoneInEpsilon) {
  std::mt19937_64 rng(81);
  for (int trial = 0; trial < 10; ++trial) {
    const auto msd = testing::random_mass_spring_damper(rng, 1 + trial % 3);
    const auto sys = discretize_zoh(msd.plant, SamplePeriod(0.7));
    const double eps_max = max_output_strictness(sys, msd.storage);
    ASSERT_TRUE(std::isfinite(eps_max));
    for (double f : {0.0, 0.1, 0.5, 0.9, 0.999}) {
      EXPECT_TRUE(check_osni_with_P(sys, msd.storage, f * eps_max).valid) << f;
    }
  }
}

TEST(MaxStrictness, Fixtures) {
  EXPECT_NEAR(max_output_strictness(S1(), scalar(1)), 3.0, 1e-6);
  EXPECT_NEAR(max_output_strictness(testing::scalar_controller_inner(1.5), scalar(1.5)), 2.0, 1e-6);
  EXPECT_NEAR(max_output_strictness(testing::scalar_controller_inner(0.5), scalar(0.5)), 6.0, 1e-6);
}

TEST(MaxStrictness, ZeroOutputMapIsUnbounded) {
  const DiscreteStateSpace sys(scalar(0.5), scalar(1.0), scalar(0.0));
  EXPECT_TRUE(std::isinf(max_output_strictness(sys, scalar(1.0))));
}

TEST(MaxStrictness, LosslessModeGivesZero) {
  // The undamped sampled spring has a null direction of M that moves y.
  EXPECT_EQ(max_output_strictness(sampled_spring(), Matrix::Identity(2, 2)), 0.0);
}

TEST(MaxStrictness, AgreesWithPseudoInverseOracle) {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 20; ++trial) {
    const auto msd = testing::random_mass_spring_damper(rng, 1 + trial % 3);
    const auto sys = discretize_zoh(msd.plant, SamplePeriod(0.3 + 0.2 * trial));
    const Matrix M = build_M(sys, msd.storage).M;
    const Matrix N = output_increment_map(sys);
    const double oracle = pseudo_inverse_eps(M, N);
    const double got = max_output_strictness(sys, msd.storage);
    EXPECT_NEAR(got, oracle, 1e-6 + 1e-6 * oracle) << "trial " << trial;
  }
}

TEST(StepAdvance, Fixtures) {
  const auto r = recover_step_advance(scalar_system(0.5, 0.5, 0.25, 0.25));
  EXPECT_NEAR(r.C_hat(0, 0), 0.5, 1e-15);
  EXPECT_TRUE(r.inner.strictly_proper());
  EXPECT_EQ(kind_of([] { recover_step_advance(scalar_system(0.5, 0.5, 0.25, 0.9)); }),
            ErrorKind::NotStepAdvance);

  Matrix C(2, 3), B(3, 2);
  C << 1, 2, 3, -1, 0, 1;
  B << 1, 0, 0, 1, 1, 1;
  const auto id = recover_step_advance(DiscreteStateSpace(Matrix::Identity(3, 3), B, C, C * B));
  EXPECT_LE((id.C_hat - C).norm(), 1e-15);
}

TEST(StepAdvance, Errors) {
  EXPECT_EQ(kind_of([] { recover_step_advance(scalar_system(0.0, 1.0, 1.0, 0.0)); }),
            ErrorKind::SingularA);
  EXPECT_EQ(kind_of([] { recover_step_advance(S1()); }), ErrorKind::NotStepAdvance);
  // C A^{-1} B = 0 makes a D = 0 system step-advanced.
  Matrix A = Matrix::Zero(2, 2), B(2, 1), C(1, 2);
  A.diagonal() << 0.5, 0.25;
  B << 1, 0;
  C << 0, 1;
  EXPECT_NO_THROW(recover_step_advance(DiscreteStateSpace(A, B, C)));
}

TEST(StepAdvance, RoundTrip) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 1 + trial % 6, p = 1 + trial % 3;
    const auto inner = testing::random_system(rng, n, p, 0.9);
    const Matrix& A = inner.A();
    const DiscreteStateSpace wrapped(A, inner.B(), inner.C() * A, inner.C() * inner.B());
    const auto r = recover_step_advance(wrapped);
    EXPECT_LE((r.C_hat - inner.C()).norm(), 1e-10 * (1.0 + inner.C().norm()));
  }
}

TEST(StepAdvance, CertifySaniAndSaosni) {
  const auto sys = scalar_system(0.5, 0.5, 0.25, 0.25);
  const auto sani = certify_sani(sys);
  ASSERT_TRUE(sani.certified());
  EXPECT_NEAR(sani.inner_result.certificate.P(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(sani.inner.C()(0, 0), 0.5, 1e-15);

  const auto saosni = certify_saosni(sys);
  ASSERT_TRUE(saosni.certified());
  ASSERT_TRUE(saosni.epsilon_max.has_value());
  EXPECT_NEAR(*saosni.epsilon_max, 6.0, 1e-6);
  EXPECT_EQ(saosni.inner_result.certificate.epsilon, saosni.epsilon_max);
}

TEST(StepAdvance, NegatedControllerIsNotCertified) {
  const auto r = certify_saosni(scalar_system(0.5, 0.5, -0.25, -0.25));
  EXPECT_FALSE(r.certified());
  EXPECT_EQ(r.inner_result.status, CertifyStatus::ProvedInfeasible);
}

TEST(StepAdvance, LosslessInnerFailsSaosniButPassesSani) {
  const auto spring = sampled_spring();
  const Matrix& A = spring.A();
  const DiscreteStateSpace wrapped(A, spring.B(), spring.C() * A, spring.C() * spring.B());
  EXPECT_TRUE(certify_sani(wrapped).certified());
  const auto r = certify_saosni(wrapped);
  EXPECT_FALSE(r.certified());
  EXPECT_EQ(r.inner_result.status, CertifyStatus::SearchFailed);
}

TEST(Audit, ScalarFixtures) {
  EXPECT_TRUE(audit_linear(S1(), scalar(1), 0.0).empty());
  EXPECT_FALSE(audit_linear(S1(), scalar(1), 4.0).empty());
  EXPECT_FALSE(audit_linear(S1(), scalar(1), definition_strictness(4.0)).empty());
  // The LMI strictness 3 corresponds to the literal penalty 1.5 for V = x^2 / 2.
  EXPECT_TRUE(audit_linear(S1(), scalar(1), definition_strictness(3.0)).empty());
  EXPECT_FALSE(audit_linear(S1(), scalar(1), definition_strictness(3.2)).empty());
}

TEST(Audit, ZeroSystemHasSlack) {
  DissipationModel zero{[](const Vector& x, const Vector&) { return Vector(Vector::Zero(x.size())); },
                        [](const Vector&) { return Vector(Vector::Zero(1)); }};
  StorageFunction V = [](const Vector& x) { return x.squaredNorm(); };
  const auto v = audit_dissipation(zero, V, uniform_box_sampler(3, 1, -1, 1), {});
  EXPECT_TRUE(v.empty());
}

TEST(Audit, SerialAndParallelAgree) {
  AuditOptions opts;
  opts.epsilon = 2.0;
  opts.seed = 7;
  opts.count = 5000;
  const auto sys = S1();
  const auto run = [&](bool parallel) {
    opts.parallel = parallel;
    return audit_dissipation(linear_dynamics(sys), quadratic_storage(scalar(1)),
                             uniform_box_sampler(1, 1, -10, 10), opts);
  };
  const auto a = run(true);
  const auto b = run(false);
  ASSERT_EQ(a.size(), b.size());
  ASSERT_FALSE(a.empty());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].index, b[i].index);
    EXPECT_EQ(a[i].x, b[i].x);
    EXPECT_EQ(a[i].excess, b[i].excess);
  }
}

TEST(Audit, SeedChangesSamples) {
  const auto a = audit_linear(S1(), scalar(1), 4.0, 1, 200);
  const auto b = audit_linear(S1(), scalar(1), 4.0, 2, 200);
  ASSERT_FALSE(a.empty());
  ASSERT_FALSE(b.empty());
  EXPECT_NE(a.front().x, b.front().x);
}

TEST(Audit, NonFiniteEvaluation) {
  DissipationModel blowup{[](const Vector& x, const Vector&) { return Vector(x.array() / 0.0); },
                          [](const Vector& x) { return x; }};
  EXPECT_EQ(kind_of([&] {
              audit_dissipation(blowup, quadratic_storage(scalar(1)), uniform_box_sampler(1, 1, 1, 2),
                                {});
            }),
            ErrorKind::NonFiniteEvaluation);
}

TEST(Audit, CallableStorageOfWrongSignIsCaught) {
  DissipationModel dyn{[](const Vector& x, const Vector& u) {
                         return Vector(0.5 * x + 0.5 * u);
                       },
                       [](const Vector& x) { return x; }};
  StorageFunction wrong = [](const Vector& x) { return -0.5 * x.squaredNorm(); };
  EXPECT_FALSE(audit_dissipation(dyn, wrong, uniform_box_sampler(1, 1, -1, 1), {}).empty());
  EXPECT_TRUE(audit_dissipation(dyn, quadratic_storage(scalar(1)), uniform_box_sampler(1, 1, -1, 1), {})
                  .empty());
}

}  // namespace
}  // namespace nikit
