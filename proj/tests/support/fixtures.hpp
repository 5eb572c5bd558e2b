#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "nikit/lin_core.hpp"

namespace nikit::testing {

inline Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

inline DiscreteStateSpace scalar_system(double a, double b, double c, double d = 0.0) {
  return DiscreteStateSpace(scalar(a), scalar(b), scalar(c), scalar(d));
}

/// (A=0.5, B=0.5, C=1)
inline DiscreteStateSpace S1() { return scalar_system(0.5, 0.5, 1.0); }

/// (A=0.5, B=1, C=2)
inline DiscreteStateSpace S2() { return scalar_system(0.5, 1.0, 2.0); }

inline Matrix rotation_quarter() {
  Matrix A(2, 2);
  A << 0, 1, -1, 0;
  return A;
}

/// G(z) = (z + 1) / (z^2 + 1)
inline DiscreteStateSpace oscillator() {
  Matrix B(2, 1), C(1, 2);
  B << 1, 1;
  C << 1, 0;
  return DiscreteStateSpace(rotation_quarter(), B, C);
}

/// G(z) = 1 / (z^2 + 1)
inline DiscreteStateSpace oscillator_bare() {
  Matrix B(2, 1), C(1, 2);
  B << 0, 1;
  C << 1, 0;
  return DiscreteStateSpace(rotation_quarter(), B, C);
}

/// Step-advanced controller whose inner system is (0.5, 0.5, k) with storage P = k.
inline DiscreteStateSpace scalar_controller(double k) {
  return scalar_system(0.5, 0.5, 0.5 * k, 0.5 * k);
}

inline DiscreteStateSpace scalar_controller_inner(double k) { return scalar_system(0.5, 0.5, k); }

inline ContinuousStateSpace undamped_spring() {
  Matrix A(2, 2), B(2, 1), C(1, 2);
  A << 0, 1, -1, 0;
  B << 0, 1;
  C << 1, 0;
  return ContinuousStateSpace(A, B, C);
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = g(rng);
  return M;
}

inline Matrix random_spd(std::mt19937_64& rng, Eigen::Index n, double floor) {
  const Matrix R = random_matrix(rng, n, n);
  return R * R.transpose() / static_cast<double>(n) + floor * Matrix::Identity(n, n);
}

/// Mass-spring-damper chain M q'' + D q' + K q = u, y = q, together with its
/// energy storage blkdiag(K, M).
struct MassSpringDamper {
  ContinuousStateSpace plant;
  Matrix storage;
};

inline MassSpringDamper random_mass_spring_damper(std::mt19937_64& rng, Eigen::Index masses,
                                                  bool damped = true) {
  const Matrix M = random_spd(rng, masses, 0.5);
  const Matrix K = random_spd(rng, masses, 0.5);
  Matrix D = Matrix::Zero(masses, masses);
  if (damped) {
    std::uniform_int_distribution<Eigen::Index> rank_dist(1, masses);
    const Matrix R = random_matrix(rng, masses, rank_dist(rng));
    D = 0.3 * R * R.transpose() / static_cast<double>(masses);
  }
  const Matrix Minv = M.inverse();
  const Eigen::Index n = 2 * masses;
  Matrix A = Matrix::Zero(n, n);
  A.topRightCorner(masses, masses).setIdentity();
  A.bottomLeftCorner(masses, masses) = -Minv * K;
  A.bottomRightCorner(masses, masses) = -Minv * D;
  Matrix B = Matrix::Zero(n, masses);
  B.bottomRows(masses) = Minv;
  Matrix C = Matrix::Zero(masses, n);
  C.leftCols(masses).setIdentity();
  Matrix P = Matrix::Zero(n, n);
  P.topLeftCorner(masses, masses) = K;
  P.bottomRightCorner(masses, masses) = M;
  return {ContinuousStateSpace(A, B, C), P};
}

/// Random strictly proper system with spectral radius of A equal to `radius`.
inline DiscreteStateSpace random_system(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p,
                                        double radius) {
  Matrix A = random_matrix(rng, n, n);
  const double rho = A.eigenvalues().cwiseAbs().maxCoeff();
  A *= radius / rho;
  return DiscreteStateSpace(A, random_matrix(rng, n, p), random_matrix(rng, p, n));
}

/// Random well-conditioned similarity transform.
inline Matrix random_similarity(std::mt19937_64& rng, Eigen::Index n) {
  return Matrix::Identity(n, n) + 0.3 * random_matrix(rng, n, n) / std::sqrt(double(n));
}

}  // namespace nikit::testing
