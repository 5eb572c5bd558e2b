#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "nikit/lin_core.hpp"

namespace nikit {

/// Which side of the positive-feedback loop carries the one-step advance.
/// Controller: NI plant with an SAOSNI controller. Plant: SANI plant with an
/// OSNI controller. In both cases the controller is the strict side.
enum class AdvanceSide { Plant, Controller };

std::string_view to_string(AdvanceSide side) noexcept;

struct LyapunovMatrix {
  /// [[P, -Ca^T Cb], [-Cb^T Ca, P_tilde]], stored without the 1/2 of the
  /// storage functions. Definiteness is unaffected by that factor.
  Matrix W;
  double min_eig = 0.0;
  bool positive_definite = false;
  /// lambda_min of P - Ca^T Cb P_tilde^{-1} Cb^T Ca
  double schur_min_eig = 0.0;
  bool schur_positive_definite = false;
};

/// Throws NotPositiveDefinite if P or P_tilde is not positive definite, and
/// InternalInconsistency if the direct and Schur-complement verdicts disagree
/// away from the boundary.
LyapunovMatrix lyapunov_W(const Matrix& P, const Matrix& P_tilde, const Matrix& C1,
                          const Matrix& C_hat2);

struct LoopCertificates {
  Matrix P_plant;
  Matrix P_controller;
  LyapunovMatrix lyapunov;
};

struct LoopModel {
  DiscreteStateSpace plant;
  DiscreteStateSpace controller;
  AdvanceSide advance_side;
  /// Strictly proper realizations whose storages and outputs enter W.
  DiscreteStateSpace plant_inner;
  DiscreteStateSpace controller_inner;
  /// Stacked state [x_plant; x_controller].
  Matrix A_cl;
  /// Eigenvalues of G(1) H(1); empty when 1 is a pole of either side.
  std::vector<Complex> dc_product_eigs;
  std::optional<LoopCertificates> certificates;

  Eigen::Index plant_states() const noexcept { return plant.states(); }
  double spectral_radius() const;
};

/// Positive feedback u_plant = y_controller, u_controller = y_plant.
LoopModel close_loop(const DiscreteStateSpace& plant, const DiscreteStateSpace& controller,
                     AdvanceSide advance_side);

/// Attaches storage matrices for plant_inner and controller_inner and builds W.
LoopModel with_certificates(LoopModel loop, const Matrix& P_plant, const Matrix& P_controller);

struct DcGainCondition {
  double lambda_max = 0.0;
  bool satisfied = false;
  std::vector<Complex> eigenvalues;
};

/// lambda_max(G(1) H(1)) < 1 - 1e-9 using full transfers. When a side is
/// step-advanced its inner DC gain is checked against the full one.
DcGainCondition dc_gain_condition(const DiscreteStateSpace& plant,
                                  const DiscreteStateSpace& controller);

struct SimulationOptions {
  double divergence_threshold = 1e12;
  double convergence_threshold = 1e-6;
};

struct Trajectory {
  std::vector<Vector> states;
  std::vector<Vector> plant_outputs;
  std::vector<Vector> controller_outputs;
  /// Outputs of controller_inner; the signal penalized by the strictness.
  std::vector<Vector> strict_outputs;
  std::vector<double> W_values;
  bool diverged = false;
  bool converged = false;

  std::size_t steps() const noexcept { return states.empty() ? 0 : states.size() - 1; }
};

Trajectory simulate(const LoopModel& loop, const Vector& x0, int steps,
                    const SimulationOptions& opts = {});

struct LyapunovDecreaseReport {
  bool pass = true;
  /// Largest W_{k+1} - W_k + eps ||dy||^2 (must stay <= tolerance).
  double max_excess = 0.0;
  /// Largest mismatch between W_{k+1} - W_k and the exact dissipation
  /// accounting -eps ||dy||^2 - xi^T M xi - xi_c^T (M_c - eps N_c^T N_c) xi_c.
  double max_identity_residual = 0.0;
  std::size_t steps_checked = 0;
};

/// Throws MissingCertificates if the loop has no W.
LyapunovDecreaseReport verify_lyapunov_decrease(const LoopModel& loop, const Trajectory& traj,
                                                double epsilon);

}  // namespace nikit
