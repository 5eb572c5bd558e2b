#include "nikit/loop_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nikit/error.hpp"
#include "nikit/ni_cert.hpp"

namespace nikit {
namespace {

struct LoopSignals {
  Vector x_plant, x_controller;
  Vector u_plant, y_plant;
  Vector y_controller;
};

/// Port signals at one instant. Valid because at most one side has feedthrough.
LoopSignals signals(const LoopModel& loop, const Vector& x) {
  const auto n = loop.plant.states();
  const auto m = loop.controller.states();
  LoopSignals s;
  s.x_plant = x.head(n);
  s.x_controller = x.tail(m);
  const auto& P = loop.plant;
  const auto& K = loop.controller;
  s.u_plant = K.D() * (P.C() * s.x_plant) + K.C() * s.x_controller;
  s.y_plant = P.C() * s.x_plant + P.D() * s.u_plant;
  s.y_controller = s.u_plant;
  return s;
}

double quad(const Matrix& M, const Vector& v) { return v.dot(M * v); }

Vector stack(const Vector& a, const Vector& b) {
  Vector out(a.size() + b.size());
  out << a, b;
  return out;
}

}  // namespace

std::string_view to_string(AdvanceSide side) noexcept {
  return side == AdvanceSide::Plant ? "plant" : "controller";
}

double LoopModel::spectral_radius() const {
  const ComplexVector ev = A_cl.eigenvalues();
  return ev.cwiseAbs().maxCoeff();
}

LyapunovMatrix lyapunov_W(const Matrix& P, const Matrix& P_tilde, const Matrix& C1,
                          const Matrix& C_hat2) {
  const auto n = P.rows();
  const auto m = P_tilde.rows();
  if (P.cols() != n || P_tilde.cols() != m || C1.cols() != n || C_hat2.cols() != m ||
      C1.rows() != C_hat2.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "inconsistent storage and output matrices");
  }
  const Matrix Ps = symmetrized(P);
  const Matrix Pt = symmetrized(P_tilde);
  if (!(min_eig_sym(Ps) > 0.0) || !(min_eig_sym(Pt) > 0.0)) {
    throw Error(ErrorKind::NotPositiveDefinite, "both storage matrices must be positive definite");
  }
  const Matrix coupling = C1.transpose() * C_hat2;

  LyapunovMatrix L;
  L.W.resize(n + m, n + m);
  L.W << Ps, -coupling, -coupling.transpose(), Pt;
  L.min_eig = min_eig_sym(L.W);
  const double w_scale = spectral_norm(L.W);
  L.positive_definite = L.min_eig > 1e-12 * w_scale;

  const Matrix schur = Ps - coupling * Pt.llt().solve(coupling.transpose());
  L.schur_min_eig = min_eig_sym(schur);
  L.schur_positive_definite = L.schur_min_eig > 1e-12 * w_scale;

  const double margin = 1e-9 * w_scale;
  if (L.positive_definite != L.schur_positive_definite &&
      std::abs(L.min_eig) > margin && std::abs(L.schur_min_eig) > margin) {
    throw Error(ErrorKind::InternalInconsistency, "W and Schur-complement verdicts disagree");
  }
  return L;
}

LoopModel close_loop(const DiscreteStateSpace& plant, const DiscreteStateSpace& controller,
                     AdvanceSide advance_side) {
  if (plant.ports() != controller.ports()) {
    throw Error(ErrorKind::DimensionMismatch,
                "plant has " + std::to_string(plant.ports()) + " ports, controller " +
                    std::to_string(controller.ports()));
  }
  if (!plant.strictly_proper() && !controller.strictly_proper()) {
    throw Error(ErrorKind::AlgebraicLoop, "both systems have feedthrough");
  }
  const bool controller_advanced = advance_side == AdvanceSide::Controller;
  const DiscreteStateSpace& unadvanced = controller_advanced ? plant : controller;
  if (!unadvanced.strictly_proper()) {
    throw Error(ErrorKind::NotStrictlyProper,
                std::string("the ") + (controller_advanced ? "plant" : "controller") +
                    " must have no feedthrough");
  }
  const DiscreteStateSpace advanced_inner =
      recover_step_advance(controller_advanced ? controller : plant).inner;

  const auto n = plant.states();
  const auto m = controller.states();
  const Matrix& Ap = plant.A();
  const Matrix& Bp = plant.B();
  const Matrix& Cp = plant.C();
  const Matrix& Dp = plant.D();
  const Matrix& Ac = controller.A();
  const Matrix& Bc = controller.B();
  const Matrix& Cc = controller.C();
  const Matrix& Dc = controller.D();

  Matrix A_cl(n + m, n + m);
  A_cl.topLeftCorner(n, n) = Ap + Bp * Dc * Cp;
  A_cl.topRightCorner(n, m) = Bp * Cc;
  A_cl.bottomLeftCorner(m, n) = Bc * Cp;
  A_cl.bottomRightCorner(m, m) = Ac + Bc * Dp * Cc;

  LoopModel loop{plant,
                 controller,
                 advance_side,
                 controller_advanced ? plant : advanced_inner,
                 controller_advanced ? advanced_inner : controller,
                 std::move(A_cl),
                 {},
                 std::nullopt};
  try {
    const Matrix product = dc_gain(plant) * dc_gain(controller);
    const ComplexVector ev = product.eigenvalues();
    loop.dc_product_eigs.assign(ev.data(), ev.data() + ev.size());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::PoleAtOne) throw;
  }
  return loop;
}

LoopModel with_certificates(LoopModel loop, const Matrix& P_plant, const Matrix& P_controller) {
  LyapunovMatrix L =
      lyapunov_W(P_plant, P_controller, loop.plant_inner.C(), loop.controller_inner.C());
  loop.certificates = LoopCertificates{symmetrized(P_plant), symmetrized(P_controller), std::move(L)};
  return loop;
}

DcGainCondition dc_gain_condition(const DiscreteStateSpace& plant,
                                  const DiscreteStateSpace& controller) {
  if (plant.ports() != controller.ports()) {
    throw Error(ErrorKind::DimensionMismatch, "port dimensions differ");
  }
  const Matrix G1 = dc_gain(plant);
  const Matrix H1 = dc_gain(controller);

  // A step-advanced side has the same DC gain as its inner system.
  for (const auto* side : {&plant, &controller}) {
    if (side->strictly_proper()) continue;
    std::optional<StepAdvanceRealization> r;
    try {
      r = recover_step_advance(*side);
    } catch (const Error&) {
      continue;
    }
    const Matrix full = dc_gain(*side);
    if ((dc_gain(r->inner) - full).norm() > 1e-9 * (1.0 + full.norm())) {
      throw Error(ErrorKind::InternalInconsistency, "inner and full DC gains differ");
    }
  }

  DcGainCondition out;
  const ComplexVector ev = (G1 * H1).eigenvalues();
  out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  out.lambda_max = -std::numeric_limits<double>::infinity();
  for (const Complex& lam : out.eigenvalues) {
    if (std::abs(lam.imag()) > 1e-9 * (1.0 + std::abs(lam))) {
      throw Error(ErrorKind::ComplexSpectrum, "G(1)H(1) has complex eigenvalues");
    }
    out.lambda_max = std::max(out.lambda_max, lam.real());
  }
  out.satisfied = out.lambda_max < 1.0 - 1e-9;
  return out;
}

Trajectory simulate(const LoopModel& loop, const Vector& x0, int steps,
                    const SimulationOptions& opts) {
  if (steps < 1) throw Error(ErrorKind::InvalidArgument, "need at least one step");
  if (x0.size() != loop.A_cl.rows()) {
    throw Error(ErrorKind::DimensionMismatch,
                "initial state has " + std::to_string(x0.size()) + " entries, loop has " +
                    std::to_string(loop.A_cl.rows()));
  }
  if (!x0.allFinite()) throw Error(ErrorKind::NonFinite, "initial state");

  const Matrix* W = loop.certificates ? &loop.certificates->lyapunov.W : nullptr;
  Trajectory traj;
  auto record = [&](const Vector& x) {
    const LoopSignals s = signals(loop, x);
    traj.states.push_back(x);
    traj.plant_outputs.push_back(s.y_plant);
    traj.controller_outputs.push_back(s.y_controller);
    traj.strict_outputs.push_back(loop.controller_inner.C() * s.x_controller);
    if (W) traj.W_values.push_back(quad(*W, x));
  };

  Vector x = x0;
  record(x);
  for (int k = 0; k < steps; ++k) {
    x = loop.A_cl * x;
    if (!x.allFinite() || x.norm() > opts.divergence_threshold) {
      traj.diverged = true;
      break;
    }
    record(x);
  }
  traj.converged = !traj.diverged && traj.states.back().norm() < opts.convergence_threshold;
  return traj;
}

LyapunovDecreaseReport verify_lyapunov_decrease(const LoopModel& loop, const Trajectory& traj,
                                                double epsilon) {
  if (!loop.certificates || traj.W_values.size() != traj.states.size()) {
    throw Error(ErrorKind::MissingCertificates, "trajectory carries no Lyapunov values");
  }
  const auto& cert = *loop.certificates;
  const Matrix M_plant = build_M(loop.plant_inner, cert.P_plant).M;
  const Matrix N_ctrl = output_increment_map(loop.controller_inner);
  const Matrix M_ctrl =
      build_M(loop.controller_inner, cert.P_controller).M - epsilon * N_ctrl.transpose() * N_ctrl;

  LyapunovDecreaseReport r;
  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
    const LoopSignals s = signals(loop, traj.states[k]);
    const double dW = traj.W_values[k + 1] - traj.W_values[k];
    const double penalty = epsilon * (traj.strict_outputs[k + 1] - traj.strict_outputs[k]).squaredNorm();
    const double scale = 1.0 + std::abs(traj.W_values[k]) + std::abs(traj.W_values[k + 1]);
    const double excess = dW + penalty;
    r.max_excess = std::max(r.max_excess, excess);
    if (excess > 1e-9 * scale) r.pass = false;

    const double slack = quad(M_plant, stack(s.x_plant, s.u_plant)) +
                         quad(M_ctrl, stack(s.x_controller, s.y_plant));
    r.max_identity_residual = std::max(r.max_identity_residual, std::abs(dW + penalty + slack));
    ++r.steps_checked;
  }
  return r;
}

}  // namespace nikit
