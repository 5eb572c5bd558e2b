#include "nikit/freq_cert.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nikit/error.hpp"
#include "nikit/parallel.hpp"

namespace nikit {
namespace {

constexpr double kClusterTol = 1e-6;

void require_strictly_proper(const DiscreteStateSpace& sys) {
  if (!sys.strictly_proper()) {
    throw Error(ErrorKind::NotStrictlyProper, "frequency conditions assume D = 0");
  }
}

double hermitian_min_eig(const ComplexMatrix& H) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double complex_norm2(const ComplexMatrix& M) {
  if (M.size() == 0) return 0.0;
  if (M.rows() == 1 || M.cols() == 1) return M.norm();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(M.adjoint() * M, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()(es.eigenvalues().size() - 1)));
}

/// Condition matrix at e^{i theta} plus the magnitude of the terms that built it.
class ConditionEvaluator {
 public:
  explicit ConditionEvaluator(const DiscreteStateSpace& sys)
      : transfer_(sys),
        L_((sys.C() * sys.B()).cast<Complex>()),
        L_norm_(spectral_norm(sys.C() * sys.B())) {
    require_strictly_proper(sys);
  }

  std::pair<ComplexMatrix, double> operator()(double theta, double pole_tol) const {
    const Complex z = std::polar(1.0, theta);
    ComplexMatrix G;
    try {
      G = transfer_(z, pole_tol);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SingularEvaluation) {
        throw Error(ErrorKind::PoleProximity,
                    "e^{i theta} is a pole for theta = " + std::to_string(theta));
      }
      throw;
    }
    const ComplexMatrix X = (z + 1.0) * G;
    const Complex I(0.0, 1.0);
    ComplexMatrix H = I * (X - X.adjoint() - L_ + L_.transpose());
    H = 0.5 * (H + H.adjoint()).eval();
    const double scale = 1.0 + 2.0 * complex_norm2(X) + 2.0 * L_norm_;
    return {std::move(H), scale};
  }

 private:
  TransferEvaluator transfer_;
  ComplexMatrix L_;
  double L_norm_;
};

/// Orthonormal basis of the (numerical) null space of M.
ComplexMatrix null_basis(const ComplexMatrix& M) {
  Eigen::JacobiSVD<ComplexMatrix> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double thresh = 1e-7 * std::max(1.0, s(0));
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > thresh) ++rank;
  return svd.matrixV().rightCols(M.cols() - rank);
}

}  // namespace

ComplexMatrix ni_condition_matrix(const DiscreteStateSpace& sys, double theta, double pole_tol) {
  return ConditionEvaluator(sys)(theta, pole_tol).first;
}

ResidueReport residue_K0(const DiscreteStateSpace& sys, double theta0, double tol_psd) {
  if (!(theta0 > 0.0 && theta0 < std::numbers::pi)) {
    throw Error(ErrorKind::NotOnUpperSemicircle, "theta0 must lie in (0, pi)");
  }
  const auto n = sys.states();
  const Complex z0 = std::polar(1.0, theta0);
  const ComplexVector ev = sys.A().eigenvalues();

  Complex centre(0.0, 0.0);
  Eigen::Index multiplicity = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i) - z0) <= kClusterTol) {
      centre += ev(i);
      ++multiplicity;
    }
  }
  if (multiplicity == 0) {
    throw Error(ErrorKind::NotAPole, "e^{i theta0} is not an eigenvalue of A");
  }
  centre /= static_cast<double>(multiplicity);

  const ComplexMatrix shifted = sys.A().cast<Complex>() - centre * ComplexMatrix::Identity(n, n);
  const ComplexMatrix right = null_basis(shifted);
  const ComplexMatrix left = null_basis(shifted.adjoint());
  if (right.cols() != multiplicity || left.cols() != multiplicity) {
    throw Error(ErrorKind::NotSimplePole, "A is not semisimple at e^{i theta0}");
  }
  // Spectral projector onto the eigenspace along the complementary one.
  const ComplexMatrix projector =
      right * (left.adjoint() * right).partialPivLu().solve(left.adjoint());
  const ComplexMatrix residue =
      sys.C().cast<Complex>() * projector * sys.B().cast<Complex>();

  ResidueReport r;
  r.theta0 = theta0;
  r.K0 = (1.0 + 1.0 / z0) * Complex(0.0, 1.0) * residue;
  const double size = 1.0 + complex_norm2(r.K0);
  r.hermitian_defect = (r.K0 - r.K0.adjoint()).norm();
  r.hermitian = r.hermitian_defect <= 1e-9 * size;
  const ComplexMatrix herm = 0.5 * (r.K0 + r.K0.adjoint());
  r.min_eig = hermitian_min_eig(herm);
  if (r.hermitian) {
    r.K0 = herm;
    r.psd = r.min_eig >= -tol_psd * size;
  }
  return r;
}

double FreqReport::worst_min_eig() const {
  return min_eigs.empty() ? 0.0 : *std::min_element(min_eigs.begin(), min_eigs.end());
}

FreqReport freq_check(const DiscreteStateSpace& sys, const FreqOptions& opts) {
  require_strictly_proper(sys);
  if (opts.grid_size < 1) throw Error(ErrorKind::InvalidArgument, "grid needs at least one point");
  if (pole_distance(sys.A(), Complex(1.0, 0.0)) <= opts.pole_tol) {
    throw Error(ErrorKind::HypothesisViolated, "det(I - A) = 0");
  }
  if (pole_distance(sys.A(), Complex(-1.0, 0.0)) <= opts.pole_tol) {
    throw Error(ErrorKind::HypothesisViolated, "det(I + A) = 0");
  }

  FreqReport report;
  if (!minimality(sys).minimal()) {
    report.warnings.emplace_back("realization is not minimal; the frequency test may be inconclusive");
  }

  const PoleReport pr = poles(sys, opts.pole_tol);
  report.max_pole_modulus = pr.max_modulus();
  report.no_poles_outside = pr.all_inside_or_on_unit_circle;

  for (const Pole& pole : pr.poles) {
    if (!pole.on_unit_circle || pole.value.imag() <= 0.0) continue;
    const double theta0 = std::arg(pole.value);
    const bool seen = std::any_of(
        report.circle_poles.begin(), report.circle_poles.end(),
        [&](const CirclePole& c) { return std::abs(std::polar(1.0, c.theta0) - pole.value) <= kClusterTol; });
    if (seen) continue;
    CirclePole cp;
    cp.theta0 = theta0;
    try {
      cp.residue = residue_K0(sys, theta0, opts.tol_psd);
      cp.simple = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotSimplePole) throw;
      cp.simple = false;
    }
    report.residues_ok = report.residues_ok && cp.simple && cp.residue->hermitian && cp.residue->psd;
    report.exclusion_windows.push_back(
        {theta0 - opts.exclusion_half_width, theta0 + opts.exclusion_half_width});
    report.circle_poles.push_back(std::move(cp));
  }

  std::vector<double> thetas;
  thetas.reserve(opts.grid_size);
  for (std::size_t j = 1; j <= opts.grid_size; ++j) {
    const double theta = std::numbers::pi * static_cast<double>(j) /
                         static_cast<double>(opts.grid_size + 1);
    const bool near_pole = std::any_of(
        report.circle_poles.begin(), report.circle_poles.end(),
        [&](const CirclePole& c) { return std::abs(theta - c.theta0) < opts.exclusion_half_width; });
    if (near_pole) {
      report.excluded.push_back(theta);
    } else {
      thetas.push_back(theta);
    }
  }

  struct Point {
    bool evaluated = false;
    double min_eig = 0.0;
    double threshold = 0.0;
  };
  std::vector<Point> points(thetas.size());
  const ConditionEvaluator condition(sys);
  parallel_for(thetas.size(), opts.parallel ? thread_budget() : 1,
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t i = begin; i < end; ++i) {
                   try {
                     const auto [H, scale] = condition(thetas[i], opts.pole_tol);
                     points[i] = {true, hermitian_min_eig(H), opts.tol_psd * scale};
                   } catch (const Error& e) {
                     if (e.kind() != ErrorKind::PoleProximity) throw;
                   }
                 }
               });

  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (!points[i].evaluated) {
      report.excluded.push_back(thetas[i]);
      continue;
    }
    report.grid.push_back(thetas[i]);
    report.min_eigs.push_back(points[i].min_eig);
    report.thresholds.push_back(points[i].threshold);
    if (points[i].min_eig < -points[i].threshold) report.condition_matrix_psd = false;
  }
  std::sort(report.excluded.begin(), report.excluded.end());

  report.pass = report.no_poles_outside && report.condition_matrix_psd && report.residues_ok;
  return report;
}

ConsistencyReport transformed_transfer_consistency(const DiscreteStateSpace& sys,
                                                   std::span<const Complex> points) {
  require_strictly_proper(sys);
  const auto n = sys.states();
  const DiscreteStateSpace checked(sys.A(), sys.B(),
                                   sys.C() * (sys.A() + Matrix::Identity(n, n)));
  const ComplexMatrix L = (sys.C() * sys.B()).cast<Complex>();

  ConsistencyReport report;
  for (const Complex z : points) {
    ComplexMatrix lhs, rhs;
    try {
      lhs = eval_transfer(checked, z);
      rhs = (z + 1.0) * eval_transfer(sys, z) - L;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularEvaluation) throw;
      report.skipped.push_back(z);
      continue;
    }
    report.max_residual = std::max(report.max_residual, (lhs - rhs).cwiseAbs().maxCoeff());
    report.scale = std::max(
        report.scale, 1.0 + std::max(lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff()));
  }
  return report;
}

}  // namespace nikit
