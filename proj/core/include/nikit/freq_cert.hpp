#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nikit/lin_core.hpp"
#include "nikit/ni_cert.hpp"

namespace nikit {

/// i [ (z + 1) G(z) - (conj(z) + 1) G(z)^* - L + L^T ] at z = e^{i theta},
/// with L = CB. Hermitian-symmetrized. Throws PoleProximity near a pole.
ComplexMatrix ni_condition_matrix(const DiscreteStateSpace& sys, double theta,
                                  double pole_tol = kPoleTolerance);

struct ResidueReport {
  double theta0 = 0.0;
  /// (1 + 1/z0) lim (z - z0) i G(z); symmetrized when found Hermitian.
  ComplexMatrix K0;
  double hermitian_defect = 0.0;
  bool hermitian = false;
  double min_eig = 0.0;
  bool psd = false;
};

/// Normalized residue at the unit-circle pole e^{i theta0}, theta0 in (0, pi),
/// from the eigenstructure of A. Throws NotOnUpperSemicircle, NotAPole or
/// NotSimplePole (A not semisimple at that eigenvalue).
ResidueReport residue_K0(const DiscreteStateSpace& sys, double theta0,
                         double tol_psd = kPsdTolerance);

struct CirclePole {
  double theta0 = 0.0;
  bool simple = false;
  /// Present when the pole is simple.
  std::optional<ResidueReport> residue;
};

struct FreqOptions {
  std::size_t grid_size = 512;
  double exclusion_half_width = 1e-3;
  double tol_psd = kPsdTolerance;
  double pole_tol = kPoleTolerance;
  bool parallel = true;
};

struct FreqReport {
  /// Evaluated grid points and lambda_min of the condition matrix at each.
  std::vector<double> grid;
  std::vector<double> min_eigs;
  /// Per-point acceptance threshold (tol_psd times the magnitude of the terms).
  std::vector<double> thresholds;
  /// Grid points skipped because they fall in an exclusion window or on a pole.
  std::vector<double> excluded;
  /// [theta0 - w, theta0 + w] around each upper-semicircle pole.
  std::vector<std::array<double, 2>> exclusion_windows;
  std::vector<CirclePole> circle_poles;
  double max_pole_modulus = 0.0;
  bool no_poles_outside = true;
  bool condition_matrix_psd = true;
  bool residues_ok = true;
  std::vector<std::string> warnings;
  bool pass = false;

  double worst_min_eig() const;
};

/// Grid check of the three frequency conditions. Throws HypothesisViolated
/// when 1 or -1 is an eigenvalue of A.
FreqReport freq_check(const DiscreteStateSpace& sys, const FreqOptions& opts = {});

struct ConsistencyReport {
  /// Largest elementwise discrepancy over the evaluated points.
  double max_residual = 0.0;
  /// 1 + largest elementwise magnitude of either side.
  double scale = 1.0;
  std::vector<Complex> skipped;
};

/// Compares C (A + I)(zI - A)^{-1} B with (z + 1) G(z) - CB at each point.
/// Points where either side cannot be evaluated are skipped and listed.
ConsistencyReport transformed_transfer_consistency(const DiscreteStateSpace& sys,
                                                   std::span<const Complex> points);

}  // namespace nikit
