#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nikit {

enum class ErrorKind {
  DimensionMismatch,
  NonFinite,
  SingularEvaluation,
  PoleAtOne,
  PoleProximity,
  NotStrictlyProper,
  Overflow,
  InvalidArgument,
  NotPositiveDefinite,
  InconsistentConstraint,
  ConstraintNotSatisfied,
  SingularA,
  NotStepAdvance,
  NotSimplePole,
  NotOnUpperSemicircle,
  NotAPole,
  HypothesisViolated,
  AlgebraicLoop,
  ComplexSpectrum,
  MissingCertificates,
  NonFiniteEvaluation,
  InternalInconsistency,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind so the
/// command-line front end can map it to a diagnostic without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nikit
