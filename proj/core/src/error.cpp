#include "nikit/error.hpp"

namespace nikit {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::SingularEvaluation: return "SingularEvaluation";
    case ErrorKind::PoleAtOne: return "PoleAtOne";
    case ErrorKind::PoleProximity: return "PoleProximity";
    case ErrorKind::NotStrictlyProper: return "NotStrictlyProper";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::InconsistentConstraint: return "InconsistentConstraint";
    case ErrorKind::ConstraintNotSatisfied: return "ConstraintNotSatisfied";
    case ErrorKind::SingularA: return "SingularA";
    case ErrorKind::NotStepAdvance: return "NotStepAdvance";
    case ErrorKind::NotSimplePole: return "NotSimplePole";
    case ErrorKind::NotOnUpperSemicircle: return "NotOnUpperSemicircle";
    case ErrorKind::NotAPole: return "NotAPole";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::AlgebraicLoop: return "AlgebraicLoop";
    case ErrorKind::ComplexSpectrum: return "ComplexSpectrum";
    case ErrorKind::MissingCertificates: return "MissingCertificates";
    case ErrorKind::NonFiniteEvaluation: return "NonFiniteEvaluation";
    case ErrorKind::InternalInconsistency: return "InternalInconsistency";
  }
  return "Unknown";
}

}  // namespace nikit
