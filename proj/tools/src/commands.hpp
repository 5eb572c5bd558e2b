#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "report.hpp"

namespace nikit::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitError = 2;

/// Flag combinations that cannot be honoured.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommandResult {
  int exit_code = kExitError;
  Json report;
};

struct CertifyArgs {
  std::string model;
  std::optional<double> osni;
  bool sani = false;
  bool saosni = false;
  std::optional<std::string> with_P;
  std::uint64_t seed = 0;
  std::size_t samples = 10000;
  /// "auto", "A" or "B"
  std::string route = "auto";
};

struct FreqArgs {
  std::string model;
  std::size_t grid = 512;
  double exclusion = 1e-3;
};

struct ZohArgs {
  std::string model;
  double period = 0.0;
  std::optional<std::string> out;
};

struct LoopArgs {
  std::string plant;
  std::string controller;
  /// "plant" or "controller"
  std::string advance = "controller";
  int simulate = 200;
  /// Comma-separated initial state; all ones when absent.
  std::optional<std::string> x0;
  std::optional<std::string> csv;
};

struct AuditArgs {
  std::string model;
  std::optional<std::string> P;
  /// LMI convention; the audited penalty is definition_strictness(epsilon).
  std::optional<double> epsilon;
  std::uint64_t seed = 0;
  std::size_t samples = 10000;
  double box = 10.0;
  /// Audit the strictly proper inner system of a step-advanced model.
  bool inner = false;
};

// Each runner returns the report and exit code; failures of any kind become
// exit code 2 with an "error" object instead of an exception.
CommandResult run_certify(const CertifyArgs& args);
CommandResult run_freq(const FreqArgs& args);
CommandResult run_zoh(const ZohArgs& args);
CommandResult run_loop(const LoopArgs& args);
CommandResult run_audit(const AuditArgs& args);

/// Error report for failures that happen before a runner starts.
CommandResult error_result(const std::string& command, const std::string& kind,
                           const std::string& message);

}  // namespace nikit::cli
