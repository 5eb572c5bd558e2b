#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "nikit/lin_core.hpp"

namespace nikit::cli {

/// Malformed input, located by file and JSON pointer (or line:col for syntax errors).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string location, const std::string& message)
      : std::runtime_error(location + ": " + message), location_(std::move(location)) {}
  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

/// A file that cannot be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelFile {
  std::string path;
  std::variant<DiscreteStateSpace, ContinuousStateSpace> system;
  std::optional<Matrix> P;
  std::optional<double> epsilon;

  bool discrete() const noexcept { return system.index() == 0; }
  const DiscreteStateSpace& discrete_system() const;
  const ContinuousStateSpace& continuous_system() const;
};

/// Reads {"kind": "discrete"|"continuous", "A": [[..]], "B", "C", optional "D",
/// "P", "epsilon"} with row-major nested arrays.
ModelFile read_model(const std::string& path);

/// Parses the same format from text; `path` only labels error locations.
ModelFile parse_model(const std::string& text, const std::string& path);

/// Reads a storage matrix from {"P": [[..]]}.
Matrix read_storage(const std::string& path);

std::string model_text(const DiscreteStateSpace& sys);
void write_text(const std::string& path, const std::string& text);

}  // namespace nikit::cli
