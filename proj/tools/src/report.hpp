#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nikit/lin_core.hpp"

namespace nikit::cli {

using Json = nlohmann::json;

/// Deterministic text: keys sorted, two-space indent, floating point as %.17g,
/// and non-finite numbers as the strings "inf", "-inf" and "nan".
std::string dump_json(const Json& value);

/// Number, or its string spelling when non-finite.
Json number(double v);

/// Row-major nested arrays.
Json to_json(const Matrix& M);
Json to_json(const Vector& v);
Json to_json(Complex z);
Json to_json(const ComplexMatrix& M);
Json to_json(const std::vector<Complex>& values);

/// Ascending eigenvalues of the symmetric part.
Json sym_eigenvalues(const Matrix& M);

}  // namespace nikit::cli
