#include "model_io.hpp"

#include <fstream>
#include <sstream>

#include "nikit/error.hpp"
#include "report.hpp"

namespace nikit::cli {
namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return ss.str();
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

Json parse_json(const std::string& text, const std::string& path) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::string msg = e.what();
    // Drop the library's "[json.exception.parse_error.101] parse error at line.." prefix.
    if (auto pos = msg.find(": "); pos != std::string::npos) msg = msg.substr(pos + 2);
    throw ParseError(path + ":" + line_col(text, e.byte), "syntax error: " + msg);
  } catch (const Json::exception& e) {
    throw ParseError(path, e.what());
  }
}

class Reader {
 public:
  Reader(const Json& root, std::string path) : root_(root), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    throw ParseError(path_ + ":" + pointer, message);
  }

  Matrix matrix(const std::string& field) const {
    const std::string at = "/" + field;
    const Json& j = root_.at(field);
    if (!j.is_array()) fail(at, "expected an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = -1;
    Matrix M;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const std::string row_at = at + "/" + std::to_string(i);
      const Json& row = j[static_cast<std::size_t>(i)];
      if (!row.is_array()) fail(row_at, "expected a row array");
      if (cols < 0) {
        cols = static_cast<Eigen::Index>(row.size());
        M.resize(rows, cols);
      } else if (static_cast<Eigen::Index>(row.size()) != cols) {
        fail(row_at, "row has " + std::to_string(row.size()) + " entries, expected " +
                         std::to_string(cols));
      }
      for (Eigen::Index c = 0; c < cols; ++c) {
        const Json& e = row[static_cast<std::size_t>(c)];
        if (!e.is_number()) fail(row_at + "/" + std::to_string(c), "expected a number");
        M(i, c) = e.get<double>();
      }
    }
    if (rows == 0) M.resize(0, 0);
    return M;
  }

  bool has(const std::string& field) const { return root_.contains(field); }

  Matrix required_matrix(const std::string& field) const {
    if (!has(field)) fail("/" + field, "missing required field");
    return matrix(field);
  }

  std::optional<double> optional_number(const std::string& field) const {
    if (!has(field)) return std::nullopt;
    const Json& j = root_.at(field);
    if (!j.is_number()) fail("/" + field, "expected a number");
    return j.get<double>();
  }

 private:
  const Json& root_;
  std::string path_;
};

}  // namespace

const DiscreteStateSpace& ModelFile::discrete_system() const {
  if (!discrete()) throw ParseError(path + ":/kind", "expected a discrete model");
  return std::get<DiscreteStateSpace>(system);
}

const ContinuousStateSpace& ModelFile::continuous_system() const {
  if (discrete()) throw ParseError(path + ":/kind", "expected a continuous model");
  return std::get<ContinuousStateSpace>(system);
}

ModelFile parse_model(const std::string& text, const std::string& path) {
  const Json root = parse_json(text, path);
  Reader r(root, path);
  if (!root.is_object()) r.fail("", "expected a JSON object");
  if (!r.has("kind") || !root.at("kind").is_string()) {
    r.fail("/kind", "expected \"discrete\" or \"continuous\"");
  }
  const std::string kind = root.at("kind").get<std::string>();
  if (kind != "discrete" && kind != "continuous") {
    r.fail("/kind", "expected \"discrete\" or \"continuous\", got \"" + kind + "\"");
  }
  static const char* const kKnown[] = {"kind", "A", "B", "C", "D", "P", "epsilon"};
  for (auto it = root.begin(); it != root.end(); ++it) {
    bool known = false;
    for (const char* k : kKnown) known = known || it.key() == k;
    if (!known) r.fail("/" + it.key(), "unknown field");
  }

  Matrix A = r.required_matrix("A");
  Matrix B = r.required_matrix("B");
  Matrix C = r.required_matrix("C");
  ModelFile model{path, DiscreteStateSpace(Matrix::Zero(1, 1), Matrix::Zero(1, 1),
                                           Matrix::Zero(1, 1)),
                  std::nullopt, std::nullopt};
  try {
    if (kind == "discrete") {
      Matrix D = r.has("D") ? r.matrix("D") : Matrix();
      model.system = DiscreteStateSpace(std::move(A), std::move(B), std::move(C), std::move(D));
    } else {
      if (r.has("D")) {
        const Matrix D = r.matrix("D");
        if (D.size() != 0 && !D.isZero(0.0)) r.fail("/D", "continuous models must be strictly proper");
      }
      model.system = ContinuousStateSpace(std::move(A), std::move(B), std::move(C));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DimensionMismatch || e.kind() == ErrorKind::NonFinite) {
      r.fail("", e.what());
    }
    throw;
  }
  if (r.has("P")) {
    model.P = r.matrix("P");
    const auto n = model.discrete() ? model.discrete_system().states()
                                    : model.continuous_system().states();
    if (model.P->rows() != n || model.P->cols() != n) {
      r.fail("/P", "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    }
  }
  model.epsilon = r.optional_number("epsilon");
  if (model.epsilon && !(*model.epsilon >= 0.0)) r.fail("/epsilon", "expected a nonnegative number");
  return model;
}

ModelFile read_model(const std::string& path) { return parse_model(read_text(path), path); }

Matrix read_storage(const std::string& path) {
  const std::string text = read_text(path);
  const Json root = parse_json(text, path);
  Reader r(root, path);
  if (!root.is_object()) r.fail("", "expected a JSON object");
  const Matrix P = r.required_matrix("P");
  if (P.rows() != P.cols() || P.rows() == 0) r.fail("/P", "expected a nonempty square matrix");
  return P;
}

std::string model_text(const DiscreteStateSpace& sys) {
  Json j{{"kind", "discrete"}, {"A", to_json(sys.A())}, {"B", to_json(sys.B())},
         {"C", to_json(sys.C())}};
  if (!sys.strictly_proper()) j["D"] = to_json(sys.D());
  return dump_json(j);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write " + path);
}

}  // namespace nikit::cli
