#include "monosplit/serialization.hpp"

#include "monosplit/errors.hpp"
#include "monosplit/families.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace monosplit {

using json = nlohmann::json;

namespace {

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw InvalidParameter(std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw InvalidParameter(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

// A constant: number, or the string "inf".
std::optional<double> optional_constant(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (it->is_string() && it->get<std::string>() == "inf") return kUnbounded;
  if (!it->is_number()) {
    throw InvalidParameter(std::string("field '") + key + "' must be a number or \"inf\"");
  }
  return it->get<double>();
}

Index resolve_dim(const json& j, std::optional<Index> dim, const char* family) {
  if (auto it = j.find("dim"); it != j.end()) {
    const auto d = it->get<Index>();
    if (dim && *dim != d) {
      throw InvalidParameter(std::string(family) + ": dim disagrees with enclosing problem");
    }
    return d;
  }
  if (!dim) throw InvalidParameter(std::string(family) + ": dimension cannot be inferred");
  return *dim;
}

void check_dim(Index got, std::optional<Index> dim, const char* family) {
  if (dim && *dim != got) {
    throw InvalidParameter(std::string(family) + ": operator dimension " + std::to_string(got) +
                           " disagrees with problem dimension " + std::to_string(*dim));
  }
}

std::string type_of(const json& j) {
  if (!j.is_object()) throw InvalidParameter("operator description must be a JSON object");
  const json& t = field(j, "type");
  if (!t.is_string()) throw InvalidParameter("operator 'type' must be a string");
  return t.get<std::string>();
}

}  // namespace

Point point_from_json(const json& j) {
  if (!j.is_array()) throw InvalidParameter("expected a JSON array of numbers");
  Point p(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidParameter("expected a JSON array of numbers");
    p[static_cast<Index>(i)] = j[i].get<double>();
  }
  return p;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidParameter("expected a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw InvalidParameter("matrix rows must be arrays of equal length");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) throw InvalidParameter("matrix entries must be numbers");
      m(static_cast<Index>(i), static_cast<Index>(k)) = j[i][k].get<double>();
    }
  }
  return m;
}

json point_to_json(const Point& p) { return std::vector<double>(p.data(), p.data() + p.size()); }

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

SetValuedOp set_valued_from_json(const json& j, std::optional<Index> dim) {
  const std::string type = type_of(j);
  if (type == "zero") return make_zero_set_valued(resolve_dim(j, dim, "zero"));
  if (type == "affine") {
    auto op = make_affine_monotone(matrix_from_json(field(j, "m")),
                                   point_from_json(field(j, "b")));
    check_dim(op.dim(), dim, "affine");
    return op;
  }
  if (type == "box") {
    auto op = make_box_normal_cone(point_from_json(field(j, "lo")),
                                   point_from_json(field(j, "hi")));
    check_dim(op.dim(), dim, "box");
    return op;
  }
  if (type == "ball") {
    auto op = make_ball_normal_cone(point_from_json(field(j, "center")), number(j, "radius"));
    check_dim(op.dim(), dim, "ball");
    return op;
  }
  if (type == "l1") return make_l1_subdifferential(resolve_dim(j, dim, "l1"), number(j, "weight"));
  if (type == "scaled") {
    auto inner = set_valued_from_json(field(j, "inner"), dim);
    Point shift = j.contains("shift") ? point_from_json(j["shift"]) : Point::Zero(inner.dim());
    return make_scaled(std::move(inner), number(j, "scale"), std::move(shift));
  }
  throw InvalidParameter("unknown set-valued operator type '" + type + "'");
}

SingleValuedOp single_valued_from_json(const json& j, std::optional<Index> dim) {
  const std::string type = type_of(j);
  auto build = [&]() -> SingleValuedOp {
    if (type == "zero") return make_zero_map(resolve_dim(j, dim, "zero"));
    if (type == "linear") return make_linear(matrix_from_json(field(j, "m")));
    if (type == "affine") {
      return make_affine(matrix_from_json(field(j, "m")), point_from_json(field(j, "b")));
    }
    if (type == "skew") return make_skew(matrix_from_json(field(j, "m")));
    if (type == "quad_grad") {
      Matrix q = matrix_from_json(field(j, "q"));
      Point b = j.contains("b") ? point_from_json(j["b"]) : Point::Zero(q.rows());
      return make_quadratic_gradient(std::move(q), std::move(b));
    }
    if (type == "scaled_identity") {
      return make_scaled_identity(resolve_dim(j, dim, "scaled_identity"), number(j, "factor"));
    }
    if (type == "tanh") return make_componentwise_tanh(number(j, "scale"), point_from_json(field(j, "b")));
    throw InvalidParameter("unknown single-valued operator type '" + type + "'");
  };
  SingleValuedOp op = build();
  check_dim(op.dim(), dim, type.c_str());
  if (j.contains("lipschitz") || j.contains("cocoercivity")) {
    auto lip = j.contains("lipschitz") ? optional_constant(j, "lipschitz") : op.lipschitz();
    auto beta = j.contains("cocoercivity") ? optional_constant(j, "cocoercivity") : op.cocoercivity();
    op = op.with_constants(lip, beta);
  }
  return op;
}

json problem_to_json(const ProblemInstance& problem) {
  json j;
  j["dim"] = problem.dim();
  j["A"] = problem.a.to_json();
  j["B"] = problem.b.to_json();
  j["C"] = problem.c.to_json();
  if (problem.known_solution) j["known_solution"] = point_to_json(*problem.known_solution);
  return j;
}

ProblemInstance problem_from_json(const json& j) {
  if (!j.is_object()) throw InvalidParameter("problem description must be a JSON object");
  std::optional<Index> dim;
  if (j.contains("dim")) dim = j["dim"].get<Index>();
  SetValuedOp a = set_valued_from_json(field(j, "A"), dim);
  dim = a.dim();
  ProblemInstance p{a, single_valued_from_json(field(j, "B"), dim),
                    single_valued_from_json(field(j, "C"), dim), std::nullopt};
  if (j.contains("known_solution") && !j["known_solution"].is_null()) {
    p.known_solution = point_from_json(j["known_solution"]);
  }
  p.validate();
  return p;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

}  // namespace monosplit
