#pragma once

// JSON forms of operators and problem instances.
//
//   set-valued:    {"type":"zero"} | {"type":"affine","m":[[..]],"b":[..]}
//                  | {"type":"box","lo":[..],"hi":[..]}
//                  | {"type":"ball","center":[..],"radius":r}
//                  | {"type":"l1","weight":w}
//                  | {"type":"scaled","inner":{..},"scale":s,"shift":[..]}
//   single-valued: {"type":"zero"} | {"type":"linear","m":[[..]]}
//                  | {"type":"affine","m":[[..]],"b":[..]}
//                  | {"type":"skew","m":[[..]]}
//                  | {"type":"quad_grad","q":[[..]],"b":[..]}
//                  | {"type":"scaled_identity","factor":f}
//                  | {"type":"tanh","scale":s,"b":[..]}
//                  optional "lipschitz" / "cocoercivity" (number or "inf")
//                  override the analytic constants.
//   problem:       {"dim":n,"A":{..},"B":{..},"C":{..},"known_solution":[..]}
//
// "dim" inside an operator is optional when it can be inferred from its data
// or from the enclosing problem.

#include "monosplit/operators.hpp"
#include "monosplit/problem.hpp"

#include <filesystem>
#include <optional>

namespace monosplit {

Point point_from_json(const nlohmann::json& j);
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json point_to_json(const Point& p);
nlohmann::json matrix_to_json(const Matrix& m);

/// Throws InvalidParameter on unknown "type" or malformed parameters.
SetValuedOp set_valued_from_json(const nlohmann::json& j, std::optional<Index> dim = {});
SingleValuedOp single_valued_from_json(const nlohmann::json& j, std::optional<Index> dim = {});

nlohmann::json problem_to_json(const ProblemInstance& problem);
ProblemInstance problem_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace monosplit
