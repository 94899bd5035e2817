#pragma once

#include <string>

#include <json.hpp>

#include "alphaproj/families.hpp"
#include "alphaproj/measures.hpp"
#include "alphaproj/projection.hpp"

namespace alphaproj {

// JSON schemas:
//   distribution  {"alphabet": ["1","2"], "probs": [0.5, 0.5]}
//   linear family {"alpha": 0.5, "alphabet": [...], "constraints": [[...]]}
//                 or {"alpha": ..., "alphabet": [...], "generators": [[...]]}
//   exp family    {"alpha": ..., "alphabet": [...], "reference": {...},
//                  "directions": [[...]]}
// +inf values serialize as the string "inf".

nlohmann::json distribution_to_json(const FiniteDistribution& p);
FiniteDistribution distribution_from_json(const nlohmann::json& j);

nlohmann::json linear_family_to_json(const LinearFamilySpec& fam);
LinearFamilySpec linear_family_from_json(const nlohmann::json& j);

ExpFamilySpec exp_family_from_json(const nlohmann::json& j);

nlohmann::json projection_result_to_json(const ProjectionResult& r,
                                         bool include_trace = false);

/// Number or the string "inf" for +infinity.
nlohmann::json number_or_inf(double v);

FiniteDistribution load_distribution(const std::string& path);
LinearFamilySpec load_linear_family(const std::string& path);
ExpFamilySpec load_exp_family(const std::string& path);

}  // namespace alphaproj
