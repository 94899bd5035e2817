#include "alphaproj/io.hpp"

#include <cmath>
#include <fstream>

namespace alphaproj {

namespace {

std::vector<std::string> labels_from_json(const nlohmann::json& j) {
  if (!j.is_array()) {
    throw ValidationError("alphabet must be a JSON array");
  }
  std::vector<std::string> labels;
  labels.reserve(j.size());
  for (const auto& item : j) {
    if (item.is_string()) {
      labels.push_back(item.get<std::string>());
    } else if (item.is_number()) {
      labels.push_back(item.dump());
    } else {
      throw ValidationError("alphabet entries must be strings or numbers");
    }
  }
  return labels;
}

std::vector<std::vector<double>> matrix_from_json(const nlohmann::json& j,
                                                  const char* what) {
  if (!j.is_array()) {
    throw ValidationError(std::string(what) + " must be an array of arrays");
  }
  std::vector<std::vector<double>> rows;
  for (const auto& row : j) {
    if (!row.is_array()) {
      throw ValidationError(std::string(what) + " must be an array of arrays");
    }
    rows.push_back(row.get<std::vector<double>>());
  }
  return rows;
}

nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open '" + path + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("cannot parse '" + path + "': " + e.what());
  }
  return j;
}

}  // namespace

nlohmann::json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::json distribution_to_json(const FiniteDistribution& p) {
  return {{"alphabet", p.alphabet()}, {"probs", p.probs()}};
}

FiniteDistribution distribution_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("alphabet") || !j.contains("probs")) {
    throw ValidationError(
        "distribution JSON needs \"alphabet\" and \"probs\" arrays");
  }
  return FiniteDistribution(labels_from_json(j.at("alphabet")),
                            j.at("probs").get<std::vector<double>>());
}

nlohmann::json linear_family_to_json(const LinearFamilySpec& fam) {
  nlohmann::json j{{"alpha", fam.alpha().value()},
                   {"alphabet", fam.alphabet()}};
  if (!fam.raw_constraints().empty()) {
    j["constraints"] = fam.raw_constraints();
  } else {
    j["constraints"] = fam.constraints();
  }
  return j;
}

LinearFamilySpec linear_family_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("alpha") || !j.contains("alphabet")) {
    throw ValidationError("family JSON needs \"alpha\" and \"alphabet\"");
  }
  const AlphaOrder alpha(j.at("alpha").get<double>());
  auto labels = labels_from_json(j.at("alphabet"));
  const bool has_constraints = j.contains("constraints");
  const bool has_generators = j.contains("generators");
  if (has_constraints == has_generators) {
    throw ValidationError(
        "family JSON needs exactly one of \"constraints\" or \"generators\"");
  }
  if (has_constraints) {
    return LinearFamilySpec::from_constraints(
        alpha, std::move(labels),
        matrix_from_json(j.at("constraints"), "constraints"));
  }
  return LinearFamilySpec::from_generators(
      alpha, std::move(labels),
      matrix_from_json(j.at("generators"), "generators"));
}

ExpFamilySpec exp_family_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("alpha") || !j.contains("reference") ||
      !j.contains("directions")) {
    throw ValidationError(
        "exponential family JSON needs \"alpha\", \"reference\" and "
        "\"directions\"");
  }
  return ExpFamilySpec(AlphaOrder(j.at("alpha").get<double>()),
                       distribution_from_json(j.at("reference")),
                       matrix_from_json(j.at("directions"), "directions"));
}

nlohmann::json projection_result_to_json(const ProjectionResult& r,
                                         bool include_trace) {
  nlohmann::json j{
      {"minimizer", distribution_to_json(r.minimizer)},
      {"theta", r.theta},
      {"normalizer", r.normalizer},
      {"divergence_nats", number_or_inf(r.divergence)},
      {"residual", r.constraint_residual_norm},
      {"iterations", r.iterations},
      {"flags",
       {{"support_equals_family_support", r.support_equals_family_support},
        {"kkt_clipping_ok", r.kkt_clipping_ok},
        {"in_closure_only", r.in_closure_only}}}};
  if (include_trace) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& t : r.trace) {
      trace.push_back({{"iteration", t.iteration},
                       {"residual", t.residual_norm},
                       {"divergence", number_or_inf(t.divergence)}});
    }
    j["trace"] = std::move(trace);
  }
  return j;
}

FiniteDistribution load_distribution(const std::string& path) {
  return distribution_from_json(parse_file(path));
}

LinearFamilySpec load_linear_family(const std::string& path) {
  return linear_family_from_json(parse_file(path));
}

ExpFamilySpec load_exp_family(const std::string& path) {
  return exp_family_from_json(parse_file(path));
}

}  // namespace alphaproj
