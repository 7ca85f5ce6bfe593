// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

// Problem documents:
//
//   {
//     "agents": ["a0", ...],
//     "variables": [{"id": "x0", "agent": "a0", "lb": -100, "ub": 100}, ...],
//     "constraints": [{"scope": ["x0", "x1"], "coeffs": [a, b, c, d, e, f0]}]
//   }
//
// Doubles are written in shortest round-trip form, so load(save(p)) == p
// bit for bit.

#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "fdcop/model.hpp"
#include "json.hpp"

namespace fdcop {

inline nlohmann::json to_json(const Problem& problem) {
  nlohmann::json doc;
  doc["agents"] = problem.agents();
  auto vars = nlohmann::json::array();
  for (const auto& v : problem.variables()) {
    vars.push_back({{"id", v.id},
                    {"agent", v.agent},
                    {"lb", v.domain.lb},
                    {"ub", v.domain.ub}});
  }
  doc["variables"] = std::move(vars);
  auto cons = nlohmann::json::array();
  for (const auto& f : problem.utilities()) {
    cons.push_back({{"scope",
                     {problem.variable(f.first).id,
                      problem.variable(f.second).id}},
                    {"coeffs", f.coefficients()}});
  }
  doc["constraints"] = std::move(cons);
  return doc;
}

inline Problem problem_from_json(const nlohmann::json& doc) {
  try {
    auto agents = doc.at("agents").get<std::vector<std::string>>();
    std::vector<Variable> variables;
    for (const auto& v : doc.at("variables")) {
      variables.push_back(Variable{
          v.at("id").get<std::string>(), v.at("agent").get<std::string>(),
          ContinuousDomain{v.at("lb").get<double>(), v.at("ub").get<double>()}});
    }
    auto index_of = [&](const std::string& id) -> VarIndex {
      for (VarIndex i = 0; i < variables.size(); ++i) {
        if (variables[i].id == id) return i;
      }
      throw ValidationError("constraint references undeclared variable '" +
                            id + "'");
    };
    std::vector<QuadraticUtility> utilities;
    for (const auto& c : doc.at("constraints")) {
      const auto& scope = c.at("scope");
      const auto& k = c.at("coeffs");
      if (scope.size() != 2) throw ValidationError("constraints must be binary");
      if (k.size() != 6) throw ValidationError("constraints need six coeffs");
      utilities.push_back(QuadraticUtility{
          index_of(scope[0].get<std::string>()),
          index_of(scope[1].get<std::string>()), k[0].get<double>(),
          k[1].get<double>(), k[2].get<double>(), k[3].get<double>(),
          k[4].get<double>(), k[5].get<double>()});
    }
    return Problem(std::move(agents), std::move(variables),
                   std::move(utilities));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed problem document: ") +
                          e.what());
  }
}

inline std::string serialize(const Problem& problem) {
  return to_json(problem).dump(2) + "\n";
}

inline Problem deserialize(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("cannot parse problem: ") + e.what());
  }
  return problem_from_json(doc);
}

inline void save_problem(const Problem& problem, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + path + "'");
  out << serialize(problem);
  if (!out) throw ArgumentError("failed writing '" + path + "'");
}

inline Problem load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace fdcop
