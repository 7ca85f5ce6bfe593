// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

// Per-problem property checks: message counts and sizes, isolation, error
// bounds against a grid oracle, and the two reductions between engines.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fdcop/format.hpp"
#include "fdcop/oracle.hpp"
#include "fdcop/solver.hpp"

namespace fdcop {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
  bool skipped = false;
};

struct VerifyConfig {
  std::size_t points = 3;
  std::size_t moves = 10;
  double alpha = 0.01;
  std::size_t k_clusters = 5;
  std::size_t iterations = 1;
  /// Oracle points per variable, reduced when the grid would be too large.
  std::size_t oracle_points = 200;
  std::size_t oracle_budget = 20'000'000;
  std::size_t max_oracle_variables = 8;
};

/// Largest per-axis resolution, at most `wanted`, whose enumeration over all
/// but one variable stays within `budget` evaluations.
inline std::size_t affordable_points(std::size_t variables, std::size_t wanted,
                                     std::size_t budget) {
  if (variables <= 1) return wanted;
  std::size_t p = wanted;
  while (p > 2 && std::pow(static_cast<double>(p),
                           static_cast<double>(variables - 1)) >
                      static_cast<double>(budget)) {
    --p;
  }
  return p;
}

inline std::string checks_report(const std::vector<Check>& checks) {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.skipped ? "SKIP" : c.pass ? "PASS" : "FAIL") << ' ' << c.name;
    if (!c.detail.empty()) os << ": " << c.detail;
    os << '\n';
  }
  return os.str();
}

inline bool all_passed(const std::vector<Check>& checks) {
  for (const auto& c : checks) {
    if (!c.skipped && !c.pass) return false;
  }
  return true;
}

inline std::vector<Check> verify_problem(const Problem& problem,
                                         const VerifyConfig& vc = {}) {
  std::vector<Check> out;
  const auto& graph = problem.graph();
  const bool tree = graph.is_tree();
  const std::size_t n = problem.variable_count();

  EngineConfig base;
  base.points = vc.points;
  base.moves = vc.moves;
  base.alpha = vc.alpha;
  base.k_clusters = vc.k_clusters;
  base.iterations = vc.iterations;
  auto config_for = [&](EngineKind k) {
    EngineConfig c = base;
    c.engine = k;
    return c;
  };

  std::vector<EngineKind> engines{EngineKind::kDpop, EngineKind::kAfDpop,
                                  EngineKind::kCafDpop, EngineKind::kHcms};
  if (tree) engines.insert(engines.begin() + 1, EngineKind::kEfDpop);

  std::map<EngineKind, RunResult> results;
  for (EngineKind k : engines) {
    const std::string name = engine_name(k);
    try {
      results.emplace(k, run(problem, config_for(k)));
    } catch (const CapacityError& e) {
      out.push_back({"run/" + name, false, e.what(), true});
      continue;
    }
    const RunResult& r = results.at(k);
    std::size_t want = predicted_message_count(k, graph, vc.iterations);
    out.push_back({"messages/" + name, r.stats.total_messages == want,
                   std::to_string(r.stats.total_messages) + " = " +
                       std::to_string(want)});
    auto audit = audit_isolation(problem, r.trace);
    out.push_back({"isolation/" + name, audit.ok(),
                   std::to_string(audit.violations.size()) + " violations"});
  }

  const PseudoTree pt = PseudoTree::build(graph);
  const std::size_t w = pt.induced_width();
  if (results.count(EngineKind::kDpop)) {
    double limit = std::pow(static_cast<double>(vc.points), static_cast<double>(w));
    std::size_t rows = results.at(EngineKind::kDpop).stats.max_util_rows;
    out.push_back({"size/dpop", static_cast<double>(rows) <= limit,
                   "max rows " + std::to_string(rows) + " <= d^w = " +
                       format_double(limit)});
  }
  if (results.count(EngineKind::kCafDpop)) {
    std::size_t rows = results.at(EngineKind::kCafDpop).stats.max_util_rows;
    out.push_back({"size/caf-dpop", rows <= vc.k_clusters,
                   "max rows " + std::to_string(rows) +
                       " <= k = " + std::to_string(vc.k_clusters)});
  }
  if (results.count(EngineKind::kHcms)) {
    std::size_t s = results.at(EngineKind::kHcms).stats.max_message_scalars;
    out.push_back({"size/hcms", s == 2 * vc.points,
                   "max scalars " + std::to_string(s) + " = 2d"});
  }

  // Reductions.
  {
    EngineConfig c = config_for(EngineKind::kAfDpop);
    c.moves = 0;
    try {
      RunResult still = run(problem, c);
      RunResult grid = run(problem, config_for(EngineKind::kDpop));
      out.push_back({"reduction/no-move", still.assignment == grid.assignment,
                     "af-dpop with 0 moves vs dpop"});
    } catch (const CapacityError& e) {
      out.push_back({"reduction/no-move", false, e.what(), true});
    }
  }
  if (tree && results.count(EngineKind::kAfDpop)) {
    EngineConfig c = config_for(EngineKind::kCafDpop);
    c.k_clusters = std::max<std::size_t>(
        1, results.at(EngineKind::kAfDpop).stats.max_util_rows);
    RunResult caf = run(problem, c);
    out.push_back({"reduction/tree-caf", caf.assignment ==
                                             results.at(EngineKind::kAfDpop).assignment,
                   "caf-dpop with k >= rows vs af-dpop"});
  }
  if (tree && results.count(EngineKind::kEfDpop) && results.count(EngineKind::kDpop)) {
    double ef = evaluate_solution(problem, results.at(EngineKind::kEfDpop).assignment);
    double grid = evaluate_solution(problem, results.at(EngineKind::kDpop).assignment);
    out.push_back({"exact/ef-dpop", ef >= grid - 1e-6 * std::max(1.0, std::abs(grid)),
                   format_double(ef) + " >= dpop " + format_double(grid)});
  }

  // Error bounds against the grid oracle.
  if (n > vc.max_oracle_variables) {
    out.push_back({"bound/dpop", false,
                   "more than " + std::to_string(vc.max_oracle_variables) +
                       " variables",
                   true});
    out.push_back({"bound/af-dpop", false, "same", true});
    return out;
  }
  const std::size_t op = affordable_points(n, vc.oracle_points, vc.oracle_budget);
  const double best = continuous_oracle(problem, op).utility;
  const double m = discretization_gap(problem, vc.points);
  if (results.count(EngineKind::kDpop)) {
    double got = evaluate_solution(problem, results.at(EngineKind::kDpop).assignment);
    double bound = error_bound_discrete(problem, m);
    out.push_back({"bound/dpop", best - got <= bound,
                   "oracle(" + std::to_string(op) + " pts) - utility = " +
                       format_double(best - got) + " <= " + format_double(bound)});
  }
  if (results.count(EngineKind::kAfDpop) && vc.alpha > 0.0) {
    double got = evaluate_solution(problem, results.at(EngineKind::kAfDpop).assignment);
    double bound = error_bound_af(problem, m, vc.moves, vc.alpha);
    out.push_back({"bound/af-dpop", best - got <= bound,
                   "oracle(" + std::to_string(op) + " pts) - utility = " +
                       format_double(best - got) + " <= " + format_double(bound)});
  }
  return out;
}

}  // namespace fdcop
