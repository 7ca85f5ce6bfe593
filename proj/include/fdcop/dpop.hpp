// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "fdcop/protocol.hpp"
#include "fdcop/table.hpp"

namespace fdcop {

struct DpopConfig {
  std::size_t points = 3;
  std::size_t row_cap = kDefaultRowCap;
};

/// What an agent keeps between its UTIL and VALUE steps.
struct DpopLocal {
  std::vector<VarIndex> separator;
  std::vector<double> candidates;
  Grid sep_grid;
  std::vector<std::uint32_t> best;  // best candidate per separator tuple
  std::size_t local_rows = 0;
  std::size_t emitted_rows = 0;
};

/// Index of the largest utility; ties go to the earliest (smallest) value.
inline std::size_t argmax_candidates(const std::vector<double>& utilities) {
  if (utilities.empty()) throw ArgumentError("no candidates to choose from");
  std::size_t arg = 0;
  for (std::size_t i = 1; i < utilities.size(); ++i) {
    if (utilities[i] > utilities[arg]) arg = i;
  }
  return arg;
}

/// Joins the children's tables with the agent's constraints over the grid and
/// maximizes out the agent's own points.
inline UtilTable util_phase_step(const AgentContext& ctx,
                                 const std::vector<UtilTable>& child_tables,
                                 const DpopConfig& config, DpopLocal& local) {
  JointUtility joint = build_joint(ctx, child_tables, config.points,
                                   std::nullopt, nullptr, config.row_cap);
  const std::vector<double> dense = joint.dense();
  const std::size_t g = joint.grid_size();

  UtilTable out;
  out.vars = joint.separator;
  out.origin = ctx.is_leaf() ? UtilTable::Origin::kLeaf : UtilTable::Origin::kJoined;
  local.best.assign(g, 0);
  std::vector<double> tuple(joint.separator.size());
  for (std::size_t t = 0; t < g; ++t) {
    std::size_t arg = 0;
    double val = dense[t];
    for (std::size_t c = 1; c < joint.candidates.size(); ++c) {
      double v = dense[c * g + t];
      if (v > val) {
        val = v;
        arg = c;
      }
    }
    local.best[t] = static_cast<std::uint32_t>(arg);
    joint.sep_grid.decode(t, tuple.data());
    out.add_row(tuple, val);
  }
  local.separator = joint.separator;
  local.candidates = joint.candidates;
  local.sep_grid = joint.sep_grid;
  local.local_rows = dense.size();
  local.emitted_rows = out.rows();
  return out;
}

/// Own grid point maximizing the stored joined utility at the received
/// separator values.
inline double value_phase_step(const DpopLocal& local,
                               const ValueMessage& ancestors) {
  std::vector<double> t;
  t.reserve(local.separator.size());
  for (VarIndex s : local.separator) {
    auto it = ancestors.find(s);
    if (it == ancestors.end()) {
      throw ProtocolError("VALUE message lacks a separator variable");
    }
    t.push_back(it->second);
  }
  auto pos = local.sep_grid.locate(t.data());
  if (!pos) throw ProtocolError("ancestor value is not a grid point");
  return local.candidates[local.best[*pos]];
}

class DpopEngine {
 public:
  using Util = UtilTable;
  using State = DpopLocal;

  explicit DpopEngine(DpopConfig config) : config_(config) {
    if (config_.points == 0) throw ArgumentError("need at least one point");
  }

  Util util_step(const AgentContext& ctx, State& s, std::vector<Util> kids) {
    return util_phase_step(ctx, kids, config_, s);
  }
  std::vector<VarIndex> util_vars(const Util& u) const { return u.vars; }
  std::size_t util_scalars(const Util& u) const { return u.scalar_size(); }
  std::size_t util_rows(const Util& u) const { return u.rows(); }
  double root_value(const Util& u) const { return u.utilities.at(0); }
  double value_step(const AgentContext&, State& s, const ValueMessage& a) {
    return value_phase_step(s, a);
  }
  void diagnose(const State& s, AgentDiagnostics& d) const {
    d.local_rows = s.local_rows;
    d.emitted_rows = s.emitted_rows;
    d.value_source_rows = s.local_rows;
  }

 private:
  DpopConfig config_;
};

inline RunResult solve_dpop(const Problem& problem, const DpopConfig& config,
                            std::optional<VarIndex> root = std::nullopt) {
  PseudoTree tree = PseudoTree::build(problem.graph(), root);
  DpopEngine engine(config);
  return run_pseudotree_protocol(problem, tree, engine);
}

}  // namespace fdcop
