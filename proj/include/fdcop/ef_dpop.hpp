// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fdcop/piecewise.hpp"
#include "fdcop/protocol.hpp"

namespace fdcop {

struct EfConfig {
  std::size_t piece_cap = kDefaultPieceCap;
};

struct EfLocal {
  BestResponse response;
  std::size_t local_pieces = 0;
  std::size_t emitted_pieces = 0;
};

/// Reals needed to ship a piecewise function: both bounds of every box side
/// plus every monomial coefficient of a quadratic in that many variables.
inline std::size_t piecewise_scalar_size(const PiecewiseFunction& f) {
  const std::size_t k = f.variables().size();
  const std::size_t monomials = 1 + 2 * k + k * (k - (k > 0 ? 1 : 0)) / 2;
  return f.size() * (2 * k + monomials);
}

/// Adds the children's unary functions of the agent's variable to its
/// constraint with the parent, projects the agent's variable out exactly and
/// keeps the best response for the VALUE phase.
inline PiecewiseFunction ef_util_step(const AgentContext& ctx,
                                      const std::vector<PiecewiseFunction>& kids,
                                      const EfConfig& config, EfLocal& local) {
  const VarIndex self = ctx.self();
  if (!ctx.pseudo_parents().empty()) {
    throw UnsupportedError("EF-DPOP requires a tree-structured constraint graph");
  }
  const ContinuousDomain& own = ctx.domain(self);
  PiecewiseFunction acc;
  if (auto parent = ctx.parent()) {
    bool found = false;
    for (const auto& [u, f] : ctx.utilities()) {
      if (f.second == *parent) {
        acc = PiecewiseFunction::from_utility(f, own, ctx.domain(*parent));
        found = true;
      }
    }
    if (!found) throw ProtocolError("no constraint between agent and parent");
  } else {
    Box box({{self, Interval{own.lb, own.ub}}});
    acc = PiecewiseFunction(box, {Piece{box, Poly2::constant(0.0)}});
  }
  for (const auto& g : kids) {
    if (g.variables() != std::vector<VarIndex>{self}) {
      throw ProtocolError("EF-DPOP UTIL message must be unary in the receiver");
    }
    acc = add(acc, g, config.piece_cap);
  }
  local.local_pieces = acc.size();
  Projection proj = project(acc, self, config.piece_cap);
  local.response = std::move(proj.response);
  local.emitted_pieces = proj.function.size();
  return std::move(proj.function);
}

/// Own value from the stored best response at the parent's value.
inline double ef_value_step(const AgentContext& ctx, const EfLocal& local,
                            const ValueMessage& ancestors) {
  double y = 0.0;
  if (local.response.remaining) {
    auto it = ancestors.find(*local.response.remaining);
    if (it == ancestors.end()) throw ProtocolError("missing parent value");
    y = it->second;
  }
  return ctx.domain(ctx.self()).clamp(local.response.respond(y));
}

class EfDpopEngine {
 public:
  using Util = PiecewiseFunction;
  using State = EfLocal;

  explicit EfDpopEngine(EfConfig config) : config_(config) {}

  Util util_step(const AgentContext& ctx, State& s, std::vector<Util> kids) {
    return ef_util_step(ctx, kids, config_, s);
  }
  std::vector<VarIndex> util_vars(const Util& u) const { return u.variables(); }
  std::size_t util_scalars(const Util& u) const {
    return piecewise_scalar_size(u);
  }
  std::size_t util_rows(const Util& u) const { return u.size(); }
  double root_value(const Util& u) const {
    return u.pieces().front().poly.constant();
  }
  double value_step(const AgentContext& ctx, State& s, const ValueMessage& a) {
    return ef_value_step(ctx, s, a);
  }
  void diagnose(const State& s, AgentDiagnostics& d) const {
    d.local_rows = s.local_pieces;
    d.emitted_rows = s.emitted_pieces;
    d.value_source_rows = s.response.segments.size();
  }

 private:
  EfConfig config_;
};

inline RunResult solve_ef_dpop(const Problem& problem, const EfConfig& config,
                               std::optional<VarIndex> root = std::nullopt) {
  if (!problem.graph().is_tree()) {
    throw UnsupportedError("EF-DPOP requires a tree-structured constraint graph");
  }
  PseudoTree tree = PseudoTree::build(problem.graph(), root);
  EfDpopEngine engine(config);
  return run_pseudotree_protocol(problem, tree, engine);
}

}  // namespace fdcop
