// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

// UTIL/VALUE driver shared by the pseudo-tree engines. UTIL runs in DFS
// post-order, VALUE in pre-order. The root addresses its UTIL result and the
// initial VALUE message to itself, so every agent sends exactly one message
// of each kind and a run totals 2|X| messages.

#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "fdcop/error.hpp"
#include "fdcop/model.hpp"
#include "fdcop/pseudotree.hpp"
#include "fdcop/runtime.hpp"

namespace fdcop {

/// Per-agent bookkeeping exposed for tests and reports.
struct AgentDiagnostics {
  std::size_t local_rows = 0;         // table held locally before emission
  std::size_t emitted_rows = 0;       // rows or pieces sent upwards
  std::size_t value_source_rows = 0;  // table consulted in the VALUE phase
};

struct RunResult {
  Assignment assignment;
  RunStats stats;
  Trace trace;
  /// Optimum as computed by the root from its UTIL information.
  double reported_utility = std::numeric_limits<double>::quiet_NaN();
  std::vector<AgentDiagnostics> diagnostics;
};

using ValueMessage = std::map<VarIndex, double>;

template <class Engine>
RunResult run_pseudotree_protocol(const Problem& problem, const PseudoTree& tree,
                                  Engine& engine) {
  using Util = typename Engine::Util;
  using State = typename Engine::State;
  using Payload = std::variant<Util, ValueMessage>;

  const std::size_t n = problem.variable_count();
  Kernel<Payload> kernel(n);
  std::vector<AgentContext> ctx;
  ctx.reserve(n);
  for (VarIndex v = 0; v < n; ++v) {
    ctx.emplace_back(problem, &tree, v, kernel.trace());
  }
  std::vector<State> state(n);
  // What each parent learned about its children's separators from UTIL
  // message headers.
  std::vector<std::map<VarIndex, std::vector<VarIndex>>> child_vars(n);
  RunResult result;
  result.assignment = Assignment(n);
  result.diagnostics.resize(n);

  auto fail = [&](const CapacityError& e) -> CapacityExceeded {
    return CapacityExceeded(e.what(), kernel.stats());
  };

  Stopwatch util_clock;
  try {
    for (VarIndex v : tree.post_order()) {
      const auto& kids = ctx[v].children();
      std::map<VarIndex, Util> received;
      for (auto& env : kernel.drain(v)) {
        if (env.kind != MessageKind::kUtil) {
          throw ProtocolError("unexpected message during the UTIL phase");
        }
        child_vars[v][env.sender] = engine.util_vars(std::get<Util>(env.payload));
        received.emplace(env.sender, std::get<Util>(std::move(env.payload)));
      }
      std::vector<Util> ordered;
      for (VarIndex c : kids) {
        auto it = received.find(c);
        if (it == received.end()) throw ProtocolError("missing child UTIL message");
        ordered.push_back(std::move(it->second));
      }
      if (received.size() != kids.size()) {
        throw ProtocolError("UTIL message from a non-child");
      }
      Util out = engine.util_step(ctx[v], state[v], std::move(ordered));
      VarIndex dest = ctx[v].parent().value_or(v);
      std::size_t scalars = engine.util_scalars(out);
      std::size_t rows = engine.util_rows(out);
      std::size_t arity = engine.util_vars(out).size();
      kernel.send(v, dest, MessageKind::kUtil, Payload(std::move(out)), scalars,
                  rows, arity);
    }
  } catch (const CapacityError& e) {
    throw fail(e);
  }
  kernel.stats().phase_ms["util"] = util_clock.elapsed_ms();

  Stopwatch value_clock;
  const VarIndex root = tree.root();
  try {
    for (auto& env : kernel.drain(root)) {
      if (env.kind != MessageKind::kUtil || env.sender != root) {
        throw ProtocolError("root expected only its own UTIL result");
      }
      result.reported_utility = engine.root_value(std::get<Util>(env.payload));
    }
    kernel.send(root, root, MessageKind::kValue, Payload(ValueMessage{}), 0);
    for (VarIndex v : tree.pre_order()) {
      auto inbox = kernel.drain(v);
      if (inbox.size() != 1 || inbox[0].kind != MessageKind::kValue) {
        throw ProtocolError("expected exactly one VALUE message");
      }
      const auto& ancestors = std::get<ValueMessage>(inbox[0].payload);
      double x = engine.value_step(ctx[v], state[v], ancestors);
      result.assignment.set(v, x);
      for (VarIndex c : ctx[v].children()) {
        ValueMessage msg;
        for (VarIndex s : child_vars[v].at(c)) {
          if (s == v) {
            msg[s] = x;
          } else if (auto it = ancestors.find(s); it != ancestors.end()) {
            msg[s] = it->second;
          } else {
            throw ProtocolError("ancestor value unavailable for a child");
          }
        }
        std::size_t size = msg.size();
        kernel.send(v, c, MessageKind::kValue, Payload(std::move(msg)), size);
      }
    }
  } catch (const CapacityError& e) {
    throw fail(e);
  }
  kernel.stats().phase_ms["value"] = value_clock.elapsed_ms();
  if (!kernel.idle()) throw ProtocolError("undelivered messages after VALUE");

  for (VarIndex v = 0; v < n; ++v) {
    engine.diagnose(state[v], result.diagnostics[v]);
  }
  result.stats = kernel.stats();
  result.trace = std::move(kernel.trace());
  return result;
}

}  // namespace fdcop
