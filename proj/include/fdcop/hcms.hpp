// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

// Hybrid continuous max-sum: discrete max-sum over a small sample set per
// variable, followed by one clamped gradient step per sample and iteration.
// The continuous step is a stand-in for the original sample-improvement
// routine, not a reimplementation of it.
//
// Each function node lives on the agent owning the lower-index variable of
// its scope. Every iteration sends one variable->function and one
// function->variable message per scope slot, i.e. 4|E| messages, including
// those between an agent and a function node it hosts itself.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "fdcop/protocol.hpp"
#include "fdcop/table.hpp"

namespace fdcop {

struct HcmsConfig {
  std::size_t points = 3;
  std::size_t iterations = 1;
  double alpha = 0.01;

  void validate() const {
    if (points == 0) throw ArgumentError("need at least one sample");
    if (iterations == 0) throw ArgumentError("need at least one iteration");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
      throw ArgumentError("learning rate must be finite and non-negative");
    }
  }
};

inline VarIndex function_host(const QuadraticUtility& f) {
  return std::min(f.first, f.second);
}

struct MsPayload {
  std::size_t function = 0;
  std::vector<double> samples;    // q: sender's samples
  std::vector<double> values;     // q or r values, one per sample
  std::vector<double> gradients;  // r: d f / d x_receiver at the best reply
};

/// Function->variable message for f oriented with the receiver first:
/// r(v) = max_u f(v, u) + q(u), plus the receiver's partial derivative at
/// the maximizing u (ties to the earliest sample).
inline std::pair<std::vector<double>, std::vector<double>> function_to_variable(
    const QuadraticUtility& f, const std::vector<double>& own_samples,
    const std::vector<double>& other_samples, const std::vector<double>& q) {
  std::vector<double> r(own_samples.size());
  std::vector<double> grad(own_samples.size());
  for (std::size_t i = 0; i < own_samples.size(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < other_samples.size(); ++j) {
      double v = f(own_samples[i], other_samples[j]) + q[j];
      if (v > best) {
        best = v;
        arg = j;
      }
    }
    r[i] = best;
    grad[i] = f.d_first(own_samples[i], other_samples[arg]);
  }
  return {std::move(r), std::move(grad)};
}

/// Sample with the largest summed r value; ties to the smallest sample.
inline double ms_decide(const std::vector<double>& samples,
                        const std::vector<double>& r_sum) {
  if (samples.empty() || samples.size() != r_sum.size()) {
    throw ArgumentError("sample and message lengths differ");
  }
  std::size_t arg = 0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (r_sum[i] > r_sum[arg] ||
        (r_sum[i] == r_sum[arg] && samples[i] < samples[arg])) {
      arg = i;
    }
  }
  return samples[arg];
}

inline RunResult solve_hcms(const Problem& problem, const HcmsConfig& config) {
  config.validate();
  const std::size_t n = problem.variable_count();
  Kernel<MsPayload> kernel(n);
  std::vector<AgentContext> ctx;
  ctx.reserve(n);
  for (VarIndex v = 0; v < n; ++v) {
    ctx.emplace_back(problem, nullptr, v, kernel.trace());
  }

  // Variable-side state, per agent.
  std::vector<std::vector<double>> samples(n);
  std::vector<std::map<std::size_t, std::pair<std::vector<double>,
                                              std::vector<double>>>> inbound(n);
  std::vector<std::vector<std::size_t>> incident(n);
  std::map<std::size_t, VarIndex> host_of;
  for (VarIndex v = 0; v < n; ++v) {
    samples[v] = discretize(ctx[v].domain(v), config.points);
    for (const auto& [u, f] : ctx[v].utilities()) {
      incident[v].push_back(u);
      host_of[u] = function_host(f);
      inbound[v][u] = {std::vector<double>(samples[v].size(), 0.0),
                       std::vector<double>(samples[v].size(), 0.0)};
    }
  }
  std::vector<std::vector<double>> decided_on = samples;

  Stopwatch clock;
  for (std::size_t it = 0; it < config.iterations; ++it) {
    for (VarIndex v = 0; v < n; ++v) {
      const std::size_t d = samples[v].size();
      for (std::size_t u : incident[v]) {
        std::vector<double> q(d, 0.0);
        for (std::size_t other : incident[v]) {
          if (other == u) continue;
          const auto& r = inbound[v][other].first;
          for (std::size_t i = 0; i < d; ++i) q[i] += r[i];
        }
        double mean = std::accumulate(q.begin(), q.end(), 0.0) /
                      static_cast<double>(d);
        for (double& x : q) x -= mean;
        kernel.send(v, host_of.at(u), MessageKind::kVariableToFunction,
                    MsPayload{u, samples[v], std::move(q), {}}, 2 * d);
      }
    }

    // Synchronous round: every function node reads before any replies.
    std::vector<std::map<std::size_t, std::map<VarIndex, MsPayload>>> by_function(n);
    for (VarIndex h = 0; h < n; ++h) {
      for (auto& env : kernel.drain(h)) {
        if (env.kind != MessageKind::kVariableToFunction) {
          throw ProtocolError("function node received an unexpected message");
        }
        by_function[h][env.payload.function][env.sender] = std::move(env.payload);
      }
    }
    for (VarIndex h = 0; h < n; ++h) {
      for (auto& [u, from] : by_function[h]) {
        const QuadraticUtility& f = ctx[h].utility(u);
        if (function_host(f) != h || from.size() != 2) {
          throw ProtocolError("function node missing a variable message");
        }
        for (VarIndex v : {f.first, f.second}) {
          VarIndex w = f.other(v);
          auto [r, grad] = function_to_variable(
              f.oriented(v), from.at(v).samples, from.at(w).samples,
              from.at(w).values);
          std::size_t size = r.size() + grad.size();
          kernel.send(h, v, MessageKind::kFunctionToVariable,
                      MsPayload{u, {}, std::move(r), std::move(grad)}, size);
        }
      }
    }

    for (VarIndex v = 0; v < n; ++v) {
      for (auto& env : kernel.drain(v)) {
        if (env.kind != MessageKind::kFunctionToVariable) {
          throw ProtocolError("variable received an unexpected message");
        }
        inbound[v][env.payload.function] = {std::move(env.payload.values),
                                            std::move(env.payload.gradients)};
      }
      decided_on[v] = samples[v];
      const ContinuousDomain& dom = ctx[v].domain(v);
      for (std::size_t i = 0; i < samples[v].size(); ++i) {
        double g = 0.0;
        for (std::size_t u : incident[v]) g += inbound[v][u].second[i];
        samples[v][i] = dom.clamp(samples[v][i] + config.alpha * g);
      }
    }
  }

  RunResult result;
  result.assignment = Assignment(n);
  result.diagnostics.resize(n);
  for (VarIndex v = 0; v < n; ++v) {
    std::vector<double> sum(decided_on[v].size(), 0.0);
    for (std::size_t u : incident[v]) {
      const auto& r = inbound[v][u].first;
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += r[i];
    }
    result.assignment.set(v, ms_decide(decided_on[v], sum));
    result.diagnostics[v].local_rows = decided_on[v].size();
  }
  kernel.stats().phase_ms["maxsum"] = clock.elapsed_ms();
  if (!kernel.idle()) throw ProtocolError("undelivered max-sum messages");
  result.stats = kernel.stats();
  result.trace = std::move(kernel.trace());
  return result;
}

}  // namespace fdcop
