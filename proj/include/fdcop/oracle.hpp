// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

// Centralized reference solvers used to check the distributed engines. They
// share no code with the engines beyond the problem model.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "fdcop/error.hpp"
#include "fdcop/model.hpp"

namespace fdcop {

struct OracleResult {
  double utility = -std::numeric_limits<double>::infinity();
  std::vector<double> values;
};

/// Evenly spaced points with both endpoints; a single point is the midpoint.
inline std::vector<double> oracle_points(const ContinuousDomain& dom,
                                         std::size_t k) {
  if (k == 0) throw ArgumentError("oracle needs at least one point");
  if (k == 1) return {0.5 * (dom.lb + dom.ub)};
  std::vector<double> p(k);
  for (std::size_t i = 0; i < k; ++i) {
    p[i] = dom.lb + (dom.ub - dom.lb) * static_cast<double>(i) /
                        static_cast<double>(k - 1);
  }
  p.back() = dom.ub;
  return p;
}

/// Exhaustive maximum over the product of the given per-variable point sets.
inline OracleResult enumerate_grid(const Problem& problem,
                                   const std::vector<std::vector<double>>& axes) {
  const std::size_t n = problem.variable_count();
  if (axes.size() != n) throw ArgumentError("one axis per variable required");
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> x(n);
  OracleResult best;
  for (;;) {
    for (std::size_t v = 0; v < n; ++v) x[v] = axes[v][idx[v]];
    double total = 0.0;
    for (const auto& f : problem.utilities()) total += f(x[f.first], x[f.second]);
    if (total > best.utility) {
      best.utility = total;
      best.values = x;
    }
    std::size_t v = n;
    while (v > 0) {
      --v;
      if (++idx[v] < axes[v].size()) break;
      idx[v] = 0;
      if (v == 0) return best;
    }
    if (n == 0) return best;
  }
}

inline OracleResult enumerate_grid(const Problem& problem, std::size_t points) {
  std::vector<std::vector<double>> axes;
  for (const auto& v : problem.variables()) {
    axes.push_back(oracle_points(v.domain, points));
  }
  return enumerate_grid(problem, axes);
}

/// Best x in [lo, hi] for A x^2 + B x, returned as (x, value).
inline std::pair<double, double> oracle_max_1d(double A, double B, double lo,
                                               double hi) {
  double bx = lo;
  double bv = A * lo * lo + B * lo;
  auto take = [&](double x) {
    double v = A * x * x + B * x;
    if (v > bv) {
      bv = v;
      bx = x;
    }
  };
  if (A < 0.0) {
    double x = -B / (2.0 * A);
    if (x > lo && x < hi) take(x);
  }
  take(hi);
  return {bx, bv};
}

/// Enumerates all variables but the last on `points` per axis and maximizes
/// the last one exactly. Never below the plain grid optimum at the same
/// resolution and never above the continuous optimum.
inline OracleResult continuous_oracle(const Problem& problem,
                                      std::size_t points) {
  const std::size_t n = problem.variable_count();
  const VarIndex last = n - 1;
  std::vector<std::vector<double>> axes;
  for (VarIndex v = 0; v + 1 < n; ++v) {
    axes.push_back(oracle_points(problem.domain(v), points));
  }
  std::vector<const QuadraticUtility*> inner;
  std::vector<const QuadraticUtility*> touching;
  for (const auto& f : problem.utilities()) {
    (f.involves(last) ? touching : inner).push_back(&f);
  }
  const ContinuousDomain& dl = problem.domain(last);
  std::vector<std::size_t> idx(n - 1, 0);
  std::vector<double> x(n, 0.0);
  OracleResult best;
  for (;;) {
    for (VarIndex v = 0; v + 1 < n; ++v) x[v] = axes[v][idx[v]];
    double rest = 0.0;
    for (const auto* f : inner) rest += (*f)(x[f->first], x[f->second]);
    double A = 0.0, B = 0.0, C = 0.0;
    for (const auto* f : touching) {
      QuadraticUtility g = f->oriented(last);
      double y = x[g.second];
      A += g.a;
      B += g.b + g.e * y;
      C += g.c * y * y + g.d * y + g.f0;
    }
    auto [xl, vl] = oracle_max_1d(A, B, dl.lb, dl.ub);
    double total = rest + C + vl;
    if (total > best.utility) {
      best.utility = total;
      x[last] = xl;
      best.values = x;
    }
    if (n == 1) return best;
    std::size_t v = n - 1;
    bool done = true;
    while (v > 0) {
      --v;
      if (++idx[v] < axes[v].size()) {
        done = false;
        break;
      }
      idx[v] = 0;
    }
    if (done) return best;
  }
}

/// Dynamic program over a tree-structured problem with `points` values per
/// variable; exact for that grid.
inline OracleResult tree_grid_dp(const Problem& problem, std::size_t points) {
  const auto& g = problem.graph();
  if (!g.is_tree()) throw UnsupportedError("tree_grid_dp needs a tree");
  const std::size_t n = problem.variable_count();
  std::vector<std::vector<double>> axes;
  for (const auto& v : problem.variables()) {
    axes.push_back(oracle_points(v.domain, points));
  }
  // BFS order from node 0.
  std::vector<VarIndex> order{0};
  std::vector<long> parent(n, -1);
  std::vector<bool> seen(n, false);
  seen[0] = true;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (VarIndex w : g.adjacency[order[i]]) {
      if (!seen[w]) {
        seen[w] = true;
        parent[w] = static_cast<long>(order[i]);
        order.push_back(w);
      }
    }
  }
  auto edge = [&](VarIndex u, VarIndex v) -> const QuadraticUtility& {
    for (std::size_t k : problem.incident(u)) {
      if (problem.utility(k).involves(v)) return problem.utility(k);
    }
    throw StructureError("missing tree edge");
  };
  // score[v][i]: best subtree utility below v with x_v = axes[v][i].
  std::vector<std::vector<double>> score(n);
  std::vector<std::vector<std::vector<std::size_t>>> choice(n);
  for (VarIndex v = 0; v < n; ++v) score[v].assign(axes[v].size(), 0.0);
  choice.assign(n, {});
  for (std::size_t i = order.size(); i-- > 1;) {
    VarIndex c = order[i];
    VarIndex p = static_cast<VarIndex>(parent[c]);
    const QuadraticUtility& f = edge(c, p);
    std::vector<std::size_t> arg(axes[p].size(), 0);
    for (std::size_t a = 0; a < axes[p].size(); ++a) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < axes[c].size(); ++b) {
        double v = f.evaluate_for(c, axes[c][b], axes[p][a]) + score[c][b];
        if (v > best) {
          best = v;
          arg[a] = b;
        }
      }
      score[p][a] += best;
    }
    choice[c].push_back(std::move(arg));
  }
  OracleResult out;
  std::vector<std::size_t> pick(n, 0);
  for (std::size_t a = 0; a < axes[0].size(); ++a) {
    if (score[0][a] > out.utility) {
      out.utility = score[0][a];
      pick[0] = a;
    }
  }
  for (std::size_t i = 1; i < order.size(); ++i) {
    VarIndex c = order[i];
    pick[c] = choice[c][0][pick[static_cast<VarIndex>(parent[c])]];
  }
  out.values.resize(n);
  for (VarIndex v = 0; v < n; ++v) out.values[v] = axes[v][pick[v]];
  return out;
}

}  // namespace fdcop
