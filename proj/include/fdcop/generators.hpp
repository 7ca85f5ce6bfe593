// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

// Seeded random instances. All randomness comes from std::mt19937_64, whose
// output sequence is fixed by the standard, converted to doubles with plain
// bit arithmetic so results do not depend on the standard library vendor.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fdcop/error.hpp"
#include "fdcop/model.hpp"

namespace fdcop {

struct CoefficientRange {
  double lo = -5.0;
  double hi = 5.0;

  bool operator==(const CoefficientRange&) const = default;
};

struct GeneratorConfig {
  CoefficientRange square{-5.0, 5.0};  // a and c
  CoefficientRange linear{-5.0, 5.0};  // b and d
  CoefficientRange cross{-5.0, 5.0};   // e
  /// Draw a and c from concave_square instead of square.
  bool concave = false;
  CoefficientRange concave_square{-5.0, -0.1};
  ContinuousDomain domain{-100.0, 100.0};

  void validate() const {
    for (const auto& r : {square, linear, cross, concave_square}) {
      if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
        throw ArgumentError("invalid coefficient range");
      }
    }
    if (concave && !(concave_square.hi < 0.0)) {
      throw ArgumentError("concave range must lie below zero");
    }
    domain.validate();
  }
};

class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  /// Uniform in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(engine_() % n);
  }

 private:
  std::mt19937_64 engine_;
};

/// Coefficients drawn in the order a, b, c, d, e; f0 is always 0.
inline QuadraticUtility gen_utility(Random& rng, const GeneratorConfig& config,
                                    VarIndex first, VarIndex second) {
  QuadraticUtility f;
  f.first = first;
  f.second = second;
  const CoefficientRange& sq = config.concave ? config.concave_square : config.square;
  f.a = rng.uniform(sq.lo, sq.hi);
  f.b = rng.uniform(config.linear.lo, config.linear.hi);
  f.c = rng.uniform(sq.lo, sq.hi);
  f.d = rng.uniform(config.linear.lo, config.linear.hi);
  f.e = rng.uniform(config.cross.lo, config.cross.hi);
  f.f0 = 0.0;
  return f;
}

/// Problem over edges given as (smaller, larger) index pairs, sorted.
inline Problem problem_from_edges(std::size_t n,
                                  std::vector<std::pair<VarIndex, VarIndex>> edges,
                                  Random& rng, const GeneratorConfig& config) {
  std::sort(edges.begin(), edges.end());
  std::vector<std::string> agents;
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < n; ++i) {
    agents.push_back("a" + std::to_string(i));
    vars.push_back(Variable{"x" + std::to_string(i), agents.back(), config.domain});
  }
  std::vector<QuadraticUtility> utilities;
  for (auto [u, v] : edges) utilities.push_back(gen_utility(rng, config, u, v));
  return Problem(std::move(agents), std::move(vars), std::move(utilities));
}

/// Uniform attachment: node i >= 1 links to a uniformly chosen earlier node.
inline Problem gen_tree(std::size_t n, std::uint64_t seed,
                        const GeneratorConfig& config = {}) {
  if (n < 2) throw ArgumentError("a random tree needs at least two nodes");
  config.validate();
  Random rng(seed);
  std::vector<std::pair<VarIndex, VarIndex>> edges;
  for (VarIndex i = 1; i < n; ++i) edges.emplace_back(rng.index(i), i);
  return problem_from_edges(n, std::move(edges), rng, config);
}

/// G(n, p1); each extra component is then bridged to a uniform node of the
/// already connected part.
inline Problem gen_graph(std::size_t n, double p1, std::uint64_t seed,
                         const GeneratorConfig& config = {}) {
  if (n < 2) throw ArgumentError("a random graph needs at least two nodes");
  if (!(p1 > 0.0 && p1 <= 1.0)) throw ArgumentError("p1 must lie in (0, 1]");
  config.validate();
  Random rng(seed);
  std::vector<std::pair<VarIndex, VarIndex>> edges;
  for (VarIndex i = 0; i < n; ++i) {
    for (VarIndex j = i + 1; j < n; ++j) {
      if (rng.unit() < p1) edges.emplace_back(i, j);
    }
  }
  auto label = ConstraintGraph::from_edges(n, edges).components();
  std::size_t count = *std::max_element(label.begin(), label.end()) + 1;
  std::vector<std::vector<VarIndex>> members(count);
  for (VarIndex v = 0; v < n; ++v) members[label[v]].push_back(v);
  std::vector<VarIndex> joined = members[0];
  for (std::size_t c = 1; c < count; ++c) {
    VarIndex a = joined[rng.index(joined.size())];
    VarIndex b = members[c][rng.index(members[c].size())];
    edges.emplace_back(std::min(a, b), std::max(a, b));
    joined.insert(joined.end(), members[c].begin(), members[c].end());
  }
  return problem_from_edges(n, std::move(edges), rng, config);
}

}  // namespace fdcop
