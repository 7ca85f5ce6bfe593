// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

// Approximate functional DPOP. Agents start from a discretized grid of
// separator tuples, move every tuple along the gradients of their own
// constraints, and ship the moved tuples with (interpolated) utilities. The
// clustered variant compresses each outgoing table to k k-means centroids
// while keeping the full table for its own VALUE decision.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "fdcop/protocol.hpp"
#include "fdcop/table.hpp"

namespace fdcop {

struct AfConfig {
  std::size_t points = 3;
  double alpha = 0.01;
  std::size_t moves = 10;
  std::size_t k_clusters = 10;
  bool clustered = false;
  Interpolation interpolation = Interpolation::kInverseDistance;
  std::uint64_t seed = 0;
  std::size_t row_cap = kDefaultRowCap;
  std::size_t interpolation_work_cap = kDefaultInterpolationWorkCap;

  void validate() const {
    if (points == 0) throw ArgumentError("need at least one point");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
      throw ArgumentError("learning rate must be finite and non-negative");
    }
    if (clustered && k_clusters == 0) throw ArgumentError("need at least one cluster");
  }
};

inline constexpr double kMoveConvergence = 1e-9;

/// A constraint between the moving agent and the separator variable at
/// `position` of the tuple.
struct MoveTerm {
  std::size_t position = 0;
  QuadraticUtility f;         // oriented, first = the moving agent
  ContinuousDomain domain;    // of the separator variable
};

/// argmax over x in `own` of f(x, v), in closed form; ties to the smaller x.
inline double best_response_1d(const QuadraticUtility& f, double v,
                               const ContinuousDomain& own) {
  // f(x, v) = a x^2 + (b + e v) x + const.
  const double a = f.a;
  const double b = f.b + f.e * v;
  auto g = [&](double x) { return a * x * x + b * x; };
  double best = own.lb;
  double val = g(own.lb);
  if (a < 0.0) {
    double x = std::clamp(-b / (2.0 * a), own.lb, own.ub);
    if (g(x) > val) {
      best = x;
      val = g(x);
    }
  }
  if (g(own.ub) > val) best = own.ub;
  return best;
}

/// One leaf move: each coordinate follows the gradient of its constraint at
/// (best own response to that coordinate, coordinate), then is clamped.
inline std::vector<double> leaf_move(const std::vector<double>& tuple,
                                     const std::vector<MoveTerm>& terms,
                                     const ContinuousDomain& own, double alpha) {
  std::vector<double> out = tuple;
  for (const auto& t : terms) {
    double v = tuple.at(t.position);
    double x = best_response_1d(t.f, v, own);
    out[t.position] = t.domain.clamp(v + alpha * t.f.d_second(x, v));
  }
  return out;
}

/// One non-leaf move, with x_star the agent's best candidate for the tuple.
inline std::vector<double> nonleaf_move(const std::vector<double>& tuple,
                                        double x_star,
                                        const std::vector<MoveTerm>& terms,
                                        double alpha) {
  std::vector<double> out = tuple;
  for (const auto& t : terms) {
    double v = tuple.at(t.position);
    out[t.position] = t.domain.clamp(v + alpha * t.f.d_second(x_star, v));
  }
  return out;
}

/// k-means over the row tuples. Farthest-point seeding from `seed`, at most
/// 100 Lloyd iterations or until no centroid moves by 1e-6. Centroid
/// utilities are interpolated from the original rows. Tables with at most k
/// rows pass through unchanged.
inline UtilTable cluster_tuples(const UtilTable& table, std::size_t k,
                                std::uint64_t seed,
                                Interpolation method = Interpolation::kInverseDistance,
                                InterpolationBudget* budget = nullptr) {
  if (k == 0) throw ArgumentError("need at least one cluster");
  const std::size_t n = table.rows();
  if (n <= k) return table;
  const std::size_t w = table.arity();
  auto dist2 = [w](const double* p, const double* q) {
    double s = 0.0;
    for (std::size_t j = 0; j < w; ++j) {
      double d = p[j] - q[j];
      s += d * d;
    }
    return s;
  };

  std::mt19937_64 rng(seed);
  std::vector<double> centers;
  std::size_t first = static_cast<std::size_t>(rng() % n);
  centers.insert(centers.end(), table.row(first), table.row(first) + w);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (centers.size() / std::max<std::size_t>(w, 1) < k) {
    const double* last = centers.data() + centers.size() - w;
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t r = 0; r < n; ++r) {
      nearest[r] = std::min(nearest[r], dist2(table.row(r), last));
      if (nearest[r] > far_d) {
        far_d = nearest[r];
        far = r;
      }
    }
    if (!(far_d > 0.0)) break;  // fewer distinct tuples than k
    centers.insert(centers.end(), table.row(far), table.row(far) + w);
    if (w == 0) break;
  }
  const std::size_t m = w == 0 ? 1 : centers.size() / w;

  std::vector<std::size_t> label(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    for (std::size_t r = 0; r < n; ++r) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < m; ++c) {
        double d = dist2(table.row(r), centers.data() + c * w);
        if (d < best) {
          best = d;
          label[r] = c;
        }
      }
    }
    std::vector<double> sum(m * w, 0.0);
    std::vector<std::size_t> count(m, 0);
    for (std::size_t r = 0; r < n; ++r) {
      ++count[label[r]];
      for (std::size_t j = 0; j < w; ++j) sum[label[r] * w + j] += table.row(r)[j];
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      if (count[c] == 0) continue;  // empty cluster keeps its centroid
      for (std::size_t j = 0; j < w; ++j) {
        double next = sum[c * w + j] / static_cast<double>(count[c]);
        shift = std::max(shift, std::abs(next - centers[c * w + j]));
        centers[c * w + j] = next;
      }
    }
    if (shift < 1e-6) break;
  }

  std::vector<std::vector<double>> rows;
  for (std::size_t c = 0; c < m; ++c) {
    rows.emplace_back(centers.begin() + static_cast<std::ptrdiff_t>(c * w),
                      centers.begin() + static_cast<std::ptrdiff_t>((c + 1) * w));
  }
  std::sort(rows.begin(), rows.end());
  UtilTable out;
  out.vars = table.vars;
  out.origin = table.origin;
  for (const auto& r : rows) {
    out.add_row(r, interpolate(table, r.data(), method, budget));
  }
  return out;
}

struct AfLocal {
  JointUtility joint;
  InterpolationBudget budget;
  std::size_t local_rows = 0;
  std::size_t emitted_rows = 0;
  std::size_t value_source_rows = 0;
};

/// Per-agent k-means seed derived from the run seed.
inline std::uint64_t agent_seed(std::uint64_t seed, VarIndex agent) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (agent + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline UtilTable af_util_step(const AgentContext& ctx,
                              const std::vector<UtilTable>& child_tables,
                              const AfConfig& config, AfLocal& local) {
  local.budget.cap = config.interpolation_work_cap;
  local.joint = build_joint(ctx, child_tables, config.points,
                            config.interpolation, &local.budget, config.row_cap);
  const JointUtility& joint = local.joint;
  const ContinuousDomain& own = ctx.domain(ctx.self());
  const bool leaf = ctx.is_leaf();

  std::vector<MoveTerm> terms;
  for (const auto& t : joint.own) {
    terms.push_back(MoveTerm{t.slot - 1, t.f, ctx.domain(t.f.second)});
  }

  UtilTable out;
  out.vars = joint.separator;
  out.origin = leaf ? UtilTable::Origin::kLeaf : UtilTable::Origin::kJoined;
  const std::size_t g = joint.grid_size();
  std::vector<double> tuple(joint.separator.size());
  for (std::size_t i = 0; i < g; ++i) {
    joint.sep_grid.decode(i, tuple.data());
    for (std::size_t step = 0; step < config.moves && !terms.empty(); ++step) {
      std::vector<double> next;
      if (leaf) {
        next = leaf_move(tuple, terms, own, config.alpha);
      } else {
        auto [arg, val] = joint.best(tuple.data(), &local.budget);
        next = nonleaf_move(tuple, joint.candidates[arg], terms, config.alpha);
      }
      double change = 0.0;
      for (std::size_t j = 0; j < tuple.size(); ++j) {
        change = std::max(change, std::abs(next[j] - tuple[j]));
      }
      tuple = std::move(next);
      if (change < kMoveConvergence) break;
    }
    out.add_row(tuple, joint.best(tuple.data(), &local.budget).second);
  }
  local.local_rows = out.rows();
  if (config.clustered && out.rows() > config.k_clusters) {
    out = cluster_tuples(out, config.k_clusters,
                         agent_seed(config.seed, ctx.self()),
                         config.interpolation, &local.budget);
  }
  local.emitted_rows = out.rows();
  return out;
}

/// Best own candidate under the unclustered joined utility at the received
/// ancestor values.
inline double af_value_step(const AgentContext& ctx, AfLocal& local,
                            const ValueMessage& ancestors) {
  const auto t = local.joint.tuple_from(ancestors);
  auto [arg, val] = local.joint.best(t.data(), &local.budget);
  local.value_source_rows = local.joint.grid_size();
  return ctx.domain(ctx.self()).clamp(local.joint.candidates[arg]);
}

class AfDpopEngine {
 public:
  using Util = UtilTable;
  using State = AfLocal;

  explicit AfDpopEngine(AfConfig config) : config_(config) { config_.validate(); }

  Util util_step(const AgentContext& ctx, State& s, std::vector<Util> kids) {
    return af_util_step(ctx, kids, config_, s);
  }
  std::vector<VarIndex> util_vars(const Util& u) const { return u.vars; }
  std::size_t util_scalars(const Util& u) const { return u.scalar_size(); }
  std::size_t util_rows(const Util& u) const { return u.rows(); }
  double root_value(const Util& u) const { return u.utilities.at(0); }
  double value_step(const AgentContext& ctx, State& s, const ValueMessage& a) {
    return af_value_step(ctx, s, a);
  }
  void diagnose(const State& s, AgentDiagnostics& d) const {
    d.local_rows = s.local_rows;
    d.emitted_rows = s.emitted_rows;
    d.value_source_rows = s.value_source_rows;
  }

 private:
  AfConfig config_;
};

inline RunResult solve_af_dpop(const Problem& problem, const AfConfig& config,
                               std::optional<VarIndex> root = std::nullopt) {
  PseudoTree tree = PseudoTree::build(problem.graph(), root);
  AfDpopEngine engine(config);
  return run_pseudotree_protocol(problem, tree, engine);
}

}  // namespace fdcop
