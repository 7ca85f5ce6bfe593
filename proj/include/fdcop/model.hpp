// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fdcop/error.hpp"

namespace fdcop {

/// Position of a variable inside its Problem. Agents and variables are in
/// one-to-one correspondence, so the same index also names the owning agent.
using VarIndex = std::size_t;

/// Closed interval [lb, ub] a continuous variable ranges over.
struct ContinuousDomain {
  double lb = 0.0;
  double ub = 1.0;

  double width() const { return ub - lb; }
  double midpoint() const { return lb + 0.5 * (ub - lb); }
  bool contains(double v, double slack = 0.0) const {
    return v >= lb - slack && v <= ub + slack;
  }
  double clamp(double v) const { return std::clamp(v, lb, ub); }

  void validate() const {
    if (!std::isfinite(lb) || !std::isfinite(ub)) {
      throw ValidationError("domain bounds must be finite");
    }
    if (!(lb < ub)) {
      throw ValidationError("domain requires lb < ub");
    }
  }

  bool operator==(const ContinuousDomain&) const = default;
};

/// f(x_i, x_j) = a x_i^2 + b x_i + c x_j^2 + d x_j + e x_i x_j + f0, where
/// x_i is `first` and x_j is `second`.
struct QuadraticUtility {
  VarIndex first = 0;
  VarIndex second = 1;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;
  double f0 = 0.0;

  double operator()(double x_first, double x_second) const {
    return a * x_first * x_first + b * x_first + c * x_second * x_second +
           d * x_second + e * x_first * x_second + f0;
  }
  double d_first(double x_first, double x_second) const {
    return 2.0 * a * x_first + b + e * x_second;
  }
  double d_second(double x_first, double x_second) const {
    return 2.0 * c * x_second + d + e * x_first;
  }

  bool is_linear() const { return a == 0.0 && c == 0.0 && e == 0.0; }
  bool involves(VarIndex v) const { return v == first || v == second; }
  VarIndex other(VarIndex v) const { return v == first ? second : first; }

  /// Same function with `self` moved into the first slot.
  QuadraticUtility oriented(VarIndex self) const {
    if (self == first) return *this;
    return QuadraticUtility{second, first, c, d, a, b, e, f0};
  }

  /// Value with arguments given by variable rather than by slot.
  double evaluate_for(VarIndex v, double x_v, double x_other) const {
    return v == first ? (*this)(x_v, x_other) : (*this)(x_other, x_v);
  }

  std::array<double, 6> coefficients() const { return {a, b, c, d, e, f0}; }

  bool operator==(const QuadraticUtility&) const = default;
};

struct Variable {
  std::string id;
  std::string agent;
  ContinuousDomain domain;

  bool operator==(const Variable&) const = default;
};

/// Undirected constraint graph: one node per variable, one edge per utility.
struct ConstraintGraph {
  std::size_t node_count = 0;
  std::vector<std::pair<VarIndex, VarIndex>> edges;
  std::vector<std::vector<VarIndex>> adjacency;  // each list ascending

  std::size_t edge_count() const { return edges.size(); }
  std::size_t degree(VarIndex v) const { return adjacency[v].size(); }

  static ConstraintGraph from_edges(
      std::size_t nodes, std::vector<std::pair<VarIndex, VarIndex>> edges) {
    ConstraintGraph g;
    g.node_count = nodes;
    g.adjacency.assign(nodes, {});
    for (auto& [u, v] : edges) {
      if (u >= nodes || v >= nodes || u == v) {
        throw ValidationError("edge endpoint out of range or self-loop");
      }
      g.adjacency[u].push_back(v);
      g.adjacency[v].push_back(u);
    }
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
    g.edges = std::move(edges);
    return g;
  }

  /// Component label per node; labels are dense and ordered by smallest node.
  std::vector<std::size_t> components() const {
    constexpr auto kUnset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> label(node_count, kUnset);
    std::size_t next = 0;
    std::vector<VarIndex> stack;
    for (VarIndex s = 0; s < node_count; ++s) {
      if (label[s] != kUnset) continue;
      label[s] = next;
      stack.push_back(s);
      while (!stack.empty()) {
        VarIndex u = stack.back();
        stack.pop_back();
        for (VarIndex w : adjacency[u]) {
          if (label[w] == kUnset) {
            label[w] = next;
            stack.push_back(w);
          }
        }
      }
      ++next;
    }
    return label;
  }

  bool is_connected() const {
    if (node_count == 0) return true;
    auto label = components();
    return std::all_of(label.begin(), label.end(),
                       [](std::size_t l) { return l == 0; });
  }

  bool is_tree() const {
    return is_connected() && edges.size() + 1 == node_count;
  }
};

/// An F-DCOP instance: agents, their (single) continuous variables, and binary
/// quadratic utilities. Immutable after construction; the constructor
/// validates every structural invariant.
class Problem {
 public:
  Problem(std::vector<std::string> agents, std::vector<Variable> variables,
          std::vector<QuadraticUtility> utilities)
      : agents_(std::move(agents)),
        variables_(std::move(variables)),
        utilities_(std::move(utilities)) {
    validate();
    incident_.assign(variables_.size(), {});
    for (std::size_t u = 0; u < utilities_.size(); ++u) {
      incident_[utilities_[u].first].push_back(u);
      incident_[utilities_[u].second].push_back(u);
    }
    std::vector<std::pair<VarIndex, VarIndex>> edges;
    edges.reserve(utilities_.size());
    for (const auto& f : utilities_) edges.emplace_back(f.first, f.second);
    graph_ = ConstraintGraph::from_edges(variables_.size(), std::move(edges));
    if (!graph_.is_connected()) {
      throw ValidationError("constraint graph is not connected");
    }
  }

  std::size_t variable_count() const { return variables_.size(); }
  std::size_t utility_count() const { return utilities_.size(); }
  std::size_t agent_count() const { return agents_.size(); }

  const std::vector<std::string>& agents() const { return agents_; }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(VarIndex v) const { return variables_.at(v); }
  const ContinuousDomain& domain(VarIndex v) const {
    return variables_.at(v).domain;
  }
  const std::vector<QuadraticUtility>& utilities() const { return utilities_; }
  const QuadraticUtility& utility(std::size_t u) const {
    return utilities_.at(u);
  }
  /// Indices of the utilities whose scope contains `v`, ascending.
  const std::vector<std::size_t>& incident(VarIndex v) const {
    return incident_.at(v);
  }
  const ConstraintGraph& graph() const { return graph_; }

  std::optional<VarIndex> find(const std::string& id) const {
    for (VarIndex v = 0; v < variables_.size(); ++v) {
      if (variables_[v].id == id) return v;
    }
    return std::nullopt;
  }

  bool operator==(const Problem& other) const {
    return agents_ == other.agents_ && variables_ == other.variables_ &&
           utilities_ == other.utilities_;
  }

 private:
  void validate() const {
    if (variables_.empty()) throw ValidationError("problem has no variables");
    if (agents_.size() != variables_.size()) {
      throw ValidationError("exactly one variable per agent is required");
    }
    std::set<std::string> agent_ids(agents_.begin(), agents_.end());
    if (agent_ids.size() != agents_.size()) {
      throw ValidationError("duplicate agent id");
    }
    std::set<std::string> owners;
    std::set<std::string> var_ids;
    for (const auto& v : variables_) {
      if (!var_ids.insert(v.id).second) {
        throw ValidationError("duplicate variable id '" + v.id + "'");
      }
      if (!agent_ids.count(v.agent)) {
        throw ValidationError("variable '" + v.id + "' owned by unknown agent");
      }
      if (!owners.insert(v.agent).second) {
        throw ValidationError("agent '" + v.agent + "' owns two variables");
      }
      v.domain.validate();
    }
    std::set<std::pair<VarIndex, VarIndex>> pairs;
    for (const auto& f : utilities_) {
      if (f.first >= variables_.size() || f.second >= variables_.size()) {
        throw ValidationError("utility references an undeclared variable");
      }
      if (f.first == f.second) {
        throw ValidationError("utility scope must name two distinct variables");
      }
      for (double x : f.coefficients()) {
        if (!std::isfinite(x)) {
          throw ValidationError("utility coefficients must be finite");
        }
      }
      auto key = std::minmax(f.first, f.second);
      if (!pairs.insert(key).second) {
        throw ValidationError("at most one utility per variable pair");
      }
    }
  }

  std::vector<std::string> agents_;
  std::vector<Variable> variables_;
  std::vector<QuadraticUtility> utilities_;
  std::vector<std::vector<std::size_t>> incident_;
  ConstraintGraph graph_;
};

/// Values for (some) variables of a problem.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t n) : values_(n) {}

  std::size_t size() const { return values_.size(); }
  void set(VarIndex v, double x) {
    if (v >= values_.size()) values_.resize(v + 1);
    values_[v] = x;
  }
  bool has(VarIndex v) const {
    return v < values_.size() && values_[v].has_value();
  }
  double at(VarIndex v) const {
    if (!has(v)) throw ValidationError("assignment has no value for variable");
    return *values_[v];
  }
  bool complete(std::size_t n) const {
    if (values_.size() < n) return false;
    for (std::size_t v = 0; v < n; ++v) {
      if (!values_[v]) return false;
    }
    return true;
  }

  bool operator==(const Assignment&) const = default;

 private:
  std::vector<std::optional<double>> values_;
};

/// Total utility of a complete, domain-feasible assignment.
inline double evaluate_solution(const Problem& problem,
                                const Assignment& assignment) {
  for (VarIndex v = 0; v < problem.variable_count(); ++v) {
    if (!assignment.has(v)) {
      throw ValidationError("incomplete solution: no value for '" +
                            problem.variable(v).id + "'");
    }
    double x = assignment.at(v);
    if (!std::isfinite(x) || !problem.domain(v).contains(x)) {
      throw ValidationError("infeasible solution: '" + problem.variable(v).id +
                            "' outside its domain");
    }
  }
  double total = 0.0;
  for (const auto& f : problem.utilities()) {
    total += f(assignment.at(f.first), assignment.at(f.second));
  }
  return total;
}

inline ConstraintGraph build_constraint_graph(const Problem& problem) {
  return problem.graph();
}

struct GradientBound {
  std::vector<double> per_function;
  double global_delta = 0.0;
};

/// Exact max of |df/dx_i| + |df/dx_j| over the domain box, per utility. Both
/// partials are affine, so the sum of their magnitudes is convex and peaks at
/// a corner.
inline GradientBound gradient_bound(const Problem& problem) {
  GradientBound out;
  out.per_function.reserve(problem.utility_count());
  for (const auto& f : problem.utilities()) {
    const auto& di = problem.domain(f.first);
    const auto& dj = problem.domain(f.second);
    double best = 0.0;
    for (double xi : {di.lb, di.ub}) {
      for (double xj : {dj.lb, dj.ub}) {
        best = std::max(best, std::abs(f.d_first(xi, xj)) +
                                  std::abs(f.d_second(xi, xj)));
      }
    }
    out.per_function.push_back(best);
    out.global_delta = std::max(out.global_delta, best);
  }
  return out;
}

/// Largest gap between neighbouring points when `points` evenly spaced
/// samples (endpoints included) cover the domain. One point covers the whole
/// interval, so its gap is the domain width.
inline double discretization_gap(const ContinuousDomain& domain,
                                 std::size_t points) {
  if (points == 0) throw ArgumentError("need at least one discretization point");
  if (points == 1) return domain.width();
  return domain.width() / static_cast<double>(points - 1);
}

inline double discretization_gap(const Problem& problem, std::size_t points) {
  double m = 0.0;
  for (const auto& v : problem.variables()) {
    m = std::max(m, discretization_gap(v.domain, points));
  }
  return m;
}

/// |F| * m * delta.
inline double error_bound_discrete(const Problem& problem, double m) {
  if (!(m > 0.0)) throw ArgumentError("hypercube size m must be positive");
  return static_cast<double>(problem.utility_count()) * m *
         gradient_bound(problem).global_delta;
}

/// |F| * (m + |A| * moves * alpha * delta) * delta, taken verbatim.
inline double error_bound_af(const Problem& problem, double m,
                             std::size_t moves, double alpha) {
  if (!(m > 0.0)) throw ArgumentError("hypercube size m must be positive");
  if (!(alpha > 0.0)) throw ArgumentError("learning rate must be positive");
  double delta = gradient_bound(problem).global_delta;
  double drift = static_cast<double>(problem.agent_count()) *
                 static_cast<double>(moves) * alpha * delta;
  return static_cast<double>(problem.utility_count()) * (m + drift) * delta;
}

enum class EngineKind { kDpop, kEfDpop, kAfDpop, kCafDpop, kHcms };

inline const char* engine_name(EngineKind kind) {
  switch (kind) {
    case EngineKind::kDpop: return "dpop";
    case EngineKind::kEfDpop: return "ef-dpop";
    case EngineKind::kAfDpop: return "af-dpop";
    case EngineKind::kCafDpop: return "caf-dpop";
    case EngineKind::kHcms: return "hcms";
  }
  return "?";
}

inline EngineKind parse_engine(const std::string& name) {
  for (auto k : {EngineKind::kDpop, EngineKind::kEfDpop, EngineKind::kAfDpop,
                 EngineKind::kCafDpop, EngineKind::kHcms}) {
    if (name == engine_name(k)) return k;
  }
  throw ArgumentError("unknown engine '" + name + "'");
}

/// 4 * iterations * |E| for max-sum, 2 * |X| for the DPOP family.
inline std::size_t predicted_message_count(EngineKind kind,
                                           const ConstraintGraph& graph,
                                           std::size_t iterations) {
  if (kind == EngineKind::kHcms) return 4 * iterations * graph.edge_count();
  return 2 * graph.node_count;
}

}  // namespace fdcop
