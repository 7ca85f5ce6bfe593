// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

// Tabular UTIL machinery shared by the grid-based engines: scattered tables,
// Cartesian grids, interpolation, alignment, and the joined utility an agent
// maximizes over its own candidate values.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fdcop/error.hpp"
#include "fdcop/model.hpp"
#include "fdcop/runtime.hpp"

namespace fdcop {

inline constexpr std::size_t kDefaultRowCap = 10'000'000;
inline constexpr std::size_t kDefaultInterpolationWorkCap = 400'000'000;

/// d = 1 gives the midpoint; d >= 2 gives d evenly spaced points including
/// both endpoints.
inline std::vector<double> discretize(const ContinuousDomain& domain,
                                      std::size_t d) {
  if (d == 0) throw ArgumentError("discretize needs at least one point");
  if (d == 1) return {domain.midpoint()};
  std::vector<double> pts(d);
  const double span = domain.width();
  const double steps = static_cast<double>(d - 1);
  for (std::size_t i = 0; i < d; ++i) {
    pts[i] = domain.lb + span * (static_cast<double>(i) / steps);
  }
  pts.front() = domain.lb;
  pts.back() = domain.ub;
  return pts;
}

/// Rows of (value tuple, utility) over an ordered variable list.
struct UtilTable {
  enum class Origin { kLeaf, kJoined };

  std::vector<VarIndex> vars;
  std::vector<double> values;  // row-major, arity() per row
  std::vector<double> utilities;
  Origin origin = Origin::kJoined;

  std::size_t arity() const { return vars.size(); }
  std::size_t rows() const { return utilities.size(); }
  const double* row(std::size_t r) const { return values.data() + r * arity(); }
  std::vector<double> tuple(std::size_t r) const {
    return {row(r), row(r) + arity()};
  }
  void add_row(const double* tuple, double utility) {
    values.insert(values.end(), tuple, tuple + arity());
    utilities.push_back(utility);
  }
  void add_row(const std::vector<double>& tuple, double utility) {
    if (tuple.size() != arity()) throw ArgumentError("tuple arity mismatch");
    add_row(tuple.data(), utility);
  }
  /// Reals on the wire: every tuple plus its utility.
  std::size_t scalar_size() const { return rows() * (arity() + 1); }

  std::optional<std::size_t> column(VarIndex v) const {
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (vars[j] == v) return j;
    }
    return std::nullopt;
  }
  /// Distinct values of column j, ascending.
  std::vector<double> column_values(std::size_t j) const {
    std::vector<double> out;
    out.reserve(rows());
    for (std::size_t r = 0; r < rows(); ++r) out.push_back(row(r)[j]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void validate() const {
    if (values.size() != rows() * arity()) {
      throw ValidationError("table values do not match its arity");
    }
    for (double u : utilities) {
      if (!std::isfinite(u)) throw ValidationError("table utility not finite");
    }
  }

  bool operator==(const UtilTable& o) const {
    return vars == o.vars && values == o.values && utilities == o.utilities;
  }
};

/// Axis product with the last axis varying fastest.
struct Grid {
  std::vector<std::vector<double>> axes;  // each ascending, distinct

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.size();
    return n;
  }

  /// Product of axis lengths, or CapacityError once it passes `cap`.
  static std::size_t checked_size(const std::vector<std::vector<double>>& axes,
                                  std::size_t cap, const std::string& what) {
    std::size_t n = 1;
    for (const auto& a : axes) {
      if (a.empty()) return 0;
      if (n > cap / a.size()) {
        throw CapacityError(what + " exceeds the row cap of " +
                            std::to_string(cap));
      }
      n *= a.size();
    }
    if (n > cap) {
      throw CapacityError(what + " exceeds the row cap of " +
                          std::to_string(cap));
    }
    return n;
  }

  std::vector<std::size_t> strides() const {
    std::vector<std::size_t> s(axes.size(), 1);
    for (std::size_t j = axes.size(); j-- > 1;) {
      s[j - 1] = s[j] * axes[j].size();
    }
    return s;
  }

  void decode(std::size_t flat, double* out) const {
    for (std::size_t j = axes.size(); j-- > 0;) {
      out[j] = axes[j][flat % axes[j].size()];
      flat /= axes[j].size();
    }
  }

  /// Flat index of a tuple whose every coordinate is an exact axis value.
  std::optional<std::size_t> locate(const double* tuple) const {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < axes.size(); ++j) {
      const auto& a = axes[j];
      auto it = std::lower_bound(a.begin(), a.end(), tuple[j]);
      if (it == a.end() || *it != tuple[j]) return std::nullopt;
      flat = flat * a.size() + static_cast<std::size_t>(it - a.begin());
    }
    return flat;
  }
};

/// Dense utilities over a Grid, one axis per variable.
struct GridTable {
  std::vector<VarIndex> vars;
  Grid grid;
  std::vector<double> utilities;

  UtilTable to_table() const {
    UtilTable t;
    t.vars = vars;
    std::vector<double> tuple(vars.size());
    for (std::size_t r = 0; r < utilities.size(); ++r) {
      grid.decode(r, tuple.data());
      t.add_row(tuple, utilities[r]);
    }
    return t;
  }
};

enum class Interpolation { kInverseDistance, kNearest };

inline const char* interpolation_name(Interpolation m) {
  return m == Interpolation::kNearest ? "nearest" : "idw";
}

inline Interpolation parse_interpolation(const std::string& s) {
  if (s == "idw") return Interpolation::kInverseDistance;
  if (s == "nearest") return Interpolation::kNearest;
  throw ArgumentError("unknown interpolation '" + s + "'");
}

/// Per-agent allowance of interpolation work, in row-coordinate visits.
struct InterpolationBudget {
  std::size_t cap = kDefaultInterpolationWorkCap;
  std::size_t used = 0;

  void charge(std::size_t units) {
    used += units;
    if (used > cap) {
      throw CapacityError("interpolation work exceeds its cap of " +
                          std::to_string(cap));
    }
  }
};

/// Utility at an arbitrary tuple. Exact matches return the stored value;
/// otherwise inverse-distance weighting (power 2) over all rows, or the
/// nearest row with ties to the lexicographically smallest tuple.
inline double interpolate(const UtilTable& table, const double* query,
                          Interpolation method = Interpolation::kInverseDistance,
                          InterpolationBudget* budget = nullptr) {
  const std::size_t n = table.rows();
  const std::size_t w = table.arity();
  if (n == 0) throw ProtocolError("cannot interpolate an empty table");
  if (budget) budget->charge(n * std::max<std::size_t>(w, 1));
  if (method == Interpolation::kNearest) {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < n; ++r) {
      const double* t = table.row(r);
      double d2 = 0.0;
      for (std::size_t j = 0; j < w; ++j) {
        double diff = t[j] - query[j];
        d2 += diff * diff;
      }
      if (d2 < best_d2 ||
          (d2 == best_d2 &&
           std::lexicographical_compare(t, t + w, table.row(best),
                                        table.row(best) + w))) {
        best = r;
        best_d2 = d2;
      }
    }
    return table.utilities[best];
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double* t = table.row(r);
    double d2 = 0.0;
    for (std::size_t j = 0; j < w; ++j) {
      double diff = t[j] - query[j];
      d2 += diff * diff;
    }
    // Below this the weight overflows; treat it as a hit.
    if (d2 < 1e-300) return table.utilities[r];
    double wt = 1.0 / d2;
    num += wt * table.utilities[r];
    den += wt;
  }
  return num / den;
}

inline double interpolate(const UtilTable& table,
                          const std::vector<double>& query,
                          Interpolation method = Interpolation::kInverseDistance,
                          InterpolationBudget* budget = nullptr) {
  if (query.size() != table.arity()) throw ArgumentError("query arity mismatch");
  return interpolate(table, query.data(), method, budget);
}

/// Common per-variable value sets: the union over every table mentioning it.
inline std::map<VarIndex, std::vector<double>> union_axes(
    const std::vector<UtilTable>& tables) {
  std::map<VarIndex, std::vector<double>> axes;
  for (const auto& t : tables) {
    for (std::size_t j = 0; j < t.arity(); ++j) {
      auto& a = axes[t.vars[j]];
      auto col = t.column_values(j);
      a.insert(a.end(), col.begin(), col.end());
    }
  }
  for (auto& [v, a] : axes) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return axes;
}

/// Extends `table` to the full product of `axes` over its own variables.
/// Rows already present keep their utility; new rows are interpolated from
/// the original rows, or rejected when `method` is empty.
inline GridTable align_table(const UtilTable& table,
                             const std::map<VarIndex, std::vector<double>>& axes,
                             std::optional<Interpolation> method,
                             InterpolationBudget* budget,
                             std::size_t row_cap = kDefaultRowCap) {
  if (table.rows() == 0) throw ProtocolError("empty UTIL table");
  GridTable out;
  out.vars = table.vars;
  for (VarIndex v : table.vars) out.grid.axes.push_back(axes.at(v));
  const std::size_t n =
      Grid::checked_size(out.grid.axes, row_cap, "aligned UTIL table");
  const std::size_t w = table.arity();

  // Original rows sorted lexicographically; stable so duplicates resolve to
  // the first occurrence.
  std::vector<std::size_t> order(table.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto row_less = [&](std::size_t x, std::size_t y) {
    return std::lexicographical_compare(table.row(x), table.row(x) + w,
                                        table.row(y), table.row(y) + w);
  };
  std::stable_sort(order.begin(), order.end(), row_less);

  out.utilities.resize(n);
  std::vector<double> tuple(w);
  for (std::size_t flat = 0; flat < n; ++flat) {
    out.grid.decode(flat, tuple.data());
    auto it = std::lower_bound(
        order.begin(), order.end(), tuple,
        [&](std::size_t r, const std::vector<double>& q) {
          return std::lexicographical_compare(table.row(r), table.row(r) + w,
                                              q.begin(), q.end());
        });
    if (it != order.end() &&
        std::equal(tuple.begin(), tuple.end(), table.row(*it))) {
      out.utilities[flat] = table.utilities[*it];
    } else if (method) {
      out.utilities[flat] = interpolate(table, tuple.data(), *method, budget);
    } else {
      throw ProtocolError("UTIL tables disagree on the discretization grid");
    }
  }
  return out;
}

/// Aligns every table to the union value sets. Tables already on the common
/// grid come back row-for-row unchanged.
inline std::vector<UtilTable> align_tables(
    const std::vector<UtilTable>& tables,
    Interpolation method = Interpolation::kInverseDistance,
    InterpolationBudget* budget = nullptr) {
  for (const auto& t : tables) {
    if (t.rows() == 0) throw ProtocolError("empty UTIL table");
  }
  auto axes = union_axes(tables);
  std::vector<UtilTable> out;
  out.reserve(tables.size());
  for (const auto& t : tables) {
    out.push_back(align_table(t, axes, method, budget).to_table());
  }
  return out;
}

/// A child's contribution to its parent's joined utility.
struct ChildTerm {
  GridTable aligned;
  UtilTable original;
  /// Per child variable: 0 for the agent's own variable, 1 + j for
  /// separator position j.
  std::vector<std::size_t> slot;
};

/// One of the agent's own constraints towards a separator variable.
struct OwnTerm {
  std::size_t slot = 0;     // 1 + separator position
  QuadraticUtility f;       // oriented, first = the agent
};

/// J(c, t) = sum of child utilities + sum of own constraints, for own value
/// c and separator tuple t. Children are summed first, in child order, then
/// own constraints in incidence order; dense() and at() use the same order so
/// on-grid values agree bit for bit.
class JointUtility {
 public:
  VarIndex self = 0;
  std::vector<VarIndex> separator;
  std::vector<double> candidates;  // ascending
  Grid sep_grid;                   // one axis per separator variable
  std::vector<ChildTerm> children;
  std::vector<OwnTerm> own;
  std::optional<Interpolation> method;  // empty: off-grid queries are errors

  std::size_t grid_size() const { return sep_grid.size(); }
  std::size_t size() const { return candidates.size() * grid_size(); }

  /// All J values, candidate-major: index c * grid_size() + t.
  std::vector<double> dense() const {
    const std::size_t g = grid_size();
    const std::size_t w = separator.size();
    std::vector<double> out(candidates.size() * g);
    std::vector<std::vector<std::size_t>> strides;
    for (const auto& ch : children) strides.push_back(ch.aligned.grid.strides());
    std::vector<std::size_t> idx(w + 1, 0);  // [candidate, separator axes...]
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
      double sum = 0.0;
      for (std::size_t k = 0; k < children.size(); ++k) {
        const auto& ch = children[k];
        std::size_t pos = 0;
        for (std::size_t j = 0; j < ch.slot.size(); ++j) {
          pos += idx[ch.slot[j]] * strides[k][j];
        }
        sum += ch.aligned.utilities[pos];
      }
      const double c = candidates[idx[0]];
      for (const auto& term : own) {
        sum += term.f(c, sep_grid.axes[term.slot - 1][idx[term.slot]]);
      }
      out[flat] = sum;
      for (std::size_t j = w + 1; j-- > 0;) {
        std::size_t len = j == 0 ? candidates.size() : sep_grid.axes[j - 1].size();
        if (++idx[j] < len) break;
        idx[j] = 0;
      }
    }
    return out;
  }

  /// J(c, t) at any tuple; children off their aligned grid are interpolated
  /// from the rows they sent.
  double at(double c, const double* t, InterpolationBudget* budget) const {
    double sum = 0.0;
    std::vector<double> q;
    for (const auto& ch : children) {
      q.resize(ch.slot.size());
      for (std::size_t j = 0; j < ch.slot.size(); ++j) {
        q[j] = ch.slot[j] == 0 ? c : t[ch.slot[j] - 1];
      }
      if (auto pos = ch.aligned.grid.locate(q.data())) {
        sum += ch.aligned.utilities[*pos];
      } else if (method) {
        sum += interpolate(ch.original, q.data(), *method, budget);
      } else {
        throw ProtocolError("value outside the agreed discretization grid");
      }
    }
    for (const auto& term : own) sum += term.f(c, t[term.slot - 1]);
    return sum;
  }

  /// Index of the best candidate at t; ties go to the smallest value.
  std::pair<std::size_t, double> best(const double* t,
                                      InterpolationBudget* budget) const {
    std::size_t arg = 0;
    double val = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      double v = at(candidates[i], t, budget);
      if (v > val) {
        val = v;
        arg = i;
      }
    }
    return {arg, val};
  }

  /// Separator tuple ordered like `separator`, from received ancestor values.
  std::vector<double> tuple_from(const std::map<VarIndex, double>& values) const {
    std::vector<double> t;
    t.reserve(separator.size());
    for (VarIndex s : separator) {
      auto it = values.find(s);
      if (it == values.end()) {
        throw ProtocolError("VALUE message lacks a separator variable");
      }
      t.push_back(it->second);
    }
    return t;
  }
};

/// Assembles an agent's joined utility from its children's tables (in child
/// order) and its own constraints towards ancestors. Variables that no child
/// reports are discretized with d points.
inline JointUtility build_joint(const AgentContext& ctx,
                                const std::vector<UtilTable>& child_tables,
                                std::size_t d,
                                std::optional<Interpolation> method,
                                InterpolationBudget* budget,
                                std::size_t row_cap = kDefaultRowCap) {
  JointUtility j;
  j.self = ctx.self();
  j.separator = ctx.separator();
  j.method = method;

  for (const auto& t : child_tables) {
    if (t.rows() == 0) throw ProtocolError("empty UTIL table");
    t.validate();
    if (!t.column(j.self)) {
      throw ProtocolError("child UTIL table omits its parent's variable");
    }
  }
  auto axes = union_axes(child_tables);
  auto slot_of = [&](VarIndex v) -> std::size_t {
    if (v == j.self) return 0;
    auto it = std::lower_bound(j.separator.begin(), j.separator.end(), v);
    if (it == j.separator.end() || *it != v) {
      throw ProtocolError("UTIL table mentions a variable outside the separator");
    }
    return 1 + static_cast<std::size_t>(it - j.separator.begin());
  };

  if (auto it = axes.find(j.self); it != axes.end()) {
    j.candidates = it->second;
  } else {
    j.candidates = discretize(ctx.domain(j.self), d);
  }
  for (VarIndex s : j.separator) {
    auto it = axes.find(s);
    j.sep_grid.axes.push_back(it != axes.end() ? it->second
                                               : discretize(ctx.domain(s), d));
  }
  std::vector<std::vector<double>> all_axes = j.sep_grid.axes;
  all_axes.push_back(j.candidates);
  Grid::checked_size(all_axes, row_cap, "joined UTIL table");

  for (const auto& t : child_tables) {
    ChildTerm ch;
    ch.aligned = align_table(t, axes, method, budget, row_cap);
    ch.original = t;
    for (VarIndex v : t.vars) ch.slot.push_back(slot_of(v));
    j.children.push_back(std::move(ch));
  }
  for (const auto& [u, f] : ctx.utilities()) {
    VarIndex other = f.second;
    if (std::binary_search(j.separator.begin(), j.separator.end(), other)) {
      j.own.push_back(OwnTerm{slot_of(other), f});
    }
  }
  return j;
}

}  // namespace fdcop
