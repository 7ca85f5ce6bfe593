// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

// Benchmark matrices: every (instance family, size, engine, knob) cell runs
// once per seed and yields one results row. Rows carry everything needed to
// regenerate a figure; aggregate and pivot views are derived from them.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fdcop/format.hpp"
#include "fdcop/generators.hpp"
#include "fdcop/solver.hpp"

namespace fdcop {

enum class GraphKind { kTree, kGraph };

inline const char* graph_kind_name(GraphKind kind) {
  return kind == GraphKind::kTree ? "tree" : "graph";
}

inline GraphKind parse_graph_kind(const std::string& name) {
  if (name == "tree") return GraphKind::kTree;
  if (name == "graph") return GraphKind::kGraph;
  throw ArgumentError("unknown instance family '" + name + "'");
}

/// Coefficient profiles. `standard` draws every coefficient from [-5, 5].
/// `calibrated` keeps the squares concave and small next to the linear
/// terms, so optima fall inside the box instead of on its corners.
inline GeneratorConfig coefficient_profile(const std::string& name) {
  GeneratorConfig c;
  if (name == "standard") return c;
  if (name == "calibrated") {
    c.square = {-1.0, -0.1};
    c.linear = {-100.0, 100.0};
    c.cross = {-1.0, 1.0};
    return c;
  }
  throw ArgumentError("unknown coefficient profile '" + name + "'");
}

struct InstanceSpec {
  GraphKind kind = GraphKind::kTree;
  std::size_t agents = 10;
  double p1 = 0.2;  // graphs only
  GeneratorConfig coefficients;
};

inline Problem make_instance(const InstanceSpec& spec, std::uint64_t seed) {
  if (spec.kind == GraphKind::kTree) {
    return gen_tree(spec.agents, seed, spec.coefficients);
  }
  return gen_graph(spec.agents, spec.p1, seed, spec.coefficients);
}

/// One benchmark cell. Knobs an engine ignores are zeroed so that rows of
/// different engines do not pretend to differ in them.
struct BenchCell {
  InstanceSpec instance;
  EngineConfig engine;
};

enum class RunStatus { kOk, kCapacity, kUnsupported };

inline const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::kOk: return "ok";
    case RunStatus::kCapacity: return "capacity";
    case RunStatus::kUnsupported: return "unsupported";
  }
  return "?";
}

struct BenchRow {
  BenchCell cell;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::kOk;
  double utility = 0.0;  // meaningful only when status is ok
  std::size_t messages = 0;
  std::size_t scalars = 0;
  std::size_t max_message_scalars = 0;
  std::size_t max_util_rows = 0;
  double wall_ms = 0.0;

  bool completed() const { return status == RunStatus::kOk; }
};

/// Runs one cell on the instance drawn from `seed`; the same seed drives the
/// engine's own randomness.
inline BenchRow run_cell(const BenchCell& cell, std::uint64_t seed) {
  BenchRow row;
  row.cell = cell;
  row.seed = seed;
  Problem problem = make_instance(cell.instance, seed);
  EngineConfig config = cell.engine;
  config.seed = seed;
  auto take = [&row](const RunStats& s) {
    row.messages = s.total_messages;
    row.scalars = s.total_scalars;
    row.max_message_scalars = s.max_message_scalars;
    row.max_util_rows = s.max_util_rows;
  };
  Stopwatch clock;
  try {
    RunResult result = run(problem, config);
    take(result.stats);
    row.utility = evaluate_solution(problem, result.assignment);
  } catch (const CapacityExceeded& e) {
    take(e.partial_stats());
    row.status = RunStatus::kCapacity;
  } catch (const CapacityError&) {
    row.status = RunStatus::kCapacity;
  } catch (const UnsupportedError&) {
    row.status = RunStatus::kUnsupported;
  }
  row.wall_ms = clock.elapsed_ms();
  return row;
}

struct BenchMatrix {
  InstanceSpec instance;  // `agents` is replaced by each entry of `sizes`
  std::vector<std::size_t> sizes{10};
  std::vector<EngineKind> engines{EngineKind::kDpop};
  std::vector<std::size_t> points{3};
  std::vector<std::size_t> moves{10};     // AF and CAF
  std::vector<std::size_t> clusters{10};  // CAF
  double alpha = 0.01;
  std::size_t iterations = 1;
  Interpolation interpolation = Interpolation::kInverseDistance;
  std::vector<std::uint64_t> seeds;
  std::size_t row_cap = kDefaultRowCap;
  std::size_t piece_cap = kDefaultPieceCap;
  std::size_t interpolation_work_cap = kDefaultInterpolationWorkCap;

  void validate() const {
    if (sizes.empty() || engines.empty() || points.empty() || seeds.empty()) {
      throw ArgumentError("benchmark matrix has an empty axis");
    }
    if (moves.empty() || clusters.empty()) {
      throw ArgumentError("benchmark matrix has an empty axis");
    }
    for (std::size_t n : sizes) {
      if (n < 2) throw ArgumentError("instances need at least two agents");
    }
    for (std::size_t d : points) {
      if (d == 0) throw ArgumentError("need at least one point");
    }
    for (std::size_t k : clusters) {
      if (k == 0) throw ArgumentError("need at least one cluster");
    }
    if (!(alpha >= 0.0)) throw ArgumentError("learning rate must be non-negative");
    if (iterations == 0) throw ArgumentError("need at least one iteration");
    instance.coefficients.validate();
  }
};

inline std::vector<std::uint64_t> seed_range(std::uint64_t first,
                                             std::size_t count) {
  std::vector<std::uint64_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = first + i;
  return out;
}

/// Named matrices shaped like the three result tables: sizes on trees,
/// sizes on G(n, 0.2), and a points sweep on each family.
inline BenchMatrix preset_matrix(const std::string& name) {
  BenchMatrix m;
  m.seeds = seed_range(0, 20);
  m.instance.coefficients = coefficient_profile("calibrated");
  using E = EngineKind;
  if (name == "table1") {
    m.instance.kind = GraphKind::kTree;
    m.sizes = {10, 20};
    m.engines = {E::kEfDpop, E::kHcms, E::kDpop, E::kAfDpop};
    m.moves = {5, 10, 15, 20};
  } else if (name == "table2") {
    m.instance.kind = GraphKind::kGraph;
    m.sizes = {10, 12, 14};
    m.engines = {E::kHcms, E::kDpop, E::kAfDpop, E::kCafDpop};
    m.moves = {5, 10, 15, 20};
  } else if (name == "table3-tree") {
    m.instance.kind = GraphKind::kTree;
    m.sizes = {20};
    m.engines = {E::kHcms, E::kDpop, E::kAfDpop};
    m.points = {1, 3, 9};
  } else if (name == "table3-graph") {
    m.instance.kind = GraphKind::kGraph;
    m.sizes = {12};
    m.engines = {E::kHcms, E::kDpop, E::kAfDpop, E::kCafDpop};
    m.points = {1, 3, 9};
  } else {
    throw ArgumentError("unknown preset '" + name + "'");
  }
  return m;
}

inline std::vector<BenchCell> expand(const BenchMatrix& m) {
  m.validate();
  std::vector<BenchCell> cells;
  for (std::size_t n : m.sizes) {
    for (std::size_t d : m.points) {
      for (EngineKind e : m.engines) {
        const bool moving = e == EngineKind::kAfDpop || e == EngineKind::kCafDpop;
        const bool clustered = e == EngineKind::kCafDpop;
        const std::vector<std::size_t> none{0};
        for (std::size_t mv : moving ? m.moves : none) {
          for (std::size_t k : clustered ? m.clusters : none) {
            BenchCell c;
            c.instance = m.instance;
            c.instance.agents = n;
            if (m.instance.kind == GraphKind::kTree) c.instance.p1 = 0.0;
            EngineConfig& ec = c.engine;
            ec.engine = e;
            ec.points = e == EngineKind::kEfDpop ? 0 : d;
            ec.moves = mv;
            ec.k_clusters = k;
            ec.alpha = moving || e == EngineKind::kHcms ? m.alpha : 0.0;
            ec.iterations = e == EngineKind::kHcms ? m.iterations : 0;
            ec.interpolation = m.interpolation;
            ec.row_cap = m.row_cap;
            ec.piece_cap = m.piece_cap;
            ec.interpolation_work_cap = m.interpolation_work_cap;
            cells.push_back(c);
          }
        }
      }
    }
  }
  // The exact engine does not depend on the points axis.
  std::vector<BenchCell> unique;
  for (const auto& c : cells) {
    bool dup = std::any_of(unique.begin(), unique.end(), [&](const BenchCell& u) {
      return u.engine.engine == EngineKind::kEfDpop &&
             c.engine.engine == EngineKind::kEfDpop &&
             u.instance.agents == c.instance.agents;
    });
    if (!dup) unique.push_back(c);
  }
  return unique;
}

/// Canonical sort key of a cell: family, size, points, engine, moves, k.
inline auto cell_key(const BenchCell& c) {
  return std::make_tuple(static_cast<int>(c.instance.kind), c.instance.agents,
                         c.instance.p1, c.engine.points,
                         static_cast<int>(c.engine.engine), c.engine.moves,
                         c.engine.k_clusters);
}

/// Runs every cell over every seed, in canonical (cell, seed) order.
/// `progress` (optional) is called after each row.
template <class Progress>
std::vector<BenchRow> run_matrix(const BenchMatrix& m, Progress&& progress) {
  auto cells = expand(m);
  std::stable_sort(cells.begin(), cells.end(),
                   [](const BenchCell& a, const BenchCell& b) {
                     return cell_key(a) < cell_key(b);
                   });
  std::vector<std::uint64_t> seeds = m.seeds;
  std::sort(seeds.begin(), seeds.end());
  std::vector<BenchRow> rows;
  rows.reserve(cells.size() * seeds.size());
  for (const auto& c : cells) {
    for (std::uint64_t s : seeds) {
      rows.push_back(run_cell(c, s));
      progress(rows.back());
    }
  }
  return rows;
}

inline std::vector<BenchRow> run_matrix(const BenchMatrix& m) {
  return run_matrix(m, [](const BenchRow&) {});
}

inline constexpr const char* kMissing = "---";

inline std::string cell_columns_header() {
  return "graph,agents,p1,square_lo,square_hi,linear_lo,linear_hi,cross_lo,"
         "cross_hi,concave,engine,points,moves,alpha,clusters,iterations,"
         "interp";
}

inline std::string cell_columns(const BenchCell& c) {
  const GeneratorConfig& g = c.instance.coefficients;
  const CoefficientRange& sq = g.concave ? g.concave_square : g.square;
  const EngineConfig& e = c.engine;
  std::ostringstream os;
  os << graph_kind_name(c.instance.kind) << ',' << c.instance.agents << ','
     << format_double(c.instance.p1) << ',' << format_double(sq.lo) << ','
     << format_double(sq.hi) << ',' << format_double(g.linear.lo) << ','
     << format_double(g.linear.hi) << ',' << format_double(g.cross.lo) << ','
     << format_double(g.cross.hi) << ',' << (g.concave ? 1 : 0) << ','
     << engine_name(e.engine) << ',' << e.points << ',' << e.moves << ','
     << format_double(e.alpha) << ',' << e.k_clusters << ',' << e.iterations
     << ',' << interpolation_name(e.interpolation);
  return os.str();
}

/// One line per row. Wall time is appended only on request because it is the
/// one field that differs between reruns.
inline std::string rows_to_csv(const std::vector<BenchRow>& rows,
                               bool with_time = false) {
  std::ostringstream os;
  os << cell_columns_header()
     << ",seed,status,utility,messages,scalars,max_message_scalars,"
        "max_util_rows"
     << (with_time ? ",wall_ms" : "") << '\n';
  for (const auto& r : rows) {
    os << cell_columns(r.cell) << ',' << r.seed << ',' << status_name(r.status)
       << ',' << (r.completed() ? format_double(r.utility) : kMissing) << ','
       << r.messages << ',' << r.scalars << ',' << r.max_message_scalars << ','
       << r.max_util_rows;
    if (with_time) os << ',' << format_double(r.wall_ms);
    os << '\n';
  }
  return os.str();
}

struct Aggregate {
  BenchCell cell;
  std::size_t runs = 0;
  std::size_t completed = 0;
  double mean_utility = 0.0;  // over completed runs
  double mean_messages = 0.0;
  double mean_scalars = 0.0;
  std::size_t max_util_rows = 0;

  /// The cell counts only when every seed completed.
  bool complete() const { return runs > 0 && completed == runs; }
};

inline std::vector<Aggregate> aggregate(const std::vector<BenchRow>& rows) {
  std::vector<Aggregate> out;
  std::map<decltype(cell_key(BenchCell{})), std::size_t> index;
  for (const auto& r : rows) {
    auto key = cell_key(r.cell);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back(Aggregate{r.cell});
    }
    Aggregate& a = out[it->second];
    ++a.runs;
    a.mean_messages += static_cast<double>(r.messages);
    a.mean_scalars += static_cast<double>(r.scalars);
    a.max_util_rows = std::max(a.max_util_rows, r.max_util_rows);
    if (r.completed()) {
      ++a.completed;
      a.mean_utility += r.utility;
    }
  }
  for (auto& a : out) {
    a.mean_messages /= static_cast<double>(a.runs);
    a.mean_scalars /= static_cast<double>(a.runs);
    if (a.completed > 0) a.mean_utility /= static_cast<double>(a.completed);
  }
  return out;
}

inline std::string mean_text(const Aggregate& a) {
  return a.complete() ? format_double(a.mean_utility) : kMissing;
}

inline std::string aggregates_to_csv(const std::vector<Aggregate>& aggs) {
  std::ostringstream os;
  os << cell_columns_header()
     << ",runs,completed,mean_utility,mean_messages,mean_scalars,"
        "max_util_rows\n";
  for (const auto& a : aggs) {
    os << cell_columns(a.cell) << ',' << a.runs << ',' << a.completed << ','
       << mean_text(a) << ',' << format_double(a.mean_messages) << ','
       << format_double(a.mean_scalars) << ',' << a.max_util_rows << '\n';
  }
  return os.str();
}

/// Column label of a cell in the table layout, e.g. "af-dpop m10" or
/// "caf-dpop m10 k10".
inline std::string column_label(const EngineConfig& e) {
  std::string s = engine_name(e.engine);
  if (e.engine == EngineKind::kAfDpop || e.engine == EngineKind::kCafDpop) {
    s += " m" + std::to_string(e.moves);
  }
  if (e.engine == EngineKind::kCafDpop) s += " k" + std::to_string(e.k_clusters);
  return s;
}

/// Table layout: one line per (agents, points), one column per engine
/// setting, mean utility or "---".
inline std::string pivot_to_csv(const std::vector<Aggregate>& aggs) {
  std::vector<std::string> columns;
  std::vector<std::pair<std::size_t, std::size_t>> lines;
  std::map<std::pair<std::pair<std::size_t, std::size_t>, std::string>,
           std::string>
      cells;
  for (const auto& a : aggs) {
    std::string col = column_label(a.cell.engine);
    if (std::find(columns.begin(), columns.end(), col) == columns.end()) {
      columns.push_back(col);
    }
    std::pair<std::size_t, std::size_t> line{a.cell.instance.agents,
                                             a.cell.engine.points};
    if (a.cell.engine.engine == EngineKind::kEfDpop) continue;
    if (std::find(lines.begin(), lines.end(), line) == lines.end()) {
      lines.push_back(line);
    }
    cells[{line, col}] = mean_text(a);
  }
  // The exact engine has no points; it fills every line of its size.
  for (const auto& a : aggs) {
    if (a.cell.engine.engine != EngineKind::kEfDpop) continue;
    for (const auto& line : lines) {
      if (line.first == a.cell.instance.agents) {
        cells[{line, column_label(a.cell.engine)}] = mean_text(a);
      }
    }
  }
  std::sort(lines.begin(), lines.end());
  std::ostringstream os;
  os << "agents,points";
  for (const auto& c : columns) os << ',' << c;
  os << '\n';
  for (const auto& line : lines) {
    os << line.first << ',' << line.second;
    for (const auto& c : columns) {
      auto it = cells.find({line, c});
      os << ',' << (it == cells.end() ? "" : it->second);
    }
    os << '\n';
  }
  return os.str();
}

/// Aggregate matching the given filter, if any.
template <class Pred>
std::optional<Aggregate> find_aggregate(const std::vector<Aggregate>& aggs,
                                        Pred&& pred) {
  for (const auto& a : aggs) {
    if (pred(a.cell)) return a;
  }
  return std::nullopt;
}

}  // namespace fdcop
