// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "fdcop/bench.hpp"

namespace fdcop {
namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  for (std::string f; std::getline(is, f, ',');) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

BenchMatrix small_tree_matrix() {
  BenchMatrix m;
  m.instance.kind = GraphKind::kTree;
  m.sizes = {6};
  m.engines = {EngineKind::kEfDpop, EngineKind::kDpop, EngineKind::kAfDpop,
               EngineKind::kCafDpop, EngineKind::kHcms};
  m.points = {2, 3};
  m.moves = {0, 5};
  m.clusters = {2};
  m.seeds = seed_range(0, 3);
  return m;
}

TEST(Expand, IgnoredKnobsAreZeroed) {
  auto cells = expand(small_tree_matrix());
  // ef once, dpop and hcms per points, af and caf per points and moves.
  EXPECT_EQ(cells.size(), 1u + 2u + 2u + 4u + 4u);
  for (const auto& c : cells) {
    const auto& e = c.engine;
    if (e.engine == EngineKind::kEfDpop) {
      EXPECT_EQ(e.points, 0u);
    }
    if (e.engine != EngineKind::kAfDpop && e.engine != EngineKind::kCafDpop) {
      EXPECT_EQ(e.moves, 0u);
      EXPECT_EQ(e.k_clusters, 0u);
    }
    if (e.engine == EngineKind::kAfDpop) {
      EXPECT_EQ(e.k_clusters, 0u);
    }
    if (e.engine == EngineKind::kDpop || e.engine == EngineKind::kEfDpop) {
      EXPECT_EQ(e.alpha, 0.0);
    }
    if (e.engine != EngineKind::kHcms) {
      EXPECT_EQ(e.iterations, 0u);
    }
    EXPECT_EQ(c.instance.p1, 0.0);
  }
}

TEST(Bench, RowsCsvShapeAndDeterminism) {
  auto m = small_tree_matrix();
  auto rows = run_matrix(m);
  EXPECT_EQ(rows.size(), expand(m).size() * 3);
  std::string csv = rows_to_csv(rows);
  EXPECT_EQ(csv, rows_to_csv(run_matrix(m)));
  auto ls = lines(csv);
  ASSERT_EQ(ls.size(), rows.size() + 1);
  auto header = fields(ls[0]);
  EXPECT_EQ(header.back(), "max_util_rows");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    EXPECT_EQ(fields(ls[i]).size(), header.size()) << ls[i];
  }
  auto timed = lines(rows_to_csv(rows, true));
  EXPECT_EQ(fields(timed[0]).back(), "wall_ms");
  EXPECT_EQ(fields(timed[1]).size(), header.size() + 1);
  // Canonical order: sorted by cell key, then seed.
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto a = cell_key(rows[i - 1].cell), b = cell_key(rows[i].cell);
    EXPECT_TRUE(a < b || (a == b && rows[i - 1].seed < rows[i].seed));
  }
  for (const auto& r : rows) {
    EXPECT_EQ(r.status, RunStatus::kOk);
    EXPECT_EQ(r.messages, predicted_message_count(r.cell.engine.engine,
                                                  make_instance(r.cell.instance, r.seed).graph(),
                                                  r.cell.engine.iterations));
  }
}

TEST(Bench, CapacityFailuresAreMarked) {
  BenchMatrix m;
  m.instance.kind = GraphKind::kGraph;
  m.instance.p1 = 0.6;
  m.sizes = {10};
  m.engines = {EngineKind::kDpop, EngineKind::kCafDpop, EngineKind::kEfDpop};
  m.points = {5};
  m.moves = {2};
  m.clusters = {5};
  m.row_cap = 500;
  m.seeds = seed_range(0, 2);
  auto rows = run_matrix(m);
  auto aggs = aggregate(rows);
  for (const auto& r : rows) {
    if (r.cell.engine.engine == EngineKind::kDpop) {
      EXPECT_EQ(r.status, RunStatus::kCapacity);
      EXPECT_FALSE(r.completed());
    }
    if (r.cell.engine.engine == EngineKind::kEfDpop) {
      EXPECT_EQ(r.status, RunStatus::kUnsupported);
    }
  }
  auto dpop = find_aggregate(aggs, [](const BenchCell& c) {
    return c.engine.engine == EngineKind::kDpop;
  });
  ASSERT_TRUE(dpop.has_value());
  EXPECT_FALSE(dpop->complete());
  EXPECT_EQ(mean_text(*dpop), kMissing);
  std::string csv = rows_to_csv(rows);
  EXPECT_NE(csv.find(",capacity,---,"), std::string::npos);
  EXPECT_NE(aggregates_to_csv(aggs).find(",---,"), std::string::npos);
}

TEST(Bench, AggregateAndPivot) {
  auto m = small_tree_matrix();
  auto rows = run_matrix(m);
  auto aggs = aggregate(rows);
  EXPECT_EQ(aggs.size(), expand(m).size());
  for (const auto& a : aggs) {
    EXPECT_EQ(a.runs, 3u);
    EXPECT_TRUE(a.complete());
    double sum = 0.0;
    for (const auto& r : rows) {
      if (cell_key(r.cell) == cell_key(a.cell)) sum += r.utility;
    }
    EXPECT_NEAR(a.mean_utility, sum / 3.0, 1e-9 * std::max(1.0, std::abs(sum)));
  }
  auto pivot = lines(pivot_to_csv(aggs));
  ASSERT_EQ(pivot.size(), 3u);  // header plus points 2 and 3
  auto head = fields(pivot[0]);
  EXPECT_EQ(head[0], "agents");
  EXPECT_NE(std::find(head.begin(), head.end(), "af-dpop m5"), head.end());
  EXPECT_NE(std::find(head.begin(), head.end(), "caf-dpop m5 k2"), head.end());
  auto ef_col = std::find(head.begin(), head.end(), "ef-dpop") - head.begin();
  // The exact engine fills both lines with the same mean.
  EXPECT_EQ(fields(pivot[1])[ef_col], fields(pivot[2])[ef_col]);
  EXPECT_EQ(fields(pivot[1])[0], "6");
  EXPECT_EQ(fields(pivot[1])[1], "2");
}

TEST(Bench, Presets) {
  for (const char* name : {"table1", "table2", "table3-tree", "table3-graph"}) {
    auto m = preset_matrix(name);
    EXPECT_NO_THROW(m.validate());
    EXPECT_EQ(m.seeds.size(), 20u);
  }
  EXPECT_THROW(preset_matrix("table9"), ArgumentError);
  EXPECT_THROW(coefficient_profile("odd"), ArgumentError);
  EXPECT_EQ(parse_graph_kind("tree"), GraphKind::kTree);
  EXPECT_THROW(parse_graph_kind("ring"), ArgumentError);
}

TEST(Bench, InstancesFollowTheSpec) {
  InstanceSpec s;
  s.kind = GraphKind::kGraph;
  s.agents = 12;
  s.p1 = 0.2;
  EXPECT_EQ(make_instance(s, 4), gen_graph(12, 0.2, 4));
  s.kind = GraphKind::kTree;
  EXPECT_EQ(make_instance(s, 4), gen_tree(12, 4));
}

}  // namespace
}  // namespace fdcop
