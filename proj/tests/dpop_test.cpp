// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "fdcop/dpop.hpp"
#include "fdcop/generators.hpp"
#include "fdcop/oracle.hpp"
#include "test_util.hpp"

namespace fdcop {
namespace {

using testing::quad;

double tol(double v) { return 1e-6 * std::max(1.0, std::abs(v)); }

std::vector<std::vector<double>> grid_axes(const Problem& p, std::size_t d) {
  std::vector<std::vector<double>> axes;
  for (const auto& v : p.variables()) axes.push_back(discretize(v.domain, d));
  return axes;
}

TEST(Discretize, Examples) {
  EXPECT_EQ(discretize({-100, 100}, 3), (std::vector<double>{-100, 0, 100}));
  EXPECT_EQ(discretize({-100, 100}, 1), (std::vector<double>{0}));
  EXPECT_EQ(discretize({0, 10}, 2), (std::vector<double>{0, 10}));
  EXPECT_THROW(discretize({0, 10}, 0), ArgumentError);
  auto pts = discretize({-3, 7}, 11);
  EXPECT_EQ(pts.front(), -3.0);
  EXPECT_EQ(pts.back(), 7.0);
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_NEAR(pts[i] - pts[i - 1], 1.0, 1e-12);
}

Problem two_domains(QuadraticUtility f, ContinuousDomain d0, ContinuousDomain d1) {
  return Problem({"a0", "a1"}, {{"x0", "a0", d0}, {"x1", "a1", d1}}, {f});
}

TEST(UtilPhase, LeafProductTable) {
  // f(x, p) = x * p, x in {-1, 1}, p in {-2, 2}.
  auto p = two_domains(quad(0, 1, 0, 0, 0, 0, 1), {-1, 1}, {-2, 2});
  auto tree = PseudoTree::build(p.graph(), 1);
  Trace trace;
  AgentContext ctx(p, &tree, 0, trace);
  DpopLocal local;
  UtilTable t = util_phase_step(ctx, {}, DpopConfig{2, kDefaultRowCap}, local);
  EXPECT_EQ(t.vars, (std::vector<VarIndex>{1}));
  ASSERT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.tuple(0), (std::vector<double>{-2}));
  EXPECT_EQ(t.utilities[0], 2.0);
  EXPECT_EQ(t.tuple(1), (std::vector<double>{2}));
  EXPECT_EQ(t.utilities[1], 2.0);
  EXPECT_EQ(t.scalar_size(), 4u);
  // x = -1 answers p = -2, x = 1 answers p = 2.
  EXPECT_EQ(value_phase_step(local, {{1, -2.0}}), -1.0);
  EXPECT_EQ(value_phase_step(local, {{1, 2.0}}), 1.0);
}

TEST(UtilPhase, ZeroUtilityGivesZeroTable) {
  auto p = two_domains(quad(0, 1, 0, 0, 0, 0, 0), {-1, 1}, {-2, 2});
  auto tree = PseudoTree::build(p.graph(), 1);
  Trace trace;
  AgentContext ctx(p, &tree, 0, trace);
  DpopLocal local;
  UtilTable t = util_phase_step(ctx, {}, DpopConfig{3, kDefaultRowCap}, local);
  EXPECT_EQ(t.rows(), 3u);
  for (double u : t.utilities) EXPECT_EQ(u, 0.0);
}

TEST(ValuePhase, ArgmaxAndTies) {
  EXPECT_EQ(argmax_candidates({5, 9, 2}), 1u);
  EXPECT_EQ(argmax_candidates({5, 5}), 0u);
  EXPECT_THROW(argmax_candidates({}), ArgumentError);

  DpopLocal local;
  local.separator = {3};
  local.candidates = {-100, 0, 100};
  local.sep_grid.axes = {{-1, 1}};
  local.best = {1, 2};
  EXPECT_EQ(value_phase_step(local, {{3, -1.0}}), 0.0);
  EXPECT_EQ(value_phase_step(local, {{3, 1.0}}), 100.0);
  EXPECT_THROW(value_phase_step(local, {{4, 1.0}}), ProtocolError);
  EXPECT_THROW(value_phase_step(local, {{3, 0.5}}), ProtocolError);
}

TEST(Dpop, ThreeNodePathMatchesBruteForce) {
  auto p = gen_tree(3, 7);
  auto r = solve_dpop(p, {3, kDefaultRowCap});
  auto brute = enumerate_grid(p, grid_axes(p, 3));
  EXPECT_NEAR(r.reported_utility, brute.utility, tol(brute.utility));
  EXPECT_NEAR(evaluate_solution(p, r.assignment), brute.utility, tol(brute.utility));
}

TEST(Dpop, TenAgentTreeReportMatchesEvaluation) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto p = gen_tree(10, seed);
    auto r = solve_dpop(p, {5, kDefaultRowCap});
    double got = evaluate_solution(p, r.assignment);
    EXPECT_NEAR(r.reported_utility, got, tol(got));
  }
}

TEST(Dpop, ExactOnTheGrid) {
  for (std::size_t n = 3; n <= 8; ++n) {
    for (std::size_t d = 1; d <= 5; ++d) {
      for (std::uint64_t seed = 0; seed < 2; ++seed) {
        auto p = n % 2 ? gen_tree(n, seed * 31 + d) : gen_graph(n, 0.4, seed * 31 + d);
        auto r = solve_dpop(p, {d, kDefaultRowCap});
        auto brute = enumerate_grid(p, grid_axes(p, d));
        double got = evaluate_solution(p, r.assignment);
        EXPECT_NEAR(got, brute.utility, tol(brute.utility)) << "n=" << n << " d=" << d;
        EXPECT_NEAR(r.reported_utility, got, tol(got));
        // The assignment lies on the grid.
        for (VarIndex v = 0; v < n; ++v) {
          auto axis = discretize(p.domain(v), d);
          EXPECT_TRUE(std::binary_search(axis.begin(), axis.end(), r.assignment.at(v)));
        }
      }
    }
  }
}

TEST(Dpop, GridBoundAgainstFineOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto p = seed % 2 ? gen_tree(4, seed) : gen_graph(4, 0.5, seed);
    auto best = continuous_oracle(p, 200);
    for (std::size_t d : {2u, 3u, 5u}) {
      auto r = solve_dpop(p, {d, kDefaultRowCap});
      double got = evaluate_solution(p, r.assignment);
      double bound = error_bound_discrete(p, discretization_gap(p, d));
      EXPECT_LE(best.utility - got, bound) << "seed " << seed << " d " << d;
    }
  }
}

TEST(Dpop, TableSizesFollowSeparators) {
  auto p = gen_graph(9, 0.4, 3);
  auto r = solve_dpop(p, {4, kDefaultRowCap});
  auto t = PseudoTree::build(p.graph());
  for (const auto& m : r.trace.messages) {
    if (m.kind != MessageKind::kUtil) continue;
    EXPECT_EQ(m.rows, static_cast<std::size_t>(std::pow(4.0, t.separator(m.sender).size())));
    EXPECT_EQ(m.scalar_size, m.rows * (m.arity + 1));
  }
}

TEST(Dpop, RowCap) {
  auto p = gen_graph(10, 0.6, 1);
  EXPECT_THROW(solve_dpop(p, {20, 1000}), CapacityError);
  EXPECT_THROW(solve_dpop(p, {0, 1000}), ArgumentError);
}

}  // namespace
}  // namespace fdcop
