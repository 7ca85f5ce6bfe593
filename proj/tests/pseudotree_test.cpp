// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fdcop/generators.hpp"
#include "fdcop/pseudotree.hpp"

namespace fdcop {
namespace {

using Vars = std::vector<VarIndex>;

TEST(PseudoTree, PathRootedAtMiddle) {
  auto g = ConstraintGraph::from_edges(3, {{0, 1}, {1, 2}});
  auto t = PseudoTree::build(g);
  EXPECT_EQ(t.root(), 1u);
  EXPECT_EQ(t.children(1), (Vars{0, 2}));
  EXPECT_EQ(t.separator(0), (Vars{1}));
  EXPECT_EQ(t.separator(2), (Vars{1}));
  EXPECT_TRUE(t.separator(1).empty());
  EXPECT_EQ(t.induced_width(), 1u);
}

TEST(PseudoTree, Triangle) {
  auto g = ConstraintGraph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  auto t = PseudoTree::build(g);
  std::size_t tree_edges = 0, backedges = 0, with_pp = 0;
  for (VarIndex v = 0; v < 3; ++v) {
    tree_edges += t.children(v).size();
    backedges += t.pseudo_parents(v).size();
    with_pp += !t.pseudo_parents(v).empty();
  }
  EXPECT_EQ(tree_edges, 2u);
  EXPECT_EQ(backedges, 1u);
  EXPECT_EQ(with_pp, 1u);
  EXPECT_EQ(t.induced_width(), 2u);
}

TEST(PseudoTree, RejectsDisconnected) {
  auto g = ConstraintGraph::from_edges(4, {{0, 1}, {2, 3}});
  EXPECT_THROW(PseudoTree::build(g), StructureError);
}

TEST(PseudoTree, ExplicitRoot) {
  auto g = ConstraintGraph::from_edges(3, {{0, 1}, {1, 2}});
  auto t = PseudoTree::build(g, 0);
  EXPECT_EQ(t.root(), 0u);
  EXPECT_EQ(t.parent(2), std::optional<VarIndex>(1));
  EXPECT_THROW(PseudoTree::build(g, 5), ArgumentError);
}

void audit(const ConstraintGraph& g, const PseudoTree& t) {
  const std::size_t n = g.node_count;
  // Spanning rooted tree.
  std::size_t roots = 0, tree_edges = 0;
  for (VarIndex v = 0; v < n; ++v) {
    if (!t.parent(v)) ++roots;
    tree_edges += t.children(v).size();
    for (VarIndex c : t.children(v)) EXPECT_EQ(t.parent(c), std::optional<VarIndex>(v));
  }
  EXPECT_EQ(roots, 1u);
  EXPECT_EQ(tree_edges, n - 1);
  EXPECT_EQ(t.pre_order().size(), n);
  EXPECT_EQ(t.post_order().size(), n);

  // Every edge is a tree edge or a backedge along one branch.
  for (auto [u, v] : g.edges) {
    bool tree = t.parent(u) == std::optional<VarIndex>(v) ||
                t.parent(v) == std::optional<VarIndex>(u);
    bool same_branch = t.is_ancestor(u, v) || t.is_ancestor(v, u);
    EXPECT_TRUE(same_branch) << u << "-" << v;
    if (!tree) {
      VarIndex low = t.is_ancestor(u, v) ? v : u;
      VarIndex high = low == u ? v : u;
      const auto& pp = t.pseudo_parents(low);
      EXPECT_TRUE(std::binary_search(pp.begin(), pp.end(), high));
      const auto& pc = t.pseudo_children(high);
      EXPECT_TRUE(std::binary_search(pc.begin(), pc.end(), low));
    }
  }

  // Separator recurrence, bottom-up.
  std::size_t width = 0;
  for (VarIndex v : t.post_order()) {
    std::set<VarIndex> want(t.pseudo_parents(v).begin(), t.pseudo_parents(v).end());
    if (t.parent(v)) want.insert(*t.parent(v));
    for (VarIndex c : t.children(v)) {
      for (VarIndex s : t.separator(c)) {
        if (s != v) want.insert(s);
      }
    }
    EXPECT_EQ(t.separator(v), Vars(want.begin(), want.end()));
    for (VarIndex s : t.separator(v)) EXPECT_TRUE(t.is_ancestor(s, v));
    width = std::max(width, want.size());
  }
  EXPECT_EQ(t.induced_width(), width);
}

TEST(PseudoTree, RandomGraphAncestorAudit) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto p = gen_graph(20, 0.2, seed);
    auto t = PseudoTree::build(p.graph());
    audit(p.graph(), t);
    EXPECT_EQ(t, PseudoTree::build(p.graph()));
  }
}

TEST(PseudoTree, TreesHaveWidthOne) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto p = gen_tree(25, seed);
    auto t = PseudoTree::build(p.graph());
    audit(p.graph(), t);
    EXPECT_EQ(t.induced_width(), 1u);
    for (VarIndex v = 0; v < 25; ++v) {
      EXPECT_TRUE(t.pseudo_parents(v).empty());
      if (t.parent(v)) {
        EXPECT_EQ(t.separator(v), (Vars{*t.parent(v)}));
      }
    }
  }
}

TEST(PseudoTree, RootIsMaxDegreeSmallestIndex) {
  // Star around 2 plus a pendant edge: 2 has the largest degree.
  auto g = ConstraintGraph::from_edges(5, {{0, 2}, {1, 2}, {2, 3}, {3, 4}});
  EXPECT_EQ(PseudoTree::build(g).root(), 2u);
  // A cycle: all degrees tie, so the smallest index wins.
  auto c = ConstraintGraph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  EXPECT_EQ(PseudoTree::build(c).root(), 0u);
}

}  // namespace
}  // namespace fdcop
