// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "fdcop/error.hpp"
#include "fdcop/model.hpp"

namespace fdcop {

/// DFS arrangement of a connected constraint graph. Tree edges link parents
/// and children; every other graph edge is a backedge from a node to one of
/// its ancestors (a pseudo-parent).
class PseudoTree {
 public:
  /// Deterministic DFS: neighbours visited in ascending index order. The
  /// default root is the highest-degree node, ties to the smallest index.
  static PseudoTree build(const ConstraintGraph& graph,
                          std::optional<VarIndex> root = std::nullopt) {
    const std::size_t n = graph.node_count;
    if (n == 0) throw StructureError("empty constraint graph");
    if (!graph.is_connected()) {
      throw StructureError("constraint graph is disconnected");
    }
    VarIndex r = root.value_or(0);
    if (!root) {
      for (VarIndex v = 1; v < n; ++v) {
        if (graph.degree(v) > graph.degree(r)) r = v;
      }
    }
    if (r >= n) throw ArgumentError("root out of range");

    PseudoTree t;
    t.root_ = r;
    t.parent_.assign(n, std::nullopt);
    t.children_.assign(n, {});
    t.pseudo_parents_.assign(n, {});
    t.pseudo_children_.assign(n, {});
    t.separator_.assign(n, {});
    t.depth_.assign(n, 0);

    std::vector<bool> visited(n, false);
    std::vector<bool> on_path(n, false);
    std::vector<std::pair<VarIndex, std::size_t>> stack{{r, 0}};
    visited[r] = true;
    on_path[r] = true;
    t.pre_order_.push_back(r);
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      const auto& adj = graph.adjacency[u];
      if (next < adj.size()) {
        VarIndex w = adj[next++];
        if (!visited[w]) {
          visited[w] = true;
          on_path[w] = true;
          t.parent_[w] = u;
          t.depth_[w] = t.depth_[u] + 1;
          t.children_[u].push_back(w);
          t.pre_order_.push_back(w);
          stack.emplace_back(w, 0);
        } else if (on_path[w] && t.parent_[u] != w) {
          // Undirected DFS: every non-tree edge reaches an ancestor.
          t.pseudo_parents_[u].push_back(w);
          t.pseudo_children_[w].push_back(u);
        }
      } else {
        on_path[u] = false;
        t.post_order_.push_back(u);
        stack.pop_back();
      }
    }
    for (auto& v : t.pseudo_parents_) std::sort(v.begin(), v.end());
    for (auto& v : t.pseudo_children_) std::sort(v.begin(), v.end());

    for (VarIndex v : t.post_order_) {
      std::vector<VarIndex> sep = t.pseudo_parents_[v];
      if (t.parent_[v]) sep.push_back(*t.parent_[v]);
      for (VarIndex c : t.children_[v]) {
        for (VarIndex s : t.separator_[c]) {
          if (s != v) sep.push_back(s);
        }
      }
      std::sort(sep.begin(), sep.end());
      sep.erase(std::unique(sep.begin(), sep.end()), sep.end());
      t.induced_width_ = std::max(t.induced_width_, sep.size());
      t.separator_[v] = std::move(sep);
    }
    return t;
  }

  std::size_t size() const { return parent_.size(); }
  VarIndex root() const { return root_; }
  std::optional<VarIndex> parent(VarIndex v) const { return parent_.at(v); }
  const std::vector<VarIndex>& children(VarIndex v) const {
    return children_.at(v);
  }
  const std::vector<VarIndex>& pseudo_parents(VarIndex v) const {
    return pseudo_parents_.at(v);
  }
  const std::vector<VarIndex>& pseudo_children(VarIndex v) const {
    return pseudo_children_.at(v);
  }
  /// Ancestors connected to v or to a descendant of v, ascending.
  const std::vector<VarIndex>& separator(VarIndex v) const {
    return separator_.at(v);
  }
  std::size_t induced_width() const { return induced_width_; }
  std::size_t depth(VarIndex v) const { return depth_.at(v); }
  bool is_leaf(VarIndex v) const { return children_.at(v).empty(); }
  /// Children before parents.
  const std::vector<VarIndex>& post_order() const { return post_order_; }
  /// Parents before children.
  const std::vector<VarIndex>& pre_order() const { return pre_order_; }

  bool is_ancestor(VarIndex ancestor, VarIndex v) const {
    while (parent_.at(v)) {
      v = *parent_[v];
      if (v == ancestor) return true;
    }
    return false;
  }

  bool operator==(const PseudoTree&) const = default;

 private:
  VarIndex root_ = 0;
  std::vector<std::optional<VarIndex>> parent_;
  std::vector<std::vector<VarIndex>> children_;
  std::vector<std::vector<VarIndex>> pseudo_parents_;
  std::vector<std::vector<VarIndex>> pseudo_children_;
  std::vector<std::vector<VarIndex>> separator_;
  std::vector<std::size_t> depth_;
  std::vector<VarIndex> pre_order_;
  std::vector<VarIndex> post_order_;
  std::size_t induced_width_ = 0;
};

}  // namespace fdcop
