#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

#include "modcut/error.hpp"
#include "modcut/graph.hpp"

namespace modcut {

/**
 * Minimum-cardinality vertex separators by unit-capacity max-flow on the
 * node-split network: node v becomes v_in -> v_out with capacity 1, each
 * edge {u, v} becomes u_out -> v_in and v_out -> u_in with unbounded
 * capacity. The network is built once and reused for every query.
 *
 * Among several minimum cuts, the one nearest the sink is returned: a node
 * is in the separator when its in-half cannot reach the sink in the
 * residual network but its out-half can.
 */
class VertexSeparator {
 public:
  explicit VertexSeparator(const Graph& g) : n_(g.node_count()), head_(2 * n_, kNone) {
    for (NodeId v = 0; v < n_; ++v) add_arc(in(v), out(v), 1);
    for (const auto& e : g.edges()) {
      if (e.u == e.v) continue;
      add_arc(out(e.u), in(e.v), kInfinite);
      add_arc(out(e.v), in(e.u), kInfinite);
    }
  }

  /// Separator of the non-adjacent pair (s, t); empty when they are disconnected.
  std::vector<NodeId> separate(NodeId s, NodeId t) {
    if (s == t || s >= n_ || t >= n_) throw ValidationError("separator needs two distinct nodes");
    for (auto& a : arcs_) a.flow = 0;
    const std::size_t source = out(s);
    const std::size_t sink = in(t);
    std::vector<std::size_t> parent_arc(2 * n_);
    // a non-adjacent pair admits at most n - 2 disjoint paths
    for (std::size_t augmentations = 0;; ++augmentations) {
      if (augmentations > n_) throw ValidationError("separator queried for adjacent nodes");
      std::fill(parent_arc.begin(), parent_arc.end(), kNone);
      std::queue<std::size_t> queue;
      queue.push(source);
      parent_arc[source] = kNone - 1;
      while (!queue.empty() && parent_arc[sink] == kNone) {
        const std::size_t v = queue.front();
        queue.pop();
        for (std::size_t a = head_[v]; a != kNone; a = arcs_[a].next) {
          const auto& arc = arcs_[a];
          if (arc.capacity - arc.flow > 0 && parent_arc[arc.to] == kNone) {
            parent_arc[arc.to] = a;
            queue.push(arc.to);
          }
        }
      }
      if (parent_arc[sink] == kNone) break;
      // unit augmentation; every s-t path crosses a unit split arc
      for (std::size_t v = sink; v != source;) {
        const std::size_t a = parent_arc[v];
        arcs_[a].flow += 1;
        arcs_[a ^ 1].flow -= 1;
        v = arcs_[a ^ 1].to;
      }
    }

    // nodes that can still reach the sink through residual arcs
    std::vector<char> reaches_sink(2 * n_, 0);
    std::queue<std::size_t> queue;
    reaches_sink[sink] = 1;
    queue.push(sink);
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop();
      for (std::size_t a = head_[v]; a != kNone; a = arcs_[a].next) {
        // arc a is v -> w; its twin w -> v is usable when it has residual capacity
        const auto& twin = arcs_[a ^ 1];
        const std::size_t w = arcs_[a].to;
        if (!reaches_sink[w] && twin.capacity - twin.flow > 0) {
          reaches_sink[w] = 1;
          queue.push(w);
        }
      }
    }
    std::vector<NodeId> cut;
    if (!reaches_sink[source]) {
      for (NodeId v = 0; v < n_; ++v) {
        if (v != s && v != t && !reaches_sink[in(v)] && reaches_sink[out(v)]) cut.push_back(v);
      }
    }
    return cut;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  static constexpr long kInfinite = std::numeric_limits<long>::max() / 4;

  struct Arc {
    std::size_t to;
    std::size_t next;
    long capacity;
    long flow;
  };

  static std::size_t in(NodeId v) { return 2 * v; }
  static std::size_t out(NodeId v) { return 2 * v + 1; }

  void add_arc(std::size_t from, std::size_t to, long capacity) {
    arcs_.push_back({to, head_[from], capacity, 0});
    head_[from] = arcs_.size() - 1;
    arcs_.push_back({from, head_[to], 0, 0});
    head_[to] = arcs_.size() - 1;
  }

  std::size_t n_;
  std::vector<std::size_t> head_;
  std::vector<Arc> arcs_;
};

/**
 * K(i, j) for the sparse formulation. Non-adjacent pairs get a minimum
 * vertex separator; adjacent pairs have none and fall back to every other
 * node of their connected component. Pairs in different components get
 * the empty set.
 */
inline std::vector<NodeId> separating_set(const Graph& g, NodeId i, NodeId j) {
  if (i == j || i >= g.node_count() || j >= g.node_count()) {
    throw ValidationError("separating set needs two distinct valid nodes");
  }
  auto [comp, count] = connected_components(g);
  if (comp[i] != comp[j]) return {};
  if (g.adjacent(i, j)) {
    std::vector<NodeId> rest;
    for (NodeId k = 0; k < g.node_count(); ++k) {
      if (k != i && k != j && comp[k] == comp[i]) rest.push_back(k);
    }
    return rest;
  }
  VertexSeparator sep(g);
  return sep.separate(i, j);
}

}  // namespace modcut
