#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "modcut/error.hpp"

namespace modcut {

using NodeId = std::size_t;

/// Undirected weighted edge. `u == v` is a self-loop.
struct Edge {
  NodeId u;
  NodeId v;
  double weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Neighbour entry in the adjacency lists (self-loops are kept apart).
struct Neighbor {
  NodeId node;
  double weight;
};

/**
 * Weighted undirected graph with self-loops.
 *
 * Edges are normalized at construction: endpoints are ordered so that
 * u <= v, parallel edges are summed and the list is sorted. A self-loop of
 * weight w contributes 2w to the degree of its node and w to the total
 * weight m, so the adjacency matrix carries a_ii = 2w.
 */
class Graph {
 public:
  Graph() = default;

  explicit Graph(std::size_t node_count, std::vector<Edge> edges = {},
                 std::vector<std::string> labels = {})
      : node_count_(node_count), labels_(std::move(labels)) {
    if (!labels_.empty() && labels_.size() != node_count_) {
      throw ValidationError("label count " + std::to_string(labels_.size()) +
                            " does not match node count " +
                            std::to_string(node_count_));
    }
    for (auto& e : edges) {
      if (e.u >= node_count_ || e.v >= node_count_) {
        throw ValidationError("edge (" + std::to_string(e.u) + ", " +
                              std::to_string(e.v) + ") references a node outside [0, " +
                              std::to_string(node_count_) + ")");
      }
      if (!(e.weight > 0.0)) {
        throw ValidationError("edge (" + std::to_string(e.u) + ", " +
                              std::to_string(e.v) + ") has nonpositive weight");
      }
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    for (const auto& e : edges) {
      if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v) {
        edges_.back().weight += e.weight;
      } else {
        edges_.push_back(e);
      }
    }

    adjacency_.assign(node_count_, {});
    self_loops_.assign(node_count_, 0.0);
    degrees_.assign(node_count_, 0.0);
    for (const auto& e : edges_) {
      total_weight_ += e.weight;
      if (e.u == e.v) {
        self_loops_[e.u] = e.weight;
        degrees_[e.u] += 2.0 * e.weight;
      } else {
        adjacency_[e.u].push_back({e.v, e.weight});
        adjacency_[e.v].push_back({e.u, e.weight});
        degrees_[e.u] += e.weight;
        degrees_[e.v] += e.weight;
      }
    }
    for (auto& list : adjacency_) {
      std::sort(list.begin(), list.end(),
                [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    }
  }

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Total edge weight m (self-loops counted once).
  double total_weight() const noexcept { return total_weight_; }
  double two_m() const noexcept { return 2.0 * total_weight_; }

  /// Neighbours of `i` other than itself, sorted by id.
  std::span<const Neighbor> neighbors(NodeId i) const { return adjacency_.at(i); }

  /// Weight of the self-loop on `i` (0 when absent).
  double self_loop(NodeId i) const { return self_loops_.at(i); }

  /// Adjacency matrix entry a_ij, with a_ii = 2 * self-loop weight.
  double adjacency(NodeId i, NodeId j) const {
    if (i == j) return 2.0 * self_loops_.at(i);
    const auto& list = adjacency_.at(i);
    auto it = std::lower_bound(list.begin(), list.end(), j,
                               [](const Neighbor& a, NodeId id) { return a.node < id; });
    return (it != list.end() && it->node == j) ? it->weight : 0.0;
  }

  bool adjacent(NodeId i, NodeId j) const { return i != j && adjacency(i, j) > 0.0; }

  double degree(NodeId i) const { return degrees_.at(i); }
  const std::vector<double>& degrees() const noexcept { return degrees_; }

  bool has_labels() const noexcept { return !labels_.empty(); }

  /// Original identifier of node `i`; its decimal id when no labels were kept.
  std::string label(NodeId i) const {
    return labels_.empty() ? std::to_string(i) : labels_.at(i);
  }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<double> self_loops_;
  std::vector<double> degrees_;
  std::vector<std::string> labels_;
  double total_weight_ = 0.0;
};

/// Node strengths d_i; self-loops count twice. Sums to 2m.
inline std::vector<double> degrees(const Graph& g) { return g.degrees(); }

/// Dense symmetric n x n matrix stored row-major.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n, double value = 0.0) : n_(n), data_(n * n, value) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  /// Writes both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double value) {
    data_[i * n_ + j] = value;
    data_[j * n_ + i] = value;
  }
  void add(std::size_t i, std::size_t j, double value) {
    data_[i * n_ + j] += value;
    if (i != j) data_[j * n_ + i] += value;
  }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

  double sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Modularity matrix b_ij = a_ij - gamma d_i d_j / 2m.
struct ModularityMatrix {
  SymmetricMatrix entries;
  double gamma = 1.0;
  double two_m = 0.0;

  std::size_t size() const noexcept { return entries.size(); }
  double operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
};

inline ModularityMatrix modularity_matrix(const Graph& g, double gamma) {
  if (!(g.two_m() > 0.0)) throw ValidationError("modularity undefined for 2m = 0");
  if (!(gamma >= 0.0)) throw ValidationError("resolution must be nonnegative");
  const std::size_t n = g.node_count();
  const double two_m = g.two_m();
  const auto& d = g.degrees();
  ModularityMatrix b{SymmetricMatrix(n), gamma, two_m};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) b.entries.set(i, j, -gamma * d[i] * d[j] / two_m);
    b.entries.add(i, i, 2.0 * g.self_loop(i));
    for (const auto& nb : g.neighbors(i)) {
      if (nb.node > i) b.entries.add(i, nb.node, nb.weight);
    }
  }
  return b;
}

/// Surjective map from parent node ids to child node ids.
struct ContractionMap {
  std::size_t parent_size = 0;
  std::size_t child_size = 0;
  std::vector<NodeId> assignment;

  NodeId operator()(NodeId parent) const { return assignment.at(parent); }

  static ContractionMap identity(std::size_t n) {
    ContractionMap map{n, n, std::vector<NodeId>(n)};
    std::iota(map.assignment.begin(), map.assignment.end(), NodeId{0});
    return map;
  }

  /// Map applying `*this` first and then `next`.
  ContractionMap then(const ContractionMap& next) const {
    if (next.parent_size != child_size) {
      throw ValidationError("contraction maps do not compose");
    }
    ContractionMap out{parent_size, next.child_size, std::vector<NodeId>(parent_size)};
    for (std::size_t i = 0; i < parent_size; ++i) out.assignment[i] = next(assignment[i]);
    return out;
  }
};

/**
 * Contracts an arbitrary grouping of nodes. `group[v]` is the child id of
 * parent node v; groups must be numbered 0..k-1 with none empty. Edges
 * between groups are summed, edges inside a group (self-loops included,
 * each counted once) become the child's self-loop. 2m is preserved.
 */
inline Graph contract_groups(const Graph& g, const ContractionMap& map) {
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const auto& e : g.edges()) edges.push_back({map(e.u), map(e.v), e.weight});
  std::vector<std::string> labels;
  if (g.has_labels()) {
    labels.resize(map.child_size);
    for (NodeId v = 0; v < g.node_count(); ++v) {
      auto& l = labels[map(v)];
      l = l.empty() ? g.label(v) : l + "+" + g.label(v);
    }
  }
  return Graph(map.child_size, std::move(edges), std::move(labels));
}

/**
 * Merges `merge_set` into a single node. Child ids follow parent order,
 * with the merged node placed at the position of its smallest member.
 */
inline std::pair<Graph, ContractionMap> contract(const Graph& g,
                                                 std::span<const NodeId> merge_set) {
  const std::size_t n = g.node_count();
  if (merge_set.empty()) throw ValidationError("merge set is empty");
  std::vector<char> merged(n, 0);
  for (NodeId v : merge_set) {
    if (v >= n) throw ValidationError("merge set node " + std::to_string(v) + " out of range");
    merged[v] = 1;
  }
  const NodeId anchor = *std::min_element(merge_set.begin(), merge_set.end());
  ContractionMap map{n, 0, std::vector<NodeId>(n)};
  NodeId next = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (merged[v] && v != anchor) continue;
    map.assignment[v] = next++;
  }
  for (NodeId v = 0; v < n; ++v) {
    if (merged[v]) map.assignment[v] = map.assignment[anchor];
  }
  map.child_size = next;
  Graph child = contract_groups(g, map);
  return {std::move(child), std::move(map)};
}

inline std::pair<Graph, ContractionMap> contract(const Graph& g,
                                                 std::initializer_list<NodeId> merge_set) {
  return contract(g, std::span<const NodeId>(merge_set.begin(), merge_set.size()));
}

/// Component id per node (numbered by smallest member) and the component count.
inline std::pair<std::vector<std::size_t>, std::size_t> connected_components(const Graph& g) {
  const std::size_t n = g.node_count();
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> comp(n, unset);
  std::size_t count = 0;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (comp[s] != unset) continue;
    comp[s] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(v)) {
        if (comp[nb.node] == unset) {
          comp[nb.node] = count;
          stack.push_back(nb.node);
        }
      }
    }
    ++count;
  }
  return {std::move(comp), count};
}

/// Subgraph induced by `nodes`; child id i corresponds to parent `nodes[i]`.
inline Graph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> local(g.node_count(), unset);
  for (std::size_t i = 0; i < nodes.size(); ++i) local.at(nodes[i]) = i;
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    if (local[e.u] != unset && local[e.v] != unset) {
      edges.push_back({local[e.u], local[e.v], e.weight});
    }
  }
  std::vector<std::string> labels;
  labels.reserve(nodes.size());
  for (NodeId v : nodes) labels.push_back(g.label(v));
  return Graph(nodes.size(), std::move(edges), std::move(labels));
}

/**
 * Induced subgraph on the component with the most nodes; ties go to the
 * component holding the smallest node id. The mapping lists, for every
 * child node, its id in `g`.
 */
inline std::pair<Graph, std::vector<NodeId>> largest_connected_component(const Graph& g) {
  if (g.node_count() == 0) throw ValidationError("graph is empty");
  auto [comp, count] = connected_components(g);
  std::vector<std::size_t> sizes(count, 0);
  for (auto c : comp) ++sizes[c];
  // components are numbered by smallest member, so the first maximum wins ties
  const auto best = static_cast<std::size_t>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<NodeId> nodes;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (comp[v] == best) nodes.push_back(v);
  }
  Graph sub = induced_subgraph(g, nodes);
  return {std::move(sub), std::move(nodes)};
}

}  // namespace modcut
