#pragma once

#include <string>
#include <vector>

#include "modcut/graph.hpp"
#include "modcut/partition.hpp"

namespace modcut {

/**
 * Modularity of `p` on `g`:
 *   Q = (1/2m) sum over ordered pairs (i, j) in the same community of
 *       (a_ij - gamma d_i d_j / 2m),
 * diagonal terms included. Evaluated per community in O(n + |E|).
 */
inline double modularity(const Graph& g, const Partition& p, double gamma = 1.0) {
  if (p.size() != g.node_count()) {
    throw ValidationError("partition covers " + std::to_string(p.size()) +
                          " nodes but the graph has " + std::to_string(g.node_count()));
  }
  const double two_m = g.two_m();
  if (!(two_m > 0.0)) throw ValidationError("modularity undefined for 2m = 0");
  std::vector<double> internal(p.community_count(), 0.0);
  std::vector<double> strength(p.community_count(), 0.0);
  for (const auto& e : g.edges()) {
    if (p.same(e.u, e.v)) internal[p[e.u]] += 2.0 * e.weight;
  }
  for (NodeId i = 0; i < g.node_count(); ++i) strength[p[i]] += g.degree(i);
  double q = 0.0;
  for (std::size_t c = 0; c < internal.size(); ++c) {
    q += internal[c] / two_m - gamma * (strength[c] / two_m) * (strength[c] / two_m);
  }
  return q;
}

/// Partition of the child graph induced by a parent partition that is constant on every group.
inline Partition induced_partition(const Partition& parent, const ContractionMap& map) {
  std::vector<std::size_t> labels(map.child_size);
  for (NodeId v = 0; v < map.parent_size; ++v) labels[map(v)] = parent[v];
  return Partition(labels);
}

/// Lifts a partition of the child graph back onto parent node ids.
inline Partition lift_partition(const Partition& child, const ContractionMap& map) {
  std::vector<std::size_t> labels(map.parent_size);
  for (NodeId v = 0; v < map.parent_size; ++v) labels[v] = child[map(v)];
  return Partition(labels);
}

}  // namespace modcut
