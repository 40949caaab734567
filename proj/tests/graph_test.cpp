#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "modcut/graph.hpp"
#include "modcut/io.hpp"
#include "modcut/modularity.hpp"
#include "oracle.hpp"

namespace modcut {
namespace {

Graph parse(const std::string& text, bool weighted = false) {
  std::istringstream in(text);
  return parse_edge_list(in, weighted);
}

Partition random_partition(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  std::vector<std::size_t> labels(n);
  for (auto& l : labels) l = pick(rng);
  return Partition(labels);
}

TEST(ParseEdgeList, Triangle) {
  const Graph g = parse("0 1\n1 2\n0 2\n");
  EXPECT_EQ(g.node_count(), 3u);
  ASSERT_EQ(g.edge_count(), 3u);
  for (const auto& e : g.edges()) EXPECT_EQ(e.weight, 1.0);
}

TEST(ParseEdgeList, WeightedEdge) {
  const Graph g = parse("0 1 2.5\n", true);
  EXPECT_EQ(g.node_count(), 2u);
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.edges()[0].weight, 2.5);
}

TEST(ParseEdgeList, DuplicatesAreSummed) {
  const Graph g = parse("0 1\n0 1\n");
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.edges()[0].weight, 2.0);
}

TEST(ParseEdgeList, Errors) {
  try {
    parse("0 1\n1 x y z\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse("0 1 abc\n", true), ParseError);
  EXPECT_THROW(parse("0 1 -1\n", true), ValidationError);
  EXPECT_THROW(parse("0 1 0\n", true), ValidationError);
}

TEST(ParseEdgeList, CommentsAndLabels) {
  const Graph g = parse("# header\nalice bob\n% other comment\nbob carol\n");
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.label(0), "alice");
  EXPECT_EQ(g.label(2), "carol");
}

TEST(ParsePairs, CountHeaderAddsIsolatedNodes) {
  std::istringstream in("n=5\n0 1\n1 2\n");
  const Graph g = parse_pairs(in);
  EXPECT_EQ(g.node_count(), 5u);
  EXPECT_EQ(g.degree(4), 0.0);
}

TEST(Degrees, Examples) {
  EXPECT_EQ(degrees(testing::triangle()), (std::vector<double>{2, 2, 2}));
  EXPECT_EQ(degrees(Graph(1, {{0, 0, 1.0}})), (std::vector<double>{2}));
  EXPECT_EQ(degrees(testing::two_triangles()), std::vector<double>(6, 2.0));
}

TEST(ModularityMatrix, Triangle) {
  const auto b = modularity_matrix(testing::triangle(), 1.0);
  for (NodeId i = 0; i < 3; ++i) {
    for (NodeId j = 0; j < 3; ++j) EXPECT_NEAR(b(i, j), i == j ? -2.0 / 3.0 : 1.0 / 3.0, 1e-15);
  }
  EXPECT_NEAR(b.entries.sum(), 0.0, 1e-14);
}

TEST(ModularityMatrix, GammaZeroIsAdjacency) {
  std::mt19937_64 rng(3);
  const Graph g = testing::random_graph(9, 0.4, rng, true);
  const auto b = modularity_matrix(g, 0.0);
  for (NodeId i = 0; i < g.node_count(); ++i) {
    for (NodeId j = 0; j < g.node_count(); ++j) EXPECT_EQ(b(i, j), g.adjacency(i, j));
  }
}

TEST(ModularityMatrix, EdgelessThrows) {
  try {
    modularity_matrix(Graph(3), 1.0);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "modularity undefined for 2m = 0");
  }
}

TEST(Modularity, Examples) {
  EXPECT_NEAR(modularity(testing::two_triangles(), Partition(std::vector<int>{0, 0, 0, 1, 1, 1})), 0.5,
              1e-15);
  EXPECT_NEAR(modularity(testing::triangle(), Partition::singletons(3)), -1.0 / 3.0, 1e-15);
  EXPECT_THROW(modularity(testing::triangle(), Partition::singletons(4)), ValidationError);
}

TEST(Modularity, MatchesMatrixFormAndAllInOneIsZero) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Graph g = testing::random_graph(3 + trial % 10, 0.4, rng, trial % 2 == 0);
    const double gamma = 0.5 + 0.1 * (trial % 10);
    const auto p = random_partition(g.node_count(), 3, rng);
    const auto b = modularity_matrix(g, gamma);
    double q = 0.0;
    for (NodeId i = 0; i < g.node_count(); ++i)
      for (NodeId j = 0; j < g.node_count(); ++j)
        if (p.same(i, j)) q += b(i, j);
    EXPECT_NEAR(modularity(g, p, gamma), q / b.two_m, 1e-9);
    EXPECT_NEAR(modularity(g, Partition::all_in_one(g.node_count()), 1.0), 0.0, 1e-12);
    double sum = 0.0;
    for (double d : g.degrees()) sum += d;
    EXPECT_EQ(sum, g.two_m());
    for (NodeId i = 0; i < g.node_count(); ++i)
      for (NodeId j = 0; j < g.node_count(); ++j) EXPECT_EQ(b(i, j), b(j, i));
  }
}

TEST(Contract, TrianglePair) {
  auto [h, map] = contract(testing::triangle(), {0, 1});
  EXPECT_EQ(h.node_count(), 2u);
  EXPECT_EQ(h.self_loop(0), 1.0);
  EXPECT_EQ(h.adjacency(0, 1), 2.0);
  EXPECT_EQ(h.two_m(), 6.0);
  EXPECT_EQ(map(0), 0u);
  EXPECT_EQ(map(1), 0u);
  EXPECT_EQ(map(2), 1u);
}

TEST(Contract, SingleNodeIsIdentity) {
  const Graph g = testing::barbell();
  auto [h, map] = contract(g, {4});
  EXPECT_EQ(h.node_count(), g.node_count());
  for (NodeId i = 0; i < g.node_count(); ++i) {
    for (NodeId j = 0; j < g.node_count(); ++j) EXPECT_EQ(h.adjacency(map(i), map(j)), g.adjacency(i, j));
  }
}

TEST(Contract, FullTriangle) {
  auto [h, map] = contract(testing::two_triangles(), {0, 1, 2});
  EXPECT_EQ(h.node_count(), 4u);
  EXPECT_EQ(h.self_loop(map(0)), 3.0);
  EXPECT_EQ(h.adjacency(map(3), map(4)), 1.0);
  EXPECT_EQ(h.adjacency(map(4), map(5)), 1.0);
  EXPECT_EQ(h.adjacency(map(3), map(5)), 1.0);
  EXPECT_EQ(h.two_m(), 12.0);
  EXPECT_THROW(contract(testing::triangle(), {0, 7}), ValidationError);
}

TEST(Contract, PreservesModularity) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 4 + trial % 9;
    const Graph g = testing::random_graph(n, 0.35, rng, trial % 3 == 0);
    std::vector<NodeId> merge;
    for (NodeId v = 0; v < n; ++v)
      if (coin(rng)) merge.push_back(v);
    if (merge.empty()) merge.push_back(0);
    auto labels = random_partition(n, 3, rng).labels();
    for (NodeId v : merge) labels[v] = labels[merge.front()];
    const Partition p(labels);
    auto [h, map] = contract(g, merge);
    EXPECT_EQ(h.two_m(), g.two_m());
    const double gamma = 0.7 + 0.2 * (trial % 4);
    EXPECT_NEAR(modularity(g, p, gamma), modularity(h, induced_partition(p, map), gamma), 1e-9);
  }
}

TEST(LargestComponent, Examples) {
  {
    auto [h, nodes] = largest_connected_component(testing::triangle());
    EXPECT_EQ(h.node_count(), 3u);
  }
  {
    auto [h, nodes] = largest_connected_component(Graph(4, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}));
    EXPECT_EQ(nodes, (std::vector<NodeId>{0, 1, 2}));
  }
  {
    auto [h, nodes] = largest_connected_component(testing::two_triangles());
    EXPECT_EQ(nodes, (std::vector<NodeId>{0, 1, 2}));
    EXPECT_EQ(h.edge_count(), 3u);
  }
  EXPECT_THROW(largest_connected_component(Graph()), ValidationError);
}

}  // namespace
}  // namespace modcut
