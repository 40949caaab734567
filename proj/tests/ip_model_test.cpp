#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "modcut/ip_model.hpp"
#include "modcut/modularity.hpp"
#include "oracle.hpp"

namespace modcut {
namespace {

bool satisfies_model(const SparseModel& model, const std::vector<double>& x) {
  const std::size_t n = model.n;
  for (std::size_t p = 0; p < x.size(); ++p)
    if (model.fixed_separated[p] && x[p] != 1.0) return false;
  for (const auto& t : model.triples) {
    const double a = x[pair_index(n, t.i, t.j)], b = x[pair_index(n, t.i, t.k)],
                 c = x[pair_index(n, t.j, t.k)];
    if (a > b + c || b > a + c || c > a + b) return false;
  }
  return true;
}

TEST(BuildSparseModel, Triangle) {
  const auto m = build_sparse_model(testing::triangle(), 1.0);
  ASSERT_EQ(m.triples.size(), 1u);
  EXPECT_EQ(m.triples[0], (Triple{0, 1, 2}));
  EXPECT_EQ(m.constraint_count(), 3u);
  EXPECT_EQ(m.variable_count(), 3u);
}

TEST(BuildSparseModel, DisconnectedEdges) {
  const auto m = build_sparse_model(Graph(4, {{0, 1, 1.0}, {2, 3, 1.0}}), 1.0);
  EXPECT_TRUE(m.triples.empty());
  EXPECT_EQ(m.fixed_separated[pair_index(4, 0, 2)], 1);
  EXPECT_EQ(m.fixed_separated[pair_index(4, 0, 1)], 0);
}

TEST(BuildSparseModel, Errors) { EXPECT_THROW(build_sparse_model(Graph(1), 1.0), ValidationError); }

TEST(BuildSparseModel, NoDuplicateTriples) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = build_sparse_model(testing::random_graph(10, 0.3, rng), 1.0);
    auto sorted = m.triples;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
    EXPECT_TRUE(std::is_sorted(m.triples.begin(), m.triples.end()));
  }
}

TEST(BuildSparseModel, FourCycleMatchesDenseCount) {
  // every 3-subset of C4 contains an edge, so the adjacent-pair fallback reaches all 4 triples
  const Graph cycle(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}});
  EXPECT_EQ(build_sparse_model(cycle, 1.0, Formulation::dense).constraint_count(), 12u);
  EXPECT_EQ(build_sparse_model(cycle, 1.0).constraint_count(), 12u);
}

TEST(BuildSparseModel, SmallerThanDenseOnSparseGraphs) {
  std::vector<Edge> ring;
  for (NodeId v = 0; v < 8; ++v) ring.push_back({v, (v + 1) % 8, 1.0});
  const Graph c8(8, ring);
  EXPECT_LT(build_sparse_model(c8, 1.0).constraint_count(),
            build_sparse_model(c8, 1.0, Formulation::dense).constraint_count());
  const Graph path(6, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}, {4, 5, 1.0}});
  EXPECT_LT(build_sparse_model(path, 1.0).constraint_count(),
            build_sparse_model(path, 1.0, Formulation::dense).constraint_count());
}

TEST(BuildSparseModel, ObjectiveOfEncodingIsModularity) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testing::random_graph(7, 0.4, rng, true);
    const auto m = build_sparse_model(g, 1.3);
    std::vector<std::size_t> labels(7);
    for (auto& l : labels) l = rng() % 3;
    const Partition p(labels);
    const auto pairs = pairs_from_partition(p);
    std::vector<double> x(m.variable_count());
    for (NodeId i = 0; i < 7; ++i)
      for (NodeId j = i + 1; j < 7; ++j) x[pair_index(7, i, j)] = pairs(i, j);
    EXPECT_NEAR(m.objective(x), modularity(g, p, 1.3), 1e-12);
  }
}

TEST(SolveLpRelaxation, Triangle) {
  const auto m = build_sparse_model(testing::triangle(), 1.0);
  const auto lp = solve_lp_relaxation(m, {});
  ASSERT_EQ(lp.status, LpStatus::optimal);
  EXPECT_NEAR(lp.objective_value, 0.0, 1e-12);
  EXPECT_EQ(lp.x, (std::vector<double>{0.0, 0.0, 0.0}));
}

TEST(SolveLpRelaxation, TriangleWithRightCut) {
  const auto m = build_sparse_model(testing::triangle(), 1.0);
  const std::vector<LinearCut> cuts{LinearCut::right_branch({0, 1, 2})};
  const auto lp = solve_lp_relaxation(m, cuts);
  ASSERT_EQ(lp.status, LpStatus::optimal);
  EXPECT_GE(lp.objective_value, -2.0 / 9.0 - 1e-12);
}

TEST(SolveLpRelaxation, ContradictoryCutIsInfeasible) {
  const auto m = build_sparse_model(testing::two_triangles(), 1.0);
  // right cut on {0,1,2} after merging the triple collapses to 0 >= 2
  auto [h, map] = contract(testing::two_triangles(), {0, 1, 2});
  const auto cut = LinearCut::right_branch({0, 1, 2}).remapped(map);
  EXPECT_TRUE(cut.terms.empty());
  EXPECT_TRUE(cut.trivially_infeasible());
  const std::vector<LinearCut> cuts{cut};
  EXPECT_EQ(solve_lp_relaxation(build_sparse_model(h, 1.0), cuts).status, LpStatus::infeasible);
  // the same restriction written as two opposing cuts
  const std::vector<LinearCut> opposing{LinearCut::separate_pair(0, 1), {{{0, 1, -1.0}}, 0.0}};
  EXPECT_EQ(solve_lp_relaxation(m, opposing).status, LpStatus::infeasible);
}

TEST(SolveLpRelaxation, UpperBoundIsValid) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const Graph g = testing::random_graph(4 + trial % 5, 0.3 + 0.25 * (trial % 3), rng, trial % 4 == 0);
    const auto lp = solve_lp_relaxation(build_sparse_model(g, 1.0), {});
    ASSERT_EQ(lp.status, LpStatus::optimal);
    EXPECT_GE(lp.objective_value, testing::brute_force_modularity(g).modularity - 1e-7) << trial;
  }
}

TEST(SolveLpRelaxation, SeparatingAllTrianglesGivesDenseValue) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testing::random_graph(8, 0.4, rng);
    LpOptions all;
    all.separate_all_triangles = true;
    const auto a = solve_lp_relaxation(build_sparse_model(g, 1.0), {}, all);
    const auto b = solve_lp_relaxation(build_sparse_model(g, 1.0, Formulation::dense), {});
    EXPECT_NEAR(a.objective_value, b.objective_value, 1e-9);
  }
}

TEST(FindViolatedTriples, Examples) {
  EXPECT_TRUE(find_violated_triples(std::vector<double>{0.0, 1.0, 1.0}, 3).empty());
  const auto half = find_violated_triples(std::vector<double>{0.5, 0.5, 0.5}, 3);
  ASSERT_EQ(half.size(), 1u);
  EXPECT_EQ(half[0].triple, (Triple{0, 1, 2}));
  EXPECT_DOUBLE_EQ(half[0].score, 0.5);
  // x_01 = 1, x_02 = 1, x_12 = 0 -> s = 2
  EXPECT_TRUE(find_violated_triples(std::vector<double>{1.0, 1.0, 0.0}, 3).empty());
  EXPECT_TRUE(find_violated_triples(std::vector<double>{0.0, 0.0, 0.0}, 3).empty());
}

// Every binary point satisfying the sparse model rounds, by the engine's
// closure rule, to a partition at least as good as the model objective.
TEST(ConstraintSufficiency, ClosureNeverLosesObjective) {
  std::mt19937_64 rng(51);
  std::size_t checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 4 + trial % 3;
    const Graph g = testing::random_graph(n, 0.3 + 0.2 * (trial % 3), rng, trial % 2 == 0);
    const auto m = build_sparse_model(g, 1.0);
    const std::size_t nv = m.variable_count();
    std::vector<double> x(nv);
    for (std::uint32_t mask = 0; mask < (1u << nv); ++mask) {
      for (std::size_t p = 0; p < nv; ++p) x[p] = (mask >> p) & 1u;
      if (!satisfies_model(m, x)) continue;
      ++checked;
      const double best = std::max(modularity(g, partition_from_pairs(round_pairs(x, n))),
                                   modularity(g, edge_closure(g, x)));
      EXPECT_GE(best, m.objective(x) - 1e-12);
      EXPECT_GE(modularity(g, edge_closure(g, x)), m.objective(x) - 1e-12);
    }
  }
  EXPECT_GT(checked, 0u);
}

// n = 7, 8: binary points near partition encodings, kept when model-feasible.
TEST(ConstraintSufficiency, SampledLargerGraphs) {
  std::mt19937_64 rng(53);
  std::size_t checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 7 + trial % 2;
    const Graph g = testing::random_graph(n, 0.25 + 0.1 * (trial % 4), rng);
    const auto m = build_sparse_model(g, 1.0);
    for (int sample = 0; sample < 2000; ++sample) {
      std::vector<std::size_t> labels(n);
      for (auto& l : labels) l = rng() % 3;
      const auto pairs = pairs_from_partition(Partition(labels));
      std::vector<double> x(m.variable_count());
      for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j) x[pair_index(n, i, j)] = pairs(i, j);
      for (int flip = 0, flips = 1 + sample % 4; flip < flips; ++flip) {
        auto& v = x[rng() % x.size()];
        v = 1.0 - v;
      }
      if (!satisfies_model(m, x)) continue;
      ++checked;
      EXPECT_GE(modularity(g, edge_closure(g, x)), m.objective(x) - 1e-12);
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(WriteLpFormat, ContainsSections) {
  std::ostringstream out;
  const std::vector<LinearCut> cuts{LinearCut::right_branch({0, 1, 2})};
  write_lp_format(out, build_sparse_model(testing::triangle(), 1.0), cuts);
  const auto text = out.str();
  for (const char* section : {"Maximize", "Subject To", "Bounds", "Binaries", "End"}) {
    EXPECT_NE(text.find(section), std::string::npos) << section;
  }
  EXPECT_NE(text.find(" c0: + 1 x_0_1 + 1 x_0_2 + 1 x_1_2 >= 2"), std::string::npos);
}

}  // namespace
}  // namespace modcut
