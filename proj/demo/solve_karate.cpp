// Solves the karate network three ways and compares the partitions.
//   ./solve_karate [edge-list]

#include <cstdio>
#include <string>

#include "modcut/branch_and_cut.hpp"
#include "modcut/heuristic.hpp"
#include "modcut/io.hpp"
#include "modcut/partition.hpp"

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : MODCUT_DATA_DIR "/karate.txt";
  try {
    const modcut::Graph g = modcut::read_graph_file(path);
    std::printf("%s: n=%zu m=%zu\n", path.c_str(), g.node_count(), g.edge_count());

    const auto quick = modcut::heuristic_modularity(g, 1.0);
    std::printf("heuristic     Q=%.6f  %zu communities\n", quick.objective, quick.partition.community_count());

    modcut::SolverOptions options;
    options.progress = [](const modcut::ProgressRecord& r) {
      std::printf("  level %zu: open=%zu incumbent=%.6f bound=%.6f\n", r.level, r.open_nodes, r.incumbent,
                  r.best_bound);
    };
    const auto approx = modcut::solve(g, 1.0, modcut::TerminationCriteria::approximate(0.1), options);
    std::printf("approximate   Q=%.6f  bound=%.6f gap=%.4f\n", approx.modularity, approx.best_bound, approx.gap);

    const auto exact = modcut::solve(g, 1.0);
    std::printf("exact         Q=%.6f  proven=%s  nodes=%zu\n", exact.modularity,
                exact.proven_optimal ? "yes" : "no", exact.stats.nodes_bounded);
    std::printf("AMI(heuristic, exact) = %.6f\n", modcut::ami(quick.partition, exact.partition));

    // a coarser resolution merges communities
    const auto coarse = modcut::solve(g, 0.5);
    std::printf("gamma=0.5     Q=%.6f  %zu communities\n", coarse.modularity,
                coarse.partition.community_count());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
