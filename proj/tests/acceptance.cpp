// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "modcut/branch_and_cut.hpp"
#include "modcut/io.hpp"
#include "modcut/modularity.hpp"
#include "modcut/partition.hpp"
#include "oracle.hpp"

namespace {

using namespace modcut;
using Clock = std::chrono::steady_clock;

// Dense-formulation MILP optimum from tools/dense_milp_oracle.py (HiGHS).
constexpr double kKarateOptimum = 0.41978961209730437;

struct BatteryGraph {
  Graph graph;
  testing::BruteForceResult oracle;
  std::string tag;
};

std::vector<BatteryGraph> make_battery() {
  std::mt19937_64 rng(20240611);
  const double probs[] = {0.3, 0.5, 0.8};
  std::vector<BatteryGraph> out;
  for (int i = 0; i < 120; ++i) {
    const std::size_t n = 4 + static_cast<std::size_t>(i % 5);
    const double p = probs[(i / 5) % 3];
    const bool weighted = i >= 100;
    Graph g = testing::random_graph(n, p, rng, weighted);
    auto oracle = testing::brute_force_modularity(g);
    char tag[64];
    std::snprintf(tag, sizeof tag, "#%d n=%zu p=%.1f%s", i, n, p, weighted ? " weighted" : "");
    out.push_back({std::move(g), std::move(oracle), tag});
  }
  return out;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string first_issue;
int issues = 0;
void note(bool ok, const std::string& what) {
  if (ok) return;
  if (issues++ == 0) first_issue = what;
}
std::string summary(const std::string& ok_text) {
  std::string s = issues == 0 ? ok_text : std::to_string(issues) + " violation(s); first: " + first_issue;
  issues = 0;
  first_issue.clear();
  return s;
}

void oracle_equivalence(const std::vector<BatteryGraph>& battery) {
  const auto t0 = Clock::now();
  for (const auto& b : battery) {
    const auto r = solve(b.graph, 1.0);
    note(r.proven_optimal, b.tag + " not proven");
    note(std::abs(r.modularity - b.oracle.modularity) <= 1e-9,
         b.tag + " value " + std::to_string(r.modularity) + " vs " + std::to_string(b.oracle.modularity));
    note(std::abs(modularity(b.graph, r.partition, 1.0) - b.oracle.modularity) <= 1e-9,
         b.tag + " partition does not attain optimum");
  }
  const double secs = seconds_since(t0);
  note(secs < 120.0, "took " + std::to_string(secs) + " s");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%zu graphs in %.2f s", battery.size(), secs);
  report("oracle-equivalence", issues == 0, summary(buf));
}

void toy_table() {
  struct Toy {
    const char* name;
    Graph graph;
    double expected;
    Partition partition;
  };
  const Toy toys[] = {
      {"triangle", testing::triangle(), 0.0, Partition::all_in_one(3)},
      {"two_triangles", testing::two_triangles(), 0.5, Partition(std::vector<int>{0, 0, 0, 1, 1, 1})},
      {"barbell", testing::barbell(), 5.0 / 14.0, Partition(std::vector<int>{0, 0, 0, 1, 1, 1})},
  };
  std::string values;
  for (const auto& t : toys) {
    const auto oracle = testing::brute_force_modularity(t.graph);
    note(std::abs(oracle.modularity - t.expected) <= 1e-15, std::string(t.name) + " oracle disagrees with table");
    const auto t0 = Clock::now();
    const auto r = solve(t.graph, 1.0);
    const double secs = seconds_since(t0);
    note(r.modularity == oracle.modularity, std::string(t.name) + " value " + std::to_string(r.modularity));
    note(r.proven_optimal, std::string(t.name) + " not proven");
    note(r.partition == t.partition, std::string(t.name) + " unexpected partition");
    note(secs < 1.0, std::string(t.name) + " took " + std::to_string(secs) + " s");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%s=%.17g", values.empty() ? "" : " ", t.name, r.modularity);
    values += buf;
  }
  report("toy-table", issues == 0, summary(values));
}

void karate() {
  const Graph g = read_graph_file(MODCUT_DATA_DIR "/karate.txt");
  const auto t0 = Clock::now();
  const auto r = solve(g, 1.0, {SolveMode::exact, 0.0, 300.0});
  const double secs = seconds_since(t0);
  note(g.node_count() == 34 && g.edge_count() == 78, "karate file is not 34 nodes / 78 edges");
  note(r.proven_optimal, "not proven optimal");
  note(r.gap <= 1e-6, "gap " + std::to_string(r.gap));
  note(std::abs(r.modularity - kKarateOptimum) <= 1e-9, "value " + std::to_string(r.modularity));
  note(secs <= 300.0, "took " + std::to_string(secs) + " s");
  char buf[96];
  std::snprintf(buf, sizeof buf, "Q=%.17g gap=%.1e in %.3f s, %zu nodes", r.modularity, r.gap, secs,
                r.stats.nodes_bounded);
  report("karate-proven-optimal", issues == 0, summary(buf));
}

void approximate_honesty(const std::vector<BatteryGraph>& battery) {
  double worst = 0.0;
  for (const auto& b : battery) {
    const auto r = solve(b.graph, 1.0, TerminationCriteria::approximate(0.1));
    const double opt = b.oracle.modularity;
    note(opt - r.modularity <= 0.1 * std::abs(opt) + 1e-12, b.tag + " incumbent more than 10% below optimum");
    note(r.gap >= gap(r.modularity, opt) - 1e-12, b.tag + " reported gap understates the true gap");
    note(r.best_bound >= opt - 1e-9, b.tag + " bound below optimum");
    note(r.gap <= 0.1 + 1e-12, b.tag + " stopped with gap " + std::to_string(r.gap));
    worst = std::max(worst, opt - r.modularity);
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "worst shortfall %.3g", worst);
  report("approximate-honesty", issues == 0, summary(buf));
}

void trace_sandwich(const std::vector<BatteryGraph>& battery) {
  std::size_t records = 0;
  for (const auto& b : battery) {
    const auto r = solve(b.graph, 1.0);
    const double opt = b.oracle.modularity;
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      const auto& t = r.trace[i];
      if (i > 0) {
        note(t.incumbent >= r.trace[i - 1].incumbent, b.tag + " incumbent decreased");
        note(t.best_bound <= r.trace[i - 1].best_bound, b.tag + " best bound increased");
      }
      note(t.incumbent <= opt + 1e-9 && opt <= t.best_bound + 1e-9, b.tag + " optimum outside [incumbent, bound]");
    }
    note(!r.trace.empty(), b.tag + " empty trace");
    records += r.trace.size();
  }
  report("bound-monotonicity-sandwich", issues == 0, summary(std::to_string(records) + " trace records"));
}

void sparse_equals_dense(const std::vector<BatteryGraph>& battery) {
  SolverOptions dense;
  dense.formulation = Formulation::dense;
  std::size_t checked = 0;
  for (const auto& b : battery) {
    if (b.graph.node_count() > 7) continue;
    const double s = solve(b.graph, 1.0).modularity;
    const double d = solve(b.graph, 1.0, {}, dense).modularity;
    note(s == d, b.tag + " sparse " + std::to_string(s) + " dense " + std::to_string(d));
    ++checked;
  }
  report("sparse-equals-dense", issues == 0, summary(std::to_string(checked) + " graphs"));
}

void ami_suite() {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + static_cast<std::size_t>(trial) * 7;
    std::uniform_int_distribution<int> label(0, 1 + trial % 6);
    std::vector<int> a(n);
    for (auto& v : a) v = label(rng);
    std::vector<int> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = perm[static_cast<std::size_t>(a[i])] + 100;
    const Partition pa(a), pb(b);
    if (pa.community_count() < 2) continue;
    note(ami(pa, pa) == 1.0, "AMI(p, p) = " + std::to_string(ami(pa, pa)));
    note(ami(pa, pb) == 1.0, "AMI(p, permuted p) = " + std::to_string(ami(pa, pb)));
  }
  std::uniform_int_distribution<int> label(0, 3);
  double total = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> a(200), b(200);
    for (auto& v : a) v = label(rng);
    for (auto& v : b) v = label(rng);
    total += std::abs(ami(Partition(a), Partition(b)));
  }
  const double mean = total / 100.0;
  note(mean < 0.05, "mean |AMI| " + std::to_string(mean));
  char buf[64];
  std::snprintf(buf, sizeof buf, "mean |AMI| of random pairs %.4f", mean);
  report("ami", issues == 0, summary(buf));
}

void gamma_extremes() {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testing::random_graph(5 + static_cast<std::size_t>(trial % 4), 0.35, rng, trial % 2 == 1);
    const std::string tag = "#" + std::to_string(trial);
    auto [comp, count] = connected_components(g);
    note(solve(g, 0.0).partition == Partition(comp), tag + " gamma=0 is not one community per component");
    // every off-diagonal b_ij < 0 once gamma > max a_ij 2m / (d_i d_j)
    double threshold = 0.0;
    for (const auto& e : g.edges()) {
      if (e.u == e.v) continue;
      threshold = std::max(threshold, g.adjacency(e.u, e.v) * g.two_m() / (g.degree(e.u) * g.degree(e.v)));
    }
    const double high = threshold * 1.01;
    const auto b = modularity_matrix(g, high);
    // isolated nodes have b_ij = 0 with everyone and are skipped
    bool all_negative = true;
    for (NodeId i = 0; i < g.node_count(); ++i)
      for (NodeId j = i + 1; j < g.node_count(); ++j)
        if (g.degree(i) > 0.0 && g.degree(j) > 0.0) all_negative = all_negative && b(i, j) < 0.0;
    note(all_negative, tag + " threshold does not make b_ij negative");
    note(solve(g, high).partition == Partition::singletons(g.node_count()), tag + " high gamma is not singletons");
  }
  report("gamma-extremes", issues == 0, summary("20 graphs"));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const auto battery = make_battery();
  oracle_equivalence(battery);
  toy_table();
  karate();
  approximate_honesty(battery);
  trace_sandwich(battery);
  sparse_equals_dense(battery);
  ami_suite();
  gamma_extremes();
  std::printf("%d failed, total %.2f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
