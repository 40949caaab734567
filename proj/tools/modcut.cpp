// modcut command-line front end: solve, eval-ami, bench.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "modcut/branch_and_cut.hpp"
#include "modcut/heuristic.hpp"
#include "modcut/io.hpp"
#include "modcut/ip_model.hpp"
#include "modcut/modularity.hpp"
#include "modcut/partition.hpp"

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

enum class Mode { exact, approximate, heuristic };
enum class Output { json, csv, plain };

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitUnproven = 2;

struct RunConfig {
  std::string input_path;
  modcut::GraphFormat format = modcut::GraphFormat::edgelist;
  bool weighted = false;
  double gamma = 1.0;
  Mode mode = Mode::exact;
  double gap_tolerance = 0.0;
  std::optional<double> time_limit_s;
  std::optional<double> delta;
  std::uint64_t seed = 0;
  int restarts = 3;
  bool lcc_only = false;
  Output output = Output::json;
  int workers = 1;
  bool progress = false;
  bool omit_timing = false;
  std::string dump_lp;
  std::string write_partition;
};

const char* to_string(Mode m) {
  switch (m) {
    case Mode::exact: return "exact";
    case Mode::approximate: return "approximate";
    case Mode::heuristic: return "heuristic";
  }
  return "exact";
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

void validate(const RunConfig& cfg) {
  if (cfg.mode == Mode::approximate && !(cfg.gap_tolerance > 0.0) && !cfg.time_limit_s) {
    throw modcut::ValidationError("approximate mode needs --gap-tolerance > 0 or --time-limit");
  }
  if (cfg.workers < 1) throw modcut::ValidationError("--workers must be at least 1");
  if (cfg.restarts < 1) throw modcut::ValidationError("--restarts must be at least 1");
}

// Everything a report needs, whatever the mode.
struct Outcome {
  modcut::Graph graph;
  modcut::Partition partition;
  double modularity = 0.0;
  std::optional<double> best_bound;
  std::optional<double> gap;
  bool proven_optimal = false;
  std::string termination_reason;
  double runtime_s = 0.0;
  std::optional<modcut::SolveStats> stats;
};

modcut::Graph load(const RunConfig& cfg) {
  auto g = modcut::read_graph_file(cfg.input_path, cfg.format, cfg.weighted);
  auto [comp, count] = modcut::connected_components(g);
  if (cfg.lcc_only) return modcut::largest_connected_component(g).first;
  if (count > 1 && cfg.output != Output::csv) {
    std::cerr << "warning: input has " << count
              << " connected components; each is solved separately (--lcc-only keeps the largest)\n";
  }
  return g;
}

Outcome run(const RunConfig& cfg, modcut::Graph g) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  Outcome out;
  modcut::HeuristicConfig heuristic;
  heuristic.random_seed = cfg.seed;
  heuristic.restarts = cfg.restarts;

  if (!cfg.dump_lp.empty()) {
    std::ofstream lp(cfg.dump_lp);
    if (!lp) throw modcut::Error("cannot write '" + cfg.dump_lp + "'");
    modcut::write_lp_format(lp, modcut::build_sparse_model(g, cfg.gamma));
  }

  if (cfg.mode == Mode::heuristic) {
    auto found = modcut::heuristic_modularity(g, cfg.gamma, heuristic);
    out.partition = std::move(found.partition);
    out.modularity = found.objective;
    out.termination_reason = "heuristic";
  } else {
    modcut::TerminationCriteria criteria;
    criteria.mode = cfg.mode == Mode::exact ? modcut::SolveMode::exact : modcut::SolveMode::approximate;
    criteria.gap_tolerance = cfg.mode == Mode::exact ? 0.0 : cfg.gap_tolerance;
    criteria.time_limit_seconds = cfg.time_limit_s;
    modcut::SolverOptions options;
    options.heuristic = heuristic;
    options.delta = cfg.delta;
    options.workers = cfg.workers;
    if (cfg.progress) {
      std::cerr << "level,open_nodes,incumbent,best_bound,gap,elapsed_s\n";
      options.progress = [](const modcut::ProgressRecord& r) {
        std::cerr << r.level << ',' << r.open_nodes << ',' << fmt(r.incumbent) << ','
                  << fmt(r.best_bound) << ',' << fmt(r.gap) << ',' << fmt(r.elapsed_s) << '\n';
      };
    }
    auto report = modcut::solve(g, cfg.gamma, criteria, options);
    out.partition = std::move(report.partition);
    out.modularity = report.modularity;
    out.best_bound = report.best_bound;
    out.gap = report.gap;
    out.proven_optimal = report.proven_optimal;
    out.termination_reason = modcut::to_string(report.termination_reason);
    out.stats = report.stats;
  }
  out.runtime_s = std::chrono::duration<double>(Clock::now() - start).count();
  out.graph = std::move(g);
  return out;
}

json stats_json(const modcut::SolveStats& s) {
  return {{"nodes_created", s.nodes_created},     {"nodes_bounded", s.nodes_bounded},
          {"levels", s.levels},                   {"max_depth", s.max_depth},
          {"branched", s.branched},               {"pair_branches", s.pair_branches},
          {"fathomed_integer", s.fathomed_integer}, {"fathomed_infeasible", s.fathomed_infeasible},
          {"fathomed_bound", s.fathomed_bound},   {"lp_solves", s.lp_solves},
          {"lp_iterations", s.lp_iterations},     {"components", s.components}};
}

json report_json(const RunConfig& cfg, const Outcome& o) {
  json communities = json::array();
  for (const auto& members : o.partition.communities()) {
    json labels = json::array();
    for (auto v : members) labels.push_back(o.graph.label(v));
    communities.push_back(std::move(labels));
  }
  json j;
  j["input"] = fs::path(cfg.input_path).filename().string();
  j["mode"] = to_string(cfg.mode);
  j["gamma"] = cfg.gamma;
  j["seed"] = cfg.seed;
  j["n"] = o.graph.node_count();
  j["m"] = o.graph.edge_count();
  j["total_weight"] = o.graph.total_weight();
  j["modularity"] = o.modularity;
  j["best_bound"] = o.best_bound ? json(*o.best_bound) : json(nullptr);
  j["gap"] = o.gap ? json(*o.gap) : json(nullptr);
  j["proven_optimal"] = o.proven_optimal;
  j["termination_reason"] = o.termination_reason;
  j["community_count"] = o.partition.community_count();
  j["communities"] = std::move(communities);
  if (!cfg.omit_timing) j["runtime_s"] = o.runtime_s;
  j["stats"] = o.stats ? stats_json(*o.stats) : json(nullptr);
  return j;
}

void print_report(const RunConfig& cfg, const Outcome& o) {
  const auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  switch (cfg.output) {
    case Output::json:
      std::cout << report_json(cfg, o).dump(2) << '\n';
      break;
    case Output::csv:
      std::cout << "input,mode,gamma,n,m,modularity,best_bound,gap,proven_optimal,"
                   "termination_reason,community_count,runtime_s,nodes_bounded\n";
      std::cout << csv_quote(fs::path(cfg.input_path).filename().string()) << ',' << to_string(cfg.mode)
                << ',' << fmt(cfg.gamma) << ',' << o.graph.node_count() << ',' << o.graph.edge_count()
                << ',' << fmt(o.modularity) << ',' << opt(o.best_bound) << ',' << opt(o.gap) << ','
                << (o.proven_optimal ? "true" : "false") << ',' << o.termination_reason << ','
                << o.partition.community_count() << ',' << (cfg.omit_timing ? "" : fmt(o.runtime_s))
                << ',' << (o.stats ? std::to_string(o.stats->nodes_bounded) : "") << '\n';
      break;
    case Output::plain: {
      std::cout << "modularity      " << fmt(o.modularity) << '\n'
                << "best bound      " << (o.best_bound ? fmt(*o.best_bound) : "n/a") << '\n'
                << "gap             " << (o.gap ? fmt(*o.gap) : "n/a") << '\n'
                << "proven optimal  " << (o.proven_optimal ? "yes" : "no") << " ("
                << o.termination_reason << ")\n"
                << "nodes / edges   " << o.graph.node_count() << " / " << o.graph.edge_count() << '\n';
      if (!cfg.omit_timing) std::printf("runtime         %.3f s\n", o.runtime_s);
      std::size_t c = 0;
      for (const auto& members : o.partition.communities()) {
        std::cout << "community " << c++ << ':';
        for (auto v : members) std::cout << ' ' << o.graph.label(v);
        std::cout << '\n';
      }
      break;
    }
  }
}

int cmd_solve(const RunConfig& cfg) {
  validate(cfg);
  const auto outcome = run(cfg, load(cfg));
  print_report(cfg, outcome);
  if (!cfg.write_partition.empty()) {
    std::ofstream out(cfg.write_partition);
    if (!out) throw modcut::Error("cannot write '" + cfg.write_partition + "'");
    modcut::write_partition(out, outcome.graph, outcome.partition);
  }
  return cfg.mode == Mode::exact && !outcome.proven_optimal ? kExitUnproven : kExitOk;
}

int cmd_eval_ami(const std::string& a, const std::string& b, modcut::AmiNormalizer normalizer) {
  auto [pa, pb] = modcut::align_partitions(modcut::read_partition_file(a), modcut::read_partition_file(b));
  std::printf("%.6f\n", modcut::ami(pa, pb, normalizer));
  return kExitOk;
}

int cmd_bench(const std::string& dir, RunConfig cfg) {
  validate(cfg);
  if (!fs::is_directory(dir)) throw modcut::Error("'" + dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && !name.starts_with('.')) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  cfg.output = Output::csv;  // keeps load() quiet about components
  std::cout << "name,n,m,modularity,best_bound,gap,proven_optimal,runtime_s,error\n";
  for (const auto& file : files) {
    const auto name = file.filename().string();
    cfg.input_path = file.string();
    try {
      const auto o = run(cfg, load(cfg));
      const auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
      std::cout << csv_quote(name) << ',' << o.graph.node_count() << ',' << o.graph.edge_count() << ','
                << fmt(o.modularity) << ',' << opt(o.best_bound) << ',' << opt(o.gap) << ','
                << (o.proven_optimal ? "true" : "false") << ','
                << (cfg.omit_timing ? "" : fmt(o.runtime_s)) << ",\n";
    } catch (const std::exception& e) {
      std::cout << csv_quote(name) << ",,,,,,,," << csv_quote(e.what()) << '\n';
    }
    std::cout.flush();
  }
  return kExitOk;
}

void add_run_options(CLI::App& cmd, RunConfig& cfg) {
  const std::map<std::string, modcut::GraphFormat> formats{{"edgelist", modcut::GraphFormat::edgelist},
                                                           {"pairs", modcut::GraphFormat::pairs}};
  const std::map<std::string, Mode> modes{
      {"exact", Mode::exact}, {"approximate", Mode::approximate}, {"heuristic", Mode::heuristic}};
  cmd.add_option("--format", cfg.format, "Input format: edgelist or pairs")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  cmd.add_flag("--weighted", cfg.weighted, "Read a third column as edge weight");
  cmd.add_option("--gamma", cfg.gamma, "Resolution parameter")->check(CLI::NonNegativeNumber);
  cmd.add_option("--mode", cfg.mode, "exact, approximate or heuristic")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  cmd.add_option("--gap-tolerance", cfg.gap_tolerance, "Relative gap at which approximate mode stops")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--time-limit", cfg.time_limit_s, "Wall-clock limit in seconds")->check(CLI::PositiveNumber);
  cmd.add_option("--delta", cfg.delta, "Right-branch heuristic penalty in modularity units (default 2/2m)")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--seed", cfg.seed, "Heuristic seed")->envname("MODCUT_SEED");
  cmd.add_option("--restarts", cfg.restarts, "Heuristic restarts");
  cmd.add_option("--workers", cfg.workers, "Threads bounding tree nodes")->envname("MODCUT_WORKERS");
  cmd.add_flag("--lcc-only", cfg.lcc_only, "Keep only the largest connected component");
  cmd.add_flag("--omit-timing", cfg.omit_timing, "Leave wall-clock fields out of the output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum-modularity community detection by branch-and-cut"};
  app.require_subcommand(1);

  RunConfig solve_cfg;
  auto* solve = app.add_subcommand("solve", "Find a maximum-modularity partition of a graph");
  solve->add_option("input", solve_cfg.input_path, "Graph file")->required();
  add_run_options(*solve, solve_cfg);
  const std::map<std::string, Output> outputs{
      {"json", Output::json}, {"csv", Output::csv}, {"plain", Output::plain}};
  solve->add_option("--output", solve_cfg.output, "json, csv or plain")
      ->transform(CLI::CheckedTransformer(outputs, CLI::ignore_case));
  solve->add_flag("--progress", solve_cfg.progress, "Print search progress as CSV on stderr");
  solve->add_option("--dump-lp", solve_cfg.dump_lp, "Write the root model in LP format to this file");
  solve->add_option("--write-partition", solve_cfg.write_partition,
                    "Write `node community` lines to this file");

  std::string ami_a, ami_b;
  modcut::AmiNormalizer normalizer = modcut::AmiNormalizer::arithmetic;
  auto* eval = app.add_subcommand("eval-ami", "Adjusted mutual information of two partition files");
  eval->add_option("first", ami_a, "Partition file (`node community` lines)")->required();
  eval->add_option("second", ami_b, "Partition file over the same nodes")->required();
  const std::map<std::string, modcut::AmiNormalizer> normalizers{
      {"arithmetic", modcut::AmiNormalizer::arithmetic},
      {"geometric", modcut::AmiNormalizer::geometric},
      {"max", modcut::AmiNormalizer::max},
      {"min", modcut::AmiNormalizer::min}};
  eval->add_option("--normalizer", normalizer, "Entropy mean in the denominator")
      ->transform(CLI::CheckedTransformer(normalizers, CLI::ignore_case));

  RunConfig bench_cfg;
  std::string corpus;
  auto* bench = app.add_subcommand("bench", "Solve every graph file in a directory, one CSV row each");
  bench->add_option("corpus", corpus, "Directory of graph files")->required();
  add_run_options(*bench, bench_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  try {
    if (*solve) return cmd_solve(solve_cfg);
    if (*eval) return cmd_eval_ami(ami_a, ami_b, normalizer);
    if (*bench) return cmd_bench(corpus, bench_cfg);
  } catch (const modcut::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitBadInput;
}
