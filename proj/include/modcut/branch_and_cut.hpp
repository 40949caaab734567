#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "modcut/error.hpp"
#include "modcut/graph.hpp"
#include "modcut/heuristic.hpp"
#include "modcut/ip_model.hpp"
#include "modcut/modularity.hpp"
#include "modcut/partition.hpp"

namespace modcut {

enum class SolveMode { exact, approximate };

struct TerminationCriteria {
  SolveMode mode = SolveMode::exact;
  double gap_tolerance = 0.0;
  std::optional<double> time_limit_seconds;

  static TerminationCriteria exact() { return {}; }
  static TerminationCriteria approximate(double gap, std::optional<double> seconds = std::nullopt) {
    return {SolveMode::approximate, gap, seconds};
  }
};

/// One line of the anytime trace, emitted whenever bounds change.
struct ProgressRecord {
  std::size_t level = 0;
  std::size_t open_nodes = 0;
  double incumbent = 0.0;
  double best_bound = 0.0;
  double gap = 0.0;
  double elapsed_s = 0.0;
};

struct SolverOptions {
  HeuristicConfig heuristic;
  /// Right-branch perturbation in modularity units; defaults to 2 / 2m.
  std::optional<double> delta;
  Formulation formulation = Formulation::sparse;
  LpOptions lp;
  int workers = 1;
  std::function<void(const ProgressRecord&)> progress;
};

struct SolveStats {
  std::size_t nodes_bounded = 0;
  std::size_t nodes_created = 0;
  std::size_t fathomed_integer = 0;
  std::size_t fathomed_infeasible = 0;
  std::size_t fathomed_bound = 0;
  std::size_t branched = 0;
  std::size_t pair_branches = 0;
  std::size_t lp_solves = 0;
  std::size_t lp_iterations = 0;
  std::size_t levels = 0;
  std::size_t max_depth = 0;
  std::size_t components = 0;
  double wall_seconds = 0.0;
};

enum class TerminationReason { optimal, gap_reached, time_limit };

inline const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::optimal: return "optimal";
    case TerminationReason::gap_reached: return "gap_reached";
    case TerminationReason::time_limit: return "time_limit";
  }
  return "unknown";
}

struct SolveReport {
  Partition partition;
  double modularity = 0.0;
  double best_bound = 0.0;
  double gap = 0.0;
  bool proven_optimal = false;
  SolveStats stats;
  TerminationReason termination_reason = TerminationReason::optimal;
  std::vector<ProgressRecord> trace;
};

/// Relative gap (best_bound - incumbent) / max(|best_bound|, 1e-12), clamped at 0.
inline double gap(double incumbent, double best_bound) {
  return std::max(0.0, (best_bound - incumbent) / std::max(std::abs(best_bound), 1e-12));
}

enum class NodeStatus { open, fathomed, branched };
enum class FathomReason { none, integer, infeasible, bound };

inline const char* to_string(FathomReason r) {
  switch (r) {
    case FathomReason::none: return "none";
    case FathomReason::integer: return "integer";
    case FathomReason::infeasible: return "infeasible";
    case FathomReason::bound: return "bound";
  }
  return "unknown";
}

/**
 * Search-tree node. `graph` is the base graph with every left-branch merge
 * applied, `to_node` maps base ids into it and `state.right_cuts` are
 * expressed over its ids.
 */
struct TreeNode {
  std::size_t id = 0;
  std::size_t depth = 0;
  Graph graph;
  ContractionMap to_node;
  BranchState state;
  double upper_bound = std::numeric_limits<double>::infinity();
  double lower_bound = -std::numeric_limits<double>::infinity();
  Partition lb_partition;         // base ids, modularity == lower_bound
  bool lb_satisfies_cuts = false;  // the heuristic may ignore right cuts
  LpSolution lp;
  NodeStatus status = NodeStatus::open;
  bool bounded = false;
};

/// Everything bound_node needs besides the node itself.
struct NodeContext {
  const Graph* base = nullptr;
  double gamma = 1.0;
  double delta_shift = 2.0;  // raw gain-matrix units
  HeuristicConfig heuristic;
  Formulation formulation = Formulation::sparse;
  LpOptions lp;
};

inline TreeNode make_root(const Graph& g) {
  TreeNode root;
  root.graph = Graph(g.node_count(), g.edges());
  root.to_node = ContractionMap::identity(g.node_count());
  return root;
}

namespace detail {

inline bool partition_satisfies(const Partition& node_partition, const LinearCut& cut) {
  double lhs = 0.0;
  for (const auto& t : cut.terms) lhs += t.coef * (node_partition.same(t.a, t.b) ? 0.0 : 1.0);
  return lhs >= cut.rhs - 1e-9;
}

}  // namespace detail

/**
 * Computes the node's LP upper bound (clamped by the parent's) and a
 * heuristic lower bound. The heuristic runs on the contracted graph's
 * modularity matrix with the right cuts discouraged by a gain shift; the
 * partition is lifted to base ids and re-evaluated on the base graph.
 */
inline void bound_node(TreeNode& node, const NodeContext& ctx) {
  node.bounded = true;
  const auto& cuts = node.state.right_cuts;
  const bool contradictory = std::any_of(cuts.begin(), cuts.end(), [](const LinearCut& c) {
    return c.trivially_infeasible();
  });
  if (contradictory) {
    node.lp = {};
    node.upper_bound = -std::numeric_limits<double>::infinity();
    return;
  }
  const auto model = build_sparse_model(node.graph, ctx.gamma, ctx.formulation);
  node.lp = solve_lp_relaxation(model, cuts, ctx.lp);
  if (node.lp.status == LpStatus::interrupted) {
    // out of time: the node stays open with its parent's bound
    node.bounded = false;
    node.lp = {};
    return;
  }
  if (node.lp.status == LpStatus::infeasible) {
    node.upper_bound = -std::numeric_limits<double>::infinity();
    return;
  }
  node.upper_bound = std::min(node.upper_bound, node.lp.objective_value);

  auto gm = GainMatrix::from(modularity_matrix(node.graph, ctx.gamma));
  for (const auto& cut : cuts) {
    if (auto t = cut.as_triple()) {
      gm = perturb_for_right_cut(std::move(gm), {t->i, t->j, t->k}, ctx.delta_shift);
    } else {
      for (const auto& term : cut.terms) {
        if (term.coef > 0.0) gm.entries.add(term.a, term.b, -ctx.delta_shift * term.coef);
      }
    }
  }
  auto cfg = ctx.heuristic;
  cfg.random_seed += node.id;
  auto found = maximize_gain(gm, cfg);
  node.lb_satisfies_cuts = std::all_of(cuts.begin(), cuts.end(), [&](const LinearCut& c) {
    return detail::partition_satisfies(found.partition, c);
  });
  node.lb_partition = lift_partition(found.partition, node.to_node);
  node.lower_bound = modularity(*ctx.base, node.lb_partition, ctx.gamma);
}

struct FathomDecision {
  FathomReason reason = FathomReason::none;
  /// Rounded LP partition (base ids) offered as an incumbent when the LP is integral.
  std::optional<HeuristicResult> candidate;
};

/// Best partition obtained by closing an integral LP point, evaluated on the base graph.
inline std::optional<HeuristicResult> integral_candidate(const TreeNode& node, const NodeContext& ctx,
                                                         double tol = 1e-6) {
  if (node.lp.status != LpStatus::optimal || !is_integral(node.lp.x, tol)) return std::nullopt;
  const std::size_t n = node.graph.node_count();
  std::optional<HeuristicResult> best;
  for (const auto& p : {partition_from_pairs(round_pairs(node.lp.x, n)), edge_closure(node.graph, node.lp.x)}) {
    auto lifted = lift_partition(p, node.to_node);
    const double q = modularity(*ctx.base, lifted, ctx.gamma);
    if (!best || q > best->objective) best = HeuristicResult{std::move(lifted), q};
  }
  return best;
}

/**
 * Fathoming rules in order: infeasible LP, integral LP (the rounded
 * partition reaches the LP value), LP value not above the incumbent.
 */
inline FathomDecision fathom_check(const TreeNode& node, double incumbent_value,
                                   const NodeContext& ctx, double tol = 1e-9) {
  FathomDecision decision;
  if (node.lp.status == LpStatus::infeasible || node.upper_bound == -std::numeric_limits<double>::infinity()) {
    decision.reason = FathomReason::infeasible;
    return decision;
  }
  decision.candidate = integral_candidate(node, ctx);
  if (decision.candidate && decision.candidate->objective >= node.upper_bound - tol) {
    decision.reason = FathomReason::integer;
    return decision;
  }
  if (node.upper_bound <= incumbent_value + tol * std::max(1.0, std::abs(incumbent_value))) {
    decision.reason = FathomReason::bound;
  }
  return decision;
}

/// Candidate with the largest score; ties go to the lexicographically smallest triple.
inline Triple select_triple(std::span<const ScoredTriple> candidates) {
  if (candidates.empty()) throw SolverError("no candidate triple to branch on");
  const ScoredTriple* best = &candidates.front();
  for (const auto& c : candidates) {
    if (c.score > best->score || (c.score == best->score && c.triple < best->triple)) best = &c;
  }
  return best->triple;
}

namespace detail {

inline TreeNode left_child(const TreeNode& node, std::vector<NodeId> merge) {
  for (NodeId v : merge) {
    if (v >= node.graph.node_count()) throw SolverError("branching ids outside the node graph");
  }
  TreeNode child;
  child.depth = node.depth + 1;
  child.upper_bound = node.upper_bound;
  auto [graph, map] = contract(node.graph, merge);
  child.graph = std::move(graph);
  child.to_node = node.to_node.then(map);
  child.state.merges = node.state.merges;
  child.state.merges.push_back(std::move(merge));
  for (const auto& cut : node.state.right_cuts) child.state.right_cuts.push_back(cut.remapped(map));
  return child;
}

inline TreeNode right_child(const TreeNode& node, LinearCut cut) {
  TreeNode child;
  child.depth = node.depth + 1;
  child.upper_bound = node.upper_bound;
  child.graph = node.graph;
  child.to_node = node.to_node;
  child.state = node.state;
  child.state.right_cuts.push_back(std::move(cut));
  return child;
}

}  // namespace detail

/// Left: contract the triple into one node. Right: add x_ij + x_ik + x_jk >= 2.
inline std::pair<TreeNode, TreeNode> branch(const TreeNode& node, const Triple& t) {
  if (t.i == t.j || t.i == t.k || t.j == t.k) throw SolverError("branching triple must be distinct");
  return {detail::left_child(node, {t.i, t.j, t.k}),
          detail::right_child(node, LinearCut::right_branch(Triple::sorted(t.i, t.j, t.k)))};
}

/// Left: merge i and j. Right: x_ij >= 1.
inline std::pair<TreeNode, TreeNode> branch_on_pair(const TreeNode& node, NodeId i, NodeId j) {
  if (i == j) throw SolverError("branching pair must be distinct");
  return {detail::left_child(node, {std::min(i, j), std::max(i, j)}),
          detail::right_child(node, LinearCut::separate_pair(std::min(i, j), std::max(i, j)))};
}

namespace detail {

using Clock = std::chrono::steady_clock;

// Shared state of one solve: the per-component bounds combine into the
// reported global incumbent and best bound.
struct GlobalBounds {
  std::vector<double> weight;     // m_c / m
  std::vector<double> incumbent;  // component modularity at gamma_c
  std::vector<double> bound;
  double reported_bound = std::numeric_limits<double>::infinity();
  double reported_incumbent = -std::numeric_limits<double>::infinity();
  std::vector<ProgressRecord> trace;
  const std::function<void(const ProgressRecord&)>* progress = nullptr;
  Clock::time_point start;

  double total(const std::vector<double>& v, double offset) const {
    double s = offset;
    for (std::size_t c = 0; c < v.size(); ++c) s += weight[c] * v[c];
    return s;
  }

  double constant = 0.0;  // trivially solved components

  void record(std::size_t level, std::size_t open) {
    const double inc = total(incumbent, constant);
    const double ub = std::max(total(bound, constant), inc);
    reported_incumbent = std::max(reported_incumbent, inc);
    reported_bound = std::min(reported_bound, ub);
    ProgressRecord r{level, open, reported_incumbent, reported_bound,
                     gap(reported_incumbent, reported_bound),
                     std::chrono::duration<double>(Clock::now() - start).count()};
    if (!trace.empty() && trace.back().incumbent == r.incumbent &&
        trace.back().best_bound == r.best_bound && trace.back().open_nodes == r.open_nodes) {
      return;
    }
    trace.push_back(r);
    if (progress && *progress) (*progress)(r);
  }
};

// Trivial upper bound: keep every positive off-diagonal gain.
inline double trivial_upper_bound(const Graph& g, double gamma) {
  const auto b = modularity_matrix(g, gamma);
  double q = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    q += b(i, i);
    for (std::size_t j = i + 1; j < b.size(); ++j) q += 2.0 * std::max(b(i, j), 0.0);
  }
  return q / b.two_m;
}

class ComponentSearch {
 public:
  ComponentSearch(const Graph& g, double gamma, double delta_shift, const SolverOptions& options,
                  const TerminationCriteria& criteria, std::optional<Clock::time_point> deadline,
                  GlobalBounds& global, std::size_t index, SolveStats& stats)
      : graph_(g), options_(options), criteria_(criteria), deadline_(deadline),
        global_(global), index_(index), stats_(stats) {
    ctx_.base = &graph_;
    ctx_.gamma = gamma;
    ctx_.delta_shift = delta_shift;
    ctx_.heuristic = options.heuristic;
    ctx_.formulation = options.formulation;
    ctx_.lp = options.lp;
    ctx_.lp.deadline = deadline;
  }

  /// Seeds the incumbent with the root heuristic.
  void initialize() {
    auto root = heuristic_modularity(graph_, ctx_.gamma, ctx_.heuristic);
    incumbent_ = std::move(root.partition);
    incumbent_value_ = root.objective;
    best_bound_ = std::max(trivial_upper_bound(graph_, ctx_.gamma), incumbent_value_);
    global_.incumbent[index_] = incumbent_value_;
    global_.bound[index_] = best_bound_;
  }

  /// Runs the level-synchronized search; false when the time limit interrupted it.
  bool run() {
    std::vector<TreeNode> level;
    level.push_back(make_root(graph_));
    level.back().id = next_id_++;
    level.back().upper_bound = best_bound_;
    ++stats_.nodes_created;
    std::size_t depth = 0;
    while (!level.empty()) {
      ++stats_.levels;
      stats_.max_depth = std::max(stats_.max_depth, depth);
      const std::size_t done = bound_level(level);
      if (done < level.size()) {
        // interrupted: unbounded nodes keep their parent's bound
        update_best_bound(level);
        global_.record(depth, level.size() - done);
        return false;
      }
      std::vector<FathomDecision> decisions(level.size());
      for (std::size_t i = 0; i < level.size(); ++i) {
        offer(level[i].lb_partition, level[i].lower_bound);
        if (auto c = integral_candidate(level[i], ctx_)) offer(c->partition, c->objective);
      }
      for (std::size_t i = 0; i < level.size(); ++i) {
        decisions[i] = fathom_check(level[i], incumbent_value_, ctx_);
        auto& node = level[i];
        switch (decisions[i].reason) {
          case FathomReason::infeasible: ++stats_.fathomed_infeasible; break;
          case FathomReason::integer: ++stats_.fathomed_integer; break;
          case FathomReason::bound: ++stats_.fathomed_bound; break;
          case FathomReason::none: break;
        }
        node.status = decisions[i].reason == FathomReason::none ? NodeStatus::open : NodeStatus::fathomed;
      }
      std::vector<const TreeNode*> open;
      for (const auto& node : level) {
        if (node.status == NodeStatus::open) open.push_back(&node);
      }
      std::stable_sort(open.begin(), open.end(), [](const TreeNode* a, const TreeNode* b) {
        return a->upper_bound > b->upper_bound;
      });
      update_best_bound_from(open);
      global_.record(depth, open.size());
      if (finished()) return true;

      std::vector<TreeNode> next;
      for (const TreeNode* node : open) {
        if (timed_out()) {
          global_.record(depth, open.size());
          return false;
        }
        auto children = expand(*node);
        for (auto& child : children) {
          child.id = next_id_++;
          ++stats_.nodes_created;
          next.push_back(std::move(child));
        }
      }
      level = std::move(next);
      ++depth;
    }
    best_bound_ = incumbent_value_;
    global_.bound[index_] = best_bound_;
    global_.record(depth, 0);
    return true;
  }

  const Partition& incumbent() const { return incumbent_; }
  double incumbent_value() const { return incumbent_value_; }
  double best_bound() const { return best_bound_; }

 private:
  bool timed_out() const { return deadline_ && Clock::now() >= *deadline_; }

  bool finished() const {
    const double g = gap(incumbent_value_, best_bound_);
    if (criteria_.mode == SolveMode::approximate) return g <= criteria_.gap_tolerance;
    return best_bound_ <= incumbent_value_;
  }

  void offer(const Partition& p, double value) {
    if (p.size() == 0 || !(value > incumbent_value_ + 1e-12)) return;
    incumbent_ = p;
    incumbent_value_ = value;
    global_.incumbent[index_] = value;
  }

  void update_best_bound_from(const std::vector<const TreeNode*>& open) {
    double bound = incumbent_value_;
    for (const auto* node : open) bound = std::max(bound, node->upper_bound);
    best_bound_ = std::min(best_bound_, bound);
    global_.bound[index_] = best_bound_;
  }

  // After an interrupted level: every node's bound (parent's when unbounded) stays valid.
  void update_best_bound(const std::vector<TreeNode>& level) {
    std::vector<const TreeNode*> open;
    for (const auto& node : level) {
      if (node.bounded) offer(node.lb_partition, node.lower_bound);
      open.push_back(&node);
    }
    update_best_bound_from(open);
  }

  // Bounds every node of the level; returns how many finished before the deadline.
  std::size_t bound_level(std::vector<TreeNode>& level) {
    const int workers = std::max(1, options_.workers);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
      for (;;) {
        if (timed_out()) return;
        const std::size_t i = next.fetch_add(1);
        if (i >= level.size()) return;
        try {
          bound_node(level[i], ctx_);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    if (workers == 1 || level.size() == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < std::min<int>(workers, static_cast<int>(level.size())); ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    for (const auto& node : level) {
      if (!node.bounded) continue;
      ++stats_.nodes_bounded;
      if (node.lp.rounds > 0) {
        ++stats_.lp_solves;
        stats_.lp_iterations += node.lp.iterations;
      }
    }
    return static_cast<std::size_t>(
        std::count_if(level.begin(), level.end(), [](const TreeNode& n) { return n.bounded; }));
  }

  // Branching on an open, bounded node.
  std::vector<TreeNode> expand(const TreeNode& node) {
    auto triples = find_violated_triples(node.lp.x, node.graph.node_count());
    if (!triples.empty()) {
      ++stats_.branched;
      auto [left, right] = branch(node, select_triple(triples));
      return {std::move(left), std::move(right)};
    }
    // disjunction-feasible but fractional: tighten with every violated triangle inequality
    TreeNode tightened = node;
    auto opts = ctx_.lp;
    opts.separate_all_triangles = true;
    const auto model = build_sparse_model(node.graph, ctx_.gamma, ctx_.formulation);
    tightened.lp = solve_lp_relaxation(model, node.state.right_cuts, opts);
    ++stats_.lp_solves;
    stats_.lp_iterations += tightened.lp.iterations;
    if (tightened.lp.status == LpStatus::interrupted) {
      // re-queued unbounded; the next level stops on the deadline
      TreeNode again = node;
      again.bounded = false;
      return {std::move(again)};
    }
    if (tightened.lp.status == LpStatus::infeasible) {
      ++stats_.fathomed_infeasible;
      return {};
    }
    tightened.upper_bound = std::min(node.upper_bound, tightened.lp.objective_value);
    if (auto c = integral_candidate(tightened, ctx_)) offer(c->partition, c->objective);
    const auto decision = fathom_check(tightened, incumbent_value_, ctx_);
    if (decision.reason != FathomReason::none) {
      ++(decision.reason == FathomReason::integer ? stats_.fathomed_integer : stats_.fathomed_bound);
      return {};
    }
    triples = find_violated_triples(tightened.lp.x, tightened.graph.node_count());
    ++stats_.branched;
    if (!triples.empty()) {
      auto [left, right] = branch(tightened, select_triple(triples));
      return {std::move(left), std::move(right)};
    }
    ++stats_.pair_branches;
    const std::size_t n = tightened.graph.node_count();
    NodeId bi = 0, bj = 1;
    double best = -1.0;
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        const double v = tightened.lp.x[pair_index(n, i, j)];
        const double frac = std::min(v, 1.0 - v);
        if (frac > best + 1e-12) {
          best = frac;
          bi = i;
          bj = j;
        }
      }
    }
    auto [left, right] = branch_on_pair(tightened, bi, bj);
    return {std::move(left), std::move(right)};
  }

  const Graph& graph_;
  const SolverOptions& options_;
  TerminationCriteria criteria_;
  std::optional<Clock::time_point> deadline_;
  GlobalBounds& global_;
  std::size_t index_;
  SolveStats& stats_;
  NodeContext ctx_;
  Partition incumbent_;
  double incumbent_value_ = -std::numeric_limits<double>::infinity();
  double best_bound_ = std::numeric_limits<double>::infinity();
  std::size_t next_id_ = 0;
};

}  // namespace detail

/**
 * Maximum-modularity partition by branch-and-cut. Each connected component
 * is searched separately with resolution gamma * m_c / m; its modularity,
 * weighted by m_c / m, adds up to the modularity of the whole graph.
 * Isolated nodes become singletons.
 *
 * Exact mode runs until the incumbent meets the best bound. Approximate mode
 * stops once the relative gap is within `gap_tolerance`. A time limit stops
 * either mode early; the report then carries the incumbent and a valid bound.
 */
inline SolveReport solve(const Graph& g, double gamma, const TerminationCriteria& criteria = {},
                         const SolverOptions& options = {}) {
  using detail::Clock;
  const auto start = Clock::now();
  if (!(g.two_m() > 0.0)) throw ValidationError("modularity undefined for 2m = 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("resolution must be a finite nonnegative number");
  if (criteria.gap_tolerance < 0.0) throw ValidationError("gap tolerance must be nonnegative");
  if (criteria.time_limit_seconds && !(*criteria.time_limit_seconds > 0.0)) {
    throw ValidationError("time limit must be positive");
  }
  std::optional<Clock::time_point> deadline;
  if (criteria.time_limit_seconds) {
    deadline = start + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double>(*criteria.time_limit_seconds));
  }
  const double m = g.total_weight();
  const double delta = options.delta.value_or(2.0 / g.two_m());
  if (!(delta > 0.0)) throw ValidationError("delta must be positive");

  auto [comp, count] = connected_components(g);
  std::vector<std::vector<NodeId>> members(count);
  for (NodeId v = 0; v < g.node_count(); ++v) members[comp[v]].push_back(v);

  SolveReport report;
  report.stats.components = count;
  detail::GlobalBounds global;
  global.start = start;
  global.progress = &options.progress;

  struct Piece {
    std::vector<NodeId> nodes;
    Graph graph;
    double weight;
  };
  std::vector<Piece> pieces;
  std::vector<std::size_t> labels(g.node_count(), 0);
  std::size_t next_label = 0;
  for (auto& nodes : members) {
    Graph sub = induced_subgraph(g, nodes);
    if (nodes.size() == 1 || sub.total_weight() == 0.0) {
      // a lone node (with or without self-loop) is its own community
      const double w = sub.total_weight() / m;
      if (w > 0.0) global.constant += w * (1.0 - gamma * w);
      labels[nodes.front()] = next_label++;
      continue;
    }
    const double w = sub.total_weight() / m;
    pieces.push_back({std::move(nodes), Graph(sub.node_count(), sub.edges()), w});
  }
  global.weight.resize(pieces.size());
  global.incumbent.resize(pieces.size());
  global.bound.resize(pieces.size());

  std::vector<detail::ComponentSearch> searches;
  searches.reserve(pieces.size());
  for (std::size_t c = 0; c < pieces.size(); ++c) {
    global.weight[c] = pieces[c].weight;
    // raw gain shift: delta in modularity units times this component's 2m
    searches.emplace_back(pieces[c].graph, gamma * pieces[c].weight, delta * pieces[c].graph.two_m(),
                          options, criteria, deadline, global, c, report.stats);
    searches.back().initialize();
  }
  global.record(0, pieces.size());

  bool interrupted = false;
  for (auto& search : searches) {
    if (interrupted || (deadline && Clock::now() >= *deadline)) {
      interrupted = true;
      break;
    }
    if (!search.run()) interrupted = true;
  }

  for (std::size_t c = 0; c < pieces.size(); ++c) {
    const auto& p = searches[c].incumbent();
    const std::size_t base = next_label;
    for (std::size_t i = 0; i < pieces[c].nodes.size(); ++i) labels[pieces[c].nodes[i]] = base + p[i];
    next_label += p.community_count();
  }
  report.partition = Partition(labels);
  report.modularity = modularity(g, report.partition, gamma);
  report.best_bound = std::max(global.reported_bound, report.modularity);
  report.gap = gap(report.modularity, report.best_bound);
  report.proven_optimal = report.gap <= 1e-6;
  if (report.proven_optimal) {
    report.termination_reason = TerminationReason::optimal;
  } else if (criteria.mode == SolveMode::approximate && report.gap <= criteria.gap_tolerance) {
    report.termination_reason = TerminationReason::gap_reached;
  } else {
    report.termination_reason = TerminationReason::time_limit;
  }
  report.trace = std::move(global.trace);
  report.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

}  // namespace modcut
