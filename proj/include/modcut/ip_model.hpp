#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "modcut/error.hpp"
#include "modcut/graph.hpp"
#include "modcut/lp/dual_simplex.hpp"
#include "modcut/partition.hpp"
#include "modcut/separator.hpp"

namespace modcut {

/// Node triple with i < j < k.
struct Triple {
  NodeId i = 0;
  NodeId j = 0;
  NodeId k = 0;

  static Triple sorted(NodeId a, NodeId b, NodeId c) {
    std::array<NodeId, 3> t{a, b, c};
    std::sort(t.begin(), t.end());
    return {t[0], t[1], t[2]};
  }

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Row-major index of the pair {i, j}, i != j, among n(n-1)/2 pairs.
inline std::size_t pair_index(std::size_t n, NodeId i, NodeId j) {
  if (i > j) std::swap(i, j);
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

inline std::size_t pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

enum class Formulation {
  sparse,  // triples from minimum separating sets
  dense    // every triple
};

/**
 * Integer program over pair variables x_ij (1 = separated):
 *   max  constant + sum_{i<j} gain_ij (1 - x_ij)
 *   s.t. triangle inequalities for every triple in `triples`.
 * gain_ij = 2 b_ij / 2m and constant = sum_i b_ii / 2m, so the objective of
 * a partition encoding is its modularity.
 */
struct SparseModel {
  std::size_t n = 0;
  std::vector<double> pair_gain;
  double constant = 0.0;
  std::vector<Triple> triples;
  std::vector<char> fixed_separated;  // pairs pinned to x = 1 (different components)

  std::size_t variable_count() const noexcept { return pair_gain.size(); }
  std::size_t constraint_count() const noexcept { return 3 * triples.size(); }

  double objective(std::span<const double> x) const {
    double q = constant;
    for (std::size_t p = 0; p < pair_gain.size(); ++p) q += pair_gain[p] * (1.0 - x[p]);
    return q;
  }
};

inline SparseModel build_sparse_model(const Graph& g, double gamma,
                                      Formulation formulation = Formulation::sparse) {
  const auto b = modularity_matrix(g, gamma);
  const std::size_t n = g.node_count();
  SparseModel model;
  model.n = n;
  model.pair_gain.resize(pair_count(n));
  model.fixed_separated.assign(pair_count(n), 0);
  for (NodeId i = 0; i < n; ++i) {
    model.constant += b(i, i) / b.two_m;
    for (NodeId j = i + 1; j < n; ++j) model.pair_gain[pair_index(n, i, j)] = 2.0 * b(i, j) / b.two_m;
  }
  auto [comp, count] = connected_components(g);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (comp[i] != comp[j]) model.fixed_separated[pair_index(n, i, j)] = 1;
    }
  }

  std::set<Triple> triples;
  if (formulation == Formulation::dense) {
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = i + 1; j < n; ++j)
        for (NodeId k = j + 1; k < n; ++k) triples.insert({i, j, k});
  } else {
    VertexSeparator separator(g);
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        if (comp[i] != comp[j]) continue;
        if (g.adjacent(i, j)) {
          for (NodeId k = 0; k < n; ++k) {
            if (k != i && k != j && comp[k] == comp[i]) triples.insert(Triple::sorted(i, j, k));
          }
        } else {
          for (NodeId k : separator.separate(i, j)) triples.insert(Triple::sorted(i, j, k));
        }
      }
    }
  }
  model.triples.assign(triples.begin(), triples.end());
  return model;
}

/// Coefficient on a pair variable inside a linear cut.
struct PairTerm {
  NodeId a = 0;
  NodeId b = 0;
  double coef = 0.0;

  friend bool operator==(const PairTerm&, const PairTerm&) = default;
};

/// Linear cut `sum coef * x_ab >= rhs` over pair variables.
struct LinearCut {
  std::vector<PairTerm> terms;
  double rhs = 0.0;

  /// x_ij + x_ik + x_jk >= 2: the triple is not entirely co-assigned.
  static LinearCut right_branch(const Triple& t) {
    return {{{t.i, t.j, 1.0}, {t.i, t.k, 1.0}, {t.j, t.k, 1.0}}, 2.0};
  }

  /// x_ij >= 1: i and j are separated.
  static LinearCut separate_pair(NodeId i, NodeId j) { return {{{i, j, 1.0}}, 1.0}; }

  /// x_ik + x_jk - x_ij >= 0.
  static LinearCut triangle(NodeId i, NodeId j, NodeId k) {
    return {{{i, k, 1.0}, {j, k, 1.0}, {i, j, -1.0}}, 0.0};
  }

  /// Expresses the cut over child ids. Pairs collapsing onto one node are
  /// fixed at x = 0 and drop out.
  LinearCut remapped(const ContractionMap& map) const {
    std::map<std::pair<NodeId, NodeId>, double> merged;
    for (const auto& t : terms) {
      NodeId a = map(t.a), b = map(t.b);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      merged[{a, b}] += t.coef;
    }
    LinearCut out;
    out.rhs = rhs;
    for (const auto& [pair, coef] : merged) {
      if (coef != 0.0) out.terms.push_back({pair.first, pair.second, coef});
    }
    return out;
  }

  /// The triple of a right-branch cut, when the cut still has that shape.
  std::optional<Triple> as_triple() const {
    if (terms.size() != 3 || rhs != 2.0) return std::nullopt;
    for (const auto& t : terms) {
      if (t.coef != 1.0) return std::nullopt;
    }
    const NodeId i = terms[0].a, j = terms[0].b, k = terms[1].b;
    if (terms[1].a != i || terms[2].a != j || terms[2].b != k || !(i < j && j < k)) return std::nullopt;
    return Triple{i, j, k};
  }

  /// True when no assignment of x in [0, 1] can satisfy the cut.
  bool trivially_infeasible() const {
    double best = 0.0;
    for (const auto& t : terms) best += std::max(t.coef, 0.0);
    return best < rhs - 1e-12;
  }

  friend bool operator==(const LinearCut&, const LinearCut&) = default;
};

/// Accumulated branching decisions of a tree node.
struct BranchState {
  std::vector<std::vector<NodeId>> merges;  // in the id space current when applied
  std::vector<LinearCut> right_cuts;        // in the current contracted id space
};

enum class LpStatus { optimal, infeasible, interrupted };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double objective_value = -std::numeric_limits<double>::infinity();
  std::vector<double> x;  // one value per pair
  std::size_t rows = 0;
  std::size_t iterations = 0;
  std::size_t rounds = 0;
};

struct LpOptions {
  /// Separate violated triangle inequalities over all triples, not only the model's.
  bool separate_all_triangles = false;
  std::size_t max_rows_per_round = 4000;
  double violation_tolerance = 1e-9;
  /// Triangle rows left slack for this many consecutive rounds are dropped (0 keeps all).
  std::size_t purge_after_rounds = 2;
  /// Purging stops after this many rounds so the separation loop always terminates.
  std::size_t purge_round_limit = 30;
  /// Wall-clock limit for the whole relaxation; the result is then `interrupted`.
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

namespace detail {

// Per-triple violations of the three rotations, largest first.
struct ViolatedRow {
  double violation;
  NodeId i, j, k;  // x_ij - x_ik - x_jk > 0
};

inline void collect_triangle_violations(const std::vector<double>& x, std::size_t n,
                                        const Triple& t, double tol,
                                        std::vector<ViolatedRow>& out) {
  const double xij = x[pair_index(n, t.i, t.j)];
  const double xik = x[pair_index(n, t.i, t.k)];
  const double xjk = x[pair_index(n, t.j, t.k)];
  if (double v = xij - xik - xjk; v > tol) out.push_back({v, t.i, t.j, t.k});
  if (double v = xik - xij - xjk; v > tol) out.push_back({v, t.i, t.k, t.j});
  if (double v = xjk - xij - xik; v > tol) out.push_back({v, t.j, t.k, t.i});
}

inline lp::Row cut_row(std::size_t n, const LinearCut& cut) {
  lp::Row row;
  for (const auto& t : cut.terms) row.terms.emplace_back(pair_index(n, t.a, t.b), -t.coef);
  row.upper = -cut.rhs;
  return row;
}

}  // namespace detail

/**
 * LP relaxation of `model` with `cuts` added as explicit rows. Triangle
 * rows are activated lazily: solve, add the most violated model
 * inequalities, re-solve with the warm dual simplex, until none is violated
 * by more than the tolerance. The value returned is the optimum of the full
 * relaxation.
 */
inline LpSolution solve_lp_relaxation(const SparseModel& model, std::span<const LinearCut> cuts,
                                      const LpOptions& options = {}) {
  const std::size_t n = model.n;
  const std::size_t nv = model.variable_count();
  LpSolution solution;
  for (const auto& cut : cuts) {
    for (const auto& t : cut.terms) {
      if (t.a == t.b || t.a >= n || t.b >= n) throw SolverError("cut references invalid pair");
    }
    if (cut.trivially_infeasible()) return solution;
  }

  // maximize sum gain (1 - x)  <=>  minimize sum gain x
  std::vector<double> lower(nv, 0.0), upper(nv, 1.0);
  for (std::size_t p = 0; p < nv; ++p) {
    if (model.fixed_separated[p]) lower[p] = 1.0;
  }
  lp::SimplexOptions simplex_options;
  simplex_options.deadline = options.deadline;
  lp::DualSimplex simplex(model.pair_gain, lower, upper, simplex_options);
  for (const auto& cut : cuts) simplex.add_row(detail::cut_row(n, cut));

  using Key = std::tuple<NodeId, NodeId, NodeId>;
  struct ActiveTriangle {
    Key key;
    std::size_t idle_rounds = 0;
  };
  std::set<Key> active;
  std::map<lp::RowHandle, ActiveTriangle> triangle_rows;
  std::vector<detail::ViolatedRow> violated;
  for (;;) {
    ++solution.rounds;
    if (const auto status = simplex.solve(); status != lp::Status::optimal) {
      if (status == lp::Status::interrupted) solution.status = LpStatus::interrupted;
      solution.iterations = simplex.iterations();
      solution.rows = simplex.row_count();
      return solution;
    }
    if (options.purge_after_rounds > 0 && solution.rounds < options.purge_round_limit) {
      std::set<lp::RowHandle> stale;
      for (const auto& state : simplex.row_states()) {
        auto it = triangle_rows.find(state.handle);
        if (it == triangle_rows.end()) continue;
        auto& info = it->second;
        info.idle_rounds = state.basic && state.slack > 1e-7 ? info.idle_rounds + 1 : 0;
        if (info.idle_rounds >= options.purge_after_rounds) stale.insert(state.handle);
      }
      if (!stale.empty()) {
        simplex.remove_rows_if([&](lp::RowHandle h) { return stale.contains(h); });
        // stale rows all have a basic slack, so every one of them is gone
        for (const auto h : stale) {
          active.erase(triangle_rows.at(h).key);
          triangle_rows.erase(h);
        }
      }
    }
    const auto x = simplex.primal();
    violated.clear();
    if (options.separate_all_triangles) {
      for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j)
          for (NodeId k = j + 1; k < n; ++k)
            detail::collect_triangle_violations(x, n, {i, j, k}, options.violation_tolerance,
                                                violated);
    } else {
      for (const auto& t : model.triples) {
        detail::collect_triangle_violations(x, n, t, options.violation_tolerance, violated);
      }
    }
    std::erase_if(violated, [&](const detail::ViolatedRow& r) {
      return active.contains({r.i, r.j, r.k});
    });
    if (violated.empty()) {
      solution.status = LpStatus::optimal;
      solution.x = x;
      for (auto& v : solution.x) v = std::clamp(v, 0.0, 1.0);
      solution.objective_value = model.objective(solution.x);
      solution.iterations = simplex.iterations();
      solution.rows = simplex.row_count();
      return solution;
    }
    std::sort(violated.begin(), violated.end(), [](const auto& a, const auto& b) {
      return a.violation != b.violation ? a.violation > b.violation
                                        : std::tie(a.i, a.j, a.k) < std::tie(b.i, b.j, b.k);
    });
    if (violated.size() > options.max_rows_per_round) violated.resize(options.max_rows_per_round);
    for (const auto& r : violated) {
      lp::Row row;
      row.terms = {{pair_index(n, r.i, r.j), 1.0},
                   {pair_index(n, std::min(r.i, r.k), std::max(r.i, r.k)), -1.0},
                   {pair_index(n, std::min(r.j, r.k), std::max(r.j, r.k)), -1.0}};
      row.upper = 0.0;
      const auto handle = simplex.add_row(std::move(row));
      active.insert({r.i, r.j, r.k});
      triangle_rows.emplace(handle, ActiveTriangle{{r.i, r.j, r.k}, 0});
    }
  }
}

/// Candidate branching triple with score min(s, 2 - s), s = x_ij + x_ik + x_jk.
struct ScoredTriple {
  Triple triple;
  double score = 0.0;
};

/**
 * Triples whose pair sum s lies strictly inside (eps, 2 - eps), i.e. that
 * violate both x_ij + x_ik + x_jk = 0 and x_ij + x_ik + x_jk >= 2. Sorted by
 * score descending, ties by (i, j, k).
 */
inline std::vector<ScoredTriple> find_violated_triples(std::span<const double> x, std::size_t n,
                                                       double eps = 1e-6) {
  if (x.size() != pair_count(n)) throw ValidationError("solution size does not match node count");
  std::vector<ScoredTriple> out;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const double xij = x[pair_index(n, i, j)];
      for (NodeId k = j + 1; k < n; ++k) {
        const double s = xij + x[pair_index(n, i, k)] + x[pair_index(n, j, k)];
        if (s > eps && s < 2.0 - eps) out.push_back({{i, j, k}, std::min(s, 2.0 - s)});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ScoredTriple& a, const ScoredTriple& b) {
    return a.score != b.score ? a.score > b.score : a.triple < b.triple;
  });
  return out;
}

inline bool is_integral(std::span<const double> x, double tol = 1e-6) {
  return std::all_of(x.begin(), x.end(), [tol](double v) {
    return std::abs(v) <= tol || std::abs(v - 1.0) <= tol;
  });
}

/// Binary pair matrix from an (almost) integral LP solution.
inline PairAssignment round_pairs(std::span<const double> x, std::size_t n) {
  PairAssignment pairs(n);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) pairs.set(i, j, x[pair_index(n, i, j)] > 0.5);
  }
  return pairs;
}

/// Communities from edges of `g` whose pair variable rounds to 0.
inline Partition edge_closure(const Graph& g, std::span<const double> x) {
  const std::size_t n = g.node_count();
  PairAssignment pairs(n);
  for (const auto& e : g.edges()) {
    if (e.u != e.v && x[pair_index(n, e.u, e.v)] < 0.5) pairs.set(e.u, e.v, false);
  }
  return partition_from_pairs(pairs);
}

/// Writes the model (and cuts) in CPLEX LP text format.
inline void write_lp_format(std::ostream& out, const SparseModel& model,
                            std::span<const LinearCut> cuts = {}) {
  const std::size_t n = model.n;
  auto name = [](NodeId i, NodeId j) { return "x_" + std::to_string(i) + "_" + std::to_string(j); };
  auto term = [&](double coef, const std::string& var) {
    std::string s = coef < 0.0 ? " - " : " + ";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", std::abs(coef));
    return s + buf + " " + var;
  };
  out << "\\ pair variables x_i_j = 1 when i and j are in different communities\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", model.constant + [&] {
    double s = 0.0;
    for (double g : model.pair_gain) s += g;
    return s;
  }());
  out << "\\ objective constant (add to reported value): " << buf << "\n";
  out << "Maximize\n obj:";
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) out << term(-model.pair_gain[pair_index(n, i, j)], name(i, j));
  out << "\nSubject To\n";
  std::size_t row = 0;
  for (const auto& t : model.triples) {
    const std::array<std::array<NodeId, 3>, 3> rotations{{{t.i, t.j, t.k}, {t.i, t.k, t.j}, {t.j, t.k, t.i}}};
    for (const auto& [a, b, c] : rotations) {
      out << " t" << row++ << ":" << term(1.0, name(std::min(a, c), std::max(a, c)))
          << term(1.0, name(std::min(b, c), std::max(b, c))) << term(-1.0, name(a, b)) << " >= 0\n";
    }
  }
  std::size_t index = 0;
  for (const auto& cut : cuts) {
    out << " c" << index++ << ":";
    for (const auto& t : cut.terms) out << term(t.coef, name(std::min(t.a, t.b), std::max(t.a, t.b)));
    std::snprintf(buf, sizeof buf, "%.17g", cut.rhs);
    out << " >= " << buf << "\n";
  }
  out << "Bounds\n";
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const bool fixed = model.fixed_separated[pair_index(n, i, j)] != 0;
      out << (fixed ? " 1 <= " : " 0 <= ") << name(i, j) << " <= 1\n";
    }
  }
  out << "Binaries\n";
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) out << " " << name(i, j) << "\n";
  out << "End\n";
}

}  // namespace modcut
