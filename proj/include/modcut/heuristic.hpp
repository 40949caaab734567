#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "modcut/error.hpp"
#include "modcut/graph.hpp"
#include "modcut/modularity.hpp"
#include "modcut/partition.hpp"

namespace modcut {

/// Symmetric gain matrix; objective = (sum of g_ij over same-community ordered pairs) / scale.
struct GainMatrix {
  SymmetricMatrix entries;
  double scale = 1.0;

  std::size_t size() const noexcept { return entries.size(); }

  static GainMatrix from(const ModularityMatrix& b) { return {b.entries, b.two_m}; }
};

struct HeuristicConfig {
  int max_sweeps = 100;
  std::uint64_t random_seed = 0;
  int restarts = 3;
};

struct HeuristicResult {
  Partition partition;
  double objective = 0.0;
};

/// Objective of `p` under `gm`, recomputed from scratch.
inline double gain_objective(const GainMatrix& gm, const Partition& p) {
  if (p.size() != gm.size()) throw ValidationError("partition and gain matrix sizes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < gm.size(); ++i) {
    const auto row = gm.entries.row(i);
    for (std::size_t j = 0; j < gm.size(); ++j) {
      if (p.same(i, j)) total += row[j];
    }
  }
  return total / gm.scale;
}

namespace detail {

class LocalSearch {
 public:
  LocalSearch(const GainMatrix& gm, std::vector<std::size_t> order)
      : g_(gm.entries), n_(gm.size()), order_(std::move(order)),
        label_(n_), size_(n_, 1), link_(n_, 0.0) {
    std::iota(label_.begin(), label_.end(), std::size_t{0});
    for (std::size_t i = 0; i < n_; ++i) value_ += g_(i, i);
  }

  // Returns true when at least one move or merge was applied.
  bool sweep() {
    const bool moved = relocate_nodes();
    check_monotone();
    const bool merged = merge_communities();
    check_monotone();
    return moved || merged;
  }

  const std::vector<std::size_t>& labels() const { return label_; }

 private:
  static constexpr double kMinGain = 1e-10;

  bool relocate_nodes() {
    bool improved = false;
    for (std::size_t i : order_) {
      std::fill(link_.begin(), link_.end(), 0.0);
      const auto row = g_.row(i);
      for (std::size_t j = 0; j < n_; ++j) {
        if (j != i) link_[label_[j]] += row[j];
      }
      const std::size_t current = label_[i];
      const double stay = link_[current];
      double best_gain = 0.0;
      std::size_t target = current;
      for (std::size_t c = 0; c < n_; ++c) {
        if (c == current || size_[c] == 0) continue;
        const double gain = 2.0 * (link_[c] - stay);
        if (gain > best_gain + kMinGain) {
          best_gain = gain;
          target = c;
        }
      }
      if (size_[current] > 1) {
        const double gain = -2.0 * stay;
        if (gain > best_gain + kMinGain) {
          best_gain = gain;
          target = empty_community();
        }
      }
      if (target != current) {
        --size_[current];
        ++size_[target];
        label_[i] = target;
        track(best_gain);
        improved = true;
      }
    }
    return improved;
  }

  bool merge_communities() {
    std::vector<std::size_t> ids;
    for (std::size_t c = 0; c < n_; ++c) {
      if (size_[c] > 0) ids.push_back(c);
    }
    const std::size_t k = ids.size();
    std::vector<std::size_t> slot(n_, 0);
    for (std::size_t s = 0; s < k; ++s) slot[ids[s]] = s;
    std::vector<double> between(k * k, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto row = g_.row(i);
      const std::size_t a = slot[label_[i]];
      for (std::size_t j = 0; j < n_; ++j) between[a * k + slot[label_[j]]] += row[j];
    }
    std::vector<char> alive(k, 1);
    std::vector<std::size_t> absorbed_into(k);
    std::iota(absorbed_into.begin(), absorbed_into.end(), std::size_t{0});
    bool improved = false;
    for (;;) {
      double best = kMinGain;
      std::size_t ba = k, bb = k;
      for (std::size_t a = 0; a < k; ++a) {
        if (!alive[a]) continue;
        for (std::size_t b = a + 1; b < k; ++b) {
          if (alive[b] && 2.0 * between[a * k + b] > best) {
            best = 2.0 * between[a * k + b];
            ba = a;
            bb = b;
          }
        }
      }
      if (ba == k) break;
      const double diagonal =
          between[ba * k + ba] + between[bb * k + bb] + 2.0 * between[ba * k + bb];
      for (std::size_t c = 0; c < k; ++c) {
        if (c == ba || c == bb) continue;
        between[ba * k + c] += between[bb * k + c];
        between[c * k + ba] = between[ba * k + c];
      }
      between[ba * k + ba] = diagonal;
      alive[bb] = 0;
      absorbed_into[bb] = ba;
      track(best);
      improved = true;
    }
    if (improved) {
      for (std::size_t i = 0; i < n_; ++i) {
        std::size_t s = slot[label_[i]];
        while (absorbed_into[s] != s) s = absorbed_into[s];
        label_[i] = ids[s];
      }
      std::fill(size_.begin(), size_.end(), 0);
      for (auto l : label_) ++size_[l];
    }
    return improved;
  }

  std::size_t empty_community() const {
    for (std::size_t c = 0; c < n_; ++c) {
      if (size_[c] == 0) return c;
    }
    return n_;  // unreachable: a non-singleton community implies a free id
  }

  void track(double gain) {
    assert(gain > 0.0);
    value_ += gain;
  }

  // Debug builds recompute the objective after every phase; it must never drop.
  void check_monotone() {
#ifndef NDEBUG
    double fresh = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (label_[i] == label_[j]) fresh += g_(i, j);
      }
    }
    assert(fresh >= last_checked_ - 1e-9);
    assert(std::abs(fresh - value_) <= 1e-7 * (1.0 + std::abs(fresh)));
    last_checked_ = fresh;
#endif
  }

  const SymmetricMatrix& g_;
  std::size_t n_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> label_;
  std::vector<std::size_t> size_;
  std::vector<double> link_;
  double value_ = 0.0;
#ifndef NDEBUG
  double last_checked_ = -1e300;
#endif
};

}  // namespace detail

/**
 * Local-search maximizer of a gain matrix. Each restart starts from
 * singletons with a seeded node order and alternates steepest single-node
 * relocation sweeps with greedy community-pair merges until neither
 * improves or `max_sweeps` is hit. The best restart wins; ties keep the
 * earliest. Deterministic for a fixed seed.
 */
inline HeuristicResult maximize_gain(const GainMatrix& gm, const HeuristicConfig& cfg = {}) {
  if (cfg.max_sweeps < 1 || cfg.restarts < 1) {
    throw ValidationError("heuristic needs max_sweeps >= 1 and restarts >= 1");
  }
  if (!(gm.scale > 0.0)) throw ValidationError("gain matrix scale must be positive");
  const std::size_t n = gm.size();
  HeuristicResult best;
  bool have_best = false;
  for (int r = 0; r < cfg.restarts; ++r) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (r > 0) {
      std::mt19937_64 rng(cfg.random_seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(r));
      std::shuffle(order.begin(), order.end(), rng);
    }
    detail::LocalSearch search(gm, std::move(order));
    for (int s = 0; s < cfg.max_sweeps && search.sweep(); ++s) {
    }
    Partition p(search.labels());
    const double value = gain_objective(gm, p);
    if (!have_best || value > best.objective + 1e-12) {
      best = {std::move(p), value};
      have_best = true;
    }
  }
  return best;
}

/// Best partition found by the local search on the modularity matrix, with its true modularity.
inline HeuristicResult heuristic_modularity(const Graph& g, double gamma,
                                            const HeuristicConfig& cfg = {}) {
  auto result = maximize_gain(GainMatrix::from(modularity_matrix(g, gamma)), cfg);
  result.objective = modularity(g, result.partition, gamma);
  return result;
}

/// Lowers the six entries linking the triple by `delta`.
inline GainMatrix perturb_for_right_cut(GainMatrix gm, std::array<NodeId, 3> triple,
                                        double delta) {
  const auto [i, j, k] = triple;
  if (i == j || i == k || j == k) throw ValidationError("right-cut triple must be distinct");
  if (std::max({i, j, k}) >= gm.size()) throw ValidationError("right-cut triple out of range");
  gm.entries.add(i, j, -delta);
  gm.entries.add(i, k, -delta);
  gm.entries.add(j, k, -delta);
  return gm;
}

}  // namespace modcut
