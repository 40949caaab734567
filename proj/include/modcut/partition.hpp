#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "modcut/error.hpp"

namespace modcut {

/**
 * Assignment of nodes 0..n-1 to communities.
 *
 * Labels are always held in canonical form: communities are numbered in
 * order of first appearance, so two partitions compare equal exactly when
 * they group the nodes the same way.
 */
class Partition {
 public:
  Partition() = default;

  template <typename Label>
  explicit Partition(const std::vector<Label>& raw) : labels_(raw.size()) {
    std::map<Label, std::size_t> seen;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      auto [it, inserted] = seen.try_emplace(raw[i], seen.size());
      labels_[i] = it->second;
    }
    count_ = seen.size();
  }

  static Partition singletons(std::size_t n) {
    std::vector<std::size_t> labels(n);
    std::iota(labels.begin(), labels.end(), std::size_t{0});
    return Partition(labels);
  }

  static Partition all_in_one(std::size_t n) {
    return Partition(std::vector<std::size_t>(n, 0));
  }

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t community_count() const noexcept { return count_; }
  std::size_t operator[](std::size_t i) const { return labels_.at(i); }
  const std::vector<std::size_t>& labels() const noexcept { return labels_; }
  bool same(std::size_t i, std::size_t j) const { return labels_.at(i) == labels_.at(j); }

  /// Member lists per community, each sorted ascending.
  std::vector<std::vector<std::size_t>> communities() const {
    std::vector<std::vector<std::size_t>> out(count_);
    for (std::size_t i = 0; i < labels_.size(); ++i) out[labels_[i]].push_back(i);
    return out;
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::size_t> labels_;
  std::size_t count_ = 0;
};

/// Upper-triangular binary pair matrix: x_ij = 0 iff i and j share a community.
class PairAssignment {
 public:
  PairAssignment() = default;
  explicit PairAssignment(std::size_t n, std::uint8_t value = 1)
      : n_(n), x_(n < 2 ? 0 : n * (n - 1) / 2, value) {}

  std::size_t size() const noexcept { return n_; }

  std::uint8_t operator()(std::size_t i, std::size_t j) const { return x_.at(index(i, j)); }
  void set(std::size_t i, std::size_t j, bool separated) {
    x_.at(index(i, j)) = separated ? 1 : 0;
  }

  /// Position of the pair {i, j}, i != j, in row-major upper-triangular order.
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i == j || i >= n_ || j >= n_) throw ValidationError("invalid pair index");
    if (i > j) std::swap(i, j);
    return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> x_;
};

inline PairAssignment pairs_from_partition(const Partition& p) {
  const std::size_t n = p.size();
  PairAssignment x(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) x.set(i, j, !p.same(i, j));
  }
  return x;
}

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t v) {
    while (parent_[v] != v) v = parent_[v] = parent_[parent_[v]];
    return v;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Communities are the connected components of the "x_ij = 0" relation.
inline Partition partition_from_pairs(const PairAssignment& x) {
  const std::size_t n = x.size();
  detail::DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (x(i, j) == 0) sets.unite(i, j);
    }
  }
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = sets.find(i);
  return Partition(labels);
}

/// Symmetric normalizer used in the denominator of AMI.
enum class AmiNormalizer { arithmetic, geometric, max, min };

namespace detail {

struct Contingency {
  std::vector<double> rows;
  std::vector<double> cols;
  std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>> cells;
  double total = 0.0;
};

inline Contingency contingency(const Partition& a, const Partition& b) {
  Contingency t;
  t.rows.assign(a.community_count(), 0.0);
  t.cols.assign(b.community_count(), 0.0);
  std::map<std::pair<std::size_t, std::size_t>, double> cells;
  for (std::size_t i = 0; i < a.size(); ++i) {
    t.rows[a[i]] += 1.0;
    t.cols[b[i]] += 1.0;
    cells[{a[i], b[i]}] += 1.0;
  }
  t.cells.assign(cells.begin(), cells.end());
  t.total = static_cast<double>(a.size());
  return t;
}

inline double entropy(const std::vector<double>& counts, double total) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= (c / total) * std::log(c / total);
  }
  return h;
}

// Expected mutual information under the hypergeometric permutation model.
inline double expected_mutual_information(const Contingency& t) {
  const double n = t.total;
  const double lg_n = std::lgamma(n + 1.0);
  double emi = 0.0;
  for (double a : t.rows) {
    for (double b : t.cols) {
      const double lo = std::max(1.0, a + b - n);
      const double hi = std::min(a, b);
      const double fixed = std::lgamma(a + 1.0) + std::lgamma(b + 1.0) +
                           std::lgamma(n - a + 1.0) + std::lgamma(n - b + 1.0) - lg_n;
      for (double nij = lo; nij <= hi; nij += 1.0) {
        const double log_prob = fixed - std::lgamma(nij + 1.0) - std::lgamma(a - nij + 1.0) -
                                std::lgamma(b - nij + 1.0) -
                                std::lgamma(n - a - b + nij + 1.0);
        emi += (nij / n) * std::log(n * nij / (a * b)) * std::exp(log_prob);
      }
    }
  }
  return emi;
}

}  // namespace detail

/**
 * Adjusted mutual information between two partitions of the same node set:
 * (MI - E[MI]) / (norm(H1, H2) - E[MI]), with E[MI] taken under the
 * permutation model. Equivalent partitions score exactly 1.
 */
inline double ami(const Partition& a, const Partition& b,
                  AmiNormalizer normalizer = AmiNormalizer::arithmetic) {
  if (a.size() != b.size()) {
    throw ValidationError("partitions cover " + std::to_string(a.size()) + " and " +
                          std::to_string(b.size()) + " nodes");
  }
  if (a == b) return 1.0;
  // fixed argument order keeps the floating-point sums identical for (a, b) and (b, a)
  const bool swap = b.labels() < a.labels();
  const auto t = swap ? detail::contingency(b, a) : detail::contingency(a, b);
  const double n = t.total;
  double mi = 0.0;
  for (const auto& [cell, c] : t.cells) {
    mi += (c / n) * std::log(n * c / (t.rows[cell.first] * t.cols[cell.second]));
  }
  const double h1 = detail::entropy(t.rows, n);
  const double h2 = detail::entropy(t.cols, n);
  double norm = 0.0;
  switch (normalizer) {
    case AmiNormalizer::arithmetic: norm = 0.5 * (h1 + h2); break;
    case AmiNormalizer::geometric: norm = std::sqrt(h1 * h2); break;
    case AmiNormalizer::max: norm = std::max(h1, h2); break;
    case AmiNormalizer::min: norm = std::min(h1, h2); break;
  }
  const double emi = detail::expected_mutual_information(t);
  double denominator = norm - emi;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (std::abs(denominator) < eps) denominator = denominator < 0.0 ? -eps : eps;
  return (mi - emi) / denominator;
}

}  // namespace modcut
