#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modcut/error.hpp"
#include "modcut/graph.hpp"
#include "modcut/partition.hpp"

namespace modcut {

enum class GraphFormat { edgelist, pairs };

namespace detail {

inline std::vector<std::string> split_tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  return tokens;
}

inline std::optional<std::size_t> parse_index(std::string_view token) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

inline double parse_weight(const std::string& token, std::size_t line) {
  double w = 0.0;
  std::size_t used = 0;
  try {
    w = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "weight '" + token + "' is not a number");
  }
  if (used != token.size()) throw ParseError(line, "weight '" + token + "' is not a number");
  if (!(w > 0.0)) {
    throw ValidationError("line " + std::to_string(line) + ": weight " + token +
                          " is not positive");
  }
  return w;
}

// "n=<count>" header, with optional spaces around '='.
inline std::optional<std::size_t> parse_count_header(const std::string& line, std::size_t lineno) {
  std::string compact;
  for (char c : line) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
  }
  if (compact.size() < 2 || compact[0] != 'n' || compact[1] != '=') return std::nullopt;
  auto count = parse_index(std::string_view(compact).substr(2));
  if (!count) throw ParseError(lineno, "malformed node-count header '" + line + "'");
  return count;
}

struct RawEdge {
  std::string u;
  std::string v;
  double weight;
  std::size_t line;
};

struct RawEdgeList {
  std::vector<RawEdge> edges;
  std::optional<std::size_t> declared_nodes;
};

inline RawEdgeList read_raw_edges(std::istream& in, bool weighted) {
  RawEdgeList out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#' || line[first] == '%') continue;
    if (auto header = parse_count_header(line, lineno)) {
      if (out.declared_nodes) throw ParseError(lineno, "duplicate node-count header");
      out.declared_nodes = header;
      continue;
    }
    auto tokens = split_tokens(line);
    if (tokens.size() < 2 || tokens.size() > 3) {
      throw ParseError(lineno, "expected 2 or 3 columns, found " + std::to_string(tokens.size()));
    }
    double w = 1.0;
    if (tokens.size() == 3) {
      const double parsed = parse_weight(tokens[2], lineno);
      if (weighted) w = parsed;
    }
    out.edges.push_back({tokens[0], tokens[1], w, lineno});
  }
  return out;
}

}  // namespace detail

/**
 * Reads a whitespace-separated edge list. Lines starting with '#' are
 * comments, an optional third column carries the weight (used only when
 * `weighted` is set), and an optional `n=<count>` line declares the node
 * count so that isolated nodes survive.
 *
 * When every node token is a nonnegative integer, ids are ordered
 * numerically; with a header they are kept literally, otherwise the
 * distinct ids are compacted to 0..k-1. Other tokens are numbered in order
 * of first appearance. Original tokens are kept as node labels.
 */
inline Graph parse_edge_list(std::istream& in, bool weighted = false) {
  auto raw = detail::read_raw_edges(in, weighted);
  bool numeric = true;
  for (const auto& e : raw.edges) {
    if (!detail::parse_index(e.u) || !detail::parse_index(e.v)) {
      numeric = false;
      break;
    }
  }

  std::vector<Edge> edges;
  std::vector<std::string> labels;
  std::size_t n = 0;
  if (numeric) {
    std::map<std::size_t, std::size_t> ids;
    for (const auto& e : raw.edges) {
      ids.emplace(*detail::parse_index(e.u), 0);
      ids.emplace(*detail::parse_index(e.v), 0);
    }
    if (raw.declared_nodes) {
      n = *raw.declared_nodes;
      for (const auto& e : raw.edges) {
        for (const auto* tok : {&e.u, &e.v}) {
          if (*detail::parse_index(*tok) >= n) {
            throw ParseError(e.line, "node " + *tok + " outside declared range n=" +
                                         std::to_string(n));
          }
        }
      }
      for (auto& [id, local] : ids) local = id;
      labels.resize(n);
      for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
    } else {
      for (auto& [id, local] : ids) {
        local = labels.size();
        labels.push_back(std::to_string(id));
      }
      n = labels.size();
    }
    for (const auto& e : raw.edges) {
      edges.push_back({ids.at(*detail::parse_index(e.u)), ids.at(*detail::parse_index(e.v)),
                       e.weight});
    }
  } else {
    std::map<std::string, std::size_t> ids;
    auto intern = [&](const std::string& tok) {
      auto [it, inserted] = ids.try_emplace(tok, labels.size());
      if (inserted) labels.push_back(tok);
      return it->second;
    };
    for (const auto& e : raw.edges) {
      const auto u = intern(e.u);
      const auto v = intern(e.v);
      edges.push_back({u, v, e.weight});
    }
    n = labels.size();
    if (raw.declared_nodes) {
      if (*raw.declared_nodes < n) {
        throw ValidationError("declared node count " + std::to_string(*raw.declared_nodes) +
                              " is below the " + std::to_string(n) + " labels in use");
      }
      for (; n < *raw.declared_nodes; ++n) labels.push_back("_isolated" + std::to_string(n));
    }
  }
  return Graph(n, std::move(edges), std::move(labels));
}

/**
 * Reads the adjacency-pairs format: integer node ids taken literally, the
 * node count from an `n=<count>` header or else max id + 1.
 */
inline Graph parse_pairs(std::istream& in, bool weighted = false) {
  auto raw = detail::read_raw_edges(in, weighted);
  std::vector<Edge> edges;
  std::size_t max_id = 0;
  for (const auto& e : raw.edges) {
    auto u = detail::parse_index(e.u);
    auto v = detail::parse_index(e.v);
    if (!u || !v) throw ParseError(e.line, "node ids must be nonnegative integers");
    max_id = std::max({max_id, *u, *v});
    edges.push_back({*u, *v, e.weight});
  }
  std::size_t n = raw.edges.empty() ? 0 : max_id + 1;
  if (raw.declared_nodes) {
    if (!raw.edges.empty() && max_id >= *raw.declared_nodes) {
      throw ValidationError("node " + std::to_string(max_id) + " outside declared range n=" +
                            std::to_string(*raw.declared_nodes));
    }
    n = *raw.declared_nodes;
  }
  return Graph(n, std::move(edges));
}

inline Graph parse_graph(std::istream& in, GraphFormat format, bool weighted) {
  return format == GraphFormat::edgelist ? parse_edge_list(in, weighted) : parse_pairs(in, weighted);
}

inline Graph read_graph_file(const std::string& path, GraphFormat format = GraphFormat::edgelist,
                             bool weighted = false) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_graph(in, format, weighted);
}

/// Partition file contents: (node label, community label) in file order.
using LabeledPartition = std::vector<std::pair<std::string, std::string>>;

/// Reads `node_id community_id` lines; '#' lines are comments.
inline LabeledPartition parse_partition(std::istream& in) {
  LabeledPartition out;
  std::map<std::string, std::size_t> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto tokens = detail::split_tokens(line);
    if (tokens.size() != 2) {
      throw ParseError(lineno, "expected 'node community', found " +
                                   std::to_string(tokens.size()) + " columns");
    }
    if (!seen.emplace(tokens[0], lineno).second) {
      throw ParseError(lineno, "node '" + tokens[0] + "' assigned twice");
    }
    out.emplace_back(tokens[0], tokens[1]);
  }
  return out;
}

inline LabeledPartition read_partition_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_partition(in);
}

/// Aligns two labeled partitions on their shared node set (ordered as in `a`).
inline std::pair<Partition, Partition> align_partitions(const LabeledPartition& a,
                                                        const LabeledPartition& b) {
  if (a.size() != b.size()) {
    throw ValidationError("partitions cover " + std::to_string(a.size()) + " and " +
                          std::to_string(b.size()) + " nodes");
  }
  std::map<std::string, const std::string*> other;
  for (const auto& [node, community] : b) other.emplace(node, &community);
  std::vector<std::string> la, lb;
  for (const auto& [node, community] : a) {
    auto it = other.find(node);
    if (it == other.end()) throw ValidationError("node '" + node + "' missing from second partition");
    la.push_back(community);
    lb.push_back(*it->second);
  }
  return {Partition(la), Partition(lb)};
}

/// Writes `label community` lines using the graph's node labels.
inline void write_partition(std::ostream& out, const Graph& g, const Partition& p) {
  for (NodeId v = 0; v < g.node_count(); ++v) out << g.label(v) << ' ' << p[v] << '\n';
}

}  // namespace modcut
