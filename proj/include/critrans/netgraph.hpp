#pragma once

// Graph of critically transitioning links for one evaluation year:
// connected components, modularity communities, cross-year community
// overlap and Pajek export.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "critrans/detector.hpp"

namespace critrans {

inline constexpr double kDefaultGraphThresholdBits = -1.0 * kBitsPerMillibit;

struct CriticalEdge {
  std::uint32_t citing = 0;  // index into CriticalGraph::nodes
  std::uint32_t cited = 0;
  double value_bits = 0.0;   // u (or v) of the link, below the threshold
};

struct CriticalGraph {
  int eval_year = 0;
  double threshold_bits = kDefaultGraphThresholdBits;
  Measure measure = Measure::U;
  std::vector<std::string> nodes;   // canonical name order
  std::vector<CriticalEdge> edges;  // sorted by (citing, cited)
  /// Connected component of each node, direction ignored. Component 0 holds
  /// the first node in name order, component 1 the first node not in 0, etc.
  std::vector<std::uint32_t> component_id;
  /// Empty until communities are assigned.
  std::vector<std::uint32_t> community_id;

  bool empty() const noexcept { return nodes.empty(); }
  std::size_t n_components() const;
  std::vector<std::size_t> component_sizes() const;
  /// Index of `name`, or -1.
  std::int64_t find(const std::string& name) const;
};

/// Links of `eval_year` whose measure lies strictly below `threshold_bits`
/// (which must be negative). `nodes` names the record link indices.
CriticalGraph build_critical_graph(std::span<const TransitionRecord> records,
                                   const NodeTable& nodes, int eval_year,
                                   double threshold_bits = kDefaultGraphThresholdBits,
                                   Measure measure = Measure::U);

/// Undirected weighted adjacency: weight of {a, b} sums |value| over a->b and
/// b->a. Self-links become self-loops counted once in the degree.
struct WeightedGraph {
  struct Arc {
    std::uint32_t to;
    double weight;
  };
  std::vector<std::vector<Arc>> adjacency;  // sorted by `to`, no self entries
  std::vector<double> self_loop;

  std::size_t size() const noexcept { return adjacency.size(); }
  double degree(std::size_t i) const;
  double total_degree() const;
};

WeightedGraph undirected_projection(const CriticalGraph& g);

/// Newman modularity with A_ii equal to the self-loop weight.
double modularity(const WeightedGraph& g, std::span<const std::uint32_t> community);

struct CommunityResult {
  std::vector<std::uint32_t> community_id;  // per node, renumbered by first node
  double modularity = 0.0;
  /// Modularity of the partition after each aggregation level.
  std::vector<double> level_modularity;
};

/// Two-phase greedy modularity optimisation (local moves until no gain, then
/// contraction, repeated to a fixed point). Nodes are visited in name order
/// and ties keep the current community, so the result is deterministic.
/// Throws on an empty graph.
CommunityResult find_communities(const CriticalGraph& g);

/// Runs find_communities and stores the labels in `g`.
void assign_communities(CriticalGraph& g);

struct CommunityOverlap {
  int year_a = 0;
  int year_b = 0;
  std::vector<std::string> community_a;  // sorted
  std::vector<std::string> community_b;
  std::size_t intersection_size = 0;
  double jaccard = 0.0;
};

/// Compares, between two graphs, the communities holding the anchor nodes.
/// When anchors fall into several communities of one graph their union is
/// used. Communities are computed on demand. Throws when `anchors` is empty
/// or an anchor is missing from a graph.
CommunityOverlap compare_communities(const CriticalGraph& a, const CriticalGraph& b,
                                     const std::set<std::string>& anchors);

/// Pajek .net text: `*Vertices n`, one `i "label"` line per node, then
/// `*Arcs` and `src dst weight` lines (1-based; weight = |value| in mbit).
std::string export_pajek(const CriticalGraph& g);

/// `citing cited value_bits component community` per edge.
void write_edges_tsv(std::ostream& out, const CriticalGraph& g);

}  // namespace critrans
