#include "critrans/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace critrans {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t root(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = root(a);
    b = root(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

// Relabels so that labels appear in increasing order of first occurrence.
std::vector<std::uint32_t> renumber(std::span<const std::uint32_t> labels) {
  std::unordered_map<std::uint32_t, std::uint32_t> seen;
  std::vector<std::uint32_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = seen.try_emplace(labels[i], static_cast<std::uint32_t>(seen.size()));
    out[i] = it->second;
  }
  return out;
}

// One level of local moves. Returns true if any node changed community.
bool local_moves(const WeightedGraph& g, std::vector<std::uint32_t>& comm) {
  const std::size_t n = g.size();
  const double m2 = g.total_degree();
  std::vector<double> k(n);
  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = g.degree(i);
    tot[comm[i]] += k[i];
  }

  std::vector<double> w_to(n, 0.0);
  std::vector<char> is_touched(n, 0);
  std::vector<std::uint32_t> touched;
  bool any_move = false;
  constexpr int kMaxPasses = 1000;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t own = comm[i];
      touched.clear();
      touched.push_back(own);
      is_touched[own] = 1;
      for (const auto& arc : g.adjacency[i]) {
        const std::uint32_t c = comm[arc.to];
        if (!is_touched[c]) {
          is_touched[c] = 1;
          touched.push_back(c);
        }
        w_to[c] += arc.weight;
      }
      tot[own] -= k[i];

      // Gain of inserting i into c, up to the common factor 1/m.
      auto gain = [&](std::uint32_t c) { return w_to[c] - tot[c] * k[i] / m2; };
      std::uint32_t best = own;
      double best_gain = gain(own);
      std::sort(touched.begin(), touched.end());
      for (auto c : touched) {
        const double gc = gain(c);
        if (gc > best_gain + 1e-14 * std::max(1.0, std::abs(best_gain))) {
          best = c;
          best_gain = gc;
        }
      }
      tot[best] += k[i];
      if (best != own) {
        comm[i] = best;
        moved = true;
      }
      for (auto c : touched) {
        w_to[c] = 0.0;
        is_touched[c] = 0;
      }
    }
    if (!moved) break;
    any_move = true;
  }
  return any_move;
}

WeightedGraph contract(const WeightedGraph& g, std::span<const std::uint32_t> comm,
                       std::size_t n_comm) {
  WeightedGraph out;
  out.adjacency.resize(n_comm);
  out.self_loop.assign(n_comm, 0.0);
  std::vector<std::map<std::uint32_t, double>> acc(n_comm);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto ci = comm[i];
    out.self_loop[ci] += g.self_loop[i];
    for (const auto& arc : g.adjacency[i]) {
      const auto cj = comm[arc.to];
      if (ci == cj) {
        out.self_loop[ci] += arc.weight;  // each internal edge is seen from both ends
      } else {
        acc[ci][cj] += arc.weight;
      }
    }
  }
  for (std::size_t c = 0; c < n_comm; ++c) {
    for (const auto& [to, w] : acc[c]) out.adjacency[c].push_back({to, w});
  }
  return out;
}

}  // namespace

std::size_t CriticalGraph::n_components() const {
  if (component_id.empty()) return 0;
  return *std::max_element(component_id.begin(), component_id.end()) + 1;
}

std::vector<std::size_t> CriticalGraph::component_sizes() const {
  std::vector<std::size_t> sizes(n_components(), 0);
  for (auto c : component_id) ++sizes[c];
  return sizes;
}

std::int64_t CriticalGraph::find(const std::string& name) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), name);
  if (it == nodes.end() || *it != name) return -1;
  return it - nodes.begin();
}

CriticalGraph build_critical_graph(std::span<const TransitionRecord> records,
                                   const NodeTable& nodes, int eval_year, double threshold_bits,
                                   Measure measure) {
  if (!(threshold_bits < 0.0)) {
    throw Error("build_critical_graph: threshold must be negative, got " +
                format_double(threshold_bits));
  }
  CriticalGraph g;
  g.eval_year = eval_year;
  g.threshold_bits = threshold_bits;
  g.measure = measure;

  std::vector<const TransitionRecord*> picked;
  for (const auto& r : records) {
    if (r.eval_year == eval_year && measure_of(r, measure) < threshold_bits) picked.push_back(&r);
  }
  std::vector<std::string> names;
  names.reserve(picked.size() * 2);
  for (const auto* r : picked) {
    names.push_back(nodes.name(r->link.citing));
    names.push_back(nodes.name(r->link.cited));
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  g.nodes = std::move(names);

  g.edges.reserve(picked.size());
  for (const auto* r : picked) {
    g.edges.push_back(CriticalEdge{static_cast<std::uint32_t>(g.find(nodes.name(r->link.citing))),
                                   static_cast<std::uint32_t>(g.find(nodes.name(r->link.cited))),
                                   measure_of(*r, measure)});
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const CriticalEdge& a, const CriticalEdge& b) {
    return std::tie(a.citing, a.cited) < std::tie(b.citing, b.cited);
  });

  UnionFind uf(g.nodes.size());
  for (const auto& e : g.edges) uf.unite(e.citing, e.cited);
  std::vector<std::uint32_t> roots(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    roots[i] = static_cast<std::uint32_t>(uf.root(i));
  }
  g.component_id = renumber(roots);
  return g;
}

double WeightedGraph::degree(std::size_t i) const {
  double d = self_loop[i];
  for (const auto& a : adjacency[i]) d += a.weight;
  return d;
}

double WeightedGraph::total_degree() const {
  double t = 0.0;
  for (std::size_t i = 0; i < size(); ++i) t += degree(i);
  return t;
}

WeightedGraph undirected_projection(const CriticalGraph& g) {
  WeightedGraph w;
  w.adjacency.resize(g.nodes.size());
  w.self_loop.assign(g.nodes.size(), 0.0);
  std::vector<std::map<std::uint32_t, double>> acc(g.nodes.size());
  for (const auto& e : g.edges) {
    const double weight = std::abs(e.value_bits);
    if (e.citing == e.cited) {
      w.self_loop[e.citing] += weight;
    } else {
      acc[e.citing][e.cited] += weight;
      acc[e.cited][e.citing] += weight;
    }
  }
  for (std::size_t i = 0; i < acc.size(); ++i) {
    for (const auto& [to, weight] : acc[i]) w.adjacency[i].push_back({to, weight});
  }
  return w;
}

double modularity(const WeightedGraph& g, std::span<const std::uint32_t> community) {
  if (community.size() != g.size()) throw Error("modularity: partition size mismatch");
  const double m2 = g.total_degree();
  if (m2 <= 0.0) return 0.0;
  const std::size_t n_comm =
      community.empty() ? 0 : *std::max_element(community.begin(), community.end()) + 1;
  std::vector<double> in(n_comm, 0.0);
  std::vector<double> tot(n_comm, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = community[i];
    tot[c] += g.degree(i);
    in[c] += g.self_loop[i];
    for (const auto& a : g.adjacency[i]) {
      if (community[a.to] == c) in[c] += a.weight;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < n_comm; ++c) q += in[c] / m2 - (tot[c] / m2) * (tot[c] / m2);
  return q;
}

CommunityResult find_communities(const CriticalGraph& g) {
  if (g.empty()) throw Error("find_communities: graph is empty");
  const WeightedGraph base = undirected_projection(g);

  CommunityResult result;
  std::vector<std::uint32_t> node_comm(base.size());
  std::iota(node_comm.begin(), node_comm.end(), 0u);
  if (base.total_degree() <= 0.0) {
    result.community_id = node_comm;
    return result;
  }

  WeightedGraph level = base;
  while (true) {
    std::vector<std::uint32_t> comm(level.size());
    std::iota(comm.begin(), comm.end(), 0u);
    const bool moved = local_moves(level, comm);
    if (!moved) break;
    comm = renumber(comm);
    const std::size_t n_comm = *std::max_element(comm.begin(), comm.end()) + 1;
    for (auto& c : node_comm) c = comm[c];
    result.level_modularity.push_back(modularity(base, node_comm));
    if (n_comm == level.size()) break;
    level = contract(level, comm, n_comm);
  }
  result.community_id = renumber(node_comm);
  result.modularity = modularity(base, result.community_id);
  return result;
}

void assign_communities(CriticalGraph& g) { g.community_id = find_communities(g).community_id; }

CommunityOverlap compare_communities(const CriticalGraph& a, const CriticalGraph& b,
                                     const std::set<std::string>& anchors) {
  if (anchors.empty()) throw Error("compare_communities: no anchor nodes given");
  auto members = [&](const CriticalGraph& g) {
    for (const auto& name : anchors) {
      if (g.find(name) < 0) {
        throw Error("compare_communities: anchor '" + name + "' absent from the " +
                    std::to_string(g.eval_year) + " graph");
      }
    }
    std::vector<std::uint32_t> labels =
        g.community_id.empty() ? find_communities(g).community_id : g.community_id;
    std::set<std::uint32_t> wanted;
    for (const auto& name : anchors) wanted.insert(labels[static_cast<std::size_t>(g.find(name))]);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if (wanted.count(labels[i])) out.push_back(g.nodes[i]);
    }
    return out;
  };

  CommunityOverlap o;
  o.year_a = a.eval_year;
  o.year_b = b.eval_year;
  o.community_a = members(a);
  o.community_b = members(b);
  std::vector<std::string> common;
  std::set_intersection(o.community_a.begin(), o.community_a.end(), o.community_b.begin(),
                        o.community_b.end(), std::back_inserter(common));
  o.intersection_size = common.size();
  const std::size_t uni = o.community_a.size() + o.community_b.size() - common.size();
  o.jaccard = uni == 0 ? 0.0 : static_cast<double>(common.size()) / static_cast<double>(uni);
  return o;
}

std::string export_pajek(const CriticalGraph& g) {
  std::ostringstream out;
  out << "*Vertices " << g.nodes.size() << '\n';
  if (g.nodes.empty()) return out.str();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    std::string label = g.nodes[i];
    std::replace(label.begin(), label.end(), '"', '\'');
    out << (i + 1) << " \"" << label << "\"\n";
  }
  out << "*Arcs\n";
  for (const auto& e : g.edges) {
    out << (e.citing + 1) << ' ' << (e.cited + 1) << ' '
        << format_double(std::abs(e.value_bits) * 1000.0) << '\n';
  }
  return out.str();
}

void write_edges_tsv(std::ostream& out, const CriticalGraph& g) {
  out << "citing\tcited\tvalue_bits\tcomponent\tcommunity\n";
  for (const auto& e : g.edges) {
    out << g.nodes[e.citing] << '\t' << g.nodes[e.cited] << '\t' << format_double(e.value_bits)
        << '\t' << g.component_id[e.citing] << '\t';
    if (g.community_id.empty()) {
      out << "NA";
    } else {
      out << g.community_id[e.citing];
    }
    out << '\n';
  }
}

}  // namespace critrans
