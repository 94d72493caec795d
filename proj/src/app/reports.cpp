#include <algorithm>
#include <cmath>

#include "critrans/app.hpp"
#include "json.hpp"

namespace critrans::app {

using nlohmann::ordered_json;

std::string summaries_json(const std::vector<YearSummary>& summaries) {
  ordered_json arr = ordered_json::array();
  for (const auto& s : summaries) {
    arr.push_back({{"eval_year", s.eval_year},
                   {"n_links", s.n_links},
                   {"n_critical_fwd", s.n_critical_fwd},
                   {"n_critical_bwd", s.n_critical_bwd},
                   {"n_improved_fwd", s.n_improved_fwd},
                   {"n_improved_bwd", s.n_improved_bwd},
                   {"n_tied", s.n_tied},
                   {"frac_critical", s.frac_critical},
                   {"frac_improved_fwd", s.frac_improved_fwd}});
  }
  return ordered_json{{"years", arr}}.dump(2) + "\n";
}

std::string histogram_json(const Histogram& h) {
  ordered_json edges = ordered_json::array();
  for (double e : h.bin_edges) {
    // JSON has no infinities; open ends are written as null.
    edges.push_back(std::isfinite(e) ? ordered_json(e / kBitsPerMillibit) : ordered_json(nullptr));
  }
  ordered_json j;
  j["unit"] = "mbit";
  j["bin_edges"] = edges;
  j["counts"] = h.counts;
  j["total"] = h.total;
  j["range_of_interest"] = {h.range_of_interest.lo / kBitsPerMillibit,
                            h.range_of_interest.hi / kBitsPerMillibit};
  j["in_range_fraction"] = h.in_range_fraction;
  return j.dump(2) + "\n";
}

std::string graph_report_json(const CriticalGraph& g, const CommunityResult& communities) {
  ordered_json j;
  j["eval_year"] = g.eval_year;
  j["measure"] = g.measure == Measure::U ? "u" : "v";
  j["threshold_mbit"] = g.threshold_bits / kBitsPerMillibit;
  j["n_nodes"] = g.nodes.size();
  j["n_edges"] = g.edges.size();

  auto sizes = g.component_sizes();
  j["n_components"] = sizes.size();
  j["largest_component"] = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
  j["component_sizes"] = sizes;

  std::vector<std::size_t> comm_sizes;
  for (auto c : communities.community_id) {
    if (c >= comm_sizes.size()) comm_sizes.resize(c + 1, 0);
    ++comm_sizes[c];
  }
  j["n_communities"] = comm_sizes.size();
  j["community_sizes"] = comm_sizes;
  j["modularity"] = communities.modularity;

  ordered_json nodes = ordered_json::array();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    ordered_json n{{"name", g.nodes[i]}, {"component", g.component_id[i]}};
    if (!communities.community_id.empty()) n["community"] = communities.community_id[i];
    nodes.push_back(n);
  }
  j["nodes"] = nodes;
  return j.dump(2) + "\n";
}

std::string overlap_json(const CommunityOverlap& o) {
  ordered_json j;
  j["year_a"] = o.year_a;
  j["year_b"] = o.year_b;
  j["size_a"] = o.community_a.size();
  j["size_b"] = o.community_b.size();
  j["intersection_size"] = o.intersection_size;
  j["jaccard"] = o.jaccard;
  j["community_a"] = o.community_a;
  j["community_b"] = o.community_b;
  return j.dump(2) + "\n";
}

}  // namespace critrans::app
