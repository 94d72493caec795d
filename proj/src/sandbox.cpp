#include "critrans/sandbox.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <set>

namespace critrans {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error("Rng::below: empty range");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  if (spare_) {
    double s = *spare_;
    spare_.reset();
    return s;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

// ---------------------------------------------------------------- sandpile

void SandpileConfig::validate() const {
  if (width < 3 || height < 3) throw Error("sandpile: width and height must be at least 3");
  // Toppling moves four grains, so a lower threshold would drive heights
  // negative.
  if (topple_threshold < 4) throw Error("sandpile: topple_threshold must be at least 4");
}

namespace {

std::size_t grid_cells(const SandpileConfig& c) {
  c.validate();
  return static_cast<std::size_t>(c.width) * static_cast<std::size_t>(c.height);
}

}  // namespace

Sandpile::Sandpile(const SandpileConfig& config)
    : Sandpile(config, std::vector<std::uint32_t>(grid_cells(config), 0)) {}

Sandpile::Sandpile(const SandpileConfig& config, std::vector<std::uint32_t> heights)
    : config_(config), heights_(std::move(heights)), rng_(config.seed) {
  config_.validate();
  if (heights_.size() != static_cast<std::size_t>(config_.width) * config_.height) {
    throw Error("sandpile: initial grid has the wrong size");
  }
  for (auto h : heights_) initial_ += h;
  on_grid_ = initial_;
  // Relax any supercritical start so that every drop begins from a stable grid.
  for (std::size_t i = 0; i < heights_.size(); ++i) relax(i);
}

std::uint64_t Sandpile::drop() {
  std::size_t site;
  if (config_.drop_rule == DropRule::Center) {
    site = static_cast<std::size_t>(config_.height / 2) * config_.width + config_.width / 2;
  } else {
    site = static_cast<std::size_t>(rng_.below(heights_.size()));
  }
  ++heights_[site];
  ++added_;
  ++on_grid_;
  return relax(site);
}

std::uint64_t Sandpile::drop_at(int x, int y) {
  if (x < 0 || y < 0 || x >= config_.width || y >= config_.height) {
    throw Error("sandpile: drop site outside the grid");
  }
  const std::size_t site = static_cast<std::size_t>(y) * config_.width + x;
  ++heights_[site];
  ++added_;
  ++on_grid_;
  return relax(site);
}

std::uint64_t Sandpile::relax(std::size_t start) {
  const std::uint32_t thr = static_cast<std::uint32_t>(config_.topple_threshold);
  const int w = config_.width;
  const int h = config_.height;
  std::uint64_t topplings = 0;
  stack_.clear();
  if (heights_[start] >= thr) stack_.push_back(start);
  while (!stack_.empty()) {
    const std::size_t i = stack_.back();
    stack_.pop_back();
    if (heights_[i] < thr) continue;
    const std::uint32_t n = (heights_[i] - thr) / 4 + 1;
    heights_[i] -= 4 * n;
    topplings += n;
    if (topplings > kMaxTopplingsPerDrop) {
      throw Error("sandpile: avalanche exceeded the toppling bound");
    }
    const int x = static_cast<int>(i % static_cast<std::size_t>(w));
    const int y = static_cast<int>(i / static_cast<std::size_t>(w));
    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int nx = x + dx[d];
      const int ny = y + dy[d];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
        lost_ += n;
        on_grid_ -= n;
        continue;
      }
      const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
      const bool was_below = heights_[j] < thr;
      heights_[j] += n;
      if (was_below && heights_[j] >= thr) stack_.push_back(j);
    }
  }
  return topplings;
}

std::uint32_t Sandpile::height_at(int x, int y) const {
  return heights_.at(static_cast<std::size_t>(y) * config_.width + x);
}

std::uint64_t Sandpile::count_grid() const {
  std::uint64_t t = 0;
  for (auto h : heights_) t += h;
  return t;
}

bool Sandpile::stable() const {
  const auto thr = static_cast<std::uint32_t>(config_.topple_threshold);
  return std::all_of(heights_.begin(), heights_.end(), [&](auto h) { return h < thr; });
}

AvalancheLog run_sandpile(const SandpileConfig& config) {
  Sandpile pile(config);
  AvalancheLog log;
  log.sizes.reserve(config.n_grains);
  for (std::uint64_t g = 0; g < config.n_grains; ++g) {
    const auto s = pile.drop();
    log.sizes.push_back(s);
    log.max_size = std::max(log.max_size, s);
  }
  log.grains_lost = pile.grains_lost();
  log.grains_on_grid = pile.grains_on_grid();
  return log;
}

void write_avalanche_log(std::ostream& out, const AvalancheLog& log) {
  for (auto s : log.sizes) out << s << '\n';
}

// --------------------------------------------------------------- synthetic

namespace {

struct BaseNetwork {
  std::vector<std::pair<int, int>> links;
  std::vector<std::uint64_t> counts;
};

BaseNetwork base_network(const SyntheticConfig& c, Rng& rng) {
  BaseNetwork net;
  std::vector<double> indegree(static_cast<std::size_t>(c.n_nodes), 0.0);
  std::vector<char> chosen(static_cast<std::size_t>(c.n_nodes), 0);
  for (int i = 0; i < c.n_nodes; ++i) {
    std::vector<int> picked;
    for (int m = 0; m < c.links_per_node; ++m) {
      double total = 0.0;
      for (int j = 0; j < c.n_nodes; ++j) {
        if (!chosen[j]) total += 1.0 + c.base_attachment * indegree[j];
      }
      double x = rng.uniform() * total;
      int target = -1;
      for (int j = 0; j < c.n_nodes; ++j) {
        if (chosen[j]) continue;
        target = j;
        x -= 1.0 + c.base_attachment * indegree[j];
        if (x < 0.0) break;
      }
      chosen[target] = 1;
      picked.push_back(target);
    }
    for (int j : picked) {
      chosen[j] = 0;
      indegree[j] += 1.0;
      net.links.emplace_back(i, j);
    }
  }

  // Polya urn: each extra citation goes to a link with probability
  // proportional to the citations it already holds.
  net.counts.assign(net.links.size(), c.min_base_count);
  std::vector<std::uint32_t> urn(net.links.size());
  for (std::size_t l = 0; l < urn.size(); ++l) urn[l] = static_cast<std::uint32_t>(l);
  const std::uint64_t extra = c.extra_per_link * net.links.size();
  urn.reserve(urn.size() + extra);
  for (std::uint64_t e = 0; e < extra; ++e) {
    const auto l = urn[rng.below(urn.size())];
    ++net.counts[l];
    urn.push_back(l);
  }
  return net;
}

}  // namespace

void SyntheticConfig::validate() const {
  if (n_nodes < 2) throw Error("synthetic: need at least 2 nodes");
  if (n_years < 1) throw Error("synthetic: need at least 1 year");
  if (links_per_node < 1 || links_per_node > n_nodes) {
    throw Error("synthetic: links_per_node must lie in [1, n_nodes]");
  }
  if (base_attachment < 0.0) throw Error("synthetic: base_attachment must be >= 0");
  if (noise_level < 0.0) throw Error("synthetic: noise_level must be >= 0");
  if (min_base_count < 1) throw Error("synthetic: min_base_count must be >= 1");
  if (volume_start < 1) throw Error("synthetic: volume_start must be >= 1");
  if (shock) {
    if (shock->year < first_year || shock->year >= first_year + n_years) {
      throw Error("synthetic: shock year " + std::to_string(shock->year) +
                  " outside the generated years");
    }
    if (!(shock->factor > 0.0) || shock->factor == 1.0) {
      throw Error("synthetic: shock factor must be positive and different from 1");
    }
  }
}

std::string synthetic_node_name(int i, int n_nodes) {
  const std::size_t width = std::to_string(std::max(n_nodes - 1, 0)).size();
  std::string digits = std::to_string(i);
  return "J" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

std::vector<std::pair<std::string, std::string>> synthetic_base_links(
    const SyntheticConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const auto net = base_network(config, rng);
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(net.links.size());
  for (const auto& [i, j] : net.links) {
    out.emplace_back(synthetic_node_name(i, config.n_nodes),
                     synthetic_node_name(j, config.n_nodes));
  }
  return out;
}

Corpus generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  Rng rng(config.seed);
  BaseNetwork net = base_network(config, rng);

  std::vector<std::string> names(static_cast<std::size_t>(config.n_nodes));
  std::map<std::string, int> index;
  for (int i = 0; i < config.n_nodes; ++i) {
    names[i] = synthetic_node_name(i, config.n_nodes);
    index[names[i]] = i;
  }

  std::vector<char> shocked(net.links.size(), 0);
  if (config.shock) {
    std::map<std::pair<int, int>, std::size_t> position;
    for (std::size_t l = 0; l < net.links.size(); ++l) position[net.links[l]] = l;
    std::vector<std::uint64_t> sorted_counts = net.counts;
    std::sort(sorted_counts.begin(), sorted_counts.end());
    const std::uint64_t median = sorted_counts[sorted_counts.size() / 2];
    for (const auto& [from, to] : config.shock->links) {
      auto a = index.find(canonical_name(from));
      auto b = index.find(canonical_name(to));
      if (a == index.end() || b == index.end()) {
        throw Error("synthetic: shock link " + from + " -> " + to +
                    " references an unknown node");
      }
      auto key = std::make_pair(a->second, b->second);
      auto it = position.find(key);
      if (it == position.end()) {
        it = position.emplace(key, net.links.size()).first;
        net.links.push_back(key);
        net.counts.push_back(median);
        shocked.push_back(0);
      }
      shocked[it->second] = 1;
    }
  }

  CorpusBuilder builder;
  for (const auto& n : names) builder.add_node(n);
  std::vector<double> walk(net.links.size(), 0.0);
  for (int y = 0; y < config.n_years; ++y) {
    const int year = config.first_year + y;
    builder.add_year(year);
    const std::uint64_t volume =
        config.volume_start + config.volume_step * static_cast<std::uint64_t>(y);
    for (std::size_t l = 0; l < net.links.size(); ++l) {
      std::uint64_t count = net.counts[l] * volume;
      if (config.noise_level > 0.0) {
        if (y > 0) walk[l] += config.noise_level * rng.normal();
        const double noisy = static_cast<double>(count) * std::exp(walk[l]);
        count = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(noisy)));
      }
      if (config.shock && shocked[l] && year >= config.shock->year) {
        const double scaled = static_cast<double>(count) * config.shock->factor;
        count = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(scaled)));
      }
      builder.add(year, names[net.links[l].first], names[net.links[l].second], count);
    }
  }
  return std::move(builder).build();
}

std::vector<std::pair<std::string, std::string>> pick_shock_links(const SyntheticConfig& config,
                                                                  std::size_t n,
                                                                  std::uint64_t seed) {
  auto links = synthetic_base_links(config);
  if (n > links.size()) {
    throw Error("synthetic: asked for " + std::to_string(n) + " shock links but only " +
                std::to_string(links.size()) + " links exist");
  }
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(links.size() - i));
    std::swap(links[i], links[j]);
  }
  links.resize(n);
  return links;
}

}  // namespace critrans
