#pragma once

// Desk-scale oracles: a Bak-Tang-Wiesenfeld sandpile and a synthetic
// temporal citation network generator with injected shocks.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "critrans/ingest.hpp"

namespace critrans {

/// mt19937_64 with distribution code written out here, so a seed yields the
/// same stream on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

enum class DropRule { Center, UniformRandom };

struct SandpileConfig {
  int width = 50;
  int height = 50;
  int topple_threshold = 4;
  std::uint64_t n_grains = 100000;
  std::uint64_t seed = 1;
  DropRule drop_rule = DropRule::UniformRandom;

  /// Throws on an invalid configuration.
  void validate() const;
};

struct AvalancheLog {
  std::vector<std::uint64_t> sizes;  // topplings per drop
  std::uint64_t max_size = 0;
  std::uint64_t grains_lost = 0;
  std::uint64_t grains_on_grid = 0;
};

/// Sandpile on an open-boundary grid. A site holding at least
/// `topple_threshold` grains topples: it loses four grains, one to each
/// neighbour; grains pushed past the edge leave the system.
class Sandpile {
 public:
  static constexpr std::uint64_t kMaxTopplingsPerDrop = 100'000'000;

  explicit Sandpile(const SandpileConfig& config);
  /// Starts from given heights (row-major, width * height entries).
  Sandpile(const SandpileConfig& config, std::vector<std::uint32_t> heights);

  /// Drops one grain at the configured site and relaxes; returns the number
  /// of topplings.
  std::uint64_t drop();
  /// Drops one grain at (x, y) and relaxes.
  std::uint64_t drop_at(int x, int y);

  std::uint32_t height_at(int x, int y) const;
  std::uint64_t initial_grains() const noexcept { return initial_; }
  std::uint64_t grains_added() const noexcept { return added_; }
  std::uint64_t grains_lost() const noexcept { return lost_; }
  std::uint64_t grains_on_grid() const noexcept { return on_grid_; }
  /// Recount of the grid, independent of the running total.
  std::uint64_t count_grid() const;
  bool stable() const;

 private:
  std::uint64_t relax(std::size_t start);

  SandpileConfig config_;
  std::vector<std::uint32_t> heights_;
  Rng rng_;
  std::uint64_t initial_ = 0;
  std::uint64_t added_ = 0;
  std::uint64_t lost_ = 0;
  std::uint64_t on_grid_ = 0;
  std::vector<std::size_t> stack_;
};

AvalancheLog run_sandpile(const SandpileConfig& config);

/// One size per line.
void write_avalanche_log(std::ostream& out, const AvalancheLog& log);

struct ShockSpec {
  int year = 0;
  std::vector<std::pair<std::string, std::string>> links;  // (citing, cited)
  double factor = 5.0;
};

struct SyntheticConfig {
  int n_nodes = 200;
  int n_years = 12;
  int first_year = 2000;
  int links_per_node = 10;         // distinct cited nodes per citing node
  double base_attachment = 1.0;    // preferential-attachment strength
  std::uint64_t min_base_count = 6;
  std::uint64_t extra_per_link = 20;  // mean citations added by the urn
  double noise_level = 0.0;        // sd of the log-scale random walk per year
  /// Common volume index of year i is volume_start + volume_step * i.
  std::uint64_t volume_start = 10;
  std::uint64_t volume_step = 1;
  std::optional<ShockSpec> shock;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Name of synthetic node i (zero padded so name order is index order).
std::string synthetic_node_name(int i, int n_nodes);

/// Integer counts per year. With noise_level 0 and no shock every year is
/// the base matrix times a common integer, so relative frequencies are
/// constant. With a shock, the shocked links' counts are multiplied by the
/// factor from the shock year on.
Corpus generate_synthetic(const SyntheticConfig& config);

/// Base links of a generated network, as (citing, cited) names, in the order
/// they were created. Used to pick shock links that exist.
std::vector<std::pair<std::string, std::string>> synthetic_base_links(
    const SyntheticConfig& config);

/// `n` distinct base links drawn uniformly with `seed`, in draw order.
std::vector<std::pair<std::string, std::string>> pick_shock_links(const SyntheticConfig& config,
                                                                  std::size_t n,
                                                                  std::uint64_t seed);

}  // namespace critrans
