#pragma once

// File-based pipeline commands. Every command reads its inputs, computes all
// outputs in memory and only then writes them, together with a manifest,
// into the output directory. A failing command leaves no partial outputs.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "critrans/detector.hpp"
#include "critrans/netgraph.hpp"
#include "critrans/sandbox.hpp"
#include "critrans/scaling.hpp"
#include "critrans/temporal.hpp"

namespace critrans::app {

const char* version();

struct RunConfig {
  std::string command;

  // inputs
  std::string edges_path;
  std::string renames_path;
  std::string records_path;
  std::string out_dir = "run";
  /// When set, written as config.toml next to the outputs.
  std::string config_text;

  // detect
  std::optional<int> first_eval_year;
  std::optional<int> last_eval_year;
  EligibilityPolicy policy;
  double tie_eps = kDefaultTieEps;
  unsigned workers = 0;
  bool dump_series = false;
  double hist_bin_mbit = 0.01;
  double hist_half_range_mbit = 0.5;
  double roi_mbit = 0.1;

  // detect, fit, graph
  Measure measure = Measure::U;

  // fit
  std::size_t tail_k = kDefaultTailSize;

  // graph
  double graph_threshold_mbit = -1.0;
  std::optional<int> graph_year;
  std::vector<int> compare_years;
  std::vector<std::string> anchors;

  // simulate
  SandpileConfig sandpile;
  std::size_t sandpile_tail_k = 1000;

  // generate
  SyntheticConfig synthetic;
  std::optional<int> shock_year;
  std::size_t shock_link_count = 0;
  double shock_factor = 5.0;
  std::string shock_links_path;
};

/// Output files staged in memory, written on commit.
class OutputSet {
 public:
  void add(const std::string& name, std::string content);
  const std::map<std::string, std::string>& files() const noexcept { return files_; }
  /// Creates `dir` if needed and writes every file via a temporary name and
  /// rename.
  void commit(const std::string& dir) const;

 private:
  std::map<std::string, std::string> files_;
};

/// Hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Reads a whole file; throws Error naming the path when unreadable.
std::string read_file(const std::string& path);

/// Manifest JSON: tool version, command, configuration echo and SHA-256 of
/// every input and output file.
std::string manifest_json(const RunConfig& config,
                          const std::map<std::string, std::string>& inputs,
                          const OutputSet& outputs);

std::string config_json(const RunConfig& config);

/// Commands return a process exit status; errors are reported on `err`.
int cmd_detect(const RunConfig& config, std::ostream& err);
int cmd_fit(const RunConfig& config, std::ostream& err);
int cmd_graph(const RunConfig& config, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& err);
int cmd_generate(const RunConfig& config, std::ostream& err);
int cmd_describe(const RunConfig& config, std::ostream& err);

// Report builders, exposed for tests.
std::string summaries_json(const std::vector<YearSummary>& summaries);
std::string histogram_json(const Histogram& h);
std::string graph_report_json(const CriticalGraph& g, const CommunityResult& communities);
std::string overlap_json(const CommunityOverlap& o);

}  // namespace critrans::app
