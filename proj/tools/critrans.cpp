#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "critrans/app.hpp"

using namespace critrans;
using critrans::app::RunConfig;

namespace {

const std::map<std::string, EligibilityMode> kModes{
    {"each_window_above", EligibilityMode::EachWindowAboveTen},
    {"aggregate_above", EligibilityMode::AggregateAboveTen},
    {"present_all_sum_above", EligibilityMode::PresentAllYearsAndAggregateAboveTen}};

const std::map<std::string, NormalizationBase> kNorms{
    {"global", NormalizationBase::Global}, {"per_citing_column", NormalizationBase::PerCitingColumn}};

const std::map<std::string, Measure> kMeasures{{"u", Measure::U}, {"v", Measure::V}};

const std::map<std::string, DropRule> kDropRules{{"uniform", DropRule::UniformRandom},
                                                 {"center", DropRule::Center}};

// Enum options are parsed as names so the recorded config stays readable.
struct EnumNames {
  std::string mode = "each_window_above";
  std::string normalization = "global";
  std::string measure = "u";
  std::string drop = "uniform";
};

template <typename Map>
std::vector<std::string> keys(const Map& m) {
  std::vector<std::string> out;
  for (const auto& [k, v] : m) out.push_back(k);
  return out;
}

void add_out(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("-o,--out", c.out_dir, "Output run directory")->capture_default_str();
}

void add_edges(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("-e,--edges", c.edges_path, "Edge list: year, citing, cited, count")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("-r,--renames", c.renames_path, "Rename map: old, new, change_year")
      ->check(CLI::ExistingFile);
}

void add_records(CLI::App* cmd, RunConfig& c, EnumNames& names) {
  cmd->add_option("--records", c.records_path, "records.tsv written by detect")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--measure", names.measure, "Indicator: u or v")
      ->check(CLI::IsMember(keys(kMeasures)))
      ->capture_default_str();
  cmd->add_option("--tie-eps", c.tie_eps, "Tolerance for tied frequencies")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  EnumNames names;
  CLI::App cli{"Critical-transition detection in temporal citation networks"};
  cli.set_version_flag("--version", std::string(app::version()));
  cli.set_config("--config", "", "TOML configuration file; flags override it");
  cli.require_subcommand(1);

  auto* detect = cli.add_subcommand("detect", "Compute U/V indicators for every eligible cell");
  add_edges(detect, c);
  add_out(detect, c);
  detect->add_option("--first-year", c.first_eval_year, "First evaluation year");
  detect->add_option("--last-year", c.last_eval_year, "Last evaluation year");
  detect->add_option("--eligibility", names.mode, "Cell eligibility rule")
      ->check(CLI::IsMember(keys(kModes)))
      ->capture_default_str();
  detect->add_option("--threshold", c.policy.threshold, "Eligibility count threshold (strict)")
      ->capture_default_str();
  detect->add_option("--normalization", names.normalization, "Frequency denominator")
      ->check(CLI::IsMember(keys(kNorms)))
      ->capture_default_str();
  detect->add_option("--tie-eps", c.tie_eps, "Tolerance for tied frequencies")
      ->capture_default_str();
  detect->add_option("-j,--workers", c.workers, "Worker threads, 0 = all cores")
      ->capture_default_str();
  detect->add_flag("--dump-series", c.dump_series, "Also write cell_series.tsv");
  detect->add_option("--measure", names.measure, "Indicator for histograms: u or v")
      ->check(CLI::IsMember(keys(kMeasures)))
      ->capture_default_str();
  detect->add_option("--hist-bin", c.hist_bin_mbit, "Histogram bin width (mbit)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  detect->add_option("--hist-range", c.hist_half_range_mbit, "Histogram half range (mbit)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  detect->add_option("--roi", c.roi_mbit, "Half width of the range of interest (mbit)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* fit = cli.add_subcommand("fit", "Fit rank-value scaling to both tails per year");
  add_records(fit, c, names);
  add_out(fit, c);
  fit->add_option("-k,--tail-k", c.tail_k, "Tail size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* graph = cli.add_subcommand("graph", "Critical-transition graph, components, communities");
  add_records(graph, c, names);
  add_out(graph, c);
  graph->add_option("--threshold", c.graph_threshold_mbit, "Edge threshold (mbit, negative)")
      ->capture_default_str();
  graph->add_option("--year", c.graph_year, "Only this evaluation year");
  graph->add_option("--compare", c.compare_years, "Two years to compare communities")
      ->expected(2);
  graph->add_option("--anchor", c.anchors, "Anchor node(s) selecting the compared community");

  auto* simulate = cli.add_subcommand("simulate", "Bak-Tang-Wiesenfeld sandpile avalanches");
  add_out(simulate, c);
  auto& sp = c.sandpile;
  simulate->add_option("--width", sp.width, "Grid width")->capture_default_str();
  simulate->add_option("--height", sp.height, "Grid height")->capture_default_str();
  simulate->add_option("--topple-threshold", sp.topple_threshold, "Grains at which a site topples")->capture_default_str();
  simulate->add_option("--grains", sp.n_grains, "Grains to drop")->capture_default_str();
  simulate->add_option("--seed", sp.seed, "Random seed")->capture_default_str();
  simulate->add_option("--drop", names.drop, "uniform or center")
      ->check(CLI::IsMember(keys(kDropRules)))
      ->capture_default_str();
  simulate->add_option("-k,--tail-k", c.sandpile_tail_k, "Avalanche tail size for the fit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* generate = cli.add_subcommand("generate", "Synthetic temporal citation network");
  add_out(generate, c);
  auto& sy = c.synthetic;
  generate->add_option("--nodes", sy.n_nodes, "Number of nodes")->capture_default_str();
  generate->add_option("--years", sy.n_years, "Number of raw years")->capture_default_str();
  generate->add_option("--first-year", sy.first_year, "First raw year")->capture_default_str();
  generate->add_option("--links-per-node", sy.links_per_node, "Distinct cited nodes per citing node")->capture_default_str();
  generate->add_option("--attachment", sy.base_attachment, "Preferential-attachment strength")->capture_default_str();
  generate->add_option("--min-base-count", sy.min_base_count, "Minimum base count per link")->capture_default_str();
  generate->add_option("--extra-per-link", sy.extra_per_link, "Mean urn citations added per link")->capture_default_str();
  generate->add_option("--noise", sy.noise_level, "Per-year sd of the log-scale random walk")->capture_default_str();
  generate->add_option("--volume-start", sy.volume_start, "Volume multiplier of the first year")->capture_default_str();
  generate->add_option("--volume-step", sy.volume_step, "Volume multiplier increase per year")->capture_default_str();
  generate->add_option("--seed", sy.seed, "Random seed")->capture_default_str();
  generate->add_option("--shock-year", c.shock_year, "Year the shock starts");
  generate->add_option("--shock-links", c.shock_link_count, "Number of random shocked links")
      ->capture_default_str();
  generate->add_option("--shock-file", c.shock_links_path, "TSV of citing, cited to shock")
      ->check(CLI::ExistingFile);
  generate->add_option("--shock-factor", c.shock_factor, "Count multiplier on shocked links")->capture_default_str();

  auto* describe = cli.add_subcommand("describe", "Per-year descriptive statistics");
  add_edges(describe, c);
  add_out(describe, c);

  CLI11_PARSE(cli, argc, argv);

  auto* chosen = cli.get_subcommands().front();
  c.command = chosen->get_name();
  c.policy.mode = kModes.at(names.mode);
  c.policy.normalization = kNorms.at(names.normalization);
  c.measure = kMeasures.at(names.measure);
  c.sandpile.drop_rule = kDropRules.at(names.drop);
  // Section header so the file can be passed back through --config; unset
  // options are left out because an empty value would not parse back.
  c.config_text = "[" + c.command + "]\n";
  std::istringstream echo(chosen->config_to_str(true, false));
  for (std::string line; std::getline(echo, line);) {
    if (line.size() < 3 || line.compare(line.size() - 3, 3, "=\"\"") != 0) {
      c.config_text += line + '\n';
    }
  }

  if (chosen == detect) return app::cmd_detect(c, std::cerr);
  if (chosen == fit) return app::cmd_fit(c, std::cerr);
  if (chosen == graph) return app::cmd_graph(c, std::cerr);
  if (chosen == simulate) return app::cmd_simulate(c, std::cerr);
  if (chosen == generate) return app::cmd_generate(c, std::cerr);
  return app::cmd_describe(c, std::cerr);
}
