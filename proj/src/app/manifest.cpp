#include <filesystem>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "critrans/app.hpp"
#include "json.hpp"

namespace critrans::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const char* to_string(EligibilityMode m) {
  switch (m) {
    case EligibilityMode::AggregateAboveTen: return "aggregate_above";
    case EligibilityMode::EachWindowAboveTen: return "each_window_above";
    case EligibilityMode::PresentAllYearsAndAggregateAboveTen: return "present_all_sum_above";
  }
  return "?";
}

ordered_json optional_int(const std::optional<int>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

const char* version() { return CRITRANS_VERSION; }

void OutputSet::add(const std::string& name, std::string content) {
  files_[name] = std::move(content);
}

void OutputSet::commit(const std::string& dir) const {
  fs::create_directories(dir);
  for (const auto& [name, content] : files_) {
    const fs::path final_path = fs::path(dir) / name;
    const fs::path tmp = fs::path(dir) / ("." + name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write " + tmp.string());
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      if (!out) throw Error("write failed: " + tmp.string());
    }
    fs::rename(tmp, final_path);
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_json(const RunConfig& c) {
  ordered_json j;
  j["command"] = c.command;
  j["edges"] = c.edges_path;
  j["renames"] = c.renames_path;
  j["records"] = c.records_path;
  j["out_dir"] = c.out_dir;
  j["first_eval_year"] = optional_int(c.first_eval_year);
  j["last_eval_year"] = optional_int(c.last_eval_year);
  j["eligibility"] = to_string(c.policy.mode);
  j["threshold"] = c.policy.threshold;
  j["normalization"] =
      c.policy.normalization == NormalizationBase::Global ? "global" : "per_citing_column";
  j["tie_eps"] = c.tie_eps;
  j["workers"] = c.workers;
  j["measure"] = c.measure == Measure::U ? "u" : "v";
  j["hist_bin_mbit"] = c.hist_bin_mbit;
  j["hist_half_range_mbit"] = c.hist_half_range_mbit;
  j["roi_mbit"] = c.roi_mbit;
  j["tail_k"] = c.tail_k;
  j["graph_threshold_mbit"] = c.graph_threshold_mbit;
  j["graph_year"] = optional_int(c.graph_year);
  j["compare_years"] = c.compare_years;
  j["anchors"] = c.anchors;
  if (c.command == "simulate") {
    j["sandpile"] = {{"width", c.sandpile.width},
                     {"height", c.sandpile.height},
                     {"topple_threshold", c.sandpile.topple_threshold},
                     {"n_grains", c.sandpile.n_grains},
                     {"seed", c.sandpile.seed},
                     {"drop_rule", c.sandpile.drop_rule == DropRule::Center ? "center" : "uniform"},
                     {"tail_k", c.sandpile_tail_k}};
  }
  if (c.command == "generate") {
    const auto& s = c.synthetic;
    j["synthetic"] = {{"n_nodes", s.n_nodes},
                      {"n_years", s.n_years},
                      {"first_year", s.first_year},
                      {"links_per_node", s.links_per_node},
                      {"base_attachment", s.base_attachment},
                      {"min_base_count", s.min_base_count},
                      {"extra_per_link", s.extra_per_link},
                      {"noise_level", s.noise_level},
                      {"volume_start", s.volume_start},
                      {"volume_step", s.volume_step},
                      {"seed", s.seed},
                      {"shock_year", optional_int(c.shock_year)},
                      {"shock_link_count", c.shock_link_count},
                      {"shock_factor", c.shock_factor},
                      {"shock_links_file", c.shock_links_path}};
  }
  return j.dump(2);
}

std::string manifest_json(const RunConfig& config,
                          const std::map<std::string, std::string>& inputs,
                          const OutputSet& outputs) {
  ordered_json j;
  j["tool"] = "critrans";
  j["version"] = version();
  j["command"] = config.command;
  j["config"] = ordered_json::parse(config_json(config));
  ordered_json in = ordered_json::array();
  for (const auto& [path, content] : inputs) {
    in.push_back({{"path", path}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
  }
  j["inputs"] = in;
  ordered_json out = ordered_json::array();
  for (const auto& [name, content] : outputs.files()) {
    out.push_back({{"file", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
  }
  j["outputs"] = out;
  return j.dump(2) + "\n";
}

}  // namespace critrans::app
