#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "critrans/app.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace critrans;
using namespace critrans::app;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) {
    dir = fs::temp_directory_path() / ("critrans_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string path(const std::string& leaf) const { return (dir / leaf).string(); }
};

std::string slurp(const std::string& path) { return read_file(path); }

json load_json(const std::string& path) { return json::parse(slurp(path)); }

void write(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

RunConfig generate_config(const Scratch& s, const std::string& out) {
  RunConfig c;
  c.command = "generate";
  c.out_dir = s.path(out);
  c.synthetic.n_nodes = 60;
  c.synthetic.n_years = 9;
  return c;
}

int run_cli(const std::string& args) {
  const char* cli = std::getenv("CRITRANS_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "CRITRANS_CLI not set");
  const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("missing input fails without partial outputs") {
  Scratch s("missing");
  RunConfig c;
  c.command = "detect";
  c.edges_path = s.path("does_not_exist.tsv");
  c.out_dir = s.path("out");
  std::ostringstream err;
  CHECK(cmd_detect(c, err) != 0);
  CHECK(err.str().find("does_not_exist.tsv") != std::string::npos);
  CHECK_FALSE(fs::exists(c.out_dir));
}

TEST_CASE("parse errors name file and line") {
  Scratch s("parse");
  write(s.path("bad.tsv"), "year\tciting\tcited\tcount\n2000\tA\tB\t1\n2000\tA\tB\n");
  RunConfig c;
  c.command = "detect";
  c.edges_path = s.path("bad.tsv");
  c.out_dir = s.path("out");
  std::ostringstream err;
  CHECK(cmd_detect(c, err) == 1);
  CHECK(err.str().find("bad.tsv:3:") != std::string::npos);
  CHECK_FALSE(fs::exists(c.out_dir));
}

TEST_CASE("quiet baseline pipeline: generate, describe, detect") {
  Scratch s("quiet");
  std::ostringstream err;
  const auto gen = generate_config(s, "gen");
  REQUIRE(cmd_generate(gen, err) == 0);
  CHECK(fs::exists(s.path("gen/edges.tsv")));
  CHECK(fs::exists(s.path("gen/manifest.json")));
  CHECK(slurp(s.path("gen/shocked_links.tsv")) == "citing\tcited\n");

  RunConfig desc;
  desc.command = "describe";
  desc.edges_path = s.path("gen/edges.tsv");
  desc.out_dir = s.path("desc");
  REQUIRE(cmd_describe(desc, err) == 0);
  const auto d = load_json(s.path("desc/descriptives.json"));
  CHECK(d["n_raw_years"] == 9);
  CHECK(d["n_windows"] == 7);
  CHECK(d["n_eval_years"] == 5);
  CHECK(d["first_eval_year"] == 2004);

  RunConfig det;
  det.command = "detect";
  det.edges_path = s.path("gen/edges.tsv");
  det.out_dir = s.path("det");
  REQUIRE(cmd_detect(det, err) == 0);
  const auto sum = load_json(s.path("det/summaries.json"));
  REQUIRE(sum["years"].size() == 5);
  for (const auto& y : sum["years"]) {
    CHECK(y["n_critical_fwd"] == 0);
    CHECK(y["n_links"] > 0);
  }
  for (const char* f : {"records.tsv", "summaries.tsv", "histogram.tsv", "histogram.json",
                        "manifest.json"}) {
    CHECK(fs::exists(s.path(std::string("det/") + f)));
  }
  CHECK_FALSE(fs::exists(s.path("det/cell_series.tsv")));
  const auto h = load_json(s.path("det/histogram.json"));
  CHECK(h["in_range_fraction"] == 1.0);
  CHECK(h["bin_edges"][0].is_null());
}

TEST_CASE("manifest records inputs, outputs and config") {
  Scratch s("manifest");
  std::ostringstream err;
  REQUIRE(cmd_generate(generate_config(s, "gen"), err) == 0);
  RunConfig det;
  det.command = "detect";
  det.edges_path = s.path("gen/edges.tsv");
  det.out_dir = s.path("det");
  det.dump_series = true;
  det.config_text = "[detect]\nedges=\"x\"\n";
  REQUIRE(cmd_detect(det, err) == 0);
  const auto m = load_json(s.path("det/manifest.json"));
  CHECK(m["tool"] == "critrans");
  CHECK(m["version"] == version());
  CHECK(m["command"] == "detect");
  CHECK(m["config"]["eligibility"] == "each_window_above");
  CHECK(m["config"]["threshold"] == 10);
  REQUIRE(m["inputs"].size() == 1);
  CHECK(m["inputs"][0]["sha256"] == sha256_hex(slurp(det.edges_path)));
  bool saw_records = false;
  for (const auto& o : m["outputs"]) {
    const std::string name = o["file"];
    CHECK(o["sha256"] == sha256_hex(slurp(s.path("det/" + name))));
    saw_records |= name == "records.tsv";
  }
  CHECK(saw_records);
  CHECK(slurp(s.path("det/config.toml")) == det.config_text);
  CHECK(fs::exists(s.path("det/cell_series.tsv")));
  CHECK(m.dump().find("time") == std::string::npos);
}

TEST_CASE("sha256 known answer") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("shock fixture shows negative u at the shock years") {
  Scratch s("shock");
  std::ostringstream err;
  auto gen = generate_config(s, "gen");
  gen.synthetic.n_years = 10;
  gen.shock_year = 2005;
  gen.shock_link_count = 8;
  gen.shock_factor = 5.0;
  REQUIRE(cmd_generate(gen, err) == 0);

  RunConfig det;
  det.command = "detect";
  det.edges_path = s.path("gen/edges.tsv");
  det.out_dir = s.path("det");
  REQUIRE(cmd_detect(det, err) == 0);
  std::istringstream in(slurp(s.path("det/records.tsv")));
  const auto file = read_records(in);

  std::istringstream truth(slurp(s.path("gen/shocked_links.tsv")));
  std::string line;
  std::getline(truth, line);
  int checked = 0;
  while (std::getline(truth, line)) {
    const auto tab = line.find('\t');
    const auto a = file.nodes.find(line.substr(0, tab));
    const auto b = file.nodes.find(line.substr(tab + 1));
    REQUIRE(a >= 0);
    REQUIRE(b >= 0);
    for (const auto& r : file.records) {
      // The prior and revision windows differ only from the year after the
      // shock on; in the shock year itself p == p' and u vanishes.
      if (r.link.citing == a && r.link.cited == b && r.eval_year >= 2006 && r.eval_year <= 2007) {
        CHECK(r.u < 0);
        ++checked;
      }
    }
  }
  CHECK(checked == 8 * 2);
}

TEST_CASE("fit skips short tails with a warning") {
  Scratch s("fit");
  std::ostringstream err;
  auto gen = generate_config(s, "gen");
  gen.synthetic.noise_level = 0.05;
  REQUIRE(cmd_generate(gen, err) == 0);
  RunConfig det;
  det.command = "detect";
  det.edges_path = s.path("gen/edges.tsv");
  det.out_dir = s.path("det");
  REQUIRE(cmd_detect(det, err) == 0);

  RunConfig fit;
  fit.command = "fit";
  fit.records_path = s.path("det/records.tsv");
  fit.out_dir = s.path("fit");
  REQUIRE(cmd_fit(fit, err) == 0);
  const auto f = load_json(s.path("fit/fits.json"));
  CHECK(f["fits"].size() == 10);
  for (const auto& e : f["fits"]) {
    CHECK(e["powerlaw"]["r2"] <= 1.0);
    CHECK(e["truncated"] == true);
  }
  CHECK(fs::exists(s.path("fit/tail_2004_most_negative.tsv")));

  // A quiet network has no signed values at all: every year is skipped.
  REQUIRE(cmd_generate(generate_config(s, "quiet"), err) == 0);
  det.edges_path = s.path("quiet/edges.tsv");
  det.out_dir = s.path("qdet");
  REQUIRE(cmd_detect(det, err) == 0);
  fit.records_path = s.path("qdet/records.tsv");
  fit.out_dir = s.path("qfit");
  std::ostringstream warn;
  REQUIRE(cmd_fit(fit, warn) == 0);
  CHECK(warn.str().find("warning") != std::string::npos);
  CHECK(load_json(s.path("qfit/fits.json"))["fits"].empty());
}

TEST_CASE("graph command writes per-year files and overlap") {
  Scratch s("graph");
  write(s.path("records.tsv"),
        "eval_year\tciting\tcited\tp\tp_prime\tq\tu_bits\tv_bits\timprove_fwd_bits\tcritical_fwd"
        "\tcritical_bwd\timproved_fwd\timproved_bwd\n"
        "2010\tA\tB\t0.1\t0.2\t0.3\t-0.002\t-0.002\t0.1\t1\t1\t1\t0\n"
        "2010\tB\tC\t0.1\t0.2\t0.3\t-0.002\t-0.002\t0.1\t1\t1\t1\t0\n"
        "2011\tA\tB\t0.1\t0.2\t0.3\t-0.002\t-0.002\t0.1\t1\t1\t1\t0\n"
        "2011\tA\tD\t0.1\t0.2\t0.3\t-0.002\t-0.002\t0.1\t1\t1\t1\t0\n"
        "2011\tE\tF\t0.1\t0.2\t0.3\t-0.0005\t-0.002\t0.1\t1\t1\t1\t0\n");
  RunConfig g;
  g.command = "graph";
  g.records_path = s.path("records.tsv");
  g.out_dir = s.path("out");
  g.compare_years = {2010, 2011};
  g.anchors = {"A"};
  std::ostringstream err;
  REQUIRE(cmd_graph(g, err) == 0);
  const auto j10 = load_json(s.path("out/graph_2010.json"));
  CHECK(j10["n_nodes"] == 3);
  CHECK(j10["n_components"] == 1);
  const auto j11 = load_json(s.path("out/graph_2011.json"));
  CHECK(j11["n_edges"] == 2);
  CHECK(slurp(s.path("out/graph_2010.net")).rfind("*Vertices 3\n1 \"A\"", 0) == 0);
  const auto o = load_json(s.path("out/overlap.json"));
  CHECK(o["intersection_size"] == 2);
  CHECK(o["jaccard"] == doctest::Approx(0.5));

  g.out_dir = s.path("bad");
  g.anchors = {"C"};
  std::ostringstream err2;
  CHECK(cmd_graph(g, err2) == 1);
  CHECK(err2.str().find("2011") != std::string::npos);
  CHECK_FALSE(fs::exists(g.out_dir));
}

TEST_CASE("simulate writes avalanche sizes and a tail fit") {
  Scratch s("sim");
  RunConfig c;
  c.command = "simulate";
  c.out_dir = s.path("sim");
  c.sandpile.width = 20;
  c.sandpile.height = 20;
  c.sandpile.n_grains = 5000;
  c.sandpile_tail_k = 200;
  std::ostringstream err;
  REQUIRE(cmd_simulate(c, err) == 0);
  const auto j = load_json(s.path("sim/simulate.json"));
  CHECK(j["n_grains"] == 5000);
  CHECK(j["tail_fit"]["k"] == 200);
  CHECK(j["grains_lost"].get<std::uint64_t>() + j["grains_on_grid"].get<std::uint64_t>() == 5000);
  const std::string sizes = slurp(s.path("sim/avalanches.txt"));
  CHECK(std::count(sizes.begin(), sizes.end(), '\n') == 5000);

  c.sandpile.topple_threshold = 2;
  c.out_dir = s.path("bad");
  CHECK(cmd_simulate(c, err) == 1);
  CHECK_FALSE(fs::exists(c.out_dir));
}

TEST_CASE("generate reads shock links from a file") {
  Scratch s("shockfile");
  write(s.path("links.tsv"), "citing\tcited\nJ00\tJ01\n");
  auto gen = generate_config(s, "gen");
  gen.shock_year = 2004;
  gen.shock_links_path = s.path("links.tsv");
  std::ostringstream err;
  REQUIRE(cmd_generate(gen, err) == 0);
  CHECK(slurp(s.path("gen/shocked_links.tsv")) == "citing\tcited\nJ00\tJ01\n");
  CHECK(load_json(s.path("gen/manifest.json"))["inputs"].size() == 1);

  write(s.path("bad.tsv"), "J00\tNOPE\n");
  gen.shock_links_path = s.path("bad.tsv");
  gen.out_dir = s.path("bad");
  CHECK(cmd_generate(gen, err) == 1);
  CHECK_FALSE(fs::exists(gen.out_dir));
}

TEST_CASE("cli: config file round trip and flag override") {
  Scratch s("cli");
  REQUIRE(run_cli("generate --nodes 40 --years 7 --noise 0.05 -o " + s.path("gen")) == 0);
  REQUIRE(run_cli("detect -e " + s.path("gen/edges.tsv") + " -o " + s.path("a") + " -j 1") == 0);
  const std::string cfg = slurp(s.path("a/config.toml"));
  CHECK(cfg.rfind("[detect]\n", 0) == 0);
  CHECK(cfg.find("eligibility=\"each_window_above\"") != std::string::npos);

  // Replay the recorded config with another output directory and more workers.
  REQUIRE(run_cli("--config " + s.path("a/config.toml") + " detect -o " + s.path("b") +
                  " -j 3") == 0);
  CHECK(slurp(s.path("a/records.tsv")) == slurp(s.path("b/records.tsv")));

  REQUIRE(run_cli("--config " + s.path("a/config.toml") + " detect -o " + s.path("c") +
                  " --threshold 100") == 0);
  CHECK(load_json(s.path("c/manifest.json"))["config"]["threshold"] == 100);

  CHECK(run_cli("detect -e " + s.path("nope.tsv") + " -o " + s.path("d")) != 0);
  CHECK_FALSE(fs::exists(s.path("d")));
  CHECK(run_cli("detect -e " + s.path("gen/edges.tsv") + " --eligibility bogus -o " +
                s.path("e")) != 0);
  CHECK(run_cli("--version") == 0);
  CHECK(run_cli("") != 0);
}
