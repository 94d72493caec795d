#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "critrans/app.hpp"
#include "critrans/ingest.hpp"
#include "json.hpp"

namespace critrans::app {

using nlohmann::ordered_json;

namespace {

template <typename Fn>
int guarded(const char* name, std::ostream& err, Fn&& body) {
  try {
    body();
    return 0;
  } catch (const std::exception& e) {
    err << "critrans " << name << ": " << e.what() << '\n';
    return 1;
  }
}

void finish(const RunConfig& config, const std::map<std::string, std::string>& inputs,
            OutputSet& outputs) {
  if (!config.config_text.empty()) outputs.add("config.toml", config.config_text);
  const std::string manifest = manifest_json(config, inputs, outputs);
  outputs.add("manifest.json", manifest);
  outputs.commit(config.out_dir);
}

Corpus load_corpus(const RunConfig& config, std::map<std::string, std::string>& inputs) {
  if (config.edges_path.empty()) throw Error("no edge list given (--edges)");
  const std::string edges = read_file(config.edges_path);
  inputs[config.edges_path] = edges;
  std::istringstream edge_stream(edges);
  Corpus corpus = parse_edge_list(edge_stream, config.edges_path);
  if (!config.renames_path.empty()) {
    const std::string renames = read_file(config.renames_path);
    inputs[config.renames_path] = renames;
    std::istringstream rename_stream(renames);
    corpus = resolve_renames(corpus, parse_rename_map(rename_stream, config.renames_path));
  }
  return corpus;
}

RecordFile load_records(const RunConfig& config, std::map<std::string, std::string>& inputs) {
  if (config.records_path.empty()) throw Error("no record file given (--records)");
  const std::string text = read_file(config.records_path);
  inputs[config.records_path] = text;
  std::istringstream in(text);
  return read_records(in, config.records_path, config.tie_eps);
}

// Contiguous per-year spans of records sorted by year.
std::map<int, std::span<const TransitionRecord>> by_year(const std::vector<TransitionRecord>& r) {
  std::map<int, std::span<const TransitionRecord>> out;
  std::size_t begin = 0;
  while (begin < r.size()) {
    std::size_t end = begin;
    while (end < r.size() && r[end].eval_year == r[begin].eval_year) ++end;
    out[r[begin].eval_year] = std::span<const TransitionRecord>(r).subspan(begin, end - begin);
    begin = end;
  }
  return out;
}

std::string tail_tsv(const Tail& t) {
  std::ostringstream out;
  out << "rank\tvalue_bits\n";
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    out << (i + 1) << '\t' << format_double(t.values[i]) << '\n';
  }
  return out.str();
}

}  // namespace

int cmd_detect(const RunConfig& config, std::ostream& err) {
  return guarded("detect", err, [&] {
    std::map<std::string, std::string> inputs;
    const Corpus corpus = load_corpus(config, inputs);
    const auto aggregates = build_aggregates(corpus.slices);

    YearRange years = evaluation_years(aggregates);
    if (config.first_eval_year) years.first = std::max(years.first, *config.first_eval_year);
    if (config.last_eval_year) years.last = std::min(years.last, *config.last_eval_year);
    if (years.empty()) {
      throw Error("no evaluation years: need at least five consecutive raw years in range");
    }

    SweepOptions options;
    options.tie_eps = config.tie_eps;
    options.workers = config.workers;
    const auto records = sweep(aggregates, years, config.policy, options);
    const auto summaries = summarize_years(records);

    HistogramOptions hopt;
    hopt.bin_width = config.hist_bin_mbit * kBitsPerMillibit;
    hopt.half_range = config.hist_half_range_mbit * kBitsPerMillibit;
    hopt.range_of_interest = {-config.roi_mbit * kBitsPerMillibit,
                              config.roi_mbit * kBitsPerMillibit};
    hopt.measure = config.measure;

    OutputSet out;
    std::ostringstream rec;
    write_records(rec, records, corpus.nodes);
    out.add("records.tsv", rec.str());

    std::ostringstream sum;
    write_summaries_tsv(sum, summaries);
    out.add("summaries.tsv", sum.str());
    out.add("summaries.json", summaries_json(summaries));

    // One histogram per evaluation year plus the pooled one.
    const auto pooled = histogram(records, hopt);
    std::ostringstream hist;
    write_histogram_tsv(hist, pooled);
    out.add("histogram.tsv", hist.str());
    out.add("histogram.json", histogram_json(pooled));
    for (const auto& [year, span] : by_year(records)) {
      std::ostringstream h;
      write_histogram_tsv(h, histogram(span, hopt));
      out.add("histogram_" + std::to_string(year) + ".tsv", h.str());
    }

    if (config.dump_series) {
      std::ostringstream s;
      s << "eval_year\tciting\tcited\tp\tp_prime\tq\n";
      for (int y = years.first; y <= years.last; ++y) {
        const auto series = cell_series(aggregates, y, config.policy);
        std::ostringstream part;
        write_cell_series(part, series, corpus.nodes);
        const std::string text = part.str();
        s << text.substr(text.find('\n') + 1);
      }
      out.add("cell_series.tsv", s.str());
    }
    finish(config, inputs, out);
  });
}

int cmd_fit(const RunConfig& config, std::ostream& err) {
  return guarded("fit", err, [&] {
    std::map<std::string, std::string> inputs;
    const RecordFile file = load_records(config, inputs);

    OutputSet out;
    ordered_json fits = ordered_json::array();
    std::ostringstream tsv;
    tsv << "eval_year\tdirection\tk\ttruncated\texponent\tintercept\tr2\tlognormal_mu"
           "\tlognormal_sigma\tlognormal_quantile_r2\tmle_alpha\n";

    for (const auto& [year, records] : by_year(file.records)) {
      for (auto dir : {TailDirection::MostNegative, TailDirection::MostPositive}) {
        const Tail tail = top_tail(records, config.tail_k, dir, config.measure);
        if (tail.values.size() < kMinTailSize) {
          err << "critrans fit: warning: " << year << " " << to_string(dir) << " tail has "
              << tail.values.size() << " values, skipped\n";
          continue;
        }
        const TailFit pl = fit_powerlaw(tail.values, dir);
        ordered_json entry{{"eval_year", year},
                           {"direction", to_string(dir)},
                           {"k", pl.k},
                           {"truncated", tail.truncated},
                           {"powerlaw",
                            {{"method", "ols_log2_rank_value"},
                             {"exponent", pl.exponent},
                             {"intercept_log2", pl.intercept},
                             {"r2", pl.r2}}}};
        std::string ln_cols = "NA\tNA\tNA";
        try {
          const LognormalFit ln = fit_lognormal(tail.values);
          entry["lognormal"] = {{"mu", ln.mu}, {"sigma", ln.sigma}, {"quantile_r2", ln.quantile_r2}};
          ln_cols = format_double(ln.mu) + '\t' + format_double(ln.sigma) + '\t' +
                    format_double(ln.quantile_r2);
        } catch (const Error& e) {
          entry["lognormal"] = nullptr;
          err << "critrans fit: warning: " << year << " " << to_string(dir) << ": " << e.what()
              << '\n';
        }
        std::string mle_col = "NA";
        try {
          const PowerLawMle mle = fit_powerlaw_mle(tail.values);
          entry["powerlaw_mle_secondary"] = {{"alpha", mle.alpha},
                                             {"alpha_stderr", mle.alpha_stderr},
                                             {"x_min", mle.x_min},
                                             {"implied_rank_exponent", mle.implied_rank_exponent}};
          mle_col = format_double(mle.alpha);
        } catch (const Error&) {
          entry["powerlaw_mle_secondary"] = nullptr;
        }
        fits.push_back(entry);
        tsv << year << '\t' << to_string(dir) << '\t' << pl.k << '\t' << tail.truncated << '\t'
            << format_double(pl.exponent) << '\t' << format_double(pl.intercept) << '\t'
            << format_double(pl.r2) << '\t' << ln_cols << '\t' << mle_col << '\n';
        out.add("tail_" + std::to_string(year) + "_" + to_string(dir) + ".tsv", tail_tsv(tail));
      }
    }
    out.add("fits.json", ordered_json{{"fits", fits}}.dump(2) + "\n");
    out.add("fits.tsv", tsv.str());
    finish(config, inputs, out);
  });
}

int cmd_graph(const RunConfig& config, std::ostream& err) {
  return guarded("graph", err, [&] {
    std::map<std::string, std::string> inputs;
    const RecordFile file = load_records(config, inputs);
    const double threshold = config.graph_threshold_mbit * kBitsPerMillibit;

    std::set<int> years;
    for (const auto& r : file.records) years.insert(r.eval_year);
    if (config.graph_year) {
      if (!years.count(*config.graph_year)) {
        throw Error("no records for evaluation year " + std::to_string(*config.graph_year));
      }
      years = {*config.graph_year};
    }
    for (int y : config.compare_years) years.insert(y);

    OutputSet out;
    std::map<int, CriticalGraph> graphs;
    for (int year : years) {
      CriticalGraph g =
          build_critical_graph(file.records, file.nodes, year, threshold, config.measure);
      CommunityResult communities;
      if (!g.empty()) {
        communities = find_communities(g);
        g.community_id = communities.community_id;
      }
      const std::string stem = "graph_" + std::to_string(year);
      out.add(stem + ".net", export_pajek(g));
      out.add(stem + ".json", graph_report_json(g, communities));
      std::ostringstream edges;
      write_edges_tsv(edges, g);
      out.add(stem + "_edges.tsv", edges.str());
      graphs.emplace(year, std::move(g));
    }

    if (!config.compare_years.empty()) {
      if (config.compare_years.size() != 2) throw Error("--compare needs exactly two years");
      const std::set<std::string> anchors(config.anchors.begin(), config.anchors.end());
      const auto overlap = compare_communities(graphs.at(config.compare_years[0]),
                                               graphs.at(config.compare_years[1]), anchors);
      out.add("overlap.json", overlap_json(overlap));
    }
    finish(config, inputs, out);
  });
}

int cmd_simulate(const RunConfig& config, std::ostream& err) {
  return guarded("simulate", err, [&] {
    const AvalancheLog log = run_sandpile(config.sandpile);
    OutputSet out;
    std::ostringstream sizes;
    write_avalanche_log(sizes, log);
    out.add("avalanches.txt", sizes.str());

    std::vector<double> values(log.sizes.begin(), log.sizes.end());
    ordered_json j{{"n_grains", log.sizes.size()},
                   {"max_size", log.max_size},
                   {"grains_lost", log.grains_lost},
                   {"grains_on_grid", log.grains_on_grid}};
    const Tail tail =
        top_tail(std::span<const double>(values), config.sandpile_tail_k, TailDirection::MostPositive);
    if (tail.values.size() >= kMinTailSize) {
      const TailFit fit = fit_powerlaw(tail.values, TailDirection::MostPositive);
      j["tail_fit"] = {{"k", fit.k},
                       {"truncated", tail.truncated},
                       {"exponent", fit.exponent},
                       {"intercept_log2", fit.intercept},
                       {"r2", fit.r2}};
      out.add("avalanche_tail.tsv", tail_tsv(tail));
    } else {
      j["tail_fit"] = nullptr;
      err << "critrans simulate: warning: fewer than " << kMinTailSize
          << " nonzero avalanches, no tail fit\n";
    }
    out.add("simulate.json", j.dump(2) + "\n");
    finish(config, {}, out);
  });
}

int cmd_generate(const RunConfig& config, std::ostream& err) {
  return guarded("generate", err, [&] {
    std::map<std::string, std::string> inputs;
    SyntheticConfig sc = config.synthetic;
    if (config.shock_year) {
      ShockSpec shock;
      shock.year = *config.shock_year;
      shock.factor = config.shock_factor;
      if (!config.shock_links_path.empty()) {
        const std::string text = read_file(config.shock_links_path);
        inputs[config.shock_links_path] = text;
        std::istringstream in(text);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
          ++line_no;
          if (!line.empty() && line.back() == '\r') line.pop_back();
          if (line.empty() || line.front() == '#') continue;
          auto f = split(line, '\t');
          if (f.size() != 2) {
            throw ParseError(config.shock_links_path, line_no, "expected citing<TAB>cited");
          }
          if (canonical_name(f[0]) == "CITING" && canonical_name(f[1]) == "CITED") continue;
          shock.links.emplace_back(canonical_name(f[0]), canonical_name(f[1]));
        }
      } else {
        shock.links = pick_shock_links(sc, config.shock_link_count, sc.seed + 1);
      }
      sc.shock = std::move(shock);
    }
    const Corpus corpus = generate_synthetic(sc);

    OutputSet out;
    std::ostringstream edges;
    write_edge_list(edges, corpus);
    out.add("edges.tsv", edges.str());
    std::ostringstream truth;
    truth << "citing\tcited\n";
    if (sc.shock) {
      for (const auto& [a, b] : sc.shock->links) truth << a << '\t' << b << '\n';
    }
    out.add("shocked_links.tsv", truth.str());
    finish(config, inputs, out);
  });
}

int cmd_describe(const RunConfig& config, std::ostream& err) {
  return guarded("describe", err, [&] {
    std::map<std::string, std::string> inputs;
    const Corpus corpus = load_corpus(config, inputs);
    const auto aggregates = build_aggregates(corpus.slices);
    const YearRange eval = evaluation_years(aggregates);

    ordered_json years = ordered_json::array();
    std::ostringstream tsv;
    tsv << "year\tn_nodes\tn_possible_cells\tn_nonzero\ttotal_citations\tdensity"
           "\tmean_per_nonzero\n";
    for (const auto& s : corpus.slices) {
      const auto d = describe(s);
      years.push_back({{"year", s.year},
                       {"n_nodes", d.n_nodes},
                       {"n_possible_cells", d.n_possible_cells},
                       {"n_nonzero", d.n_nonzero},
                       {"total_citations", d.total_citations},
                       {"density", d.density},
                       {"mean_per_nonzero", d.mean_per_nonzero ? ordered_json(*d.mean_per_nonzero)
                                                               : ordered_json(nullptr)}});
      tsv << s.year << '\t' << d.n_nodes << '\t' << d.n_possible_cells << '\t' << d.n_nonzero
          << '\t' << d.total_citations << '\t' << format_double(d.density) << '\t'
          << (d.mean_per_nonzero ? format_double(*d.mean_per_nonzero) : "NA") << '\n';
    }
    ordered_json windows = ordered_json::array();
    for (const auto& a : aggregates) {
      windows.push_back({{"window_end_year", a.window_end_year},
                         {"n_cells", a.cells.size()},
                         {"grand_total", a.grand_total}});
    }
    ordered_json j{{"n_nodes_universe", corpus.nodes.size()},
                   {"n_raw_years", corpus.slices.size()},
                   {"n_windows", aggregates.size()},
                   {"n_eval_years", eval.size()},
                   {"years", years},
                   {"windows", windows}};
    if (!eval.empty()) {
      j["first_eval_year"] = eval.first;
      j["last_eval_year"] = eval.last;
    }
    OutputSet out;
    out.add("descriptives.json", j.dump(2) + "\n");
    out.add("descriptives.tsv", tsv.str());
    finish(config, inputs, out);
  });
}

}  // namespace critrans::app
