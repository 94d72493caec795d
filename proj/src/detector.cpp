#include "critrans/detector.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <thread>

namespace critrans {

TransitionRecord make_record(const CellSeries& s, double tie_eps) {
  const auto ind = cell_indicators_closed(s.p, s.p_prime, s.q);
  TransitionRecord r;
  r.link = s.link;
  r.eval_year = s.eval_year;
  r.p = s.p;
  r.p_prime = s.p_prime;
  r.q = s.q;
  r.u = ind.u;
  r.v = ind.v;
  r.improve_fwd = ind.improve_fwd;
  r.improve_bwd = ind.improve_bwd;
  r.classification = classify(ind, s.p, s.p_prime, s.q, tie_eps);
  return r;
}

std::vector<TransitionRecord> sweep(std::span<const MovingAggregate> aggregates, YearRange years,
                                    const EligibilityPolicy& policy,
                                    const SweepOptions& options) {
  std::vector<TransitionRecord> out;
  if (years.empty()) return out;
  const unsigned workers = resolve_workers(options.workers);

  for (int year = years.first; year <= years.last; ++year) {
    const auto series = cell_series(aggregates, year, policy);
    const std::size_t base = out.size();
    out.resize(base + series.size());

    // Each worker fills a disjoint contiguous slice of the output.
    auto work = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        out[base + i] = make_record(series[i], options.tie_eps);
      }
    };
    const std::size_t n = series.size();
    const std::size_t min_chunk = std::max<std::size_t>(1, options.min_chunk);
    const std::size_t n_threads =
        std::min<std::size_t>(workers, std::max<std::size_t>(1, n / min_chunk));
    if (n_threads <= 1) {
      work(0, n);
      continue;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    const std::size_t chunk = (n + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

YearSummary summarize_year(std::span<const TransitionRecord> records) {
  if (records.empty()) throw Error("summarize_year: no records");
  YearSummary s;
  s.eval_year = records.front().eval_year;
  for (const auto& r : records) {
    if (r.eval_year != s.eval_year) {
      throw Error("summarize_year: records span several evaluation years");
    }
    const auto& c = r.classification;
    ++s.n_links;
    s.n_critical_fwd += c.critical_fwd;
    s.n_critical_bwd += c.critical_bwd;
    s.n_improved_fwd += c.improved_fwd;
    s.n_improved_bwd += c.improved_bwd;
    s.n_tied += c.monotone == Monotone::Tied;
  }
  const double n = static_cast<double>(s.n_links);
  s.frac_critical = static_cast<double>(s.n_critical_fwd) / n;
  s.frac_improved_fwd = static_cast<double>(s.n_improved_fwd) / n;
  return s;
}

std::vector<YearSummary> summarize_years(std::span<const TransitionRecord> records) {
  std::vector<YearSummary> out;
  std::size_t begin = 0;
  while (begin < records.size()) {
    std::size_t end = begin;
    while (end < records.size() && records[end].eval_year == records[begin].eval_year) ++end;
    out.push_back(summarize_year(records.subspan(begin, end - begin)));
    begin = end;
  }
  return out;
}

Histogram histogram(std::span<const TransitionRecord> records, const HistogramOptions& options) {
  if (!(options.bin_width > 0.0)) throw Error("histogram: bin_width must be positive");
  const double w = options.bin_width;
  const auto side = static_cast<std::int64_t>(std::llround(options.half_range / w));
  const std::int64_t n_inner = 2 * side + 1;
  constexpr double inf = std::numeric_limits<double>::infinity();

  Histogram h;
  h.range_of_interest = options.range_of_interest;
  h.bin_edges.reserve(static_cast<std::size_t>(n_inner) + 3);
  h.bin_edges.push_back(-inf);
  for (std::int64_t k = -side; k <= side + 1; ++k) {
    h.bin_edges.push_back((static_cast<double>(k) - 0.5) * w);
  }
  h.bin_edges.push_back(inf);
  h.counts.assign(static_cast<std::size_t>(n_inner) + 2, 0);

  std::uint64_t in_range = 0;
  for (const auto& r : records) {
    const double x = measure_of(r, options.measure);
    // Bin i holds [edges[i], edges[i+1]); searching the edges keeps the
    // assignment consistent with the published boundaries.
    auto it = std::upper_bound(h.bin_edges.begin(), h.bin_edges.end(), x);
    const auto bin = std::min(static_cast<std::size_t>(it - h.bin_edges.begin()), h.counts.size()) - 1;
    ++h.counts[bin];
    if (x >= options.range_of_interest.lo && x <= options.range_of_interest.hi) ++in_range;
  }
  h.total = records.size();
  h.in_range_fraction =
      records.empty() ? 0.0 : static_cast<double>(in_range) / static_cast<double>(records.size());
  return h;
}

void write_records(std::ostream& out, std::span<const TransitionRecord> records,
                   const NodeTable& nodes) {
  out << "eval_year\tciting\tcited\tp\tp_prime\tq\tu_bits\tv_bits\timprove_fwd_bits"
         "\tcritical_fwd\tcritical_bwd\timproved_fwd\timproved_bwd\n";
  for (const auto& r : records) {
    const auto& c = r.classification;
    out << r.eval_year << '\t' << nodes.name(r.link.citing) << '\t' << nodes.name(r.link.cited)
        << '\t' << format_double(r.p) << '\t' << format_double(r.p_prime) << '\t'
        << format_double(r.q) << '\t' << format_double(r.u) << '\t' << format_double(r.v) << '\t'
        << format_double(r.improve_fwd) << '\t' << c.critical_fwd << '\t' << c.critical_bwd
        << '\t' << c.improved_fwd << '\t' << c.improved_bwd << '\n';
  }
}

RecordFile read_records(std::istream& in, const std::string& source_name, double tie_eps) {
  struct Row {
    std::string citing, cited;
    TransitionRecord r;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  auto flag = [&](std::string_view f) {
    if (f == "0") return false;
    if (f == "1") return true;
    throw ParseError(source_name, line_no, "expected 0 or 1, got '" + std::string(f) + "'");
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (line.rfind("eval_year\t", 0) == 0) continue;
    auto f = split(line, '\t');
    if (f.size() != 13) {
      throw ParseError(source_name, line_no,
                       "expected 13 fields, got " + std::to_string(f.size()));
    }
    Row row;
    row.citing = std::string(f[1]);
    row.cited = std::string(f[2]);
    auto& r = row.r;
    try {
      r.eval_year = static_cast<int>(parse_int(f[0]));
      r.p = parse_double(f[3]);
      r.p_prime = parse_double(f[4]);
      r.q = parse_double(f[5]);
      r.u = parse_double(f[6]);
      r.v = parse_double(f[7]);
      r.improve_fwd = parse_double(f[8]);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source_name, line_no, e.what());
    }
    r.improve_bwd = r.p * std::log2(r.p_prime / r.q);
    r.classification.monotone = monotone_order(r.p, r.p_prime, r.q, tie_eps);
    r.classification.critical_fwd = flag(f[9]);
    r.classification.critical_bwd = flag(f[10]);
    r.classification.improved_fwd = flag(f[11]);
    r.classification.improved_bwd = flag(f[12]);
    rows.push_back(std::move(row));
  }

  RecordFile file;
  std::vector<std::string> names;
  names.reserve(rows.size() * 2);
  for (const auto& row : rows) {
    names.push_back(row.citing);
    names.push_back(row.cited);
  }
  file.nodes = NodeTable::sorted(std::move(names));
  file.records.reserve(rows.size());
  for (auto& row : rows) {
    row.r.link = Link{file.nodes.at(row.citing), file.nodes.at(row.cited)};
    file.records.push_back(row.r);
  }
  std::stable_sort(file.records.begin(), file.records.end(),
                   [](const TransitionRecord& a, const TransitionRecord& b) {
                     if (a.eval_year != b.eval_year) return a.eval_year < b.eval_year;
                     return a.link < b.link;
                   });
  return file;
}

void write_summaries_tsv(std::ostream& out, std::span<const YearSummary> summaries) {
  out << "eval_year\tn_links\tn_critical_fwd\tn_critical_bwd\tn_improved_fwd\tn_improved_bwd"
         "\tn_tied\tfrac_critical\tfrac_improved_fwd\n";
  for (const auto& s : summaries) {
    out << s.eval_year << '\t' << s.n_links << '\t' << s.n_critical_fwd << '\t'
        << s.n_critical_bwd << '\t' << s.n_improved_fwd << '\t' << s.n_improved_bwd << '\t'
        << s.n_tied << '\t' << format_double(s.frac_critical) << '\t'
        << format_double(s.frac_improved_fwd) << '\n';
  }
}

void write_histogram_tsv(std::ostream& out, const Histogram& h) {
  out << "bin_lo_mbit\tbin_hi_mbit\tcount\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << format_double(h.bin_edges[i] / kBitsPerMillibit) << '\t'
        << format_double(h.bin_edges[i + 1] / kBitsPerMillibit) << '\t' << h.counts[i] << '\n';
  }
}

}  // namespace critrans
