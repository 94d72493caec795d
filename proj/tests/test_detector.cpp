#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "critrans/detector.hpp"
#include "critrans/ingest.hpp"
#include "doctest.h"

using namespace critrans;

namespace {

Corpus parse(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_list(in, "test.tsv");
}

TransitionRecord with_u(double u, int year = 2000) {
  TransitionRecord r;
  r.eval_year = year;
  r.u = u;
  r.v = -u;
  return r;
}

std::vector<TransitionRecord> random_records(std::mt19937_64& rng, std::size_t n, int year) {
  std::uniform_real_distribution<double> f(0.001, 0.999);
  std::vector<TransitionRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    CellSeries s{Link{static_cast<NodeIndex>(i), 0}, year, f(rng), f(rng), f(rng)};
    out.push_back(make_record(s));
  }
  return out;
}

// Random corpus over `years` consecutive years with dense-ish cells.
Corpus random_corpus(std::uint64_t seed, int years, int nodes) {
  std::mt19937_64 rng(seed);
  std::ostringstream out;
  for (int y = 0; y < years; ++y) {
    for (int a = 0; a < nodes; ++a) {
      for (int b = 0; b < nodes; ++b) {
        if ((a * 7 + b * 3) % 5 == 0) continue;
        out << 2000 + y << "\tN" << a << "\tN" << b << '\t' << 3 + rng() % 40 << '\n';
      }
    }
  }
  return parse(out.str());
}

}  // namespace

TEST_CASE("stationary network has no transitions") {
  std::ostringstream text;
  for (int y = 2000; y < 2008; ++y) {
    text << y << "\tA\tB\t20\n" << y << "\tA\tC\t40\n" << y << "\tC\tA\t15\n";
  }
  const auto c = parse(text.str());
  const auto aggs = build_aggregates(c.slices);
  const auto records = sweep(aggs, evaluation_years(aggs), {});
  REQUIRE(records.size() == 3 * 4);
  for (const auto& r : records) {
    CHECK(r.u == 0.0);
    CHECK(r.v == 0.0);
    CHECK_FALSE(r.classification.critical_fwd);
    CHECK_FALSE(r.classification.critical_bwd);
    CHECK(r.classification.monotone == Monotone::Tied);
  }
  for (const auto& s : summarize_years(records)) {
    CHECK(s.n_critical_fwd == 0);
    CHECK(s.n_improved_fwd == 0);
    CHECK(s.n_improved_bwd == 0);
    CHECK(s.n_tied == s.n_links);
  }
}

TEST_CASE("a link doubling every year is flagged critical") {
  // A->B grows x2 per year, the other two links stay flat, so after
  // normalization p < p' < q for A->B.
  std::ostringstream text;
  int ab = 16;
  for (int y = 2000; y < 2005; ++y, ab *= 2) {
    text << y << "\tA\tB\t" << ab << '\n' << y << "\tA\tC\t50\n" << y << "\tB\tC\t50\n";
  }
  const auto c = parse(text.str());
  const auto aggs = build_aggregates(c.slices);
  const auto records = sweep(aggs, YearRange{2004, 2004}, {});
  REQUIRE(records.size() == 3);
  const auto& r = records[0];
  CHECK(c.nodes.name(r.link.citing) == "A");
  CHECK(c.nodes.name(r.link.cited) == "B");
  // windows: 2002 = 16+32+64, 2003 = 32+64+128, 2004 = 64+128+256; others 150
  CHECK(r.p == doctest::Approx(112.0 / 412));
  CHECK(r.p_prime == doctest::Approx(224.0 / 524));
  CHECK(r.q == doctest::Approx(448.0 / 748));
  CHECK(r.classification.monotone == Monotone::Increasing);
  CHECK(r.classification.critical_fwd);
  CHECK(r.classification.critical_bwd);
  CHECK(r.u < 0);
  // the shrinking shares of the flat links are monotone decreasing too
  CHECK(records[1].classification.monotone == Monotone::Decreasing);
}

TEST_CASE("19 evaluation years give 19 summaries") {
  std::ostringstream text;
  for (int y = 1994; y <= 2016; ++y) {
    text << y << "\tA\tB\t" << 20 + (y % 3) << "\n" << y << "\tB\tA\t30\n";
  }
  const auto c = parse(text.str());
  const auto aggs = build_aggregates(c.slices);
  const auto summaries = summarize_years(sweep(aggs, evaluation_years(aggs), {}));
  REQUIRE(summaries.size() == 19);
  CHECK(summaries.front().eval_year == 1998);
  CHECK(summaries.back().eval_year == 2016);
}

TEST_CASE("summaries count and divide") {
  std::vector<TransitionRecord> rs(4);
  for (int i = 0; i < 4; ++i) {
    rs[i].eval_year = 2010;
    rs[i].classification.critical_fwd = i < 3;
    rs[i].classification.critical_bwd = i < 3;
  }
  const auto s = summarize_year(rs);
  CHECK(s.n_links == 4);
  CHECK(s.frac_critical == 0.75);
  CHECK_THROWS_AS(summarize_year(std::vector<TransitionRecord>{}), Error);
  rs[3].eval_year = 2011;
  CHECK_THROWS_AS(summarize_year(rs), Error);
  CHECK(summarize_years(rs).size() == 2);
}

TEST_CASE("summaries match a brute-force recount on random triples") {
  std::mt19937_64 rng(4);
  const auto rs = random_records(rng, 5000, 2001);
  const auto s = summarize_year(rs);
  std::uint64_t crit = 0, imp_f = 0, imp_b = 0;
  for (const auto& r : rs) {
    const bool mono = (r.p < r.p_prime && r.p_prime < r.q) || (r.p > r.p_prime && r.p_prime > r.q);
    crit += mono;
    imp_f += r.p_prime > r.p;
    imp_b += r.p_prime > r.q;
  }
  CHECK(s.n_critical_fwd == crit);
  CHECK(s.n_critical_bwd == crit);
  CHECK(s.n_improved_fwd == imp_f);
  CHECK(s.n_improved_bwd == imp_b);
  CHECK(s.frac_critical == doctest::Approx(static_cast<double>(crit) / 5000));
}

TEST_CASE("histogram of all-zero records puts everything in the central bin") {
  std::vector<TransitionRecord> rs(10, with_u(0.0));
  const auto h = histogram(rs);
  CHECK(h.counts.size() == 103);
  CHECK(h.bin_edges.size() == 104);
  CHECK(h.counts[51] == 10);
  CHECK(h.in_range_fraction == 1.0);
  CHECK(h.total == 10);
  CHECK(std::isinf(h.bin_edges.front()));
  CHECK(std::isinf(h.bin_edges.back()));
}

TEST_CASE("histogram equals a brute-force binning") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 0.3e-3);
  std::vector<TransitionRecord> rs;
  for (int i = 0; i < 20000; ++i) rs.push_back(with_u(g(rng)));
  rs.push_back(with_u(1.0));
  rs.push_back(with_u(-1.0));
  for (Measure m : {Measure::U, Measure::V}) {
    HistogramOptions opt;
    opt.measure = m;
    const auto h = histogram(rs, opt);
    std::vector<std::uint64_t> oracle(h.counts.size(), 0);
    std::uint64_t in_range = 0;
    for (const auto& r : rs) {
      const double x = measure_of(r, m);
      for (std::size_t b = 0; b < h.counts.size(); ++b) {
        if (x >= h.bin_edges[b] && x < h.bin_edges[b + 1]) {
          ++oracle[b];
          break;
        }
      }
      in_range += std::abs(x) <= 0.1e-3;
    }
    CHECK(h.counts == oracle);
    std::uint64_t sum = 0;
    for (auto c : h.counts) sum += c;
    CHECK(sum == rs.size());
    CHECK(h.in_range_fraction == doctest::Approx(static_cast<double>(in_range) / rs.size()));
    // bins are 0.01 mbit wide and centred on multiples of the width
    CHECK(h.bin_edges[51] == doctest::Approx(-0.005e-3));
    CHECK(h.bin_edges[52] == doctest::Approx(0.005e-3));
  }
  HistogramOptions bad;
  bad.bin_width = 0;
  CHECK_THROWS_AS(histogram(rs, bad), Error);
}

TEST_CASE("stored indicators recompute from the stored frequencies") {
  const auto c = random_corpus(3, 7, 12);
  const auto aggs = build_aggregates(c.slices);
  const auto rs = sweep(aggs, evaluation_years(aggs), EligibilityPolicy{});
  REQUIRE(!rs.empty());
  for (const auto& r : rs) {
    const auto ind = cell_indicators_closed(r.p, r.p_prime, r.q);
    CHECK(std::abs(ind.u - r.u) <= 1e-12 * std::max(1.0, std::abs(r.u)));
    CHECK(std::abs(ind.v - r.v) <= 1e-12 * std::max(1.0, std::abs(r.v)));
  }
  for (const auto& s : summarize_years(rs)) CHECK(s.n_critical_fwd == s.n_critical_bwd);
}

TEST_CASE("sweep order is canonical and independent of the worker count") {
  const auto c = random_corpus(5, 8, 30);
  const auto aggs = build_aggregates(c.slices);
  const auto years = evaluation_years(aggs);
  SweepOptions one;
  one.workers = 1;
  const auto base = sweep(aggs, years, {}, one);
  REQUIRE(base.size() > 1000);
  CHECK(std::is_sorted(base.begin(), base.end(), [](const auto& a, const auto& b) {
    return std::pair(a.eval_year, a.link) < std::pair(b.eval_year, b.link);
  }));
  for (unsigned w : {2u, 3u, 8u}) {
    SweepOptions many;
    many.workers = w;
    many.min_chunk = 1;
    CHECK(sweep(aggs, years, {}, many) == base);
  }
}

TEST_CASE("record files round trip") {
  const auto c = random_corpus(6, 6, 10);
  const auto aggs = build_aggregates(c.slices);
  const auto rs = sweep(aggs, evaluation_years(aggs), {});
  std::ostringstream out;
  write_records(out, rs, c.nodes);
  std::istringstream in(out.str());
  const auto file = read_records(in, "records.tsv");
  REQUIRE(file.records.size() == rs.size());
  // The file only names nodes that appear in records, so compare by name.
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const auto& a = rs[i];
    const auto& b = file.records[i];
    CHECK(c.nodes.name(a.link.citing) == file.nodes.name(b.link.citing));
    CHECK(c.nodes.name(a.link.cited) == file.nodes.name(b.link.cited));
    CHECK(a.p == b.p);
    CHECK(a.u == b.u);
    CHECK(a.v == b.v);
    CHECK(a.improve_fwd == b.improve_fwd);
    CHECK(a.improve_bwd == b.improve_bwd);
    CHECK(a.classification == b.classification);
  }
  std::istringstream bad("eval_year\tciting\n2000\tA\tB\n");
  CHECK_THROWS_AS(read_records(bad, "bad.tsv"), ParseError);
}

TEST_CASE("summary and histogram tsv headers") {
  std::vector<TransitionRecord> rs(2, with_u(0.0));
  std::ostringstream s, h;
  write_summaries_tsv(s, summarize_years(rs));
  write_histogram_tsv(h, histogram(rs));
  CHECK(s.str().rfind("eval_year\tn_links", 0) == 0);
  CHECK(h.str().rfind("bin_lo_mbit\tbin_hi_mbit\tcount\n-inf\t", 0) == 0);
}
