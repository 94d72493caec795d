#pragma once

// Sweep of all eligible link-years into transition records, yearly summaries
// and value histograms.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "critrans/entropy.hpp"
#include "critrans/temporal.hpp"

namespace critrans {

struct TransitionRecord {
  Link link;
  int eval_year = 0;
  double p = 0.0;
  double p_prime = 0.0;
  double q = 0.0;
  double u = 0.0;            // bits
  double v = 0.0;            // bits
  double improve_fwd = 0.0;  // bits
  double improve_bwd = 0.0;  // bits
  Classification classification;

  bool operator==(const TransitionRecord&) const = default;
};

/// Which indicator a ranking, histogram or graph is built on.
enum class Measure { U, V };

inline double measure_of(const TransitionRecord& r, Measure m) {
  return m == Measure::U ? r.u : r.v;
}

struct SweepOptions {
  double tie_eps = kDefaultTieEps;
  unsigned workers = 1;  // 0 = hardware concurrency
  std::size_t min_chunk = 4096;  // smallest per-worker share of a year
};

TransitionRecord make_record(const CellSeries& s, double tie_eps = kDefaultTieEps);

/// Records for every eligible link in each evaluation year of `years`,
/// ordered by (eval_year, citing, cited). The output does not depend on the
/// number of workers.
std::vector<TransitionRecord> sweep(std::span<const MovingAggregate> aggregates, YearRange years,
                                    const EligibilityPolicy& policy,
                                    const SweepOptions& options = {});

struct YearSummary {
  int eval_year = 0;
  std::uint64_t n_links = 0;
  std::uint64_t n_critical_fwd = 0;
  std::uint64_t n_critical_bwd = 0;
  std::uint64_t n_improved_fwd = 0;
  std::uint64_t n_improved_bwd = 0;
  std::uint64_t n_tied = 0;
  double frac_critical = 0.0;      // n_critical_fwd / n_links
  double frac_improved_fwd = 0.0;  // n_improved_fwd / n_links
};

/// Throws on empty input or when records span several years.
YearSummary summarize_year(std::span<const TransitionRecord> records);

/// One summary per evaluation year present in `records` (which must be
/// grouped by year, as sweep() emits them).
std::vector<YearSummary> summarize_years(std::span<const TransitionRecord> records);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Bins are centred on multiples of bin_width and span +-half_range. The
/// first and last entries are open-ended overflow bins, so the counts always
/// add up to the number of records.
struct Histogram {
  std::vector<double> bin_edges;  // size counts.size() + 1; ends are -inf / +inf
  std::vector<std::uint64_t> counts;
  Interval range_of_interest;
  double in_range_fraction = 0.0;  // share of values in [lo, hi]
  std::uint64_t total = 0;
};

struct HistogramOptions {
  double bin_width = 0.01 * kBitsPerMillibit;
  double half_range = 0.5 * kBitsPerMillibit;
  Interval range_of_interest{-0.1 * kBitsPerMillibit, 0.1 * kBitsPerMillibit};
  Measure measure = Measure::U;
};

Histogram histogram(std::span<const TransitionRecord> records,
                    const HistogramOptions& options = {});

/// Record file with header `eval_year citing cited p p_prime q u_bits v_bits
/// improve_fwd_bits critical_fwd critical_bwd improved_fwd improved_bwd`.
void write_records(std::ostream& out, std::span<const TransitionRecord> records,
                   const NodeTable& nodes);

struct RecordFile {
  NodeTable nodes;  // canonical name order
  std::vector<TransitionRecord> records;
};

/// Reads a record file back. improve_bwd and the monotone class are
/// recomputed from (p, p', q) with `tie_eps`.
RecordFile read_records(std::istream& in, const std::string& source_name = "<records>",
                        double tie_eps = kDefaultTieEps);

void write_summaries_tsv(std::ostream& out, std::span<const YearSummary> summaries);
void write_histogram_tsv(std::ostream& out, const Histogram& h);

}  // namespace critrans
