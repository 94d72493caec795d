#pragma once

// Three-year moving aggregates, eligibility filtering, normalization and the
// (p, p', q) relative-frequency triples per link and evaluation year.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "critrans/core.hpp"
#include "critrans/ingest.hpp"

namespace critrans {

inline constexpr int kWindowYears = 3;

/// Sum of a cell's counts over raw years window_end_year-2 .. window_end_year.
/// Only cells present in all three raw years are kept.
struct MovingAggregate {
  int window_end_year = 0;
  std::vector<Cell> cells;  // sorted by link
  std::uint64_t grand_total = 0;

  /// Aggregated count of `l`, 0 when absent.
  std::uint64_t count(const Link& l) const;
};

enum class EligibilityMode {
  /// Window ending at the evaluation year exceeds the threshold; the two
  /// earlier windows only need to contain the link.
  AggregateAboveTen,
  /// Every one of the three windows exceeds the threshold (default).
  EachWindowAboveTen,
  /// Link present in all three windows and the sum over the three windows
  /// exceeds the threshold.
  PresentAllYearsAndAggregateAboveTen,
};

enum class NormalizationBase {
  /// Divide by the total over the eligible set of the evaluation year.
  Global,
  /// Divide by the total over eligible links sharing the citing node.
  PerCitingColumn,
};

struct EligibilityPolicy {
  EligibilityMode mode = EligibilityMode::EachWindowAboveTen;
  std::uint64_t threshold = 10;  // strict: count must be > threshold
  NormalizationBase normalization = NormalizationBase::Global;
};

/// Relative frequencies of one link in the windows ending at eval_year-2
/// (p, a priori), eval_year-1 (p_prime, revision) and eval_year (q, a
/// posteriori).
struct CellSeries {
  Link link;
  int eval_year = 0;
  double p = 0.0;
  double p_prime = 0.0;
  double q = 0.0;

  bool operator==(const CellSeries&) const = default;
};

/// One aggregate per window with all three raw years available. Throws if
/// the slice years are not consecutive.
std::vector<MovingAggregate> build_aggregates(std::span<const YearSlice> slices);

/// Window ending at `end_year`; throws naming the year when missing.
const MovingAggregate& find_window(std::span<const MovingAggregate> aggregates, int end_year);

/// Sorted eligible links for `eval_year`.
std::vector<Link> eligible_links(std::span<const MovingAggregate> aggregates, int eval_year,
                                 const EligibilityPolicy& policy);

/// Relative frequency of each supplied link (aligned with `links`, which must
/// be sorted). Throws on an empty set or a link missing from the aggregate.
std::vector<double> normalize(const MovingAggregate& aggregate, std::span<const Link> links,
                              NormalizationBase base = NormalizationBase::Global);

/// One CellSeries per eligible link, in canonical link order.
std::vector<CellSeries> cell_series(std::span<const MovingAggregate> aggregates, int eval_year,
                                    const EligibilityPolicy& policy);

/// First and last evaluation years supported by `aggregates`, as a closed
/// range. Empty (first > last) when fewer than three windows exist.
struct YearRange {
  int first = 0;
  int last = -1;

  bool empty() const noexcept { return first > last; }
  int size() const noexcept { return empty() ? 0 : last - first + 1; }
};

YearRange evaluation_years(std::span<const MovingAggregate> aggregates);

/// Audit dump: `eval_year citing cited p p_prime q`.
void write_cell_series(std::ostream& out, std::span<const CellSeries> series,
                       const NodeTable& nodes);

}  // namespace critrans
