#include "critrans/temporal.hpp"

#include <algorithm>
#include <ostream>

namespace critrans {

namespace {

bool by_link(const Cell& a, const Cell& b) { return a.link < b.link; }

// Calls fn(link, count_a, count_b, count_c) for links present in all three
// sorted cell vectors.
template <typename Fn>
void intersect3(std::span<const Cell> a, std::span<const Cell> b, std::span<const Cell> c,
                Fn&& fn) {
  std::size_t i = 0, j = 0, k = 0;
  while (i < a.size() && j < b.size() && k < c.size()) {
    const Link& la = a[i].link;
    const Link& lb = b[j].link;
    const Link& lc = c[k].link;
    if (la == lb && lb == lc) {
      fn(la, a[i].count, b[j].count, c[k].count);
      ++i, ++j, ++k;
      continue;
    }
    const Link hi = std::max({la, lb, lc});
    if (la < hi) ++i;
    if (lb < hi) ++j;
    if (lc < hi) ++k;
  }
}

}  // namespace

std::uint64_t MovingAggregate::count(const Link& l) const {
  auto it = std::lower_bound(cells.begin(), cells.end(), Cell{l, 0}, by_link);
  return (it != cells.end() && it->link == l) ? it->count : 0;
}

std::vector<MovingAggregate> build_aggregates(std::span<const YearSlice> slices) {
  std::vector<const YearSlice*> ordered;
  ordered.reserve(slices.size());
  for (const auto& s : slices) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const YearSlice* a, const YearSlice* b) { return a->year < b->year; });
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    if (ordered[i]->year != ordered[i - 1]->year + 1) {
      throw Error("raw years are not consecutive: " + std::to_string(ordered[i - 1]->year) +
                  " is followed by " + std::to_string(ordered[i]->year));
    }
  }

  std::vector<MovingAggregate> out;
  for (std::size_t i = kWindowYears - 1; i < ordered.size(); ++i) {
    MovingAggregate agg;
    agg.window_end_year = ordered[i]->year;
    intersect3(ordered[i - 2]->cells, ordered[i - 1]->cells, ordered[i]->cells,
               [&](const Link& l, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
                 agg.cells.push_back(Cell{l, a + b + c});
                 agg.grand_total += a + b + c;
               });
    out.push_back(std::move(agg));
  }
  return out;
}

const MovingAggregate& find_window(std::span<const MovingAggregate> aggregates, int end_year) {
  for (const auto& a : aggregates) {
    if (a.window_end_year == end_year) return a;
  }
  throw Error("no moving-aggregate window ends in " + std::to_string(end_year));
}

std::vector<Link> eligible_links(std::span<const MovingAggregate> aggregates, int eval_year,
                                 const EligibilityPolicy& policy) {
  const auto& prior = find_window(aggregates, eval_year - 2);
  const auto& revision = find_window(aggregates, eval_year - 1);
  const auto& posterior = find_window(aggregates, eval_year);
  const std::uint64_t t = policy.threshold;

  std::vector<Link> out;
  intersect3(prior.cells, revision.cells, posterior.cells,
             [&](const Link& l, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
               bool keep = false;
               switch (policy.mode) {
                 case EligibilityMode::EachWindowAboveTen:
                   keep = a > t && b > t && c > t;
                   break;
                 case EligibilityMode::AggregateAboveTen:
                   keep = c > t;
                   break;
                 case EligibilityMode::PresentAllYearsAndAggregateAboveTen:
                   keep = a + b + c > t;
                   break;
               }
               if (keep) out.push_back(l);
             });
  return out;
}

std::vector<double> normalize(const MovingAggregate& aggregate, std::span<const Link> links,
                              NormalizationBase base) {
  if (links.empty()) throw Error("cannot normalize over an empty link set");

  // Links are sorted, so a single forward scan over the aggregate suffices.
  std::vector<std::uint64_t> counts(links.size());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (i > 0 && !(links[i - 1] < links[i])) throw Error("normalize: links must be sorted");
    while (pos < aggregate.cells.size() && aggregate.cells[pos].link < links[i]) ++pos;
    if (pos == aggregate.cells.size() || aggregate.cells[pos].link != links[i]) {
      throw Error("normalize: link missing from window ending " +
                  std::to_string(aggregate.window_end_year));
    }
    counts[i] = aggregate.cells[pos].count;
  }

  std::vector<double> out(links.size());
  if (base == NormalizationBase::Global) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    const double denom = static_cast<double>(total);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      out[i] = static_cast<double>(counts[i]) / denom;
    }
    return out;
  }

  std::size_t begin = 0;
  while (begin < links.size()) {
    std::size_t end = begin;
    std::uint64_t column_total = 0;
    while (end < links.size() && links[end].citing == links[begin].citing) {
      column_total += counts[end++];
    }
    const double denom = static_cast<double>(column_total);
    for (std::size_t i = begin; i < end; ++i) out[i] = static_cast<double>(counts[i]) / denom;
    begin = end;
  }
  return out;
}

std::vector<CellSeries> cell_series(std::span<const MovingAggregate> aggregates, int eval_year,
                                    const EligibilityPolicy& policy) {
  auto links = eligible_links(aggregates, eval_year, policy);
  if (links.empty()) return {};
  auto p = normalize(find_window(aggregates, eval_year - 2), links, policy.normalization);
  auto pp = normalize(find_window(aggregates, eval_year - 1), links, policy.normalization);
  auto q = normalize(find_window(aggregates, eval_year), links, policy.normalization);

  std::vector<CellSeries> out(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    out[i] = CellSeries{links[i], eval_year, p[i], pp[i], q[i]};
  }
  return out;
}

YearRange evaluation_years(std::span<const MovingAggregate> aggregates) {
  if (aggregates.size() < static_cast<std::size_t>(kWindowYears)) return {};
  int lo = aggregates.front().window_end_year;
  int hi = lo;
  for (const auto& a : aggregates) {
    lo = std::min(lo, a.window_end_year);
    hi = std::max(hi, a.window_end_year);
  }
  return YearRange{lo + kWindowYears - 1, hi};
}

void write_cell_series(std::ostream& out, std::span<const CellSeries> series,
                       const NodeTable& nodes) {
  out << "eval_year\tciting\tcited\tp\tp_prime\tq\n";
  for (const auto& s : series) {
    out << s.eval_year << '\t' << nodes.name(s.link.citing) << '\t' << nodes.name(s.link.cited)
        << '\t' << format_double(s.p) << '\t' << format_double(s.p_prime) << '\t'
        << format_double(s.q) << '\n';
  }
}

}  // namespace critrans
