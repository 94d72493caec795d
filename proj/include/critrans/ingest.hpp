#pragma once

// Edge-list ingestion, journal rename resolution, per-year descriptives.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <unordered_map>
#include <optional>
#include <string>
#include <vector>

#include "critrans/core.hpp"

namespace critrans {

/// Citation counts for one raw year. Cells are sorted by link and every count
/// is >= 1; absent cells are missing data, not zeros.
struct YearSlice {
  int year = 0;
  std::vector<Cell> cells;
  /// Nodes appearing as citing or cited in this year, ascending.
  std::vector<NodeIndex> nodes;

  std::uint64_t total() const noexcept;
  bool operator==(const YearSlice&) const = default;
};

/// A parsed time series sharing one node universe. Node indices follow
/// canonical name order.
struct Corpus {
  NodeTable nodes;
  std::vector<YearSlice> slices;  // ascending by year
};

struct RenameEntry {
  std::string old_name;
  std::string new_name;
  int change_year = 0;
};

using RenameMap = std::vector<RenameEntry>;

/// Accumulates (year, citing, cited, count) rows and produces a Corpus with
/// canonical node order. Repeated rows are summed; zero counts register the
/// year but create no cell.
class CorpusBuilder {
 public:
  void add(int year, const std::string& citing, const std::string& cited, std::uint64_t count);
  /// Registers a node with no cells (kept in the universe).
  void add_node(const std::string& name);
  /// Registers a year even if it ends up with no cells.
  void add_year(int year);
  Corpus build() &&;

 private:
  NodeTable names_;  // insertion order
  std::map<int, std::unordered_map<Link, std::uint64_t, LinkHash>> years_;
};

struct SliceDescriptives {
  std::uint64_t n_nodes = 0;
  std::uint64_t n_possible_cells = 0;
  std::uint64_t n_nonzero = 0;
  std::uint64_t total_citations = 0;
  double density = 0.0;
  /// Absent for an empty slice.
  std::optional<double> mean_per_nonzero;

  static SliceDescriptives from_counts(std::uint64_t n_nodes, std::uint64_t n_nonzero,
                                       std::uint64_t total_citations);
};

/// Reads `year<TAB>citing<TAB>cited<TAB>count` lines. A leading header line
/// whose first field is "year" is skipped, as are blank and `#` lines.
/// Duplicate (year, citing, cited) rows are summed. `source_name` only
/// labels error messages.
Corpus parse_edge_list(std::istream& in, const std::string& source_name = "<edge-list>");

/// Reads `old<TAB>new<TAB>year` lines.
RenameMap parse_rename_map(std::istream& in, const std::string& source_name = "<rename-map>");

/// Replaces every name by the terminal name of its rename chain, in all
/// years. Cells that collide after renaming are summed. Throws on cycles.
Corpus resolve_renames(const Corpus& corpus, const RenameMap& map);

/// Terminal name of every name that has a successor in `map`.
std::unordered_map<std::string, std::string> rename_closure(const RenameMap& map);

SliceDescriptives describe(const YearSlice& slice);

/// Writes the corpus back in edge-list format, rows in (year, citing, cited)
/// order.
void write_edge_list(std::ostream& out, const Corpus& corpus);

}  // namespace critrans
