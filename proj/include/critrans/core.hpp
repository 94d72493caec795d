#pragma once

// Shared vocabulary types: node identities, links, errors.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace critrans {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that could not be parsed. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

using NodeIndex = std::uint32_t;

/// Directed link in a citation matrix. Ordering is (citing, cited), which is
/// the canonical output order everywhere once node indices follow name order.
struct Link {
  NodeIndex citing = 0;
  NodeIndex cited = 0;

  auto operator<=>(const Link&) const = default;

  std::uint64_t key() const noexcept {
    return (static_cast<std::uint64_t>(citing) << 32) | cited;
  }
};

struct LinkHash {
  std::size_t operator()(const Link& l) const noexcept {
    return std::hash<std::uint64_t>{}(l.key());
  }
};

/// Uppercased, whitespace-trimmed journal label.
std::string canonical_name(std::string_view raw);

/// Bidirectional name <-> index dictionary. A table built with `sorted()`
/// assigns indices in lexicographic name order, so comparing indices
/// compares names.
class NodeTable {
 public:
  NodeTable() = default;

  /// Builds a table whose indices follow the lexicographic order of `names`.
  /// Duplicates are collapsed.
  static NodeTable sorted(std::vector<std::string> names);

  /// Returns the index of `name`, inserting it at the end if absent.
  NodeIndex intern(const std::string& name);

  /// Index of `name`, or -1 when unknown.
  std::int64_t find(const std::string& name) const;
  NodeIndex at(const std::string& name) const;

  const std::string& name(NodeIndex i) const { return names_.at(i); }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  bool operator==(const NodeTable& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeIndex> index_;
};

/// One nonzero cell of a sparse citation matrix.
struct Cell {
  Link link;
  std::uint64_t count = 0;

  bool operator==(const Cell&) const = default;
};

/// Number of worker threads to use when `requested` is 0 (auto).
unsigned resolve_workers(unsigned requested);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

/// Strict double parse (entire field must be consumed). Throws on failure.
double parse_double(std::string_view text);

/// Strict signed integer parse (entire field must be consumed).
std::int64_t parse_int(std::string_view text);

/// Splits on a single-character delimiter, keeping empty fields.
std::vector<std::string_view> split(std::string_view line, char delim);

}  // namespace critrans
