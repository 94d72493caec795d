#include "critrans/ingest.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

namespace critrans {

namespace {

bool skippable(std::string_view line) {
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == '\r') continue;
    return c == '#';
  }
  return true;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

std::uint64_t YearSlice::total() const noexcept {
  std::uint64_t t = 0;
  for (const auto& c : cells) t += c.count;
  return t;
}

SliceDescriptives SliceDescriptives::from_counts(std::uint64_t n_nodes, std::uint64_t n_nonzero,
                                                 std::uint64_t total_citations) {
  SliceDescriptives d;
  d.n_nodes = n_nodes;
  d.n_possible_cells = n_nodes * n_nodes;
  d.n_nonzero = n_nonzero;
  d.total_citations = total_citations;
  d.density = d.n_possible_cells == 0
                  ? 0.0
                  : static_cast<double>(n_nonzero) / static_cast<double>(d.n_possible_cells);
  if (n_nonzero > 0) {
    d.mean_per_nonzero = static_cast<double>(total_citations) / static_cast<double>(n_nonzero);
  }
  return d;
}

void CorpusBuilder::add(int year, const std::string& citing, const std::string& cited,
                        std::uint64_t count) {
  Link l{names_.intern(citing), names_.intern(cited)};
  auto& cells = years_[year];
  if (count > 0) cells[l] += count;
}

void CorpusBuilder::add_node(const std::string& name) { names_.intern(name); }

void CorpusBuilder::add_year(int year) { years_[year]; }

Corpus CorpusBuilder::build() && {
  Corpus out;
  out.nodes = NodeTable::sorted(names_.names());
  std::vector<NodeIndex> remap(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    remap[i] = out.nodes.at(names_.name(static_cast<NodeIndex>(i)));
  }
  out.slices.reserve(years_.size());
  for (auto& [year, cells] : years_) {
    YearSlice s;
    s.year = year;
    s.cells.reserve(cells.size());
    for (const auto& [l, count] : cells) {
      s.cells.push_back(Cell{Link{remap[l.citing], remap[l.cited]}, count});
    }
    std::sort(s.cells.begin(), s.cells.end(),
              [](const Cell& a, const Cell& b) { return a.link < b.link; });
    s.nodes.reserve(2 * s.cells.size());
    for (const auto& c : s.cells) {
      s.nodes.push_back(c.link.citing);
      s.nodes.push_back(c.link.cited);
    }
    std::sort(s.nodes.begin(), s.nodes.end());
    s.nodes.erase(std::unique(s.nodes.begin(), s.nodes.end()), s.nodes.end());
    out.slices.push_back(std::move(s));
  }
  years_.clear();
  return out;
}

Corpus parse_edge_list(std::istream& in, const std::string& source_name) {
  CorpusBuilder builder;
  std::string raw;
  std::size_t line_no = 0;
  bool seen_data = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = strip_cr(raw);
    if (skippable(line)) continue;
    auto fields = split(line, '\t');
    if (!seen_data) {
      seen_data = true;
      if (!fields.empty() && canonical_name(fields[0]) == "YEAR") continue;
    }
    if (fields.size() != 4) {
      throw ParseError(source_name, line_no,
                       "expected 4 tab-separated fields, got " + std::to_string(fields.size()));
    }
    std::int64_t year = 0;
    std::int64_t count = 0;
    try {
      year = parse_int(fields[0]);
      count = parse_int(fields[3]);
    } catch (const Error& e) {
      throw ParseError(source_name, line_no, e.what());
    }
    if (count < 0) throw ParseError(source_name, line_no, "negative count");
    std::string citing = canonical_name(fields[1]);
    std::string cited = canonical_name(fields[2]);
    if (citing.empty() || cited.empty()) {
      throw ParseError(source_name, line_no, "empty node name");
    }
    builder.add(static_cast<int>(year), citing, cited, static_cast<std::uint64_t>(count));
  }
  return std::move(builder).build();
}

RenameMap parse_rename_map(std::istream& in, const std::string& source_name) {
  RenameMap map;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = strip_cr(raw);
    if (skippable(line)) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError(source_name, line_no,
                       "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    }
    RenameEntry e;
    e.old_name = canonical_name(fields[0]);
    e.new_name = canonical_name(fields[1]);
    if (map.empty() && e.old_name == "OLD" && e.new_name == "NEW") continue;
    try {
      e.change_year = static_cast<int>(parse_int(fields[2]));
    } catch (const Error& err) {
      throw ParseError(source_name, line_no, err.what());
    }
    if (e.old_name.empty() || e.new_name.empty()) {
      throw ParseError(source_name, line_no, "empty name");
    }
    map.push_back(std::move(e));
  }
  return map;
}

std::unordered_map<std::string, std::string> rename_closure(const RenameMap& map) {
  // Each name follows its most recent change; two different successors in the
  // same year are ambiguous.
  std::unordered_map<std::string, const RenameEntry*> successor;
  for (const auto& e : map) {
    std::string from = canonical_name(e.old_name);
    auto [it, inserted] = successor.try_emplace(from, &e);
    if (inserted) continue;
    const RenameEntry* prev = it->second;
    if (prev->change_year == e.change_year &&
        canonical_name(prev->new_name) != canonical_name(e.new_name)) {
      throw Error("rename map: '" + from + "' has two successors in " +
                  std::to_string(e.change_year));
    }
    if (e.change_year > prev->change_year) it->second = &e;
  }

  // Walk the starts in name order so a reported cycle does not depend on
  // hash order.
  std::vector<std::string> starts;
  starts.reserve(successor.size());
  for (const auto& kv : successor) starts.push_back(kv.first);
  std::sort(starts.begin(), starts.end());

  std::unordered_map<std::string, std::string> terminal;
  for (const auto& start : starts) {
    if (terminal.count(start)) continue;
    std::vector<std::string> path{start};
    std::set<std::string> on_path{start};
    std::string cur = start;
    std::string end;
    while (true) {
      auto done = terminal.find(cur);
      if (done != terminal.end() && cur != start) {
        end = done->second;
        break;
      }
      auto next = successor.find(cur);
      if (next == successor.end()) {
        end = cur;
        break;
      }
      std::string nxt = canonical_name(next->second->new_name);
      if (nxt == cur) {
        end = cur;
        break;
      }
      if (on_path.count(nxt)) {
        std::string cycle;
        auto pos = std::find(path.begin(), path.end(), nxt);
        for (; pos != path.end(); ++pos) cycle += *pos + " -> ";
        throw Error("rename map contains a cycle: " + cycle + nxt);
      }
      path.push_back(nxt);
      on_path.insert(nxt);
      cur = nxt;
    }
    for (const auto& n : path) {
      if (n != end) terminal[n] = end;
    }
  }
  return terminal;
}

Corpus resolve_renames(const Corpus& corpus, const RenameMap& map) {
  if (map.empty()) return corpus;
  auto terminal = rename_closure(map);
  auto resolve = [&](const std::string& n) -> const std::string& {
    auto it = terminal.find(n);
    return it == terminal.end() ? n : it->second;
  };

  CorpusBuilder builder;
  for (const auto& n : corpus.nodes.names()) builder.add_node(resolve(n));
  for (const auto& s : corpus.slices) {
    builder.add_year(s.year);
    for (const auto& c : s.cells) {
      builder.add(s.year, resolve(corpus.nodes.name(c.link.citing)),
                  resolve(corpus.nodes.name(c.link.cited)), c.count);
    }
  }
  return std::move(builder).build();
}

SliceDescriptives describe(const YearSlice& slice) {
  return SliceDescriptives::from_counts(slice.nodes.size(), slice.cells.size(), slice.total());
}

void write_edge_list(std::ostream& out, const Corpus& corpus) {
  out << "year\tciting\tcited\tcount\n";
  for (const auto& s : corpus.slices) {
    for (const auto& c : s.cells) {
      out << s.year << '\t' << corpus.nodes.name(c.link.citing) << '\t'
          << corpus.nodes.name(c.link.cited) << '\t' << c.count << '\n';
    }
  }
}

}  // namespace critrans
