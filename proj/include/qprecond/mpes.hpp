#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qprecond/error.hpp"
#include "qprecond/io.hpp"
#include "qprecond/problem.hpp"
#include "qprecond/prune.hpp"

namespace qprecond {

/// Grid max-cut instance as loaded from a branch table.
struct MpesInstance {
  Problem raw;                  // every bus touched by a line, weights 1/|R + iX|
  std::vector<long long> bus_ids;  // raw index -> bus id from the file
  std::size_t parallel_lines = 0;  // lines merged into an existing bus pair
  PruneResult pruned;
};

/// Coupling weight of a line: (R^2 + X^2)^(-1/2).
inline double line_weight(double r, double x) {
  const double magnitude = std::hypot(r, x);
  if (!(magnitude > 0.0) || !std::isfinite(magnitude)) throw InvalidParameter("line impedance must be non-zero");
  return 1.0 / magnitude;
}

namespace detail {

inline std::vector<std::string_view> split_delimited(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  auto is_sep = [](char c) { return c == ',' || c == ';' || c == ' ' || c == '\t' || c == '\r'; };
  while (pos < line.size()) {
    while (pos < line.size() && is_sep(line[pos])) ++pos;
    if (pos >= line.size()) break;
    const auto start = pos;
    while (pos < line.size() && !is_sep(line[pos])) ++pos;
    fields.push_back(line.substr(start, pos - start));
  }
  return fields;
}

inline bool is_number(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  return r.ec == std::errc() && r.ptr == end;
}

}  // namespace detail

/// Reads a branch table: one line per transmission line with columns
/// bus_from, bus_to, R, X (further columns ignored, MATPOWER branch order).
///
/// Separators may be commas, semicolons, tabs or spaces. Lines starting with '#' or '%'
/// are comments; a single leading header row of non-numeric labels is skipped. Bus ids
/// are sorted and renumbered 0..N-1; parallel lines are merged by summing their weights.
inline MpesInstance load_mpes(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  std::size_t line_no = 0;
  bool seen_data = false;
  struct Line {
    long long from;
    long long to;
    double w;
  };
  std::vector<Line> lines;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_delimited(line);
    if (fields.empty() || fields[0].starts_with('#') || fields[0].starts_with('%')) continue;
    if (!seen_data && std::none_of(fields.begin(), fields.end(), detail::is_number)) {
      seen_data = true;
      continue;
    }
    seen_data = true;
    if (fields.size() < 4) throw FormatError("branch record needs bus_from, bus_to, R, X", line_no);
    long long from = 0;
    long long to = 0;
    double r = 0.0;
    double x = 0.0;
    if (!detail::parse_number(fields[0], from) || !detail::parse_number(fields[1], to) || !detail::parse_number(fields[2], r) ||
        !detail::parse_number(fields[3], x)) {
      throw FormatError("non-numeric field in branch record", line_no);
    }
    if (from == to) throw FormatError("line connects bus " + std::to_string(from) + " to itself", line_no);
    if (!std::isfinite(r) || !std::isfinite(x)) throw FormatError("non-finite impedance", line_no);
    if (r == 0.0 && x == 0.0) throw FormatError("line with R = X = 0", line_no);
    lines.push_back({from, to, line_weight(r, x)});
  }
  if (lines.empty()) throw FormatError("no branch records in '" + source + "'");

  std::vector<long long> ids;
  for (const auto& l : lines) {
    ids.push_back(l.from);
    ids.push_back(l.to);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto index_of = [&](long long id) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::map<std::pair<std::size_t, std::size_t>, double> merged;
  std::size_t parallel = 0;
  for (const auto& l : lines) {
    auto a = index_of(l.from);
    auto b = index_of(l.to);
    if (a > b) std::swap(a, b);
    auto [it, inserted] = merged.try_emplace({a, b}, 0.0);
    if (!inserted) ++parallel;
    it->second += l.w;
  }
  std::vector<Edge> edges;
  edges.reserve(merged.size());
  for (const auto& [key, w] : merged) edges.push_back({key.first, key.second, w});
  Problem raw(ids.size(), std::move(edges), ProblemKind::MPES,
              {{"source", source}, {"parallel_lines_merged", std::to_string(parallel)}});
  auto pruned = prune_dangling(raw);
  return {std::move(raw), std::move(ids), parallel, std::move(pruned)};
}

inline MpesInstance load_mpes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return load_mpes(in, path.string());
}

}  // namespace qprecond
