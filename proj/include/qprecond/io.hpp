#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qprecond/error.hpp"
#include "qprecond/problem.hpp"

namespace qprecond {

namespace detail {

inline std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return {buffer, result.ptr};
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    if (pos >= line.size()) break;
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') ++pos;
    fields.push_back(line.substr(start, pos - start));
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const auto* end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, out);
  return result.ec == std::errc() && result.ptr == end;
}

}  // namespace detail

// Edge-list text format:
//
//   qubo <N>
//   # kind <ProblemKind>
//   # meta <key> <value>
//   <i> <j> <weight>
//
// Indices are 0-based; weights are written as the shortest decimal that round-trips.
// '#' lines other than kind/meta are ignored on input.

inline void write_problem(const Problem& problem, std::ostream& out) {
  out << "qubo " << problem.n_vars() << '\n';
  out << "# kind " << to_string(problem.kind()) << '\n';
  for (const auto& [key, value] : problem.provenance()) out << "# meta " << key << ' ' << value << '\n';
  for (const auto& e : problem.edges()) out << e.i << ' ' << e.j << ' ' << detail::format_double(e.w) << '\n';
}

inline void write_problem(const Problem& problem, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  write_problem(problem, out);
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

inline Problem read_problem(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t n_vars = 0;
  bool have_header = false;
  ProblemKind kind = ProblemKind::Custom;
  Problem::Provenance provenance;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_fields(line);
    if (fields.empty()) continue;
    if (fields[0].starts_with('#')) {
      if (fields[0] == "#" && fields.size() >= 3 && fields[1] == "kind") {
        try {
          kind = problem_kind_from_string(fields[2]);
        } catch (const InvalidParameter& e) {
          throw FormatError(e.what(), line_no);
        }
      } else if (fields[0] == "#" && fields.size() >= 3 && fields[1] == "meta") {
        const auto value_start = line.find(fields[2]) + fields[2].size();
        std::string value = value_start < line.size() ? line.substr(value_start) : std::string();
        const auto first = value.find_first_not_of(" \t");
        value = first == std::string::npos ? std::string() : value.substr(first);
        while (!value.empty() && (value.back() == '\r' || value.back() == ' ')) value.pop_back();
        provenance[std::string(fields[2])] = value;
      }
      continue;
    }
    if (!have_header) {
      if (fields.size() != 2 || fields[0] != "qubo" || !detail::parse_number(fields[1], n_vars) || n_vars == 0) {
        throw FormatError("expected header 'qubo <N>' with N >= 1", line_no);
      }
      have_header = true;
      continue;
    }
    std::size_t i = 0;
    std::size_t j = 0;
    double w = 0.0;
    if (fields.size() != 3 || !detail::parse_number(fields[0], i) || !detail::parse_number(fields[1], j) ||
        !detail::parse_number(fields[2], w)) {
      throw FormatError("expected '<i> <j> <weight>'", line_no);
    }
    if (i >= n_vars || j >= n_vars) throw FormatError("index outside [0, " + std::to_string(n_vars) + ")", line_no);
    if (i == j) throw FormatError("self-loop on variable " + std::to_string(i), line_no);
    if (!std::isfinite(w)) throw FormatError("non-finite weight", line_no);
    edges.push_back({i, j, w});
  }
  if (!have_header) throw FormatError("missing 'qubo <N>' header");
  return Problem(n_vars, std::move(edges), kind, std::move(provenance));
}

inline Problem read_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return read_problem(in);
}

/// Spin vectors on disk: whitespace-separated -1/+1 values.
inline void write_spins(const SpinVector& z, std::ostream& out) {
  for (std::size_t k = 0; k < z.size(); ++k) out << (k == 0 ? "" : " ") << z[k];
  out << '\n';
}

inline SpinVector read_spins(std::istream& in) {
  std::vector<int> values;
  std::string token;
  while (in >> token) {
    int v = 0;
    if (!detail::parse_number(std::string_view(token), v) || (v != 1 && v != -1)) {
      throw FormatError("spin file holds '" + token + "', expected -1 or +1");
    }
    values.push_back(v);
  }
  return SpinVector(values);
}

inline SpinVector read_spins(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return read_spins(in);
}

}  // namespace qprecond
