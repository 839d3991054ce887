#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qprecond/error.hpp"

namespace qprecond {

/// Entries with magnitude below this value are treated as absent when counting terms
/// and when assembling correlation matrices.
inline constexpr double kSparsityThreshold = 1e-12;

enum class ProblemKind { MaxCutRegular, SK, MPES, Preconditioned, IdealInfiniteDepth, Custom };

inline std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::MaxCutRegular: return "MaxCutRegular";
    case ProblemKind::SK: return "SK";
    case ProblemKind::MPES: return "MPES";
    case ProblemKind::Preconditioned: return "Preconditioned";
    case ProblemKind::IdealInfiniteDepth: return "IdealInfiniteDepth";
    case ProblemKind::Custom: return "Custom";
  }
  return "Custom";
}

inline ProblemKind problem_kind_from_string(std::string_view name) {
  for (auto kind : {ProblemKind::MaxCutRegular, ProblemKind::SK, ProblemKind::MPES, ProblemKind::Preconditioned,
                    ProblemKind::IdealInfiniteDepth, ProblemKind::Custom}) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidParameter("unknown problem kind '" + std::string(name) + "'");
}

/// Max-cut style problems report quality as a cut value; everything else as the Ising objective.
inline bool is_maxcut_kind(ProblemKind kind) {
  return kind == ProblemKind::MaxCutRegular || kind == ProblemKind::MPES;
}

/// One stored coupling. Always normalized so that i < j.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double w = 0.0;

  bool operator==(const Edge&) const = default;
};

struct Neighbor {
  std::size_t index = 0;
  double weight = 0.0;
};

/// A length-N assignment over {-1, +1}.
class SpinVector {
 public:
  SpinVector() = default;

  explicit SpinVector(const std::vector<int>& values) {
    values_.reserve(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (values[k] != 1 && values[k] != -1) {
        throw InvalidParameter("spin " + std::to_string(k) + " is " + std::to_string(values[k]) +
                               ", expected -1 or +1");
      }
      values_.push_back(static_cast<std::int8_t>(values[k]));
    }
  }

  static SpinVector all_up(std::size_t n) {
    SpinVector z;
    z.values_.assign(n, 1);
    return z;
  }

  /// Bit k of `bits` set means spin k is -1 (z = 1 - 2 b).
  static SpinVector from_bits(std::uint64_t bits, std::size_t n) {
    SpinVector z;
    z.values_.resize(n);
    for (std::size_t k = 0; k < n; ++k) z.values_[k] = ((bits >> k) & 1U) != 0 ? -1 : 1;
    return z;
  }

  std::size_t size() const noexcept { return values_.size(); }
  int operator[](std::size_t k) const { return values_[k]; }
  void flip(std::size_t k) { values_[k] = static_cast<std::int8_t>(-values_[k]); }
  void set(std::size_t k, int value) {
    if (value != 1 && value != -1) throw InvalidParameter("spin value must be -1 or +1");
    values_[k] = static_cast<std::int8_t>(value);
  }
  std::span<const std::int8_t> values() const noexcept { return values_; }

  SpinVector operator-() const {
    SpinVector out = *this;
    for (auto& v : out.values_) v = static_cast<std::int8_t>(-v);
    return out;
  }

  bool operator==(const SpinVector&) const = default;

 private:
  std::vector<std::int8_t> values_;
};

/// Sparse symmetric coupling matrix over N spins plus descriptive metadata.
///
/// Each unordered pair is stored once (i < j); the diagonal is never stored. Adjacency is
/// materialized in CSR form at construction so that neighbor scans are contiguous.
/// Instances are immutable.
class Problem {
 public:
  using Provenance = std::map<std::string, std::string>;

  Problem(std::size_t n_vars, std::vector<Edge> edges, ProblemKind kind = ProblemKind::Custom,
          Provenance provenance = {})
      : n_vars_(n_vars), edges_(std::move(edges)), kind_(kind), provenance_(std::move(provenance)) {
    if (n_vars_ == 0) throw InvalidParameter("a problem needs at least one variable");
    for (auto& e : edges_) {
      if (e.i >= n_vars_ || e.j >= n_vars_) {
        throw IndexError("edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) + ") outside [0, " +
                         std::to_string(n_vars_) + ")");
      }
      if (e.i == e.j) throw IntegrityError("self-loop on variable " + std::to_string(e.i));
      if (!std::isfinite(e.w)) throw IntegrityError("non-finite weight on pair (" + std::to_string(e.i) + ", " +
                                                    std::to_string(e.j) + ")");
      if (e.i > e.j) std::swap(e.i, e.j);
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    std::vector<Edge> unique;
    unique.reserve(edges_.size());
    for (const auto& e : edges_) {
      if (!unique.empty() && unique.back().i == e.i && unique.back().j == e.j) {
        if (unique.back().w != e.w) {
          throw IntegrityError("pair (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                               ") listed twice with different weights");
        }
        continue;
      }
      unique.push_back(e);
    }
    edges_ = std::move(unique);
    build_adjacency();
  }

  std::size_t n_vars() const noexcept { return n_vars_; }
  std::size_t n_terms() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  ProblemKind kind() const noexcept { return kind_; }
  const Provenance& provenance() const noexcept { return provenance_; }

  std::span<const Neighbor> neighbors(std::size_t v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }
  std::size_t max_degree() const {
    std::size_t d = 0;
    for (std::size_t v = 0; v < n_vars_; ++v) d = std::max(d, degree(v));
    return d;
  }

  /// W_ij, or 0 when the pair is not stored.
  double weight(std::size_t i, std::size_t j) const {
    check_index(i);
    check_index(j);
    const auto row = neighbors(i);
    const auto it = std::lower_bound(row.begin(), row.end(), j,
                                     [](const Neighbor& n, std::size_t target) { return n.index < target; });
    return it != row.end() && it->index == j ? it->weight : 0.0;
  }
  bool has_edge(std::size_t i, std::size_t j) const {
    check_index(i);
    check_index(j);
    const auto row = neighbors(i);
    const auto it = std::lower_bound(row.begin(), row.end(), j,
                                     [](const Neighbor& n, std::size_t target) { return n.index < target; });
    return it != row.end() && it->index == j;
  }

  void check_index(std::size_t v) const {
    if (v >= n_vars_) {
      throw IndexError("index " + std::to_string(v) + " outside [0, " + std::to_string(n_vars_) + ")");
    }
  }

  /// Copy with new kind/provenance, same couplings.
  Problem relabeled(ProblemKind kind, Provenance provenance) const {
    Problem out = *this;
    out.kind_ = kind;
    out.provenance_ = std::move(provenance);
    return out;
  }

  /// Provenance value or `fallback`.
  std::string meta(const std::string& key, const std::string& fallback = {}) const {
    const auto it = provenance_.find(key);
    return it == provenance_.end() ? fallback : it->second;
  }

 private:
  void build_adjacency() {
    offsets_.assign(n_vars_ + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[e.i + 1];
      ++offsets_[e.j + 1];
    }
    for (std::size_t v = 0; v < n_vars_; ++v) offsets_[v + 1] += offsets_[v];
    adjacency_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
      adjacency_[fill[e.i]++] = {e.j, e.w};
      adjacency_[fill[e.j]++] = {e.i, e.w};
    }
    // Edges are sorted by (i, j), so row v receives lower neighbors (as j) in increasing i
    // order before higher neighbors (as i) in increasing j order: rows come out sorted.
  }

  std::size_t n_vars_;
  std::vector<Edge> edges_;
  ProblemKind kind_;
  Provenance provenance_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
};

inline void check_dimensions(const Problem& problem, const SpinVector& z) {
  if (z.size() != problem.n_vars()) {
    throw DimensionError("spin vector has length " + std::to_string(z.size()) + ", problem has " +
                         std::to_string(problem.n_vars()) + " variables");
  }
}

/// C(z) = sum over stored pairs of W_ij z_i z_j, i.e. (1/2) z^T W z.
inline double evaluate_objective(const Problem& problem, const SpinVector& z) {
  check_dimensions(problem, z);
  double total = 0.0;
  for (const auto& e : problem.edges()) total += e.w * z[e.i] * z[e.j];
  return total;
}

/// Ordered-pair double sum z^T W z = 2 C(z).
inline double ordered_pair_sum(const Problem& problem, const SpinVector& z) {
  return 2.0 * evaluate_objective(problem, z);
}

/// Sum of weights over stored pairs.
inline double total_weight(const Problem& problem) {
  double total = 0.0;
  for (const auto& e : problem.edges()) total += e.w;
  return total;
}

/// Cut value (1/4) sum_{i,j} W_ij (1 - z_i z_j) over ordered pairs.
inline double evaluate_cut(const Problem& problem, const SpinVector& z) {
  check_dimensions(problem, z);
  double total = 0.0;
  for (const auto& e : problem.edges()) {
    if (z[e.i] != z[e.j]) total += e.w;
  }
  return total;
}

/// Objective change from flipping spin k.
inline double flip_delta(const Problem& problem, const SpinVector& z, std::size_t k) {
  double field = 0.0;
  for (const auto& n : problem.neighbors(k)) field += n.weight * z[n.index];
  return -2.0 * z[k] * field;
}

}  // namespace qprecond
