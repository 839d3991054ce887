#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qprecond/error.hpp"
#include "qprecond/problem.hpp"

namespace qprecond {

/// One dangling-branch removal: `leaf` hung off `anchor` through a coupling of weight `w`.
struct PruneEntry {
  std::size_t leaf = 0;
  std::size_t anchor = 0;
  double w = 0.0;
};

/// Connected component of the pruned core, reindexed to 0..size-1.
struct Component {
  std::vector<std::size_t> core_vertices;  // local index -> core index
  Problem problem;
};

/// Record of dangling-branch removal and the component split of what survives.
///
/// `removed` is in removal order; every anchor is still present when its leaf is removed,
/// so replaying in reverse always reattaches to a vertex that is already assigned.
/// `isolated` holds vertices left without neighbors (their spin is free and set to +1).
struct PruneMap {
  std::size_t n_original = 0;
  std::vector<PruneEntry> removed;
  std::vector<std::size_t> isolated;
  std::vector<std::size_t> core_to_original;
  std::vector<Component> components;
};

struct PruneResult {
  std::optional<Problem> core;  // empty when the whole problem collapses
  PruneMap map;
};

namespace detail {

inline Problem induced_problem(const Problem& problem, const std::vector<std::size_t>& keep,
                               const std::vector<std::size_t>& position, ProblemKind kind,
                               Problem::Provenance provenance) {
  std::vector<Edge> edges;
  for (std::size_t local = 0; local < keep.size(); ++local) {
    for (const auto& nb : problem.neighbors(keep[local])) {
      const auto other = position[nb.index];
      if (other != static_cast<std::size_t>(-1) && local < other) edges.push_back({local, other, nb.weight});
    }
  }
  return Problem(keep.size(), std::move(edges), kind, std::move(provenance));
}

}  // namespace detail

/// Iteratively strips degree-1 vertices. The surviving core has minimum degree >= 2.
inline PruneResult prune_dangling(const Problem& problem) {
  const std::size_t n = problem.n_vars();
  PruneResult result;
  auto& map = result.map;
  map.n_original = n;

  std::vector<std::size_t> degree(n);
  std::vector<bool> alive(n, true);
  std::deque<std::size_t> queue;
  for (std::size_t v = 0; v < n; ++v) {
    degree[v] = problem.degree(v);
    if (degree[v] == 1) queue.push_back(v);
  }
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    if (!alive[v] || degree[v] != 1) continue;
    for (const auto& nb : problem.neighbors(v)) {
      if (!alive[nb.index]) continue;
      map.removed.push_back({v, nb.index, nb.weight});
      alive[v] = false;
      if (--degree[nb.index] == 1) queue.push_back(nb.index);
      break;
    }
  }
  std::vector<std::size_t> position(n, static_cast<std::size_t>(-1));
  for (std::size_t v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    if (degree[v] == 0) {
      alive[v] = false;
      map.isolated.push_back(v);
      continue;
    }
    position[v] = map.core_to_original.size();
    map.core_to_original.push_back(v);
  }
  if (map.core_to_original.empty()) return result;

  auto provenance = problem.provenance();
  provenance["pruned_leaves"] = std::to_string(map.removed.size());
  result.core = detail::induced_problem(problem, map.core_to_original, position, problem.kind(), provenance);
  const Problem& core = *result.core;

  std::vector<std::size_t> label(core.n_vars(), static_cast<std::size_t>(-1));
  for (std::size_t start = 0; start < core.n_vars(); ++start) {
    if (label[start] != static_cast<std::size_t>(-1)) continue;
    const auto id = map.components.size();
    std::vector<std::size_t> members{start};
    label[start] = id;
    for (std::size_t head = 0; head < members.size(); ++head) {
      for (const auto& nb : core.neighbors(members[head])) {
        if (label[nb.index] == static_cast<std::size_t>(-1)) {
          label[nb.index] = id;
          members.push_back(nb.index);
        }
      }
    }
    std::sort(members.begin(), members.end());
    std::vector<std::size_t> local(core.n_vars(), static_cast<std::size_t>(-1));
    for (std::size_t k = 0; k < members.size(); ++k) local[members[k]] = k;
    auto comp_provenance = core.provenance();
    comp_provenance["component"] = std::to_string(id);
    map.components.push_back(
        {members, detail::induced_problem(core, members, local, core.kind(), std::move(comp_provenance))});
  }
  return result;
}

/// Glues per-component solutions into one core-indexed spin vector.
inline SpinVector assemble_core(const std::vector<SpinVector>& component_z, const PruneMap& map) {
  if (component_z.size() != map.components.size()) {
    throw DimensionError("expected " + std::to_string(map.components.size()) + " component solutions, got " +
                         std::to_string(component_z.size()));
  }
  SpinVector core = SpinVector::all_up(map.core_to_original.size());
  for (std::size_t c = 0; c < component_z.size(); ++c) {
    const auto& comp = map.components[c];
    if (component_z[c].size() != comp.core_vertices.size()) {
      throw DimensionError("component " + std::to_string(c) + " solution has the wrong length");
    }
    for (std::size_t k = 0; k < comp.core_vertices.size(); ++k) core.set(comp.core_vertices[k], component_z[c][k]);
  }
  return core;
}

/// Lifts a core solution to the full problem. Each removed leaf takes the spin that
/// satisfies its single coupling: z_leaf = -sign(w) * z_anchor.
inline SpinVector reconstruct_solution(const SpinVector& core_z, const PruneMap& map, const Problem& problem) {
  if (map.n_original != problem.n_vars()) {
    throw IntegrityError("prune map was built for " + std::to_string(map.n_original) + " variables, problem has " +
                         std::to_string(problem.n_vars()));
  }
  if (core_z.size() != map.core_to_original.size()) {
    throw DimensionError("core solution has length " + std::to_string(core_z.size()) + ", core has " +
                         std::to_string(map.core_to_original.size()) + " variables");
  }
  std::vector<int> z(problem.n_vars(), 0);
  for (std::size_t k = 0; k < core_z.size(); ++k) {
    const auto v = map.core_to_original[k];
    if (v >= z.size() || z[v] != 0) throw IntegrityError("prune map core index list is inconsistent");
    z[v] = core_z[k];
  }
  for (const auto v : map.isolated) {
    if (v >= z.size() || z[v] != 0) throw IntegrityError("prune map isolated list is inconsistent");
    z[v] = 1;
  }
  for (auto it = map.removed.rbegin(); it != map.removed.rend(); ++it) {
    if (it->leaf >= z.size() || it->anchor >= z.size()) throw IntegrityError("prune entry index out of range");
    if (z[it->anchor] == 0) {
      throw IntegrityError("anchor " + std::to_string(it->anchor) + " unassigned when reattaching " +
                           std::to_string(it->leaf));
    }
    if (z[it->leaf] != 0) throw IntegrityError("vertex " + std::to_string(it->leaf) + " reattached twice");
    if (!problem.has_edge(it->leaf, it->anchor) || problem.weight(it->leaf, it->anchor) != it->w) {
      throw IntegrityError("prune entry (" + std::to_string(it->leaf) + ", " + std::to_string(it->anchor) +
                           ") does not match the problem");
    }
    z[it->leaf] = it->w > 0.0 ? -z[it->anchor] : z[it->anchor];
  }
  for (std::size_t v = 0; v < z.size(); ++v) {
    if (z[v] == 0) throw IntegrityError("vertex " + std::to_string(v) + " is not covered by the prune map");
  }
  return SpinVector(z);
}

/// Objective contributed by the removed couplings once reattached: sum of -|w|.
inline double pruned_objective_offset(const PruneMap& map) {
  double total = 0.0;
  for (const auto& e : map.removed) total -= std::abs(e.w);
  return total;
}

}  // namespace qprecond
