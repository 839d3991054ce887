#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qprecond/error.hpp"
#include "qprecond/parallel.hpp"
#include "qprecond/problem.hpp"
#include "qprecond/random.hpp"
#include "qprecond/statevector.hpp"

namespace qprecond {

/// Causal subgraph of a target pair: the union of the radius-p balls around i and j, with
/// every edge that has an endpoint within distance p-1 of i or j. Edges joining two vertices
/// at distance exactly p commute with the evolved Z_i Z_j and are left out.
struct LightconeSubgraph {
  std::vector<std::size_t> vertices;  // original indices, ascending
  std::vector<Edge> edges;            // local indices
  std::size_t i_local = 0;
  std::size_t j_local = 0;
  /// Isomorphism invariant of the marked weighted graph. Equal keys are necessary for
  /// isomorphism; the cache confirms candidates with an explicit isomorphism search.
  std::uint64_t canonical_key = 0;

  std::size_t size() const noexcept { return vertices.size(); }
  Problem to_problem() const { return Problem(vertices.size(), edges); }
};

/// Largest light-cone subgraph for max degree d: 1 + 2d((d-1)^p - 1)/(d-2), or 1 + 4p when
/// d = 2, capped at n.
inline std::size_t lightcone_size_bound(std::size_t d, std::size_t p, std::size_t n) {
  if (d == 0) return std::min<std::size_t>(2, n);
  long double bound = 0.0L;
  if (d == 1) {
    bound = 2.0L;
  } else if (d == 2) {
    bound = 1.0L + 4.0L * static_cast<long double>(p);
  } else {
    const long double growth = std::pow(static_cast<long double>(d - 1), static_cast<long double>(p));
    bound = 1.0L + 2.0L * d * (growth - 1.0L) / static_cast<long double>(d - 2);
  }
  if (bound >= static_cast<long double>(n)) return n;
  return static_cast<std::size_t>(std::llround(bound));
}

/// Connected with exactly |V| - 1 edges.
inline bool is_tree(std::size_t n_vertices, const std::vector<Edge>& edges) {
  if (n_vertices == 0 || edges.size() + 1 != n_vertices) return false;
  std::vector<std::size_t> parent(n_vertices);
  for (std::size_t v = 0; v < n_vertices; ++v) parent[v] = v;
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& e : edges) {
    const auto a = find(e.i);
    const auto b = find(e.j);
    if (a == b) return false;
    parent[a] = b;
  }
  return true;
}

inline bool is_tree(const LightconeSubgraph& sub) { return is_tree(sub.size(), sub.edges); }

namespace detail {

inline constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

inline std::uint64_t weight_bits(double w) { return std::bit_cast<std::uint64_t>(w + 0.0); }

inline std::uint64_t mix(std::uint64_t h, std::uint64_t x) { return splitmix64(h ^ splitmix64(x)); }

/// Marked graph in compact form for refinement and isomorphism search.
struct LocalGraph {
  std::size_t n = 0;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> adj;
  std::vector<std::uint8_t> present;  // n x n
  std::vector<std::uint64_t> bits;    // n x n
  std::uint32_t a = 0;
  std::uint32_t b = 0;

  explicit LocalGraph(const LightconeSubgraph& sub)
      : n(sub.size()), adj(n), present(n * n, 0), bits(n * n, 0),
        a(static_cast<std::uint32_t>(sub.i_local)), b(static_cast<std::uint32_t>(sub.j_local)) {
    for (const auto& e : sub.edges) {
      const auto wb = weight_bits(e.w);
      adj[e.i].emplace_back(static_cast<std::uint32_t>(e.j), wb);
      adj[e.j].emplace_back(static_cast<std::uint32_t>(e.i), wb);
      present[e.i * n + e.j] = present[e.j * n + e.i] = 1;
      bits[e.i * n + e.j] = bits[e.j * n + e.i] = wb;
    }
  }
};

/// Color refinement with the marked pair as its own initial class. Colors are ranks of
/// sorted signatures, so they are comparable across isomorphic graphs.
inline std::uint64_t refine_colors(const LocalGraph& g, std::vector<std::uint32_t>& color) {
  color.assign(g.n, 0);
  color[g.a] = color[g.b] = 1;
  std::size_t n_colors = g.n > 2 ? 2 : 1;
  std::uint64_t h = mix(mix(0x51ed270b27a1f3c9ULL, g.n), n_colors);
  std::vector<std::vector<std::uint64_t>> sig(g.n);
  std::vector<std::uint32_t> order(g.n);
  for (;;) {
    for (std::size_t v = 0; v < g.n; ++v) {
      auto& s = sig[v];
      s.clear();
      std::vector<std::pair<std::uint64_t, std::uint32_t>> nbrs;
      nbrs.reserve(g.adj[v].size());
      for (const auto& [u, wb] : g.adj[v]) nbrs.emplace_back(wb, color[u]);
      std::sort(nbrs.begin(), nbrs.end());
      s.push_back(color[v]);
      for (const auto& [wb, c] : nbrs) {
        s.push_back(wb);
        s.push_back(c);
      }
    }
    for (std::size_t v = 0; v < g.n; ++v) order[v] = static_cast<std::uint32_t>(v);
    std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) { return sig[x] < sig[y]; });
    std::vector<std::uint32_t> next(g.n);
    std::uint32_t rank = 0;
    std::uint64_t multiplicity = 0;
    for (std::size_t k = 0; k < g.n; ++k) {
      if (k > 0 && sig[order[k]] != sig[order[k - 1]]) {
        h = mix(h, multiplicity);
        multiplicity = 0;
        ++rank;
      }
      if (k == 0 || sig[order[k]] != sig[order[k - 1]]) {
        for (const auto x : sig[order[k]]) h = mix(h, x);
      }
      ++multiplicity;
      next[order[k]] = rank;
    }
    h = mix(h, multiplicity);
    const std::size_t new_count = g.n == 0 ? 0 : rank + 1;
    color = std::move(next);
    h = mix(h, new_count);
    if (new_count == n_colors) break;
    n_colors = new_count;
  }
  return h;
}

/// Backtracking search for a color- and weight-preserving bijection cand -> rep that maps the
/// marked pair onto the marked pair. Gives up (returns nullopt) after `budget` extension steps.
inline std::optional<std::vector<std::uint32_t>> find_isomorphism(const LocalGraph& rep,
                                                                  const std::vector<std::uint32_t>& rep_color,
                                                                  const LocalGraph& cand,
                                                                  const std::vector<std::uint32_t>& cand_color,
                                                                  std::size_t budget = 200000) {
  const std::size_t n = cand.n;
  if (rep.n != n) return std::nullopt;
  {
    auto x = rep_color;
    auto y = cand_color;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    if (x != y) return std::nullopt;
  }
  // Visit order: BFS from the marked vertices; record a previously visited neighbor.
  std::vector<std::uint32_t> order;
  std::vector<std::size_t> parent(n, kNone);
  std::vector<std::uint8_t> seen(n, 0);
  order.reserve(n);
  for (const auto root : {cand.a, cand.b}) {
    if (seen[root]) continue;
    seen[root] = 1;
    order.push_back(root);
    for (std::size_t head = order.size() - 1; head < order.size(); ++head) {
      for (const auto& [u, wb] : cand.adj[order[head]]) {
        if (!seen[u]) {
          seen[u] = 1;
          parent[u] = order[head];
          order.push_back(u);
        }
      }
    }
  }
  for (std::uint32_t v = 0; v < n; ++v) {
    if (!seen[v]) {
      seen[v] = 1;
      order.push_back(v);
    }
  }
  std::vector<std::uint32_t> map(n, 0);
  std::vector<std::size_t> inverse(n, kNone);
  std::vector<std::uint8_t> mapped(n, 0);
  std::size_t steps = 0;
  bool exhausted = false;

  auto consistent = [&](std::uint32_t v, std::uint32_t r) {
    if (inverse[r] != kNone || cand_color[v] != rep_color[r]) return false;
    std::size_t count = 0;
    for (const auto& [u, wb] : cand.adj[v]) {
      if (!mapped[u]) continue;
      ++count;
      const auto ru = map[u];
      if (!rep.present[r * n + ru] || rep.bits[r * n + ru] != wb) return false;
    }
    std::size_t rep_count = 0;
    for (const auto& [x, wb] : rep.adj[r]) {
      if (inverse[x] != kNone) ++rep_count;
    }
    return count == rep_count;
  };

  auto extend = [&](auto&& self, std::size_t depth) -> bool {
    if (depth == n) return true;
    if (++steps > budget) {
      exhausted = true;
      return false;
    }
    const auto v = order[depth];
    auto attempt = [&](std::uint32_t r) {
      if (!consistent(v, r)) return false;
      map[v] = r;
      mapped[v] = 1;
      inverse[r] = v;
      if (self(self, depth + 1)) return true;
      mapped[v] = 0;
      inverse[r] = kNone;
      return false;
    };
    if (parent[v] != kNone) {
      for (const auto& [r, wb] : rep.adj[map[parent[v]]]) {
        if (attempt(r)) return true;
        if (exhausted) return false;
      }
    } else if (v == cand.a || v == cand.b) {
      for (const auto r : {rep.a, rep.b}) {
        if (attempt(r)) return true;
        if (exhausted) return false;
      }
    } else {
      for (std::uint32_t r = 0; r < n; ++r) {
        if (attempt(r)) return true;
        if (exhausted) return false;
      }
    }
    return false;
  };
  if (!extend(extend, 0)) return std::nullopt;
  // Marked pair must land on the marked pair.
  const auto ma = map[cand.a];
  const auto mb = map[cand.b];
  if (!((ma == rep.a && mb == rep.b) || (ma == rep.b && mb == rep.a))) return std::nullopt;
  return map;
}

/// Radius-r balls around every vertex (ascending index lists) and pair enumeration.
class BallIndex {
 public:
  BallIndex(const Problem& problem, std::size_t radius)
      : problem_(problem), dist_(problem.n_vars(), kNone), balls_(problem.n_vars()) {
    for (std::size_t v = 0; v < problem.n_vars(); ++v) {
      balls_[v] = within(v, radius);
      std::sort(balls_[v].begin(), balls_[v].end());
    }
  }

  const std::vector<std::size_t>& ball(std::size_t v) const { return balls_[v]; }

  /// Vertices at graph distance <= radius from v, in BFS order.
  std::vector<std::size_t> within(std::size_t v, std::size_t radius) {
    std::vector<std::size_t> out{v};
    dist_[v] = 0;
    for (std::size_t head = 0; head < out.size(); ++head) {
      const auto x = out[head];
      if (dist_[x] == radius) continue;
      for (const auto& nb : problem_.neighbors(x)) {
        if (dist_[nb.index] == kNone) {
          dist_[nb.index] = dist_[x] + 1;
          out.push_back(nb.index);
        }
      }
    }
    for (const auto x : out) dist_[x] = kNone;
    return out;
  }

 private:
  const Problem& problem_;
  std::vector<std::size_t> dist_;
  std::vector<std::vector<std::size_t>> balls_;
};

/// Builds light-cone subgraphs on ball unions with reusable scratch space.
class SubgraphBuilder {
 public:
  explicit SubgraphBuilder(const Problem& problem)
      : problem_(problem), position_(problem.n_vars(), kNone), depth_(problem.n_vars(), kNone) {}

  LightconeSubgraph build(const std::vector<std::size_t>& ball_i, const std::vector<std::size_t>& ball_j,
                          std::size_t i, std::size_t j, std::size_t p) {
    LightconeSubgraph sub;
    sub.vertices.reserve(ball_i.size() + ball_j.size());
    std::set_union(ball_i.begin(), ball_i.end(), ball_j.begin(), ball_j.end(), std::back_inserter(sub.vertices));
    for (std::size_t k = 0; k < sub.vertices.size(); ++k) position_[sub.vertices[k]] = k;
    // distance to {i, j}; shortest paths of length <= p stay inside the union
    std::vector<std::size_t> queue{i, j};
    depth_[i] = depth_[j] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto x = queue[head];
      if (depth_[x] + 1 > p) continue;
      for (const auto& nb : problem_.neighbors(x)) {
        if (depth_[nb.index] == kNone && position_[nb.index] != kNone) {
          depth_[nb.index] = depth_[x] + 1;
          queue.push_back(nb.index);
        }
      }
    }
    for (std::size_t k = 0; k < sub.vertices.size(); ++k) {
      const auto v = sub.vertices[k];
      for (const auto& nb : problem_.neighbors(v)) {
        const auto other = position_[nb.index];
        if (other == kNone || k >= other) continue;
        if (depth_[v] >= p && depth_[nb.index] >= p) continue;
        sub.edges.push_back({k, other, nb.weight});
      }
    }
    sub.i_local = position_[i];
    sub.j_local = position_[j];
    for (const auto v : sub.vertices) position_[v] = kNone;
    for (const auto v : queue) depth_[v] = kNone;
    return sub;
  }

 private:
  const Problem& problem_;
  std::vector<std::size_t> position_;
  std::vector<std::size_t> depth_;
};

}  // namespace detail

/// Light-cone subgraph of (i, j) at depth p, or nullopt when the p-balls do not meet
/// (graph distance > 2p), in which case <Z_i Z_j> = 0.
inline std::optional<LightconeSubgraph> lightcone_subgraph(const Problem& problem, std::size_t i, std::size_t j,
                                                           std::size_t p) {
  problem.check_index(i);
  problem.check_index(j);
  if (i == j) throw InvalidParameter("light-cone subgraph needs two distinct vertices");
  if (p == 0) throw InvalidParameter("light-cone depth p must be at least 1");
  detail::BallIndex scratch(problem, 0);
  const auto reach = scratch.within(i, 2 * p);
  if (std::find(reach.begin(), reach.end(), j) == reach.end()) return std::nullopt;
  auto ball_i = scratch.within(i, p);
  auto ball_j = scratch.within(j, p);
  std::sort(ball_i.begin(), ball_i.end());
  std::sort(ball_j.begin(), ball_j.end());
  detail::SubgraphBuilder builder(problem);
  auto sub = builder.build(ball_i, ball_j, i, j, p);
  std::vector<std::uint32_t> color;
  sub.canonical_key = detail::refine_colors(detail::LocalGraph(sub), color);
  return sub;
}

/// Exact <Z_i Z_j> of the QAOA state on one light-cone subgraph.
inline double emulate_lightcone(const LightconeSubgraph& sub, const AngleSchedule& angles,
                                std::size_t cap = kDefaultQubitCap) {
  const auto state = QaoaSimulator(sub.to_problem(), cap).run(angles);
  return correlation(state, sub.i_local, sub.j_local);
}

/// Marked light-cone subgraphs grouped into isomorphism classes, with one correlation value
/// per class. With trees_only, subgraphs containing a cycle always open a class of their own.
class CorrelationCache {
 public:
  explicit CorrelationCache(bool trees_only = false) : trees_only_(trees_only) {}

  struct Resolution {
    std::size_t cls = 0;
    std::vector<std::uint32_t> map;  // subgraph-local -> representative-local
    bool created = false;
  };

  struct Entry {
    LightconeSubgraph representative;
    std::vector<std::uint32_t> colors;
    bool tree = false;
    std::optional<double> value;
  };

  /// Finds the class of `sub` (keyed by sub.canonical_key, which is recomputed) or opens one.
  Resolution resolve(LightconeSubgraph& sub) {
    const detail::LocalGraph local(sub);
    std::vector<std::uint32_t> colors;
    sub.canonical_key = detail::refine_colors(local, colors);
    const bool tree = is_tree(sub);
    Resolution res;
    res.cls = entries_.size();
    res.map.resize(sub.size());
    for (std::size_t k = 0; k < sub.size(); ++k) res.map[k] = static_cast<std::uint32_t>(k);
    res.created = true;
    if (trees_only_ && !tree) {
      entries_.push_back({sub, std::move(colors), false, std::nullopt});
      return res;
    }
    auto& bucket = buckets_[sub.canonical_key];
    for (const auto cls : bucket) {
      const auto& entry = entries_[cls];
      auto map = detail::find_isomorphism(detail::LocalGraph(entry.representative), entry.colors, local, colors);
      if (map) return {cls, std::move(*map), false};
    }
    bucket.push_back(res.cls);
    entries_.push_back({sub, std::move(colors), tree, std::nullopt});
    return res;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  const Entry& entry(std::size_t cls) const { return entries_.at(cls); }

  std::optional<double> lookup(std::size_t cls) {
    const auto& v = entries_.at(cls).value;
    if (v) {
      ++hits_;
    } else {
      ++misses_;
    }
    return v;
  }
  void store(std::size_t cls, double value) { entries_.at(cls).value = value; }

  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }

 private:
  bool trees_only_ = false;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
  std::vector<Entry> entries_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

/// Exact: full state vectors. Sampled: K bit strings per pair subcircuit, per-pair seeds.
struct CorrelationMode {
  enum class Kind { Exact, Sampled };
  Kind kind = Kind::Exact;
  std::size_t K = 0;
  std::uint64_t seed = 0;

  static CorrelationMode exact() { return {}; }
  static CorrelationMode sampled(std::size_t K, std::uint64_t seed) {
    if (K < 1) throw InvalidParameter("sampled correlations need K >= 1");
    return {Kind::Sampled, K, seed};
  }
};

struct LightconeOptions {
  std::size_t qubit_cap = kDefaultQubitCap;
  bool use_cache = true;
  bool cache_trees_only = false;  // reuse values only for tree-shaped light cones
  std::size_t jobs = 1;
};

struct LightconeStats {
  std::size_t pairs = 0;         // pairs whose light cones intersect
  std::size_t tree_pairs = 0;
  std::size_t classes = 0;       // distinct marked subgraphs up to isomorphism
  std::size_t tree_classes = 0;
  std::size_t emulations = 0;    // state-vector runs performed
  std::size_t cache_hits = 0;
  std::size_t max_vertices = 0;
  double mean_vertices = 0.0;    // averaged over pairs
  double mean_class_vertices = 0.0;
};

namespace detail {

struct PairClass {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t cls = 0;
  std::vector<std::uint32_t> map;
};

inline std::vector<std::pair<std::size_t, std::size_t>> pairs_within(const Problem& problem, std::size_t radius) {
  BallIndex scratch(problem, 0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < problem.n_vars(); ++i) {
    auto reach = scratch.within(i, radius);
    std::sort(reach.begin(), reach.end());
    for (const auto j : reach) {
      if (j > i) pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

/// Correlations for the listed pairs (all with intersecting light cones).
inline std::vector<double> lightcone_correlations(const Problem& problem,
                                                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                                  const AngleSchedule& angles, const CorrelationMode& mode,
                                                  const LightconeOptions& options, LightconeStats* stats) {
  angles.validate();
  const std::size_t p = angles.p();
  if (p == 0) throw InvalidParameter("light-cone correlations need p >= 1");
  if (mode.kind == CorrelationMode::Kind::Sampled && mode.K < 1) {
    throw InvalidParameter("sampled correlations need K >= 1");
  }
  BallIndex balls(problem, p);
  SubgraphBuilder builder(problem);
  CorrelationCache cache(options.cache_trees_only);
  std::vector<PairClass> assigned;
  assigned.reserve(pairs.size());
  LightconeStats local_stats;
  double vertex_sum = 0.0;
  for (const auto& [i, j] : pairs) {
    auto sub = builder.build(balls.ball(i), balls.ball(j), i, j, p);
    if (sub.size() > options.qubit_cap) {
      throw CapacityError("light cone of pair (" + std::to_string(i) + ", " + std::to_string(j) + ") has " +
                          std::to_string(sub.size()) + " qubits, cap is " + std::to_string(options.qubit_cap));
    }
    vertex_sum += static_cast<double>(sub.size());
    local_stats.max_vertices = std::max(local_stats.max_vertices, sub.size());
    auto res = cache.resolve(sub);
    if (cache.entry(res.cls).tree) ++local_stats.tree_pairs;
    assigned.push_back({i, j, res.cls, std::move(res.map)});
  }
  local_stats.pairs = pairs.size();
  local_stats.classes = cache.size();
  double class_vertex_sum = 0.0;
  for (std::size_t c = 0; c < cache.size(); ++c) {
    if (cache.entry(c).tree) ++local_stats.tree_classes;
    class_vertex_sum += static_cast<double>(cache.entry(c).representative.size());
  }
  local_stats.mean_vertices = pairs.empty() ? 0.0 : vertex_sum / static_cast<double>(pairs.size());
  local_stats.mean_class_vertices = cache.size() == 0 ? 0.0 : class_vertex_sum / static_cast<double>(cache.size());

  std::vector<double> out(pairs.size(), 0.0);
  if (mode.kind == CorrelationMode::Kind::Sampled) {
    // One state per class; every pair draws its own K samples with its own seed.
    std::vector<std::vector<std::size_t>> members(cache.size());
    for (std::size_t k = 0; k < assigned.size(); ++k) members[assigned[k].cls].push_back(k);
    parallel_for(cache.size(), options.jobs, [&](std::size_t cls) {
      const auto& rep = cache.entry(cls).representative;
      const auto state = QaoaSimulator(rep.to_problem(), options.qubit_cap).run(angles);
      for (const auto k : members[cls]) {
        const auto& pc = assigned[k];
        const auto draws = sample_indices(state, mode.K, derive_seed(mode.seed, {pc.i, pc.j}));
        const auto bit_a = std::uint64_t{1} << rep.i_local;
        const auto bit_b = std::uint64_t{1} << rep.j_local;
        double total = 0.0;
        for (const auto d : draws) total += (((d & bit_a) != 0) == ((d & bit_b) != 0)) ? 1.0 : -1.0;
        out[k] = total / static_cast<double>(mode.K);
      }
    });
    local_stats.emulations = cache.size();
  } else if (options.use_cache) {
    std::vector<double> values(cache.size(), 0.0);
    parallel_for(cache.size(), options.jobs, [&](std::size_t cls) {
      values[cls] = emulate_lightcone(cache.entry(cls).representative, angles, options.qubit_cap);
    });
    for (std::size_t cls = 0; cls < cache.size(); ++cls) cache.store(cls, values[cls]);
    for (std::size_t k = 0; k < assigned.size(); ++k) out[k] = *cache.lookup(assigned[k].cls);
    local_stats.emulations = cache.size();
    local_stats.cache_hits = cache.hits();
  } else {
    // Every pair is emulated on its own subgraph, relabeled into its class's vertex order so
    // that results match the cached path bit for bit.
    parallel_for(assigned.size(), options.jobs, [&](std::size_t k) {
      const auto& pc = assigned[k];
      LightconeSubgraph sub;
      {
        SubgraphBuilder local_builder(problem);
        sub = local_builder.build(balls.ball(pc.i), balls.ball(pc.j), pc.i, pc.j, p);
      }
      std::vector<Edge> edges;
      edges.reserve(sub.edges.size());
      for (const auto& e : sub.edges) edges.push_back({pc.map[e.i], pc.map[e.j], e.w});
      const Problem relabeled(sub.size(), std::move(edges));
      const auto state = QaoaSimulator(relabeled, options.qubit_cap).run(angles);
      out[k] = correlation(state, pc.map[sub.i_local], pc.map[sub.j_local]);
    });
    local_stats.emulations = assigned.size();
  }
  if (stats) *stats = local_stats;
  return out;
}

}  // namespace detail

/// Z^(p) via light-cone decomposition: Z_ij = -<Z_i Z_j> for every pair within graph
/// distance 2p, entries below the sparsity threshold dropped.
inline Problem build_correlation_matrix(const Problem& problem, std::size_t p, const AngleSchedule& angles,
                                        const CorrelationMode& mode = CorrelationMode::exact(),
                                        const LightconeOptions& options = {}, LightconeStats* stats = nullptr) {
  if (angles.p() != p) {
    throw InvalidParameter("angle schedule has p=" + std::to_string(angles.p()) + ", requested p=" +
                           std::to_string(p));
  }
  const auto pairs = detail::pairs_within(problem, 2 * p);
  const auto values = detail::lightcone_correlations(problem, pairs, angles, mode, options, stats);
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double z = -values[k];
    if (std::abs(z) >= kSparsityThreshold) edges.push_back({pairs[k].first, pairs[k].second, z});
  }
  return Problem(problem.n_vars(), std::move(edges), ProblemKind::Preconditioned);
}

/// <C> = sum over stored pairs of W_ij <Z_i Z_j>, each correlation from its light cone.
inline double lightcone_expectation(const Problem& problem, const AngleSchedule& angles,
                                    const LightconeOptions& options = {}) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(problem.n_terms());
  for (const auto& e : problem.edges()) pairs.emplace_back(e.i, e.j);
  const auto values =
      detail::lightcone_correlations(problem, pairs, angles, CorrelationMode::exact(), options, nullptr);
  double total = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) total += problem.edges()[k].w * values[k];
  return total;
}

}  // namespace qprecond
