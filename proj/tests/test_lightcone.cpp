#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

#include "qprecond/generators.hpp"
#include "qprecond/lightcone.hpp"
#include "qprecond/precond.hpp"
#include "qprecond/random.hpp"
#include "qprecond/statevector.hpp"

using namespace qprecond;

namespace {

std::vector<std::size_t> bfs_distances(const Problem& g, std::size_t source) {
  std::vector<std::size_t> dist(g.n_vars(), std::numeric_limits<std::size_t>::max());
  std::queue<std::size_t> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const auto v = q.front();
    q.pop();
    for (const auto& nb : g.neighbors(v)) {
      if (dist[nb.index] == std::numeric_limits<std::size_t>::max()) {
        dist[nb.index] = dist[v] + 1;
        q.push(nb.index);
      }
    }
  }
  return dist;
}

Problem ring(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t v = 0; v < n; ++v) edges.push_back({v, (v + 1) % n, 1.0});
  return Problem(n, edges);
}

Problem sparse_weighted(std::size_t n, std::size_t extra, std::uint64_t seed) {
  Rng rng(seed);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<Edge> edges;
  auto add = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    if (seen.insert({std::min(a, b), std::max(a, b)}).second) edges.push_back({a, b, rng.uniform(-1.5, 1.5)});
  };
  for (std::size_t v = 1; v < n; ++v) add(rng.below(v), v);
  for (std::size_t k = 0; k < extra; ++k) add(rng.below(n), rng.below(n));
  return Problem(n, edges);
}

Problem reweighted(const Problem& g, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  for (auto& e : edges) e.w = rng.uniform(-1.5, 1.5);
  return Problem(g.n_vars(), edges);
}

AngleSchedule angles_for(std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  AngleSchedule a;
  for (std::size_t k = 0; k < p; ++k) {
    a.gammas.push_back(rng.uniform(-1.5, 1.5));
    a.betas.push_back(rng.uniform(0.0, 1.5));
  }
  return a;
}

}  // namespace

TEST(SizeBound, ClosedFormValues) {
  EXPECT_EQ(lightcone_size_bound(3, 1, 10000), 7u);
  EXPECT_EQ(lightcone_size_bound(3, 2, 10000), 19u);
  EXPECT_EQ(lightcone_size_bound(3, 3, 10000), 43u);
  EXPECT_EQ(lightcone_size_bound(2, 3, 10000), 13u);
  EXPECT_EQ(lightcone_size_bound(4, 1, 10000), 9u);
  EXPECT_EQ(lightcone_size_bound(3, 3, 20), 20u);
}

TEST(Subgraph, BoundHoldsAndIsAttained) {
  for (std::size_t p : {1u, 2u, 3u}) {
    const auto g = gen_random_regular(300, 3, 40 + p);
    const auto bound = lightcone_size_bound(3, p, g.n_vars());
    std::size_t largest = 0;
    for (const auto& [i, j] : detail::pairs_within(g, 2 * p)) {
      const auto sub = lightcone_subgraph(g, i, j, p);
      ASSERT_TRUE(sub.has_value());
      EXPECT_LE(sub->size(), bound);
      largest = std::max(largest, sub->size());
    }
    EXPECT_EQ(largest, bound) << "p=" << p;
  }
}

TEST(Subgraph, BallUnionWithCausalEdges) {
  const auto g = sparse_weighted(40, 20, 3);
  for (std::size_t p : {1u, 2u}) {
    for (std::size_t i = 0; i < 40; i += 3) {
      const auto di = bfs_distances(g, i);
      for (std::size_t j = i + 1; j < 40; j += 2) {
        const auto dj = bfs_distances(g, j);
        const auto sub = lightcone_subgraph(g, i, j, p);
        if (di[j] > 2 * p) {
          EXPECT_FALSE(sub.has_value());
          continue;
        }
        ASSERT_TRUE(sub.has_value());
        std::vector<std::size_t> expected;
        for (std::size_t v = 0; v < 40; ++v) {
          if (di[v] <= p || dj[v] <= p) expected.push_back(v);
        }
        EXPECT_EQ(sub->vertices, expected);
        EXPECT_NE(sub->i_local, sub->j_local);
        EXPECT_EQ(sub->vertices[sub->i_local], i);
        EXPECT_EQ(sub->vertices[sub->j_local], j);
        std::size_t causal = 0;
        for (const auto& e : g.edges()) {
          const bool inner = std::min(di[e.i], dj[e.i]) < p || std::min(di[e.j], dj[e.j]) < p;
          if (inner && std::binary_search(expected.begin(), expected.end(), e.i) &&
              std::binary_search(expected.begin(), expected.end(), e.j)) {
            ++causal;
          }
        }
        EXPECT_EQ(sub->edges.size(), causal);
        for (const auto& e : sub->edges) EXPECT_EQ(g.weight(sub->vertices[e.i], sub->vertices[e.j]), e.w);
      }
    }
  }
}

TEST(Subgraph, RingOppositeVerticesDisjoint) {
  EXPECT_FALSE(lightcone_subgraph(ring(12), 0, 6, 1).has_value());
  EXPECT_TRUE(lightcone_subgraph(ring(12), 0, 2, 1).has_value());
  EXPECT_THROW(lightcone_subgraph(ring(12), 0, 12, 1), IndexError);
}

TEST(IsTree, Examples) {
  EXPECT_TRUE(is_tree(5, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}}));
  EXPECT_FALSE(is_tree(5, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {4, 0, 1}}));
  EXPECT_FALSE(is_tree(4, {{0, 1, 1}, {2, 3, 1}}));
  EXPECT_FALSE(is_tree(5, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}, {3, 4, 1}}));
  EXPECT_TRUE(is_tree(1, {}));
}

TEST(CorrelationMatrix, MatchesWholeGraphEmulation) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const bool regular = seed % 2 == 0;
    const auto g = regular ? gen_random_regular(12 + 2 * (seed % 3), 3, seed) : sparse_weighted(14, 5, seed);
    for (std::size_t p : {1u, 2u}) {
      const auto angles = angles_for(p, seed * 10 + p);
      const auto Z = build_correlation_matrix(g, p, angles);
      const auto state = apply_qaoa(g, angles);
      EXPECT_EQ(Z.kind(), ProblemKind::Preconditioned);
      for (std::size_t i = 0; i < g.n_vars(); ++i) {
        for (std::size_t j = i + 1; j < g.n_vars(); ++j) {
          const double full = correlation(state, i, j);
          if (Z.has_edge(i, j)) {
            EXPECT_NEAR(Z.weight(i, j), -full, 1e-10);
          } else {
            EXPECT_LT(std::abs(full), 1e-10);
          }
        }
      }
    }
  }
}

TEST(CorrelationMatrix, DisjointPairsAbsent) {
  const auto g = gen_random_regular(60, 3, 77);
  const auto Z = build_correlation_matrix(g, 1, angles_for(1, 1));
  for (const auto& e : Z.edges()) EXPECT_LE(bfs_distances(g, e.i)[e.j], 2u);
}

TEST(CorrelationMatrix, CacheOnOffBitwiseIdentical) {
  const auto regular = gen_random_regular(60, 3, 5);
  const std::vector<std::pair<Problem, std::size_t>> cases = {
      {regular, 1}, {reweighted(regular, 6), 1}, {ring(30), 2}, {reweighted(ring(30), 7), 2}, {ring(30), 3}};
  for (const auto& [g, p] : cases) {
    const auto angles = angles_for(p, 8);
    LightconeOptions on;
    LightconeOptions off;
    off.use_cache = false;
    LightconeStats s_on;
    LightconeStats s_off;
    const auto a = build_correlation_matrix(g, p, angles, CorrelationMode::exact(), on, &s_on);
    const auto b = build_correlation_matrix(g, p, angles, CorrelationMode::exact(), off, &s_off);
    ASSERT_EQ(a.n_terms(), b.n_terms());
    for (std::size_t k = 0; k < a.n_terms(); ++k) EXPECT_EQ(a.edges()[k], b.edges()[k]);
    EXPECT_EQ(s_off.emulations, s_on.pairs);
    EXPECT_EQ(s_on.emulations, s_on.classes);
  }
}

TEST(CorrelationMatrix, CachedValuesEqualDirectEmulation) {
  const auto g = gen_random_regular(400, 3, 9);
  const auto angles = angles_for(2, 10);
  const auto Z = build_correlation_matrix(g, 2, angles);
  for (std::size_t k = 0; k < Z.n_terms(); k += Z.n_terms() / 12) {
    const auto& e = Z.edges()[k];
    const auto sub = lightcone_subgraph(g, e.i, e.j, 2);
    ASSERT_TRUE(sub.has_value());
    EXPECT_NEAR(e.w, -emulate_lightcone(*sub, angles), 1e-12);
  }
}

TEST(CorrelationMatrix, ParallelWidthDoesNotChangeOutput) {
  LightconeOptions wide;
  wide.jobs = 3;
  const auto regular = gen_random_regular(200, 3, 11);
  const std::vector<std::pair<Problem, std::size_t>> cases = {
      {regular, 1}, {reweighted(regular, 12), 1}, {reweighted(ring(40), 13), 2}};
  for (const auto& [g, p] : cases) {
    const auto angles = angles_for(p, 12);
    for (const bool cache : {true, false}) {
      LightconeOptions narrow;
      narrow.use_cache = cache;
      wide.use_cache = cache;
      const auto a = build_correlation_matrix(g, p, angles, CorrelationMode::exact(), narrow);
      const auto b = build_correlation_matrix(g, p, angles, CorrelationMode::exact(), wide);
      ASSERT_EQ(a.n_terms(), b.n_terms());
      for (std::size_t k = 0; k < a.n_terms(); ++k) EXPECT_EQ(a.edges()[k], b.edges()[k]);
    }
  }
}

TEST(CorrelationMatrix, RelabelingPreservesClasses) {
  const auto g = gen_random_regular(50, 3, 13);
  std::vector<std::size_t> perm(50);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(14);
  for (std::size_t k = 49; k > 0; --k) std::swap(perm[k], perm[rng.below(k + 1)]);
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) edges.push_back({perm[e.i], perm[e.j], e.w});
  const Problem h(50, edges);
  const auto angles = angles_for(1, 15);
  LightconeStats sg;
  LightconeStats sh;
  const auto Zg = build_correlation_matrix(g, 1, angles, CorrelationMode::exact(), {}, &sg);
  const auto Zh = build_correlation_matrix(h, 1, angles, CorrelationMode::exact(), {}, &sh);
  EXPECT_EQ(sg.classes, sh.classes);
  for (const auto& e : Zg.edges()) EXPECT_NEAR(Zh.weight(perm[e.i], perm[e.j]), e.w, 1e-12);
}

TEST(CorrelationMatrix, WeightsSeparateClasses) {
  // Same topology, different weights on one edge: must not share a cached value.
  const Problem g(6, {{0, 1, 1.0}, {1, 2, 1.0}, {3, 4, 1.0}, {4, 5, 2.0}});
  const auto angles = angles_for(1, 16);
  LightconeStats stats;
  const auto Z = build_correlation_matrix(g, 1, angles, CorrelationMode::exact(), {}, &stats);
  const auto state = apply_qaoa(g, angles);
  for (const auto& e : Z.edges()) EXPECT_NEAR(e.w, -correlation(state, e.i, e.j), 1e-12);
  EXPECT_GE(stats.classes, 3u);
}

TEST(CorrelationMatrix, CapacityErrorNamesPair) {
  const auto g = gen_random_regular(100, 3, 17);
  LightconeOptions small;
  small.qubit_cap = 10;
  try {
    build_correlation_matrix(g, 2, angles_for(2, 1), CorrelationMode::exact(), small);
    FAIL() << "expected a capacity error";
  } catch (const CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("pair ("), std::string::npos);
  }
}

TEST(CorrelationMatrix, AngleDepthMismatch) {
  EXPECT_THROW(build_correlation_matrix(ring(10), 2, angles_for(1, 1)), InvalidParameter);
}

TEST(SampledMode, RejectsZeroSamples) { EXPECT_THROW(CorrelationMode::sampled(0, 1), InvalidParameter); }

TEST(SampledMode, DeterministicAndConvergent) {
  const auto g = gen_random_regular(40, 3, 18);
  const auto angles = regular3_angles(1);
  const auto exact = build_correlation_matrix(g, 1, angles);
  auto rms = [&](std::size_t K, std::uint64_t seed) {
    const auto Z = build_correlation_matrix(g, 1, angles, CorrelationMode::sampled(K, seed));
    double sq = 0.0;
    for (const auto& e : exact.edges()) {
      const double d = Z.weight(e.i, e.j) - e.w;
      sq += d * d;
    }
    return std::sqrt(sq / static_cast<double>(exact.n_terms()));
  };
  const auto a = build_correlation_matrix(g, 1, angles, CorrelationMode::sampled(200, 3));
  const auto b = build_correlation_matrix(g, 1, angles, CorrelationMode::sampled(200, 3));
  ASSERT_EQ(a.n_terms(), b.n_terms());
  for (std::size_t k = 0; k < a.n_terms(); ++k) EXPECT_EQ(a.edges()[k], b.edges()[k]);
  const double e2 = rms(100, 1);
  const double e3 = rms(1000, 1);
  const double e4 = rms(10000, 1);
  EXPECT_GT(e2, e3);
  EXPECT_GT(e3, e4);
  EXPECT_LT(e4, 0.02);
}

TEST(Stats, RegularP1Counts) {
  const auto g = gen_random_regular(400, 3, 19);
  LightconeStats stats;
  const auto Z = build_correlation_matrix(g, 1, regular3_angles(1), CorrelationMode::exact(), {}, &stats);
  EXPECT_EQ(stats.max_vertices, 7u);
  EXPECT_LE(stats.classes, 15u);
  EXPECT_GE(stats.tree_classes, 2u);
  EXPECT_NEAR(static_cast<double>(Z.n_terms()) / 400.0, 4.5, 0.2);
}

TEST(Stats, TreesOnlyCachingEmulatesEveryCyclicLightcone) {
  const auto g = gen_random_regular(200, 3, 23);
  for (const std::size_t p : {1u, 2u}) {
    const auto angles = angles_for(p, 11);
    LightconeOptions trees;
    trees.cache_trees_only = true;
    LightconeStats s_iso;
    LightconeStats s_trees;
    const auto a = build_correlation_matrix(g, p, angles, CorrelationMode::exact(), {}, &s_iso);
    const auto b = build_correlation_matrix(g, p, angles, CorrelationMode::exact(), trees, &s_trees);
    ASSERT_EQ(a.n_terms(), b.n_terms());
    for (std::size_t k = 0; k < a.n_terms(); ++k) EXPECT_NEAR(a.edges()[k].w, b.edges()[k].w, 1e-12);
    EXPECT_EQ(s_trees.tree_classes, s_iso.tree_classes);
    EXPECT_EQ(s_trees.tree_pairs, s_iso.tree_pairs);
    EXPECT_EQ(s_trees.emulations, s_trees.tree_classes + (s_trees.pairs - s_trees.tree_pairs));
    EXPECT_GE(s_trees.emulations, s_iso.emulations);
  }
}
