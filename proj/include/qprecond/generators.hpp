#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "qprecond/error.hpp"
#include "qprecond/problem.hpp"
#include "qprecond/random.hpp"

namespace qprecond {

/// Random d-regular graph with unit weights via the pairing (configuration) model.
///
/// n*d half-edges are shuffled and paired consecutively; any self-loop or repeated pair
/// rejects the whole pairing and the draw restarts from the same generator stream.
inline Problem gen_random_regular(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (d == 0 || d >= n) {
    throw InvalidParameter("degree d=" + std::to_string(d) + " must satisfy 0 < d < n=" + std::to_string(n));
  }
  if ((n * d) % 2 != 0) {
    throw InvalidParameter("n*d must be even for a d-regular graph (n=" + std::to_string(n) +
                           ", d=" + std::to_string(d) + ")");
  }
  Rng rng(seed);
  std::vector<std::size_t> stubs(n * d);
  std::vector<Edge> edges;
  edges.reserve(n * d / 2);
  std::vector<std::uint64_t> keys;
  keys.reserve(n * d / 2);
  for (std::size_t attempt = 0;; ++attempt) {
    if (attempt > 100000) throw InvalidParameter("pairing model failed to produce a simple graph");
    for (std::size_t k = 0; k < stubs.size(); ++k) stubs[k] = k / d;
    for (std::size_t k = stubs.size() - 1; k > 0; --k) std::swap(stubs[k], stubs[rng.below(k + 1)]);
    edges.clear();
    keys.clear();
    bool simple = true;
    for (std::size_t k = 0; k < stubs.size(); k += 2) {
      auto a = stubs[k];
      auto b = stubs[k + 1];
      if (a == b) {
        simple = false;
        break;
      }
      if (a > b) std::swap(a, b);
      edges.push_back({a, b, 1.0});
      keys.push_back(static_cast<std::uint64_t>(a) * n + b);
    }
    if (!simple) continue;
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) continue;
    break;
  }
  return Problem(n, std::move(edges), ProblemKind::MaxCutRegular,
                 {{"generator", "pairing-model"}, {"d", std::to_string(d)}, {"seed", std::to_string(seed)}});
}

/// Sherrington-Kirkpatrick instance: every pair present with an i.i.d. N(0, 1) weight.
inline Problem gen_sk(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw InvalidParameter("SK instances need n >= 2");
  Rng rng(seed);
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({i, j, rng.normal()});
  }
  return Problem(n, std::move(edges), ProblemKind::SK, {{"generator", "goe"}, {"seed", std::to_string(seed)}});
}

}  // namespace qprecond
