#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qprecond/error.hpp"
#include "qprecond/problem.hpp"
#include "qprecond/random.hpp"
#include "qprecond/solvers/local_search.hpp"
#include "qprecond/solvers/trace.hpp"

namespace qprecond {

/// Rank of the relaxation: ceil(sqrt(2N)) capped at 20.
inline std::size_t burer_monteiro_rank(std::size_t n) {
  const auto k = static_cast<std::size_t>(std::ceil(std::sqrt(2.0 * static_cast<double>(n))));
  return std::clamp<std::size_t>(k, 1, 20);
}

/// Unit vectors v_i in R^k standing in for the spins.
class BurerMonteiroState {
 public:
  BurerMonteiroState(const Problem& problem, Rng& rng)
      : problem_(problem), rank_(burer_monteiro_rank(problem.n_vars())), v_(problem.n_vars() * rank_),
        order_(problem.n_vars()) {
    for (std::size_t i = 0; i < problem.n_vars(); ++i) {
      double norm = 0.0;
      do {
        norm = 0.0;
        for (std::size_t c = 0; c < rank_; ++c) {
          v_[i * rank_ + c] = rng.normal();
          norm += v_[i * rank_ + c] * v_[i * rank_ + c];
        }
      } while (norm == 0.0);
      norm = std::sqrt(norm);
      for (std::size_t c = 0; c < rank_; ++c) v_[i * rank_ + c] /= norm;
    }
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  }

  std::size_t rank() const noexcept { return rank_; }
  const double* vector(std::size_t i) const { return v_.data() + i * rank_; }

  /// sum over stored pairs of W_ij <v_i, v_j>.
  double relaxed_objective() const {
    double total = 0.0;
    for (const auto& e : problem_.edges()) {
      double dot = 0.0;
      for (std::size_t c = 0; c < rank_; ++c) dot += v_[e.i * rank_ + c] * v_[e.j * rank_ + c];
      total += e.w * dot;
    }
    return total;
  }

  /// One pass of v_i <- normalize(-sum_j W_ij v_j) in a fresh random order. Vertices with a
  /// vanishing field keep their vector.
  void coordinate_pass(Rng& rng) {
    const auto n = order_.size();
    for (std::size_t k = n; k > 1; --k) std::swap(order_[k - 1], order_[rng.below(k)]);
    std::vector<double> g(rank_);
    for (const auto i : order_) {
      std::fill(g.begin(), g.end(), 0.0);
      for (const auto& nb : problem_.neighbors(i)) {
        const double* vj = vector(nb.index);
        for (std::size_t c = 0; c < rank_; ++c) g[c] += nb.weight * vj[c];
      }
      double norm = 0.0;
      for (const auto x : g) norm += x * x;
      if (norm <= 0.0) continue;
      norm = std::sqrt(norm);
      for (std::size_t c = 0; c < rank_; ++c) v_[i * rank_ + c] = -g[c] / norm;
    }
  }

  /// Random-hyperplane rounding: z_i = sign(<v_i, r>) for a Gaussian direction r.
  SpinVector round(Rng& rng) const {
    std::vector<double> r(rank_);
    for (auto& x : r) x = rng.normal();
    std::vector<int> z(order_.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      double dot = 0.0;
      for (std::size_t c = 0; c < rank_; ++c) dot += v_[i * rank_ + c] * r[c];
      z[i] = dot < 0.0 ? -1 : 1;
    }
    return SpinVector(z);
  }

 private:
  const Problem& problem_;
  std::size_t rank_;
  std::vector<double> v_;
  std::vector<std::size_t> order_;
};

/// Low-rank heuristic: each iteration is one coordinate-descent pass followed by hyperplane
/// rounding and greedy 1-opt polish; the best rounded solution is kept.
inline SolveTrace burer_monteiro(const Problem& problem, std::size_t n_iter, std::uint64_t seed,
                                 std::vector<std::size_t> checkpoints = {}) {
  if (n_iter < 1) throw InvalidParameter("Burer-Monteiro needs n_iter >= 1");
  const auto marks = detail::normalize_checkpoints(std::move(checkpoints), n_iter);
  const auto start = detail::Clock::now();
  Rng rng(seed);
  BurerMonteiroState state(problem, rng);
  SolveTrace trace;
  trace.seed = seed;
  bool have_best = false;
  double best = 0.0;
  std::size_t next_mark = 0;
  for (std::size_t iter = 1; iter <= n_iter; ++iter) {
    state.coordinate_pass(rng);
    auto z = greedy_local_descent(problem, state.round(rng));
    const double value = evaluate_objective(problem, z);
    if (!have_best || value < best) {
      best = value;
      trace.best_z = std::move(z);
      have_best = true;
    }
    if (next_mark < marks.size() && marks[next_mark] == iter) {
      trace.checkpoints.push_back({iter, best, detail::seconds_since(start), trace.best_z});
      ++next_mark;
    }
  }
  trace.best_objective = best;
  return trace;
}

}  // namespace qprecond
