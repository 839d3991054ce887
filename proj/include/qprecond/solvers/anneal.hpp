#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "qprecond/error.hpp"
#include "qprecond/problem.hpp"
#include "qprecond/random.hpp"
#include "qprecond/solvers/schedule.hpp"
#include "qprecond/solvers/trace.hpp"

namespace qprecond {

/// Spin configuration with cached local fields and objective for O(deg) Metropolis moves.
class MetropolisState {
 public:
  MetropolisState(const Problem& problem, SpinVector z)
      : problem_(problem), z_(std::move(z)), h_(detail::local_fields(problem, z_)),
        objective_(evaluate_objective(problem, z_)) {}

  const SpinVector& spins() const noexcept { return z_; }
  double objective() const noexcept { return objective_; }
  double delta(std::size_t k) const { return -2.0 * z_[k] * h_[k]; }

  void flip(std::size_t k) {
    const double change = -2.0 * z_[k];
    objective_ += delta(k);
    z_.flip(k);
    for (const auto& nb : problem_.neighbors(k)) h_[nb.index] += nb.weight * change;
  }

  /// Metropolis acceptance of flipping k at temperature T; zero or negative changes always pass.
  bool propose(std::size_t k, double T, Rng& rng) {
    const double d = delta(k);
    if (d <= 0.0 || rng.uniform() < std::exp(-d / T)) {
      flip(k);
      return true;
    }
    return false;
  }

  /// N proposals on uniformly random spins. Returns the number of accepted flips.
  std::size_t sweep(double T, Rng& rng) {
    const auto n = problem_.n_vars();
    std::size_t accepted = 0;
    for (std::size_t s = 0; s < n; ++s) accepted += propose(rng.below(n), T, rng) ? 1 : 0;
    return accepted;
  }

 private:
  const Problem& problem_;
  SpinVector z_;
  std::vector<double> h_;
  double objective_;
};

inline SpinVector random_spins(std::size_t n, Rng& rng) {
  std::vector<int> values(n);
  for (auto& v : values) v = rng.spin();
  return SpinVector(values);
}

/// Simulated annealing over the geometric schedule of length M. The best configuration is
/// tracked after every sweep; checkpoints report it with an exactly recomputed objective.
/// The timer includes schedule construction.
inline SolveTrace simulated_annealing(const Problem& problem, std::size_t M, std::uint64_t seed,
                                      std::vector<std::size_t> checkpoints = {}) {
  if (M < 1) throw InvalidParameter("simulated annealing needs M >= 1 sweeps");
  const auto marks = detail::normalize_checkpoints(std::move(checkpoints), M);
  const auto start = detail::Clock::now();
  const auto schedule = temperature_schedule(problem, M);
  Rng rng(seed);
  MetropolisState state(problem, random_spins(problem.n_vars(), rng));
  SolveTrace trace;
  trace.seed = seed;
  trace.best_z = state.spins();
  double best = state.objective();
  std::size_t next_mark = 0;
  for (std::size_t sweep = 1; sweep <= M; ++sweep) {
    state.sweep(schedule.temps[sweep - 1], rng);
    if (state.objective() < best) {
      best = state.objective();
      trace.best_z = state.spins();
    }
    if (next_mark < marks.size() && marks[next_mark] == sweep) {
      const double elapsed = detail::seconds_since(start);
      trace.checkpoints.push_back({sweep, evaluate_objective(problem, trace.best_z), elapsed, trace.best_z});
      ++next_mark;
    }
  }
  trace.best_objective = evaluate_objective(problem, trace.best_z);
  return trace;
}

}  // namespace qprecond
