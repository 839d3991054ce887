#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "qprecond/error.hpp"
#include "qprecond/problem.hpp"
#include "qprecond/solvers/trace.hpp"

namespace qprecond {

inline constexpr std::size_t kBruteForceCap = 26;

struct BruteForceResult {
  SpinVector z;
  double objective = 0.0;
};

/// Exact minimum by Gray-code enumeration with z_0 = +1 fixed. Fields and the running
/// objective are rebuilt from scratch every 2^16 steps to bound rounding drift.
inline BruteForceResult brute_force(const Problem& problem) {
  const auto n = problem.n_vars();
  if (n > kBruteForceCap) {
    throw CapacityError("brute force is limited to N <= " + std::to_string(kBruteForceCap) + ", got " +
                        std::to_string(n));
  }
  SpinVector z = SpinVector::all_up(n);
  auto h = detail::local_fields(problem, z);
  double current = evaluate_objective(problem, z);
  double best = current;
  SpinVector best_z = z;
  const std::uint64_t steps = n <= 1 ? 1 : (std::uint64_t{1} << (n - 1));
  for (std::uint64_t t = 1; t < steps; ++t) {
    const auto k = 1 + static_cast<std::size_t>(std::countr_zero(t));
    current += -2.0 * z[k] * h[k];
    const double change = -2.0 * z[k];
    z.flip(k);
    for (const auto& nb : problem.neighbors(k)) h[nb.index] += nb.weight * change;
    if ((t & 0xffffU) == 0) {
      h = detail::local_fields(problem, z);
      current = evaluate_objective(problem, z);
    }
    if (current < best) {
      best = current;
      best_z = z;
    }
  }
  return {best_z, evaluate_objective(problem, best_z)};
}

}  // namespace qprecond
