#pragma once

#include <vector>

#include "qprecond/problem.hpp"
#include "qprecond/solvers/trace.hpp"

namespace qprecond {

inline constexpr double kImprovementTolerance = 1e-12;

/// First-improvement 1-opt descent in index order. A flip is taken only when it lowers the
/// objective by more than kImprovementTolerance, so zero-gain moves never cycle.
inline SpinVector greedy_local_descent(const Problem& problem, SpinVector z) {
  check_dimensions(problem, z);
  auto h = detail::local_fields(problem, z);
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t k = 0; k < problem.n_vars(); ++k) {
      const double delta = -2.0 * z[k] * h[k];
      if (delta < -kImprovementTolerance) {
        const double change = -2.0 * z[k];
        z.flip(k);
        for (const auto& nb : problem.neighbors(k)) h[nb.index] += nb.weight * change;
        improved = true;
      }
    }
  }
  return z;
}

/// True when no single flip lowers the objective by more than the tolerance.
inline bool is_one_opt(const Problem& problem, const SpinVector& z) {
  check_dimensions(problem, z);
  for (std::size_t k = 0; k < problem.n_vars(); ++k) {
    if (flip_delta(problem, z, k) < -kImprovementTolerance) return false;
  }
  return true;
}

}  // namespace qprecond
