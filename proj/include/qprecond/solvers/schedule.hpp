#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qprecond/error.hpp"
#include "qprecond/problem.hpp"

namespace qprecond {

struct TemperatureSchedule {
  std::vector<double> temps;
  double t_hot = 0.0;
  double t_cold = 0.0;
};

/// Endpoint temperatures from the couplings:
///   T_hot  = 2 max_i h_i / ln 2, with h_i = sum_j |W_ij|
///   T_cold = 2 min |W_ij| / ln(100 nu), nu = number of spins whose smallest coupling is the global minimum
/// and T_l^-1 = exp(ln T_hot^-1 + l (ln T_cold^-1 - ln T_hot^-1) / M) for l = 1..M.
/// Couplings below the sparsity threshold are ignored.
inline TemperatureSchedule temperature_schedule(const Problem& problem, std::size_t M) {
  if (M < 1) throw InvalidParameter("schedule length M must be at least 1");
  const auto n = problem.n_vars();
  std::vector<double> h(n, 0.0);
  std::vector<double> smallest(n, std::numeric_limits<double>::infinity());
  double w_min = std::numeric_limits<double>::infinity();
  for (const auto& e : problem.edges()) {
    const double a = std::abs(e.w);
    if (a < kSparsityThreshold) continue;
    h[e.i] += a;
    h[e.j] += a;
    smallest[e.i] = std::min(smallest[e.i], a);
    smallest[e.j] = std::min(smallest[e.j], a);
    w_min = std::min(w_min, a);
  }
  if (!std::isfinite(w_min)) throw InvalidParameter("temperature schedule needs at least one nonzero coupling");
  const double h_max = *std::max_element(h.begin(), h.end());
  const auto nu = static_cast<double>(std::count(smallest.begin(), smallest.end(), w_min));
  TemperatureSchedule schedule;
  schedule.t_hot = 2.0 * h_max / std::log(2.0);
  schedule.t_cold = 2.0 * w_min / std::log(100.0 * nu);
  const double log_hot = std::log(1.0 / schedule.t_hot);
  const double log_cold = std::log(1.0 / schedule.t_cold);
  schedule.temps.resize(M);
  for (std::size_t l = 1; l <= M; ++l) {
    const double inv = std::exp(log_hot + static_cast<double>(l) * (log_cold - log_hot) / static_cast<double>(M));
    schedule.temps[l - 1] = 1.0 / inv;
  }
  schedule.temps.back() = schedule.t_cold;
  return schedule;
}

}  // namespace qprecond
