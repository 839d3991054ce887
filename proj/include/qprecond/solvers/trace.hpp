#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "qprecond/error.hpp"
#include "qprecond/io.hpp"
#include "qprecond/problem.hpp"

namespace qprecond {

/// Best-so-far snapshot after n_iter iterations (sweeps or coordinate passes).
struct Checkpoint {
  std::size_t n_iter = 0;
  double objective = 0.0;
  double elapsed_s = 0.0;
  SpinVector z;
};

struct SolveTrace {
  SpinVector best_z;
  double best_objective = 0.0;
  std::vector<Checkpoint> checkpoints;
  std::uint64_t seed = 0;
};

namespace detail {

/// Sorted, de-duplicated checkpoints within [1, n_iter]; defaults to {n_iter}.
inline std::vector<std::size_t> normalize_checkpoints(std::vector<std::size_t> checkpoints, std::size_t n_iter) {
  if (checkpoints.empty()) return {n_iter};
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  if (checkpoints.front() == 0 || checkpoints.back() > n_iter) {
    throw InvalidParameter("checkpoints must lie in [1, " + std::to_string(n_iter) + "]");
  }
  return checkpoints;
}

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Local fields h_i = sum_j W_ij z_j.
inline std::vector<double> local_fields(const Problem& problem, const SpinVector& z) {
  std::vector<double> h(problem.n_vars(), 0.0);
  for (const auto& e : problem.edges()) {
    h[e.i] += e.w * z[e.j];
    h[e.j] += e.w * z[e.i];
  }
  return h;
}

}  // namespace detail

/// Rows "n_iter,objective,elapsed_s", objective on the problem that was solved.
inline void write_trace_csv(const SolveTrace& trace, std::ostream& out) {
  out << "n_iter,objective,elapsed_s\n";
  for (const auto& c : trace.checkpoints) {
    out << c.n_iter << ',' << detail::format_double(c.objective) << ',' << detail::format_double(c.elapsed_s) << '\n';
  }
}

}  // namespace qprecond
