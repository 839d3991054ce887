#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "qprecond/analytic_p1.hpp"
#include "qprecond/error.hpp"
#include "qprecond/lightcone.hpp"
#include "qprecond/parallel.hpp"
#include "qprecond/problem.hpp"
#include "qprecond/random.hpp"
#include "qprecond/statevector.hpp"

namespace qprecond {

using Objective = std::function<double(const std::vector<double>&)>;

/// Central-difference gradient with step h.
inline std::vector<double> fd_gradient(const Objective& f, const std::vector<double>& x, double h = 1e-5) {
  std::vector<double> g(x.size());
  auto probe = x;
  for (std::size_t k = 0; k < x.size(); ++k) {
    probe[k] = x[k] + h;
    const double up = f(probe);
    probe[k] = x[k] - h;
    const double down = f(probe);
    probe[k] = x[k];
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

struct MinimizeOptions {
  double grad_tol = 1e-8;
  std::size_t max_iter = 500;
  double fd_step = 1e-5;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// BFGS on the inverse Hessian with Armijo backtracking and finite-difference gradients.
/// Stops when the gradient norm drops below grad_tol, when no step along the search
/// direction decreases f, or after max_iter iterations.
inline MinimizeResult bfgs_minimize(const Objective& f, std::vector<double> x, const MinimizeOptions& opts = {}) {
  const std::size_t n = x.size();
  auto checked = [&](const std::vector<double>& point) {
    const double v = f(point);
    if (!std::isfinite(v)) throw NumericError("objective is not finite during angle search");
    return v;
  };
  std::vector<double> H(n * n, 0.0);
  auto reset = [&] {
    std::fill(H.begin(), H.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) H[k * n + k] = 1.0;
  };
  reset();
  double fx = checked(x);
  auto g = fd_gradient(checked, x, opts.fd_step);
  MinimizeResult result;
  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    result.iterations = iter;
    double gnorm = 0.0;
    for (const auto v : g) gnorm += v * v;
    gnorm = std::sqrt(gnorm);
    if (gnorm < opts.grad_tol) {
      result.converged = true;
      break;
    }
    std::vector<double> d(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) d[r] -= H[r * n + c] * g[c];
    }
    double slope = 0.0;
    for (std::size_t k = 0; k < n; ++k) slope += d[k] * g[k];
    if (slope >= 0.0) {
      reset();
      for (std::size_t k = 0; k < n; ++k) d[k] = -g[k];
      slope = -gnorm * gnorm;
    }
    double step = 1.0;
    std::vector<double> trial(n);
    double f_trial = fx;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = x[k] + step * d[k];
      f_trial = checked(trial);
      if (f_trial <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || !(f_trial < fx)) {
      result.converged = gnorm < 1e-6 * std::max(1.0, std::abs(fx));
      break;
    }
    const auto g_new = fd_gradient(checked, trial, opts.fd_step);
    std::vector<double> s(n);
    std::vector<double> y(n);
    double sy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      s[k] = trial[k] - x[k];
      y[k] = g_new[k] - g[k];
      sy += s[k] * y[k];
    }
    x = trial;
    fx = f_trial;
    g = g_new;
    if (sy > 1e-14) {
      std::vector<double> Hy(n, 0.0);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) Hy[r] += H[r * n + c] * y[c];
      }
      double yHy = 0.0;
      for (std::size_t k = 0; k < n; ++k) yHy += y[k] * Hy[k];
      const double rho = 1.0 / sy;
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
          H[r * n + c] += (1.0 + yHy * rho) * rho * s[r] * s[c] - rho * (Hy[r] * s[c] + s[r] * Hy[c]);
        }
      }
    }
    result.iterations = iter + 1;
  }
  result.x = std::move(x);
  result.value = fx;
  return result;
}

struct AngleSearchOptions {
  std::size_t qubit_cap = kDefaultQubitCap;
  std::size_t jobs = 1;
  MinimizeOptions minimize;
};

struct AngleResult {
  AngleSchedule angles;
  double value = 0.0;
};

inline AngleSchedule unpack_angles(const std::vector<double>& x, std::size_t p) {
  return {std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(p)),
          std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(p), x.end())};
}

/// <C>_p as a function of packed angles (gammas then betas). Uses the full state vector when
/// the problem fits under the cap, the closed form at p = 1, and light cones otherwise.
inline Objective qaoa_objective(const Problem& problem, std::size_t p, const AngleSearchOptions& options = {}) {
  if (problem.n_vars() <= options.qubit_cap) {
    auto sim = std::make_shared<QaoaSimulator>(problem, options.qubit_cap);
    return [sim, p](const std::vector<double>& x) { return sim->expectation(unpack_angles(x, p)); };
  }
  if (p == 1) {
    return [&problem](const std::vector<double>& x) { return analytic_p1_expectation(problem, x[0], x[1]); };
  }
  LightconeOptions lc;
  lc.qubit_cap = options.qubit_cap;
  return [&problem, p, lc](const std::vector<double>& x) {
    return lightcone_expectation(problem, unpack_angles(x, p), lc);
  };
}

/// Multi-start minimization of <C>_p. Start r draws gamma in [-pi, pi) and beta in [0, pi)
/// from derive_seed(seed, {r}); the best local minimum wins (earliest start on ties).
inline AngleResult optimize_angles(const Problem& problem, std::size_t p, std::size_t restarts, std::uint64_t seed,
                                   const AngleSearchOptions& options = {}) {
  if (p == 0) throw InvalidParameter("angle search needs p >= 1");
  if (restarts == 0) throw InvalidParameter("angle search needs at least one restart");
  const auto objective = qaoa_objective(problem, p, options);
  std::vector<MinimizeResult> results(restarts);
  parallel_for(restarts, options.jobs, [&](std::size_t r) {
    Rng rng(derive_seed(seed, {r}));
    std::vector<double> x(2 * p);
    for (std::size_t k = 0; k < p; ++k) x[k] = rng.uniform(-std::numbers::pi, std::numbers::pi);
    for (std::size_t k = 0; k < p; ++k) x[p + k] = rng.uniform(0.0, std::numbers::pi);
    results[r] = bfgs_minimize(objective, std::move(x), options.minimize);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r) {
    if (results[r].value < results[best].value) best = r;
  }
  return {unpack_angles(results[best].x, p), results[best].value};
}

}  // namespace qprecond
