#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qprecond/analytic_p1.hpp"
#include "qprecond/angle_search.hpp"
#include "qprecond/error.hpp"
#include "qprecond/io.hpp"
#include "qprecond/lightcone.hpp"
#include "qprecond/problem.hpp"
#include "qprecond/statevector.hpp"

namespace qprecond {

enum class Engine { Auto, AnalyticP1, Lightcone, FullStateVector };

inline std::string_view to_string(Engine engine) {
  switch (engine) {
    case Engine::Auto: return "auto";
    case Engine::AnalyticP1: return "analytic";
    case Engine::Lightcone: return "lightcone";
    case Engine::FullStateVector: return "full";
  }
  return "auto";
}

inline Engine engine_from_string(std::string_view name) {
  for (auto e : {Engine::Auto, Engine::AnalyticP1, Engine::Lightcone, Engine::FullStateVector}) {
    if (to_string(e) == name) return e;
  }
  throw InvalidParameter("unknown engine '" + std::string(name) + "' (auto, analytic, lightcone, full)");
}

/// gamma = 1/(2 sqrt N), beta = pi/8.
inline AngleSchedule sk_default_angles(std::size_t n) {
  if (n < 2) throw InvalidParameter("SK default angles need n >= 2");
  return {{0.5 / std::sqrt(static_cast<double>(n))}, {std::numbers::pi / 8.0}};
}

/// gamma = (eps cos(theta) + 1/2)/sqrt N, beta = eps sin(theta) + pi/8.
inline AngleSchedule perturbed_sk_angles(std::size_t n, double epsilon, double theta) {
  if (n < 2) throw InvalidParameter("SK angles need n >= 2");
  if (!(epsilon >= 0.0)) throw InvalidParameter("perturbation radius epsilon must be >= 0");
  return {{(epsilon * std::cos(theta) + 0.5) / std::sqrt(static_cast<double>(n))},
          {epsilon * std::sin(theta) + std::numbers::pi / 8.0}};
}

/// Angles maximizing the edge cut fraction on 3-regular graphs with girth above 2p + 1.
/// p = 1 is closed form (tan gamma = 1/sqrt 2, beta = pi/8); p = 2 was found by BFGS on the
/// depth-2 edge tree (<Z_i Z_j> = -0.5118129169).
inline AngleSchedule regular3_angles(std::size_t p) {
  if (p == 1) return {{std::atan(1.0 / std::sqrt(2.0))}, {std::numbers::pi / 8.0}};
  if (p == 2) return {{0.487835535685937, 0.897839193374254}, {0.554904188347310, 0.292380741268511}};
  throw InvalidParameter("no preset 3-regular angles for p=" + std::to_string(p) + "; use angle optimization");
}

struct AngleSource {
  enum class Kind { Provided, SKDefault, Optimize };
  Kind kind = Kind::SKDefault;
  AngleSchedule angles;
  std::size_t restarts = 0;
  std::uint64_t seed = 0;

  static AngleSource provided(AngleSchedule angles) { return {Kind::Provided, std::move(angles), 0, 0}; }
  static AngleSource sk_default() { return {}; }
  static AngleSource optimize(std::size_t restarts, std::uint64_t seed) {
    return {Kind::Optimize, {}, restarts, seed};
  }
};

struct SamplingSpec {
  std::size_t K = 0;
  std::uint64_t seed = 0;
};

struct PrecondOptions {
  std::size_t p = 1;
  AngleSource angle_source;
  Engine engine = Engine::Auto;
  std::optional<SamplingSpec> sampling;
  std::optional<double> noise_F;
  std::size_t qubit_cap = kDefaultQubitCap;
  bool use_cache = true;
  bool cache_trees_only = false;
  std::size_t jobs = 1;

  void validate() const {
    if (p == 0) throw InvalidParameter("preconditioning needs p >= 1");
    if (engine == Engine::AnalyticP1 && p != 1) throw InvalidParameter("the analytic engine requires p = 1");
    if (noise_F && !(*noise_F >= 0.0 && *noise_F <= 1.0)) throw InvalidParameter("noise F must lie in [0, 1]");
    if (sampling && sampling->K < 1) throw InvalidParameter("sample count K must be at least 1");
    if (sampling && engine == Engine::AnalyticP1) {
      throw InvalidParameter("sampling needs a state vector; use the lightcone or full engine");
    }
    if (angle_source.kind == AngleSource::Kind::SKDefault && p != 1) {
      throw InvalidParameter("SK default angles exist only for p = 1");
    }
    if (angle_source.kind == AngleSource::Kind::Provided) {
      angle_source.angles.validate();
      if (angle_source.angles.p() != p) {
        throw InvalidParameter("provided angles have p=" + std::to_string(angle_source.angles.p()) + ", options say p=" +
                               std::to_string(p));
      }
    }
    if (angle_source.kind == AngleSource::Kind::Optimize && angle_source.restarts < 1) {
      throw InvalidParameter("angle optimization needs at least one restart");
    }
  }
};

struct PrecondReport {
  Engine engine = Engine::Auto;
  AngleSchedule angles;
  LightconeStats lightcone;
};

/// Engine that Auto resolves to for this problem.
inline Engine select_engine(const Problem& problem, const PrecondOptions& opts) {
  if (opts.engine != Engine::Auto) return opts.engine;
  const auto n = problem.n_vars();
  const auto bound = lightcone_size_bound(problem.max_degree(), opts.p, n);
  const bool dense = bound >= n;
  if (opts.p == 1 && dense && !opts.sampling) return Engine::AnalyticP1;
  if (!dense && bound <= opts.qubit_cap) return Engine::Lightcone;
  if (n <= opts.qubit_cap) return Engine::FullStateVector;
  if (opts.p == 1 && !opts.sampling) return Engine::AnalyticP1;
  throw CapacityError("no engine can precondition N=" + std::to_string(n) + " at p=" + std::to_string(opts.p) +
                      " (light cones reach " + std::to_string(bound) + " qubits, cap " +
                      std::to_string(opts.qubit_cap) + ")");
}

inline AngleSchedule resolve_angles(const Problem& problem, const PrecondOptions& opts) {
  switch (opts.angle_source.kind) {
    case AngleSource::Kind::Provided: return opts.angle_source.angles;
    case AngleSource::Kind::SKDefault: return sk_default_angles(problem.n_vars());
    case AngleSource::Kind::Optimize: {
      AngleSearchOptions search;
      search.qubit_cap = opts.qubit_cap;
      search.jobs = opts.jobs;
      return optimize_angles(problem, opts.p, opts.angle_source.restarts, opts.angle_source.seed, search).angles;
    }
  }
  return opts.angle_source.angles;
}

inline std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out += ',';
    out += detail::format_double(values[k]);
  }
  return out;
}

/// Every entry multiplied by F. Entries are kept even when they fall below the sparsity
/// threshold, so the map is exactly linear.
inline Problem apply_depolarizing(const Problem& Z, double F) {
  if (!(F >= 0.0 && F <= 1.0)) throw InvalidParameter("fidelity F must lie in [0, 1]");
  std::vector<Edge> edges(Z.edges().begin(), Z.edges().end());
  for (auto& e : edges) e.w *= F;
  auto provenance = Z.provenance();
  provenance["F"] = detail::format_double(F);
  return Problem(Z.n_vars(), std::move(edges), Z.kind(), std::move(provenance));
}

/// (1/K) sum_k z_i^(k) z_j^(k).
inline double estimate_from_samples(const std::vector<SpinVector>& samples, std::size_t i, std::size_t j) {
  if (samples.empty()) throw InvalidParameter("cannot estimate a correlation from zero samples");
  double total = 0.0;
  for (const auto& z : samples) {
    if (i >= z.size() || j >= z.size()) throw IndexError("sample index out of range");
    total += z[i] * z[j];
  }
  return total / static_cast<double>(samples.size());
}

/// Z_ij = -z_i z_j for all i != j.
inline Problem ideal_preconditioner(const SpinVector& z_opt) {
  const auto n = z_opt.size();
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({i, j, -static_cast<double>(z_opt[i] * z_opt[j])});
  }
  return Problem(n, std::move(edges), ProblemKind::IdealInfiniteDepth, {{"generator", "ideal"}});
}

/// Z^(p) with Z_ij = -<Z_i Z_j>_p off the diagonal.
inline Problem precondition(const Problem& problem, const PrecondOptions& opts, PrecondReport* report = nullptr) {
  opts.validate();
  const Engine engine = select_engine(problem, opts);
  if (engine == Engine::AnalyticP1 && opts.p != 1) throw InvalidParameter("the analytic engine requires p = 1");
  if (engine == Engine::AnalyticP1 && opts.sampling) {
    throw InvalidParameter("sampling needs a state vector; use the lightcone or full engine");
  }
  if (engine == Engine::FullStateVector && problem.n_vars() > opts.qubit_cap) {
    throw CapacityError(std::to_string(problem.n_vars()) + " qubits exceed the emulation cap of " +
                        std::to_string(opts.qubit_cap));
  }
  const AngleSchedule angles = resolve_angles(problem, opts);
  PrecondReport local;
  local.engine = engine;
  local.angles = angles;

  std::vector<Edge> edges;
  auto keep = [&](std::size_t i, std::size_t j, double corr) {
    const double z = -corr;
    if (std::abs(z) >= kSparsityThreshold) edges.push_back({i, j, z});
  };
  switch (engine) {
    case Engine::AnalyticP1: {
      AnalyticP1 formula(problem, angles.gammas[0], angles.betas[0]);
      for (const auto& [i, j] : detail::pairs_within(problem, 2)) keep(i, j, formula.correlation(i, j));
      break;
    }
    case Engine::Lightcone: {
      LightconeOptions lc;
      lc.qubit_cap = opts.qubit_cap;
      lc.use_cache = opts.use_cache;
      lc.cache_trees_only = opts.cache_trees_only;
      lc.jobs = opts.jobs;
      const auto mode = opts.sampling ? CorrelationMode::sampled(opts.sampling->K, opts.sampling->seed)
                                      : CorrelationMode::exact();
      const auto Z = build_correlation_matrix(problem, opts.p, angles, mode, lc, &local.lightcone);
      edges.assign(Z.edges().begin(), Z.edges().end());
      break;
    }
    case Engine::FullStateVector: {
      const auto state = apply_qaoa(problem, angles, opts.qubit_cap);
      const auto pairs = detail::pairs_within(problem, 2 * opts.p);
      if (opts.sampling) {
        // One sample set for the whole circuit, shared by all pairs.
        const auto draws = sample_indices(state, opts.sampling->K, opts.sampling->seed);
        for (const auto& [i, j] : pairs) {
          const std::uint64_t bi = std::uint64_t{1} << i;
          const std::uint64_t bj = std::uint64_t{1} << j;
          double total = 0.0;
          for (const auto d : draws) total += (((d & bi) != 0) == ((d & bj) != 0)) ? 1.0 : -1.0;
          keep(i, j, total / static_cast<double>(draws.size()));
        }
      } else {
        const auto moments = z_moments(state);
        for (const auto& [i, j] : pairs) keep(i, j, moments[(std::size_t{1} << i) | (std::size_t{1} << j)]);
      }
      break;
    }
    case Engine::Auto: break;
  }

  Problem::Provenance provenance{{"p", std::to_string(opts.p)},
                                 {"gammas", format_list(angles.gammas)},
                                 {"betas", format_list(angles.betas)},
                                 {"engine", std::string(to_string(engine))},
                                 {"parent_kind", std::string(to_string(problem.kind()))},
                                 {"parent_n_terms", std::to_string(problem.n_terms())}};
  if (opts.sampling) {
    provenance["K"] = std::to_string(opts.sampling->K);
    provenance["sample_seed"] = std::to_string(opts.sampling->seed);
  }
  Problem Z(problem.n_vars(), std::move(edges), ProblemKind::Preconditioned, std::move(provenance));
  if (opts.noise_F) Z = apply_depolarizing(Z, *opts.noise_F);
  if (report) *report = std::move(local);
  return Z;
}

}  // namespace qprecond
