#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qprecond/error.hpp"
#include "qprecond/problem.hpp"
#include "qprecond/random.hpp"

namespace qprecond {

inline constexpr std::size_t kDefaultQubitCap = 26;

/// QAOA parameters (gamma_1..gamma_p, beta_1..beta_p). p = 0 is the bare |+>^N state.
struct AngleSchedule {
  std::vector<double> gammas;
  std::vector<double> betas;

  std::size_t p() const noexcept { return gammas.size(); }

  void validate() const {
    if (gammas.size() != betas.size()) {
      throw InvalidParameter("angle schedule has " + std::to_string(gammas.size()) + " gammas but " +
                             std::to_string(betas.size()) + " betas");
    }
    for (std::size_t k = 0; k < gammas.size(); ++k) {
      if (!std::isfinite(gammas[k]) || !std::isfinite(betas[k])) throw InvalidParameter("non-finite QAOA angle");
    }
  }

  bool operator==(const AngleSchedule&) const = default;
};

/// 2^N complex amplitudes. Qubit k is bit k of the basis index; bit b maps to spin 1 - 2b.
class StateVector {
 public:
  using Amplitude = std::complex<double>;

  StateVector(std::size_t n_qubits, std::vector<Amplitude> amplitudes)
      : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != (std::size_t{1} << n_qubits_)) {
      throw DimensionError("state of " + std::to_string(n_qubits_) + " qubits needs 2^N amplitudes");
    }
  }

  static StateVector uniform(std::size_t n_qubits, std::size_t cap = kDefaultQubitCap) {
    check_capacity(n_qubits, cap);
    const std::size_t dim = std::size_t{1} << n_qubits;
    return StateVector(n_qubits, std::vector<Amplitude>(dim, Amplitude(1.0 / std::sqrt(static_cast<double>(dim)), 0.0)));
  }

  static StateVector basis(const SpinVector& z, std::size_t cap = kDefaultQubitCap) {
    check_capacity(z.size(), cap);
    std::vector<Amplitude> amps(std::size_t{1} << z.size());
    amps[index_of(z)] = 1.0;
    return StateVector(z.size(), std::move(amps));
  }

  static void check_capacity(std::size_t n_qubits, std::size_t cap) {
    if (n_qubits > cap || n_qubits > 40) {
      throw CapacityError(std::to_string(n_qubits) + " qubits exceed the emulation cap of " + std::to_string(cap));
    }
  }

  static std::size_t index_of(const SpinVector& z) {
    std::size_t index = 0;
    for (std::size_t k = 0; k < z.size(); ++k) {
      if (z[k] < 0) index |= std::size_t{1} << k;
    }
    return index;
  }

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  std::size_t dimension() const noexcept { return amplitudes_.size(); }
  const std::vector<Amplitude>& amplitudes() const noexcept { return amplitudes_; }
  std::vector<Amplitude>& amplitudes() noexcept { return amplitudes_; }
  Amplitude operator[](std::size_t index) const { return amplitudes_[index]; }

  double norm_squared() const {
    double total = 0.0;
    for (const auto& a : amplitudes_) total += std::norm(a);
    return total;
  }

  std::vector<double> probabilities() const {
    std::vector<double> out(amplitudes_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::norm(amplitudes_[k]);
    return out;
  }

 private:
  std::size_t n_qubits_;
  std::vector<Amplitude> amplitudes_;
};

/// C(z) for every basis index, built in O(2^N) by adding one spin at a time.
inline std::vector<double> cost_table(const Problem& problem, std::size_t cap = kDefaultQubitCap) {
  const std::size_t n = problem.n_vars();
  StateVector::check_capacity(n, cap);
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> table(dim, 0.0);
  std::vector<double> field(dim / 2 + 1, 0.0);
  table[0] = total_weight(problem);
  // Indices below 2^k have spins k.. at +1. Going from [0, 2^k) to [2^k, 2^(k+1)) flips
  // spin k from +1 to -1, which changes C by -2 * sum_m W_km z_m.
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t half = std::size_t{1} << k;
    double base = 0.0;
    std::vector<std::pair<std::size_t, double>> lower;
    for (const auto& nb : problem.neighbors(k)) {
      base += nb.weight;
      if (nb.index < k) lower.emplace_back(nb.index, nb.weight);
    }
    // field[s] = sum_m W_km z_m(s) for s in [0, 2^k).
    field[0] = base;
    std::vector<double> w_of(k, 0.0);
    for (const auto& [m, w] : lower) w_of[m] = w;
    for (std::size_t m = 0; m < k; ++m) {
      const std::size_t span = std::size_t{1} << m;
      const double shift = -2.0 * w_of[m];
      for (std::size_t s = 0; s < span; ++s) field[span + s] = field[s] + shift;
    }
    for (std::size_t s = 0; s < half; ++s) table[half + s] = table[s] - 2.0 * field[s];
  }
  return table;
}

/// Applies one phase-separator layer and one mixer layer exp(-i beta sum X).
///
/// The phase separator multiplies |z> by exp(+i gamma C(z) / 2). This is the angle
/// convention in which a single edge gives <Z_0 Z_1> = -sin(4 beta) sin(gamma w), the
/// closed-form p = 1 correlations hold verbatim, and positive angles lower <C>.
inline void apply_layer(StateVector& state, const std::vector<double>& costs, double gamma, double beta) {
  auto& amps = state.amplitudes();
  for (std::size_t k = 0; k < amps.size(); ++k) {
    const double phase = 0.5 * gamma * costs[k];
    amps[k] *= std::complex<double>(std::cos(phase), std::sin(phase));
  }
  const double c = std::cos(beta);
  const double s = std::sin(beta);
  const std::complex<double> mis(0.0, -s);
  for (std::size_t q = 0; q < state.n_qubits(); ++q) {
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t base = 0; base < amps.size(); base += 2 * bit) {
      for (std::size_t k = base; k < base + bit; ++k) {
        const auto a = amps[k];
        const auto b = amps[k + bit];
        amps[k] = c * a + mis * b;
        amps[k + bit] = mis * a + c * b;
      }
    }
  }
}

/// Reusable emulator for one problem: the diagonal cost table is computed once.
class QaoaSimulator {
 public:
  explicit QaoaSimulator(const Problem& problem, std::size_t cap = kDefaultQubitCap)
      : n_(problem.n_vars()), cap_(cap), costs_(cost_table(problem, cap)) {}

  std::size_t n_qubits() const noexcept { return n_; }
  const std::vector<double>& costs() const noexcept { return costs_; }

  StateVector run(const AngleSchedule& angles) const {
    angles.validate();
    auto state = StateVector::uniform(n_, cap_);
    for (std::size_t layer = 0; layer < angles.p(); ++layer) {
      apply_layer(state, costs_, angles.gammas[layer], angles.betas[layer]);
    }
    return state;
  }

  double expectation(const StateVector& state) const {
    if (state.n_qubits() != n_) throw DimensionError("state and problem sizes differ");
    double total = 0.0;
    const auto& amps = state.amplitudes();
    for (std::size_t k = 0; k < amps.size(); ++k) total += std::norm(amps[k]) * costs_[k];
    return total;
  }

  double expectation(const AngleSchedule& angles) const { return expectation(run(angles)); }

 private:
  std::size_t n_;
  std::size_t cap_;
  std::vector<double> costs_;
};

/// |Psi> = prod_l exp(-i beta_l sum X) U_C(gamma_l) H^N |0>, U_C as in apply_layer.
inline StateVector apply_qaoa(const Problem& problem, const AngleSchedule& angles,
                              std::size_t cap = kDefaultQubitCap) {
  return QaoaSimulator(problem, cap).run(angles);
}

/// <C> = sum_z |amp(z)|^2 C(z).
inline double expectation_objective(const StateVector& state, const Problem& problem) {
  if (state.n_qubits() != problem.n_vars()) {
    throw DimensionError("state has " + std::to_string(state.n_qubits()) + " qubits, problem has " +
                         std::to_string(problem.n_vars()) + " variables");
  }
  return QaoaSimulator(problem, std::max(kDefaultQubitCap, state.n_qubits())).expectation(state);
}

/// <Z_i Z_j>; 1 when i == j.
inline double correlation(const StateVector& state, std::size_t i, std::size_t j) {
  const auto n = state.n_qubits();
  if (i >= n || j >= n) throw IndexError("qubit index outside [0, " + std::to_string(n) + ")");
  if (i == j) return 1.0;
  const std::size_t mask = (std::size_t{1} << i) | (std::size_t{1} << j);
  const auto& amps = state.amplitudes();
  double total = 0.0;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    const double prob = std::norm(amps[k]);
    // z_i z_j = +1 when bits i and j agree.
    total += (std::popcount(k & mask) == 1) ? -prob : prob;
  }
  return total;
}

/// <Z_i>.
inline double magnetization(const StateVector& state, std::size_t i) {
  if (i >= state.n_qubits()) throw IndexError("qubit index out of range");
  const std::size_t bit = std::size_t{1} << i;
  double total = 0.0;
  const auto& amps = state.amplitudes();
  for (std::size_t k = 0; k < amps.size(); ++k) total += (k & bit) ? -std::norm(amps[k]) : std::norm(amps[k]);
  return total;
}

/// Walsh-Hadamard transform of the probability vector. Entry m is <prod_{k in m} Z_k>, so
/// the two-point correlation of (i, j) sits at index 2^i + 2^j.
inline std::vector<double> z_moments(const StateVector& state) {
  auto moments = state.probabilities();
  for (std::size_t bit = 1; bit < moments.size(); bit <<= 1) {
    for (std::size_t base = 0; base < moments.size(); base += 2 * bit) {
      for (std::size_t k = base; k < base + bit; ++k) {
        const double a = moments[k];
        const double b = moments[k + bit];
        moments[k] = a + b;
        moments[k + bit] = a - b;
      }
    }
  }
  return moments;
}

/// K independent draws of basis indices from |amp|^2.
inline std::vector<std::uint64_t> sample_indices(const StateVector& state, std::size_t K, std::uint64_t seed) {
  if (K == 0) throw InvalidParameter("sample count K must be at least 1");
  const auto& amps = state.amplitudes();
  std::vector<double> cdf(amps.size());
  double running = 0.0;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    running += std::norm(amps[k]);
    cdf[k] = running;
  }
  Rng rng(seed);
  std::vector<std::uint64_t> out(K);
  for (auto& draw : out) {
    const double u = rng.uniform() * running;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    draw = static_cast<std::uint64_t>(it - cdf.begin());
  }
  return out;
}

inline std::vector<SpinVector> sample_bitstrings(const StateVector& state, std::size_t K, std::uint64_t seed) {
  const auto indices = sample_indices(state, K, seed);
  std::vector<SpinVector> out;
  out.reserve(K);
  for (const auto index : indices) out.push_back(SpinVector::from_bits(index, state.n_qubits()));
  return out;
}

}  // namespace qprecond
