#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "qprecond/error.hpp"
#include "qprecond/problem.hpp"

namespace qprecond {

/// Cut value for max-cut kinds, Ising objective otherwise.
inline double quality_value(const Problem& problem, const SpinVector& z) {
  return is_maxcut_kind(problem.kind()) ? evaluate_cut(problem, z) : evaluate_objective(problem, z);
}

/// alpha = quality(z) / c_opt, always on the original problem.
inline double approximation_ratio(const Problem& original, const SpinVector& z, double c_opt) {
  if (c_opt == 0.0) throw InvalidParameter("approximation ratio undefined for c_opt = 0");
  return quality_value(original, z) / c_opt;
}

/// f = 1/2 + (sum_ij W_ij z_i z_j) / (2 sum_ij |W_ij|), both sums over ordered pairs.
inline double frustration_index(const Problem& problem, const SpinVector& z_opt) {
  check_dimensions(problem, z_opt);
  double abs_total = 0.0;
  for (const auto& e : problem.edges()) abs_total += std::abs(e.w);
  if (abs_total == 0.0) throw InvalidParameter("frustration index needs at least one nonzero coupling");
  return 0.5 + ordered_pair_sum(problem, z_opt) / (2.0 * 2.0 * abs_total);
}

inline constexpr std::size_t kGapDenseCap = 2048;

/// Which matrix the gap is measured on.
/// Correlation: I - W, i.e. I plus the correlation matrix when W = Z^(p); the ideal
/// preconditioner maps to z z^T and scores exactly rank-1.
/// Problem: I + W taken literally.
enum class GapForm { Correlation, Problem };

/// Dense symmetric matrix I + sign * W.
inline Eigen::MatrixXd shifted_matrix(const Problem& problem, double sign) {
  const auto n = static_cast<Eigen::Index>(problem.n_vars());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (const auto& e : problem.edges()) {
    m(static_cast<Eigen::Index>(e.i), static_cast<Eigen::Index>(e.j)) += sign * e.w;
    m(static_cast<Eigen::Index>(e.j), static_cast<Eigen::Index>(e.i)) += sign * e.w;
  }
  return m;
}

/// Singular values in descending order.
inline std::vector<double> singular_values_desc(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("eigenvalue decomposition did not converge");
  std::vector<double> sigma(static_cast<std::size_t>(symmetric.rows()));
  for (std::size_t k = 0; k < sigma.size(); ++k) sigma[k] = std::abs(solver.eigenvalues()(static_cast<Eigen::Index>(k)));
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return sigma;
}

/// Delta = (sigma_2 - sigma_1) / (sigma_N - sigma_1) with sigma_1 >= ... >= sigma_N.
/// Returns 0 when all singular values coincide (within 1e-12 relative).
inline double normalized_gap(const Problem& problem, GapForm form = GapForm::Correlation) {
  if (problem.n_vars() < 2) throw InvalidParameter("normalized gap needs N >= 2");
  if (problem.n_vars() > kGapDenseCap) {
    throw CapacityError("normalized gap uses a dense decomposition, limited to N <= " + std::to_string(kGapDenseCap));
  }
  const auto sigma = singular_values_desc(shifted_matrix(problem, form == GapForm::Correlation ? -1.0 : 1.0));
  const double spread = sigma.back() - sigma.front();
  if (std::abs(spread) <= 1e-12 * std::max(1.0, sigma.front())) return 0.0;
  return (sigma[1] - sigma[0]) / spread;
}

/// q^2 = ((1/N) sum_i z_opt,i z_i)^2.
inline double overlap(const SpinVector& z, const SpinVector& z_opt) {
  if (z.size() != z_opt.size()) {
    throw DimensionError("overlap of vectors with lengths " + std::to_string(z.size()) + " and " +
                         std::to_string(z_opt.size()));
  }
  if (z.size() == 0) throw DimensionError("overlap of empty vectors");
  long long dot = 0;
  for (std::size_t k = 0; k < z.size(); ++k) dot += z[k] * z_opt[k];
  const double q = static_cast<double>(dot) / static_cast<double>(z.size());
  return q * q;
}

/// Stored entries with |w| at or above the sparsity threshold.
inline std::size_t count_nonzero_terms(const Problem& problem) {
  return static_cast<std::size_t>(std::count_if(problem.edges().begin(), problem.edges().end(),
                                                [](const Edge& e) { return std::abs(e.w) >= kSparsityThreshold; }));
}

using Nanoseconds = std::chrono::duration<double, std::nano>;

/// Gate, readout and reset durations in nanoseconds. The fixed per-job overhead is affine:
/// overhead = base + per_shot K + per_qubit N + per_layer p.
struct HardwareTimingParams {
  double t_2q = 80.0;
  double t_1q = 40.0;
  double t_mes = 1000.0;
  double t_res = 200000.0;
  double overhead_base = 0.0;
  double overhead_per_shot = 0.0;
  double overhead_per_qubit = 0.0;
  double overhead_per_layer = 0.0;

  void validate() const {
    for (const double v : {t_2q, t_1q, t_mes, t_res, overhead_base, overhead_per_shot, overhead_per_qubit,
                           overhead_per_layer}) {
      if (!(v >= 0.0)) throw InvalidParameter("hardware timing parameters must be non-negative");
    }
  }
};

/// t_circ = 3 N p t_2q + (2 (2N + 1) p + 1) t_1q + t_mes + t_res.
inline Nanoseconds circuit_time(std::size_t n_qubits, std::size_t p, const HardwareTimingParams& params = {}) {
  params.validate();
  if (n_qubits == 0 || p == 0) throw InvalidParameter("circuit time needs N >= 1 and p >= 1");
  const auto N = static_cast<double>(n_qubits);
  const auto P = static_cast<double>(p);
  return Nanoseconds(3.0 * N * P * params.t_2q + (2.0 * (2.0 * N + 1.0) * P + 1.0) * params.t_1q + params.t_mes +
                     params.t_res);
}

/// t(K) = overhead + K t_circ.
inline Nanoseconds sampling_time(std::size_t K, std::size_t n_qubits, std::size_t p,
                                 const HardwareTimingParams& params = {}) {
  if (K == 0) throw InvalidParameter("sampling time needs K >= 1");
  const auto overhead = params.overhead_base + params.overhead_per_shot * static_cast<double>(K) +
                        params.overhead_per_qubit * static_cast<double>(n_qubits) +
                        params.overhead_per_layer * static_cast<double>(p);
  return Nanoseconds(overhead) + static_cast<double>(K) * circuit_time(n_qubits, p, params);
}

struct TwoQubitGateCount {
  double n = 0.0;
};

/// F = f^n_2Q for an explicit two-qubit gate count.
inline double fidelity_model(double f, TwoQubitGateCount gates) {
  if (!(f > 0.0 && f <= 1.0)) throw InvalidParameter("gate fidelity f must lie in (0, 1]");
  if (!(gates.n >= 0.0)) throw InvalidParameter("gate count must be non-negative");
  return std::pow(f, gates.n);
}

/// F = f^(3 p N^2 / 2), the naive swap-network gate count.
inline double fidelity_model(double f, std::size_t n_qubits, std::size_t p) {
  const auto N = static_cast<double>(n_qubits);
  return fidelity_model(f, TwoQubitGateCount{1.5 * static_cast<double>(p) * N * N});
}

struct RuntimeRow {
  double n_terms = 0.0;
  double n_iter = 0.0;
  double seconds = 0.0;
};

/// Least-squares fit of t/n = A n_iter + B.
struct RuntimeFit {
  double a_slope = 0.0;
  double b_intercept = 0.0;
  double r_squared = 0.0;
  double a_stderr = 0.0;
  double b_stderr = 0.0;
  std::size_t n_rows = 0;
};

inline RuntimeFit fit_runtime_model(const std::vector<RuntimeRow>& rows) {
  if (rows.size() < 2) throw InvalidParameter("runtime fit needs at least two rows");
  const auto n = static_cast<double>(rows.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& r : rows) {
    if (!(r.n_terms > 0.0)) throw InvalidParameter("runtime rows need n_terms > 0");
    mean_x += r.n_iter;
    mean_y += r.seconds / r.n_terms;
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& r : rows) {
    const double dx = r.n_iter - mean_x;
    const double dy = r.seconds / r.n_terms - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw InvalidParameter("runtime fit needs at least two distinct n_iter values");
  RuntimeFit fit;
  fit.n_rows = rows.size();
  fit.a_slope = sxy / sxx;
  fit.b_intercept = mean_y - fit.a_slope * mean_x;
  double ss_res = 0.0;
  for (const auto& r : rows) {
    const double resid = r.seconds / r.n_terms - (fit.a_slope * r.n_iter + fit.b_intercept);
    ss_res += resid * resid;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  if (rows.size() > 2) {
    const double s2 = ss_res / (n - 2.0);
    fit.a_stderr = std::sqrt(s2 / sxx);
    fit.b_stderr = std::sqrt(s2 * (1.0 / n + mean_x * mean_x / sxx));
  }
  return fit;
}

}  // namespace qprecond
