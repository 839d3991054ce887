#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qprecond/error.hpp"
#include "qprecond/problem.hpp"

namespace qprecond {

/// Closed-form single-layer correlations. Only the rows of i and j are touched, so one pair
/// costs O(deg i + deg j); missing couplings contribute cos(0) = 1 to every product.
class AnalyticP1 {
 public:
  AnalyticP1(const Problem& problem, double gamma, double beta)
      : problem_(problem),
        gamma_(gamma),
        beta_(beta),
        w_j_(problem.n_vars(), 0.0),
        stamp_j_(problem.n_vars(), 0),
        stamp_i_(problem.n_vars(), 0) {}

  double correlation(std::size_t i, std::size_t j) {
    problem_.check_index(i);
    problem_.check_index(j);
    if (i == j) throw InvalidParameter("closed-form correlation needs i != j");
    ++epoch_;
    double w_ij = 0.0;
    for (const auto& nb : problem_.neighbors(j)) {
      if (nb.index == i) {
        w_ij = nb.weight;
        continue;
      }
      w_j_[nb.index] = nb.weight;
      stamp_j_[nb.index] = epoch_;
    }
    double prod_i = 1.0;
    double prod_j = 1.0;
    double prod_sum = 1.0;
    double prod_diff = 1.0;
    for (const auto& nb : problem_.neighbors(i)) {
      if (nb.index == j) continue;
      stamp_i_[nb.index] = epoch_;
      const double w_ik = nb.weight;
      const double w_jk = stamp_j_[nb.index] == epoch_ ? w_j_[nb.index] : 0.0;
      prod_i *= std::cos(gamma_ * w_ik);
      prod_sum *= std::cos(gamma_ * (w_ik + w_jk));
      prod_diff *= std::cos(gamma_ * (w_jk - w_ik));
    }
    for (const auto& nb : problem_.neighbors(j)) {
      if (nb.index == i) continue;
      const double c = std::cos(gamma_ * nb.weight);
      prod_j *= c;
      if (stamp_i_[nb.index] != epoch_) {
        prod_sum *= c;
        prod_diff *= c;
      }
    }
    const double s2b = std::sin(2.0 * beta_);
    const double c2b = std::cos(2.0 * beta_);
    return -s2b * c2b * std::sin(gamma_ * w_ij) * (prod_i + prod_j) - 0.5 * s2b * s2b * (prod_sum - prod_diff);
  }

 private:
  const Problem& problem_;
  double gamma_;
  double beta_;
  std::vector<double> w_j_;
  std::vector<std::size_t> stamp_j_;
  std::vector<std::size_t> stamp_i_;
  std::size_t epoch_ = 0;
};

/// <Z_i Z_j> after one QAOA layer with angles (gamma, beta).
inline double analytic_p1_correlation(const Problem& problem, double gamma, double beta, std::size_t i,
                                      std::size_t j) {
  AnalyticP1 engine(problem, gamma, beta);
  return engine.correlation(i, j);
}

/// <C> after one layer: sum over stored pairs of W_ij <Z_i Z_j>.
inline double analytic_p1_expectation(const Problem& problem, double gamma, double beta) {
  AnalyticP1 engine(problem, gamma, beta);
  double total = 0.0;
  for (const auto& e : problem.edges()) total += e.w * engine.correlation(e.i, e.j);
  return total;
}

}  // namespace qprecond
