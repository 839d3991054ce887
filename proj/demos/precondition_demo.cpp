// Preconditions a random 3-regular max-cut instance at p = 1 and compares short
// simulated-annealing runs on the original and preconditioned inputs.

#include <iomanip>
#include <iostream>

#include "qprecond/qprecond.hpp"

int main() {
  using namespace qprecond;
  const std::size_t n = 256;
  const Problem W = gen_random_regular(n, 3, 2024);

  PrecondOptions opts;
  opts.p = 1;
  opts.angle_source = AngleSource::provided(regular3_angles(1));
  PrecondReport report;
  const Problem Z = precondition(W, opts, &report);
  std::cout << "N = " << n << ", original terms " << W.n_terms() << ", preconditioned terms " << Z.n_terms()
            << " (engine " << to_string(report.engine) << ")\n";

  double c_opt = 0.0;
  for (std::uint64_t r = 0; r < 4; ++r) {
    c_opt = std::max(c_opt, evaluate_cut(W, simulated_annealing(W, 3000, r).best_z));
  }
  std::cout << "reference cut " << c_opt << "\n\nsweeps  alpha(original)  alpha(preconditioned)\n";
  for (const std::size_t sweeps : {1, 3, 10, 30, 100}) {
    double a_orig = 0.0;
    double a_pre = 0.0;
    const int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
      a_orig += approximation_ratio(W, simulated_annealing(W, sweeps, s).best_z, c_opt);
      a_pre += approximation_ratio(W, simulated_annealing(Z, sweeps, s).best_z, c_opt);
    }
    std::cout << std::setw(6) << sweeps << std::fixed << std::setprecision(4) << std::setw(17) << a_orig / seeds
              << std::setw(23) << a_pre / seeds << '\n';
  }
  return 0;
}
