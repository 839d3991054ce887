#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <sstream>

#include "qprecond/diagnostics.hpp"
#include "qprecond/generators.hpp"
#include "qprecond/precond.hpp"
#include "qprecond/random.hpp"
#include "qprecond/solvers/anneal.hpp"
#include "qprecond/solvers/brute_force.hpp"
#include "qprecond/solvers/burer_monteiro.hpp"
#include "qprecond/solvers/local_search.hpp"
#include "qprecond/solvers/schedule.hpp"

using namespace qprecond;

namespace {

Problem chain(std::size_t n, double w) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, w});
  return Problem(n, std::move(edges));
}

Problem triangle() { return Problem(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}); }

bool aligned(const SpinVector& z) {
  for (std::size_t i = 1; i < z.size(); ++i) {
    if (z[i] != z[0]) return false;
  }
  return true;
}

}  // namespace

TEST(Schedule, RegularUnitWeights) {
  for (const std::size_t n : {16u, 100u}) {
    const auto s = temperature_schedule(gen_random_regular(n, 3, 1), 10);
    EXPECT_NEAR(s.t_hot, 6.0 / std::log(2.0), 1e-12);
    EXPECT_NEAR(s.t_cold, 2.0 / std::log(100.0 * n), 1e-12);
    EXPECT_EQ(s.temps.size(), 10u);
    EXPECT_NEAR(s.temps.back(), s.t_cold, 1e-12);
  }
}

TEST(Schedule, SingleEdge) {
  const auto s = temperature_schedule(Problem(2, {{0, 1, 2.0}}), 5);
  EXPECT_NEAR(s.t_hot, 4.0 / std::log(2.0), 1e-12);
  EXPECT_NEAR(s.t_cold, 4.0 / std::log(200.0), 1e-12);
}

TEST(Schedule, SingleSweepIsCold) {
  const auto s = temperature_schedule(gen_sk(10, 2), 1);
  ASSERT_EQ(s.temps.size(), 1u);
  EXPECT_NEAR(s.temps[0], s.t_cold, 1e-12);
}

TEST(Schedule, GeometricAndMonotone) {
  const auto s = temperature_schedule(gen_sk(20, 3), 50);
  for (std::size_t l = 1; l < s.temps.size(); ++l) EXPECT_LE(s.temps[l], s.temps[l - 1]);
  const double ratio = s.temps[1] / s.temps[0];
  for (std::size_t l = 1; l + 1 < s.temps.size(); ++l) EXPECT_NEAR(s.temps[l + 1] / s.temps[l], ratio, 1e-10);
  EXPECT_NEAR(std::log(s.temps[0]), std::log(s.t_hot) + (std::log(s.t_cold) - std::log(s.t_hot)) / 50.0, 1e-12);
}

TEST(Schedule, Errors) {
  EXPECT_THROW(temperature_schedule(chain(4, 1.0), 0), InvalidParameter);
  EXPECT_THROW(temperature_schedule(Problem(3, {}), 5), InvalidParameter);
}

TEST(Anneal, FerromagneticChain) {
  const auto g = chain(10, -1.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto t = simulated_annealing(g, 50, seed);
    EXPECT_TRUE(aligned(t.best_z));
    EXPECT_EQ(t.best_objective, -9.0);
  }
}

TEST(Anneal, IdealPreconditionedReachesOptimum) {
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    std::vector<int> v(16);
    for (auto& x : v) x = rng.spin();
    const SpinVector z_opt(v);
    const auto trace = simulated_annealing(ideal_preconditioner(z_opt), 20, t);
    EXPECT_TRUE(trace.best_z == z_opt || trace.best_z == -z_opt);
  }
}

TEST(Anneal, TraceInvariants) {
  const auto g = gen_sk(40, 5);
  const auto t = simulated_annealing(g, 200, 7, {1, 5, 50, 200, 50});
  ASSERT_EQ(t.checkpoints.size(), 4u);
  EXPECT_DOUBLE_EQ(t.best_objective, evaluate_objective(g, t.best_z));
  for (std::size_t k = 0; k < t.checkpoints.size(); ++k) {
    EXPECT_DOUBLE_EQ(t.checkpoints[k].objective, evaluate_objective(g, t.checkpoints[k].z));
    if (k > 0) {
      EXPECT_LE(t.checkpoints[k].objective, t.checkpoints[k - 1].objective);
      EXPECT_GE(t.checkpoints[k].elapsed_s, t.checkpoints[k - 1].elapsed_s);
    }
  }
  EXPECT_DOUBLE_EQ(t.checkpoints.back().objective, t.best_objective);
  EXPECT_THROW(simulated_annealing(g, 10, 1, {11}), InvalidParameter);
  EXPECT_THROW(simulated_annealing(g, 10, 1, {0}), InvalidParameter);
  EXPECT_THROW(simulated_annealing(g, 0, 1), InvalidParameter);
}

TEST(Anneal, Deterministic) {
  const auto g = gen_sk(30, 6);
  const auto a = simulated_annealing(g, 100, 11);
  const auto b = simulated_annealing(g, 100, 11);
  EXPECT_EQ(a.best_z, b.best_z);
  EXPECT_EQ(a.best_objective, b.best_objective);
  const auto c = burer_monteiro(g, 20, 11);
  const auto d = burer_monteiro(g, 20, 11);
  EXPECT_EQ(c.best_z, d.best_z);
}

TEST(Anneal, IncrementalDeltaMatchesRecomputation) {
  const auto g = gen_sk(25, 7);
  Rng rng(8);
  MetropolisState state(g, random_spins(25, rng));
  std::size_t accepted = 0;
  for (int step = 0; step < 5000; ++step) {
    const auto k = rng.below(25);
    const double before = evaluate_objective(g, state.spins());
    const double predicted = state.delta(k);
    if (state.propose(k, 3.0, rng)) {
      ++accepted;
      const double after = evaluate_objective(g, state.spins());
      EXPECT_NEAR(after - before, predicted, 1e-9);
      EXPECT_NEAR(state.objective(), after, 1e-9);
    }
  }
  EXPECT_GT(accepted, 100u);
}

TEST(Anneal, DetailedBalanceOnTwoSpins) {
  const Problem g(2, {{0, 1, 1.0}});
  const double T = 1.0;
  Rng rng(9);
  MetropolisState state(g, SpinVector({1, 1}));
  std::array<double, 4> counts{};
  const int samples = 20000;
  for (int s = 0; s < samples; ++s) {
    for (int k = 0; k < 20; ++k) state.sweep(T, rng);
    const auto& z = state.spins();
    counts[(z[0] < 0 ? 1 : 0) + (z[1] < 0 ? 2 : 0)] += 1.0;
  }
  const double low = std::exp(1.0 / T);
  const double high = std::exp(-1.0 / T);
  const double total = 2.0 * low + 2.0 * high;
  const std::array<double, 4> p = {high / total, low / total, low / total, high / total};
  for (int c = 0; c < 4; ++c) {
    const double sigma = std::sqrt(samples * p[c] * (1.0 - p[c]));
    EXPECT_NEAR(counts[c], samples * p[c], 3.0 * sigma) << "state " << c;
  }
}

TEST(Anneal, AgreesWithBruteForceOnSk16) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = gen_sk(16, 100 + seed);
    const auto exact = brute_force(g);
    EXPECT_NEAR(simulated_annealing(g, 2000, seed).best_objective, exact.objective, 1e-9) << "instance " << seed;
    EXPECT_NEAR(burer_monteiro(g, 200, seed).best_objective, exact.objective, 1e-9) << "instance " << seed;
  }
}

TEST(BurerMonteiro, Triangle) {
  const auto t = burer_monteiro(triangle(), 10, 1);
  EXPECT_EQ(t.best_objective, -1.0);
  EXPECT_EQ(evaluate_cut(triangle(), t.best_z), 2.0);
}

TEST(BurerMonteiro, RegularSixteenMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = gen_random_regular(16, 3, 200 + seed);
    EXPECT_EQ(burer_monteiro(g, 50, seed).best_objective, brute_force(g).objective) << "instance " << seed;
  }
}

TEST(BurerMonteiro, IdealPreconditionedQuickly) {
  Rng rng(10);
  std::vector<int> v(16);
  for (auto& x : v) x = rng.spin();
  const SpinVector z_opt(v);
  const auto t = burer_monteiro(ideal_preconditioner(z_opt), 3, 1);
  EXPECT_TRUE(t.best_z == z_opt || t.best_z == -z_opt);
}

TEST(BurerMonteiro, RelaxedObjectiveNeverIncreases) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = seed % 2 == 0 ? gen_sk(50, seed) : gen_random_regular(60, 3, seed);
    Rng rng(seed);
    BurerMonteiroState state(g, rng);
    EXPECT_EQ(state.rank(), burer_monteiro_rank(g.n_vars()));
    double previous = state.relaxed_objective();
    for (int pass = 0; pass < 30; ++pass) {
      state.coordinate_pass(rng);
      const double current = state.relaxed_objective();
      EXPECT_LE(current, previous + 1e-9);
      previous = current;
    }
  }
}

TEST(BurerMonteiro, RankRule) {
  EXPECT_EQ(burer_monteiro_rank(2), 2u);
  EXPECT_EQ(burer_monteiro_rank(8), 4u);
  EXPECT_EQ(burer_monteiro_rank(9), 5u);
  EXPECT_EQ(burer_monteiro_rank(10000), 20u);
  EXPECT_THROW(burer_monteiro(triangle(), 0, 1), InvalidParameter);
}

TEST(Greedy, SingleEdge) {
  const Problem g(2, {{0, 1, 1.0}});
  const auto z = greedy_local_descent(g, SpinVector({1, 1}));
  EXPECT_NE(z[0], z[1]);
  EXPECT_TRUE(is_one_opt(g, z));
}

TEST(Greedy, MonotoneAndOneOpt) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto g = gen_sk(30, t);
    const auto z0 = random_spins(30, rng);
    const auto z = greedy_local_descent(g, z0);
    EXPECT_LE(evaluate_objective(g, z), evaluate_objective(g, z0));
    for (std::size_t k = 0; k < 30; ++k) {
      auto y = z;
      y.flip(k);
      EXPECT_GE(evaluate_objective(g, y), evaluate_objective(g, z) - 1e-9);
    }
  }
  EXPECT_THROW(greedy_local_descent(triangle(), SpinVector({1, 1})), DimensionError);
}

TEST(BruteForce, Examples) {
  const auto t = brute_force(triangle());
  EXPECT_EQ(t.objective, -1.0);
  EXPECT_EQ(evaluate_cut(triangle(), t.z), 2.0);
  const auto e = brute_force(Problem(2, {{0, 1, -3.0}}));
  EXPECT_EQ(e.objective, -3.0);
  EXPECT_EQ(e.z[0], e.z[1]);
  EXPECT_EQ(e.z[0], 1);
  EXPECT_THROW(brute_force(gen_sk(27, 1)), CapacityError);
}

TEST(BruteForce, MatchesNaiveEnumeration) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = gen_sk(10, seed);
    double best = 1e300;
    for (std::uint32_t mask = 0; mask < (1u << 10); ++mask) {
      std::vector<int> v(10);
      for (int i = 0; i < 10; ++i) v[i] = (mask >> i) & 1u ? -1 : 1;
      best = std::min(best, evaluate_objective(g, SpinVector(v)));
    }
    const auto r = brute_force(g);
    EXPECT_NEAR(r.objective, best, 1e-12);
    EXPECT_NEAR(evaluate_objective(g, r.z), r.objective, 1e-12);
  }
}

TEST(Trace, CsvRows) {
  const auto t = simulated_annealing(chain(5, -1.0), 4, 1, {2, 4});
  std::ostringstream out;
  write_trace_csv(t, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n_iter,objective,elapsed_s");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("2,", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line.rfind("4,", 0), 0u);
}
