#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qprecond/diagnostics.hpp"
#include "qprecond/generators.hpp"
#include "qprecond/io.hpp"
#include "qprecond/precond.hpp"
#include "qprecond/random.hpp"
#include "qprecond/solvers/brute_force.hpp"
#include "qprecond/solvers/local_search.hpp"

using namespace qprecond;

namespace {

Problem random_weighted(std::size_t n, double density, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() < density) edges.push_back({i, j, rng.uniform(-2.0, 2.0)});
    }
  }
  if (edges.empty()) edges.push_back({0, 1, 1.0});
  return Problem(n, std::move(edges));
}

SpinVector random_z(std::size_t n, Rng& rng) {
  std::vector<int> v(n);
  for (auto& x : v) x = rng.spin();
  return SpinVector(v);
}

PrecondOptions with(Engine engine, AngleSchedule angles) {
  PrecondOptions o;
  o.p = angles.p();
  o.engine = engine;
  o.angle_source = AngleSource::provided(std::move(angles));
  return o;
}

void expect_same_entries(const Problem& a, const Problem& b, double tol) {
  for (std::size_t i = 0; i < a.n_vars(); ++i) {
    for (std::size_t j = i + 1; j < a.n_vars(); ++j) EXPECT_NEAR(a.weight(i, j), b.weight(i, j), tol) << i << "," << j;
  }
}

}  // namespace

TEST(SkAngles, DefaultValues) {
  EXPECT_DOUBLE_EQ(sk_default_angles(4).gammas[0], 0.25);
  EXPECT_DOUBLE_EQ(sk_default_angles(4).betas[0], std::numbers::pi / 8.0);
  EXPECT_DOUBLE_EQ(sk_default_angles(64).gammas[0], 0.0625);
  EXPECT_DOUBLE_EQ(sk_default_angles(10000).gammas[0], 0.005);
}

TEST(SkAngles, Perturbation) {
  EXPECT_EQ(perturbed_sk_angles(64, 0.0, 1.3), sk_default_angles(64));
  const auto a = perturbed_sk_angles(64, 0.1, 0.0);
  EXPECT_NEAR(a.gammas[0], 0.075, 1e-15);
  EXPECT_NEAR(a.betas[0], std::numbers::pi / 8.0, 1e-15);
  const auto b = perturbed_sk_angles(64, 0.1, std::numbers::pi / 2.0);
  EXPECT_NEAR(b.gammas[0], 0.0625, 1e-15);
  EXPECT_NEAR(b.betas[0], std::numbers::pi / 8.0 + 0.1, 1e-15);
  EXPECT_THROW(perturbed_sk_angles(64, -0.1, 0.0), InvalidParameter);
}

TEST(Precondition, SkDenseViaAnalytic) {
  const auto sk = gen_sk(128, 1);
  PrecondOptions opts;
  PrecondReport report;
  const auto Z = precondition(sk, opts, &report);
  EXPECT_EQ(report.engine, Engine::AnalyticP1);
  EXPECT_EQ(Z.n_terms(), 128u * 127u / 2u);
  EXPECT_EQ(Z.kind(), ProblemKind::Preconditioned);
}

TEST(Precondition, RegularSparseTermCount) {
  const auto g = gen_random_regular(256, 3, 2);
  PrecondReport report;
  const auto Z = precondition(g, with(Engine::Auto, regular3_angles(1)), &report);
  EXPECT_EQ(report.engine, Engine::Lightcone);
  EXPECT_NEAR(static_cast<double>(Z.n_terms()) / 256.0, 4.5, 0.1);
}

TEST(Precondition, EnginesAgreeAtP1) {
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const auto g = t % 2 == 0 ? gen_random_regular(12, 3, t) : random_weighted(12, 0.3, t);
    const AngleSchedule angles{{rng.uniform(-2.0, 2.0)}, {rng.uniform(0.0, 2.0)}};
    const auto a = precondition(g, with(Engine::AnalyticP1, angles));
    const auto l = precondition(g, with(Engine::Lightcone, angles));
    const auto f = precondition(g, with(Engine::FullStateVector, angles));
    expect_same_entries(a, f, 1e-10);
    expect_same_entries(l, f, 1e-10);
  }
}

TEST(Precondition, LightconeAgreesWithFullAtP2) {
  const auto g = gen_random_regular(14, 3, 4);
  const AngleSchedule angles{{0.4, 0.9}, {0.5, 0.3}};
  expect_same_entries(precondition(g, with(Engine::Lightcone, angles)),
                      precondition(g, with(Engine::FullStateVector, angles)), 1e-10);
}

TEST(Precondition, ConventionIsNegatedCorrelation) {
  const auto g = random_weighted(8, 0.5, 5);
  const AngleSchedule angles{{0.7}, {0.3}};
  const auto Z = precondition(g, with(Engine::FullStateVector, angles));
  const auto state = apply_qaoa(g, angles);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_FALSE(Z.has_edge(i, i));
    for (std::size_t j = i + 1; j < 8; ++j) {
      const double c = correlation(state, i, j);
      if (std::abs(c) >= kSparsityThreshold) EXPECT_NEAR(Z.weight(i, j), -c, 1e-12);
    }
  }
}

TEST(Precondition, AutoEngineSelection) {
  PrecondOptions opts;
  opts.p = 2;
  opts.angle_source = AngleSource::provided({{0.1, 0.2}, {0.3, 0.4}});
  EXPECT_EQ(select_engine(gen_sk(10, 1), opts), Engine::FullStateVector);
  EXPECT_EQ(select_engine(gen_random_regular(100, 3, 1), opts), Engine::Lightcone);
  EXPECT_THROW(select_engine(gen_sk(40, 1), opts), CapacityError);
  opts.p = 1;
  opts.angle_source = AngleSource::sk_default();
  EXPECT_EQ(select_engine(gen_sk(40, 1), opts), Engine::AnalyticP1);
  opts.sampling = SamplingSpec{100, 1};
  EXPECT_EQ(select_engine(gen_sk(10, 1), opts), Engine::FullStateVector);
  EXPECT_THROW(select_engine(gen_sk(40, 1), opts), CapacityError);
}

TEST(Precondition, OptionValidation) {
  PrecondOptions opts;
  opts.engine = Engine::AnalyticP1;
  opts.p = 2;
  opts.angle_source = AngleSource::provided({{0.1, 0.2}, {0.3, 0.4}});
  EXPECT_THROW(opts.validate(), InvalidParameter);
  PrecondOptions noise;
  noise.noise_F = 1.5;
  EXPECT_THROW(noise.validate(), InvalidParameter);
  PrecondOptions zero_k;
  zero_k.sampling = SamplingSpec{0, 1};
  EXPECT_THROW(zero_k.validate(), InvalidParameter);
  PrecondOptions sk_p2;
  sk_p2.p = 2;
  EXPECT_THROW(sk_p2.validate(), InvalidParameter);
  PrecondOptions mismatch = with(Engine::Auto, {{0.1}, {0.2}});
  mismatch.p = 2;
  EXPECT_THROW(mismatch.validate(), InvalidParameter);
  PrecondOptions sampled_analytic = with(Engine::AnalyticP1, {{0.1}, {0.2}});
  sampled_analytic.sampling = SamplingSpec{10, 1};
  EXPECT_THROW(precondition(gen_sk(6, 1), sampled_analytic), InvalidParameter);
  EXPECT_THROW(precondition(gen_sk(30, 1), with(Engine::FullStateVector, {{0.1}, {0.2}})), CapacityError);
}

TEST(Precondition, ProvenanceSurvivesRoundTrip) {
  auto opts = with(Engine::FullStateVector, {{0.3}, {0.2}});
  opts.sampling = SamplingSpec{500, 9};
  opts.noise_F = 0.5;
  const auto Z = precondition(gen_random_regular(10, 3, 6), opts);
  std::stringstream buffer;
  write_problem(Z, buffer);
  const auto back = read_problem(buffer);
  EXPECT_EQ(back.kind(), ProblemKind::Preconditioned);
  EXPECT_EQ(back.meta("p"), "1");
  EXPECT_EQ(back.meta("engine"), "full");
  EXPECT_EQ(back.meta("K"), "500");
  EXPECT_EQ(back.meta("F"), "0.5");
  EXPECT_EQ(back.meta("gammas"), "0.3");
  EXPECT_EQ(back.n_terms(), Z.n_terms());
}

TEST(Precondition, OptimizedAnglesPath) {
  PrecondOptions opts;
  opts.angle_source = AngleSource::optimize(3, 1);
  PrecondReport report;
  const auto g = gen_random_regular(10, 3, 7);
  precondition(g, opts, &report);
  const auto best = optimize_angles(g, 1, 3, 1);
  EXPECT_EQ(report.angles, best.angles);
}

TEST(Ideal, ThreeSpinsAllUp) {
  const auto Z = ideal_preconditioner(SpinVector::all_up(3));
  EXPECT_EQ(Z.kind(), ProblemKind::IdealInfiniteDepth);
  ASSERT_EQ(Z.n_terms(), 3u);
  for (const auto& e : Z.edges()) EXPECT_EQ(e.w, -1.0);
  EXPECT_EQ(ordered_pair_sum(Z, SpinVector::all_up(3)), -6.0);
  EXPECT_EQ(evaluate_objective(Z, SpinVector::all_up(3)), -3.0);
}

TEST(Ideal, GreedyAlwaysReachesOptimum) {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto z_opt = random_z(16, rng);
    const auto Z = ideal_preconditioner(z_opt);
    EXPECT_EQ(ordered_pair_sum(Z, z_opt), -16.0 * 15.0);
    EXPECT_EQ(frustration_index(Z, z_opt), 0.0);
    for (int s = 0; s < 100; ++s) {
      const auto z = greedy_local_descent(Z, random_z(16, rng));
      EXPECT_TRUE(z == z_opt || z == -z_opt);
    }
  }
}

TEST(Depolarizing, LinearRescaling) {
  const auto Z = precondition(gen_random_regular(12, 3, 9), with(Engine::FullStateVector, regular3_angles(1)));
  const auto one = apply_depolarizing(Z, 1.0);
  const auto zero = apply_depolarizing(Z, 0.0);
  const auto half = apply_depolarizing(Z, 0.5);
  ASSERT_EQ(zero.n_terms(), Z.n_terms());
  for (std::size_t k = 0; k < Z.n_terms(); ++k) {
    EXPECT_EQ(one.edges()[k], Z.edges()[k]);
    EXPECT_EQ(zero.edges()[k].w, 0.0);
    EXPECT_EQ(half.edges()[k].w, Z.edges()[k].w / 2.0);
  }
  EXPECT_THROW(apply_depolarizing(Z, -0.1), InvalidParameter);
  EXPECT_THROW(apply_depolarizing(Z, 1.1), InvalidParameter);
}

TEST(Depolarizing, ArgminInvariant) {
  const auto Z = precondition(random_weighted(12, 0.4, 10), with(Engine::FullStateVector, {{0.8}, {0.35}}));
  const auto noisy = apply_depolarizing(Z, 0.3);
  const auto a = brute_force(Z).z;
  const auto b = brute_force(noisy).z;
  EXPECT_TRUE(a == b || a == -b);
  for (std::size_t k = 0; k < Z.n_terms(); ++k) {
    EXPECT_EQ(std::signbit(noisy.edges()[k].w), std::signbit(Z.edges()[k].w));
  }
}

TEST(Samples, EstimatorExamples) {
  const std::vector<SpinVector> same(5, SpinVector({1, -1, 1}));
  EXPECT_EQ(estimate_from_samples(same, 0, 1), -1.0);
  EXPECT_EQ(estimate_from_samples(same, 0, 2), 1.0);
  const std::vector<SpinVector> two = {SpinVector({1, 1}), SpinVector({1, -1})};
  EXPECT_EQ(estimate_from_samples(two, 0, 1), 0.0);
  EXPECT_THROW(estimate_from_samples({}, 0, 1), InvalidParameter);
}

TEST(Samples, FullEngineConvergesAsInverseSqrtK) {
  const auto g = gen_random_regular(12, 3, 11);
  const auto exact = precondition(g, with(Engine::FullStateVector, regular3_angles(1)));
  std::vector<double> rms;
  for (const std::size_t K : {100u, 1000u, 10000u}) {
    double sq = 0.0;
    std::size_t count = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto opts = with(Engine::FullStateVector, regular3_angles(1));
      opts.sampling = SamplingSpec{K, seed};
      const auto Z = precondition(g, opts);
      for (const auto& e : exact.edges()) {
        const double d = Z.weight(e.i, e.j) - e.w;
        sq += d * d;
        ++count;
      }
    }
    rms.push_back(std::sqrt(sq / static_cast<double>(count)));
  }
  EXPECT_GT(rms[0], rms[1]);
  EXPECT_GT(rms[1], rms[2]);
  EXPECT_NEAR(std::log(rms[2] / rms[0]) / std::log(100.0), -0.5, 0.1);
}

TEST(Samples, NoiseAppliedAfterSampling) {
  const auto g = gen_random_regular(10, 3, 12);
  auto sampled = with(Engine::FullStateVector, regular3_angles(1));
  sampled.sampling = SamplingSpec{300, 4};
  auto noisy = sampled;
  noisy.noise_F = 0.25;
  const auto a = precondition(g, sampled);
  const auto b = precondition(g, noisy);
  ASSERT_EQ(a.n_terms(), b.n_terms());
  for (std::size_t k = 0; k < a.n_terms(); ++k) EXPECT_EQ(b.edges()[k].w, 0.25 * a.edges()[k].w);
}
