// SPDX-FileCopyrightText: 2026 The mppcal authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mppcal/crosstalk.hpp"
#include "mppcal/fitting.hpp"
#include "mppcal/simulator.hpp"
#include "test_support.hpp"

using namespace mppcal;

namespace {

RunConfig make_run(std::uint32_t m, double eta, double p, double dark, double mean,
                   std::uint64_t n, std::uint64_t seed,
                   CascadeMode mode = CascadeMode::paper_truncated,
                   LightStatistics stats = LightStatistics::coherent) {
  RunConfig run;
  run.detector = {m, eta, p, dark, mode};
  run.source = {mean, stats};
  run.n_triggers = n;
  run.seed = seed;
  return run;
}

struct Moments {
  double mean;
  double stderr_of_mean;
};

Moments moments(const RecordSet& r) {
  double s = 0.0, s2 = 0.0;
  for (auto c : r.counts()) {
    s += c;
    s2 += static_cast<double>(c) * c;
  }
  const double n = static_cast<double>(r.n_triggers());
  const double mean = s / n;
  const double var = (s2 / n - mean * mean) * n / (n - 1);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

TEST(SimulateTrigger, DarkAndSourceOff) {
  const auto off = make_run(400, 0.5, 0.2, 0.0, 0.0, 1, 3);
  const auto blind = make_run(400, 0.0, 0.2, 0.0, 3.0, 1, 3);
  for (std::uint64_t i = 0; i < 10000; ++i) {
    EXPECT_EQ(simulate_trigger(off, i), 0u);
    EXPECT_EQ(simulate_trigger(blind, i), 0u);
  }
}

TEST(SimulateTrigger, DeterministicPerIndex) {
  const auto run = make_run(100, 0.6, 0.2, 0.05, 1.0, 1, 42);
  TriggerSampler sampler(run);
  for (std::uint64_t i : {0ull, 17ull, 123456789ull}) EXPECT_EQ(sampler(i), simulate_trigger(run, i));
}

TEST(SimulateTrigger, DistinctPixelMeanMatchesCollisionOracle) {
  const std::uint32_t m = 400;
  const double mu = 0.5;
  const auto records = simulate_run(make_run(m, 1.0, 0.0, 0.0, mu, 1'000'000, 8));
  double expected = 0.0;
  for (unsigned n = 0; n < 60; ++n)
    expected += mppcal::testing::poisson_pmf(mu, n) * m * (1.0 - std::pow(1.0 - 1.0 / m, n));
  const auto mom = moments(records);
  EXPECT_NEAR(mom.mean, expected, 5.0 * mom.stderr_of_mean);
  EXPECT_LT(expected, mu);
}

TEST(CrosstalkCascade, TrivialCases) {
  CounterRng rng(1, 2);
  for (std::uint32_t n : {0u, 1u, 5u, 50u}) {
    EXPECT_EQ(crosstalk_cascade(n, 0.0, CascadeMode::paper_truncated, rng), n);
    EXPECT_EQ(crosstalk_cascade(n, 0.0, CascadeMode::geometric_cascade, rng), n);
  }
  EXPECT_EQ(crosstalk_cascade(0, 0.3, CascadeMode::paper_truncated, rng), 0u);
  EXPECT_EQ(crosstalk_cascade(0, 0.3, CascadeMode::geometric_cascade, rng), 0u);
}

TEST(CrosstalkCascade, PaperTruncatedBranchProbabilities) {
  std::mt19937_64 gen(5);
  const std::uint64_t draws = 10'000'000;
  std::uint64_t plus1 = 0, plus2 = 0, other = 0;
  for (std::uint64_t i = 0; i < draws; ++i) {
    const auto out = crosstalk_cascade(1, 0.1, CascadeMode::paper_truncated, gen);
    plus1 += out == 2;
    plus2 += out == 3;
    other += out != 1 && out != 2 && out != 3;
  }
  const double n = static_cast<double>(draws);
  EXPECT_NEAR(plus1 / n, 0.1, 5.0 * std::sqrt(0.1 * 0.9 / n));
  EXPECT_NEAR(plus2 / n, 0.01, 5.0 * std::sqrt(0.01 * 0.99 / n));
  EXPECT_EQ(other, 0u);
}

TEST(CrosstalkCascade, PaperTruncatedPreconditionThrows) {
  CounterRng rng(0, 0);
  // 6 * (0.16 + 0.0256) = 1.11 > 1
  EXPECT_THROW(crosstalk_cascade(6, 0.16, CascadeMode::paper_truncated, rng), Error);
  EXPECT_NO_THROW(crosstalk_cascade(5, 0.16, CascadeMode::paper_truncated, rng));
}

TEST(CrosstalkCascade, GeometricChainLengths) {
  std::mt19937_64 gen(11);
  const double p = 0.3;
  const std::uint64_t draws = 2'000'000;
  std::vector<std::uint64_t> hist(20, 0);
  for (std::uint64_t i = 0; i < draws; ++i)
    ++hist[crosstalk_cascade(1, p, CascadeMode::geometric_cascade, gen) - 1];
  for (unsigned k = 0; k < 5; ++k) {
    const double expected = std::pow(p, k) * (1.0 - p);
    EXPECT_NEAR(hist[k] / double(draws), expected, 5.0 * std::sqrt(expected / draws)) << k;
  }
  // Chains stop at max_chain_length secondaries.
  CounterRng rng(3, 3);
  for (int i = 0; i < 100000; ++i)
    EXPECT_LE(crosstalk_cascade(1, 0.49, CascadeMode::geometric_cascade, rng), 1u + max_chain_length);
}

TEST(SimulateRun, ZeroSourceGivesZeros) {
  const auto r = simulate_run(make_run(400, 1.0, 0.1, 0.0, 0.0, 4, 1));
  EXPECT_EQ(r.n_triggers(), 4u);
  for (auto c : r.counts()) EXPECT_EQ(c, 0u);
}

TEST(SimulateRun, DeterministicAcrossThreadCounts) {
  const auto run = make_run(400, 0.38, 0.16, 0.008, 0.8, 200'000, 7);
  const auto a = simulate_run(run, 1);
  const auto b = simulate_run(run, 1);
  const auto c = simulate_run(run, 4);
  const auto d = simulate_run(run, 7);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_EQ(a, d);
  auto other = run;
  other.seed = 8;
  EXPECT_NE(simulate_run(other), a);
}

TEST(SimulateRun, CountNeverExceedsPixels) {
  for (auto mode : {CascadeMode::paper_truncated, CascadeMode::geometric_cascade}) {
    const auto r = simulate_run(make_run(3, 1.0, 0.4, 1.0, 20.0, 50'000, 2, mode));
    EXPECT_LE(*std::max_element(r.counts().begin(), r.counts().end()), 3u);
  }
}

TEST(SimulateRun, SaturatedPaperTruncatedTriggersAreCounted) {
  // p = 0.4 admits at most one primary; larger multiplicities are rescaled.
  const auto res = simulate_run_detailed(make_run(1000, 1.0, 0.4, 0.0, 2.0, 10'000, 4));
  EXPECT_GT(res.saturated_triggers, 0u);
  const auto ok = simulate_run_detailed(make_run(1000, 1.0, 0.1, 0.0, 0.01, 10'000, 4));
  EXPECT_EQ(ok.saturated_triggers, 0u);
}

TEST(SimulateRun, InvalidConfigRejected) {
  EXPECT_THROW(simulate_run(make_run(0, 1.0, 0.1, 0.0, 1.0, 10, 1)), Error);
  EXPECT_THROW(simulate_run(make_run(10, 1.5, 0.1, 0.0, 1.0, 10, 1)), Error);
  EXPECT_THROW(simulate_run(make_run(10, 1.0, 0.5, 0.0, 1.0, 10, 1)), Error);
  EXPECT_THROW(simulate_run(make_run(10, 1.0, 0.1, -1.0, 1.0, 10, 1)), Error);
  EXPECT_THROW(simulate_run(make_run(10, 1.0, 0.1, 0.0, 1.0, 0, 1)), Error);
}

TEST(SimulateRun, CoherentLightWithoutCrosstalkHasUnitG2) {
  const auto records = simulate_run(make_run(1600, 1.0, 0.0, 0.0, 0.3, 2'000'000, 19));
  const auto pt = estimate_g2_point(records, std::nullopt, {200, 5});
  EXPECT_NEAR(pt.g2, 1.0, 3.0 * pt.sigma);
}

TEST(SimulateRun, ThermalLightHasG2OfTwo) {
  const auto records = simulate_run(
      make_run(100'000, 1.0, 0.0, 0.0, 0.3, 1'000'000, 23, CascadeMode::paper_truncated,
               LightStatistics::thermal_single_mode));
  const auto pt = estimate_g2_point(records, std::nullopt, {200, 6});
  EXPECT_NEAR(pt.g2, 2.0, 3.0 * pt.sigma);
}

// Empirical distribution of paper-truncated cascades against the transform.
TEST(SimulateRun, PaperTruncatedMatchesTransform) {
  std::mt19937_64 gen(77);
  const std::vector<double> clean_f = {0.40, 0.30, 0.18, 0.08, 0.04};
  std::discrete_distribution<std::uint32_t> draw(clean_f.begin(), clean_f.end());
  const std::uint64_t n = 2'000'000;
  for (double p : {0.05, 0.1, 0.2}) {
    std::vector<double> counts(8, 0.0);
    for (std::uint64_t i = 0; i < n; ++i)
      ++counts[crosstalk_cascade(draw(gen), p, CascadeMode::paper_truncated, gen)];
    const auto expected = apply_crosstalk(PhotocountDistribution(clean_f), CrosstalkParam(p));
    for (std::size_t k = 0; k < counts.size(); ++k) {
      const double e = expected[k];
      EXPECT_NEAR(counts[k] / n, e, 5.0 * std::sqrt(e * (1 - e) / n) + 1e-12) << "p=" << p << " k=" << k;
    }
  }
}

TEST(SimulateRun, SimulatorMatchesTransformOfPoisson) {
  // Huge pixel count: collisions are far below statistical noise.
  const double mu = 0.5, p = 0.05;
  const std::uint64_t n = 2'000'000;
  const auto dist = build_distribution(simulate_run(make_run(10'000'000, 1.0, p, 0.0, mu, n, 31)));
  const auto expected =
      apply_crosstalk(PhotocountDistribution(mppcal::testing::poisson_pmf_vector(mu, 15)), CrosstalkParam(p));
  for (std::size_t k = 0; k < 8; ++k) {
    const double e = expected[k];
    EXPECT_NEAR(dist[k], e, 5.0 * std::sqrt(e * (1 - e) / n) + 1e-12) << "k=" << k;
  }
}

TEST(SimulateRun, MeanInflation) {
  for (double p : {0.05, 0.1, 0.2}) {
    const auto base = moments(simulate_run(make_run(1600, 0.5, 0.0, 0.0, 0.4, 1'000'000, 41)));
    const auto ct = moments(simulate_run(make_run(1600, 0.5, p, 0.0, 0.4, 1'000'000, 43)));
    const double factor = 1.0 + p + 2.0 * p * p;
    const double sigma = std::hypot(ct.stderr_of_mean, factor * base.stderr_of_mean);
    EXPECT_NEAR(ct.mean, factor * base.mean, 5.0 * sigma) << "p=" << p;
  }
}

TEST(Sweep, SeedDerivation) {
  const auto base = make_run(400, 1.0, 0.1, 0.0, 0.0, 1000, 9);
  const std::vector<double> zero = {0.0};
  const auto z = sweep_intensities(base, zero);
  ASSERT_EQ(z.size(), 1u);
  for (auto c : z[0].result.records.counts()) EXPECT_EQ(c, 0u);

  const std::vector<double> twice = {0.1, 0.1};
  const auto t = sweep_intensities(base, twice);
  EXPECT_NE(t[0].run.seed, t[1].run.seed);
  EXPECT_NE(t[0].result.records, t[1].result.records);
  EXPECT_EQ(t[0].run.seed, derive_seed(9, 0));

  EXPECT_THROW(sweep_intensities(base, std::vector<double>{}), Error);
}
