#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "rjpois/dists.hpp"
#include "support/oracles.hpp"

using namespace rjpois;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> draw(int n, const std::function<double()>& f) {
  std::vector<double> v(n);
  for (auto& x : v) {
    x = f();
  }
  return v;
}

}  // namespace

TEST(Rng, IdenticalSeedsGiveIdenticalStreams) {
  Rng a(42);
  Rng b(42);
  Rng c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differs |= (x != c());
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformStaysInOpenUnitInterval) {
  Rng rng(7);
  for (int i = 0; i < 1000000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, NormalHasUnitMoments) {
  Rng rng(8);
  const auto v = draw(1000000, [&] { return rng.normal(); });
  EXPECT_NEAR(oracle::mean(v), 0.0, 0.005);
  EXPECT_NEAR(oracle::variance(v), 1.0, 0.005);
}

TEST(Rng, UniformIndexCoversRange) {
  Rng rng(9);
  std::vector<std::int64_t> counts(5, 0);
  for (int i = 0; i < 100000; ++i) {
    ++counts[rng.uniform_index(5)];
  }
  EXPECT_GT(oracle::chisq_gof_pvalue(counts, std::vector<double>(5, 0.2)), 0.001);
  EXPECT_THROW(rng.uniform_index(0), std::invalid_argument);
}

TEST(GammaSample, MeanShapeTwoRateFour) {
  Rng rng(1);
  const auto v = draw(1000000, [&] { return gamma_sample(rng, 2.0, 4.0); });
  EXPECT_NEAR(oracle::mean(v), 0.5, 0.002);
}

TEST(GammaSample, UnitShapeMatchesExponential) {
  Rng rng(2);
  const auto v = draw(1000000, [&] { return gamma_sample(rng, 1.0, 1.0); });
  const double d = oracle::ks_one_sample(v, [](double x) { return 1.0 - std::exp(-x); });
  EXPECT_LT(d, 0.002);
}

TEST(GammaSample, SmallShapeMatchesGammaCdf) {
  Rng rng(3);
  const auto v = draw(200000, [&] { return gamma_sample(rng, 0.3, 2.0); });
  const double d = oracle::ks_one_sample(v, [](double x) { return oracle::gamma_cdf(x, 0.3, 2.0); });
  EXPECT_LT(d, 0.005);
}

TEST(GammaSample, RejectsNonPositiveParameters) {
  Rng rng(4);
  EXPECT_THROW(gamma_sample(rng, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(gamma_sample(rng, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(gamma_sample(rng, -1.0, 1.0), std::invalid_argument);
}

TEST(TruncatedGamma, VacuousTruncationMatchesGamma) {
  Rng rng(5);
  const auto v = draw(1000000, [&] { return truncated_gamma_sample(rng, 2.5, 1.5, 0.0, kInf); });
  const double d = oracle::ks_one_sample(v, [](double x) { return oracle::gamma_cdf(x, 2.5, 1.5); });
  EXPECT_LT(d, 0.002);
}

TEST(TruncatedGamma, InteriorIntervalMatchesRejectionOracle) {
  // Oracle: plain rejection from an independent standard library gamma sampler.
  std::mt19937_64 gen(99);
  std::gamma_distribution<double> g(2.0, 1.0);
  std::vector<double> ref;
  while (ref.size() < 100000) {
    const double x = g(gen);
    if (x > 1.0 && x < 2.0) {
      ref.push_back(x);
    }
  }
  Rng rng(6);
  const auto v = draw(100000, [&] { return truncated_gamma_sample(rng, 2.0, 1.0, 1.0, 2.0); });
  const double se = std::sqrt(oracle::variance(v) / v.size() + oracle::variance(ref) / ref.size());
  EXPECT_LT(std::abs(oracle::mean(v) - oracle::mean(ref)), 3.0 * se);
  for (double x : v) {
    ASSERT_GT(x, 1.0);
    ASSERT_LT(x, 2.0);
  }
}

TEST(TruncatedGamma, ConditionalCdfInsideInterval) {
  Rng rng(7);
  const double lo = 0.5;
  const double hi = 3.0;
  const double a = 3.0;
  const double b = 2.0;
  const double flo = oracle::gamma_cdf(lo, a, b);
  const double fhi = oracle::gamma_cdf(hi, a, b);
  const auto v = draw(200000, [&] { return truncated_gamma_sample(rng, a, b, lo, hi); });
  const double d = oracle::ks_one_sample(
      v, [&](double x) { return (oracle::gamma_cdf(x, a, b) - flo) / (fhi - flo); });
  EXPECT_LT(d, 0.005);
}

TEST(TruncatedGamma, FarUpperTailUsesRejectionAndStaysInside) {
  // Interval mass is about 1e-24, below the inverse-CDF threshold.
  Rng rng(8);
  const double lo = 60.0;
  const double hi = 61.0;
  const auto v = draw(100000, [&] { return truncated_gamma_sample(rng, 2.0, 1.0, lo, hi); });
  for (double x : v) {
    ASSERT_GT(x, lo);
    ASSERT_LT(x, hi);
  }
  // Conditional mean of x e^{-x} on (60, 61) by quadrature.
  const double num = oracle::simpson([](double x) { return x * x * std::exp(-(x - 60.0)); }, lo, hi, 2000);
  const double den = oracle::simpson([](double x) { return x * std::exp(-(x - 60.0)); }, lo, hi, 2000);
  const double se = std::sqrt(oracle::variance(v) / v.size());
  EXPECT_LT(std::abs(oracle::mean(v) - num / den), 4.0 * se);
}

TEST(TruncatedGamma, FarUnboundedTail) {
  Rng rng(9);
  const auto v = draw(100000, [&] { return truncated_gamma_sample(rng, 1.5, 2.0, 40.0, kInf); });
  for (double x : v) {
    ASSERT_GT(x, 40.0);
  }
  // Excess over the bound is close to Exponential(rate) this far out.
  EXPECT_NEAR(oracle::mean(v) - 40.0, 0.5, 0.01);
}

TEST(TruncatedGamma, TinyLowerIntervalNearZero) {
  Rng rng(10);
  for (int i = 0; i < 10000; ++i) {
    const double x = truncated_gamma_sample(rng, 50.0, 1.0, 0.0, 1e-3);
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, 1e-3);
  }
}

TEST(TruncatedGamma, HugeShapeFarBelowMode) {
  // x^(a-1) on (0, h) dominates, so the mean is h a / (a + 1).
  Rng rng(12);
  const double shape = 12663.1;
  const double hi = 0.843107;
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = truncated_gamma_sample(rng, shape, 1.0, 0.0, hi);
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, hi);
    sum += x;
  }
  const double expected = hi * shape / (shape + 1.0);
  EXPECT_NEAR(sum / n, expected, 0.05 * hi / shape);
}

TEST(TruncatedGamma, EmptyIntervalThrows) {
  Rng rng(11);
  EXPECT_THROW(truncated_gamma_sample(rng, 2.0, 1.0, 5.0, 5.0), DegenerateTruncation);
  EXPECT_THROW(truncated_gamma_sample(rng, 2.0, 1.0, 5.0, 4.0), DegenerateTruncation);
  EXPECT_THROW(truncated_gamma_sample(rng, 2.0, 1.0, 1.0, std::nextafter(1.0, 2.0)),
               DegenerateTruncation);
}

TEST(TruncatedGamma, FuzzNeverLeavesInterval) {
  // 10^7 calls over random shapes, rates and bounds, including far tails and
  // very narrow intervals.
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Rng rng(12);
  std::int64_t degenerate = 0;
  for (int i = 0; i < 10000000; ++i) {
    const double shape = std::exp(-3.0 + 13.6 * unit(gen));
    const double rate = std::exp(-4.0 + 8.0 * unit(gen));
    const double scale = shape / rate;
    const double lo = (unit(gen) < 0.2) ? 0.0 : scale * std::exp(-6.0 + 9.0 * unit(gen));
    double hi = kInf;
    const double r = unit(gen);
    if (r < 0.4) {
      hi = lo + scale * std::exp(-14.0 + 16.0 * unit(gen));
    } else if (r < 0.7) {
      hi = lo * (1.0 + std::exp(-20.0 + 20.0 * unit(gen))) + 1e-300;
    }
    try {
      const double x = truncated_gamma_sample(rng, shape, rate, lo, hi);
      ASSERT_GT(x, lo) << shape << ' ' << rate << ' ' << lo << ' ' << hi;
      ASSERT_LT(x, hi) << shape << ' ' << rate << ' ' << lo << ' ' << hi;
    } catch (const DegenerateTruncation&) {
      ++degenerate;
    }
  }
  // Degenerate outcomes are allowed but must be rare in this design.
  EXPECT_LT(degenerate, 1000);
}

TEST(GammaLogPdf, IntegratesToOne) {
  const double total = oracle::simpson(
      [](double x) { return x <= 0.0 ? 0.0 : std::exp(gamma_logpdf(x, 2.5, 1.5)); }, 0.0, 60.0,
      400000);
  EXPECT_NEAR(total, 1.0, 1e-6);
  EXPECT_NEAR(gamma_logpdf(2.0, 1.0, 1.0), -2.0, 1e-15);
}

TEST(BetaLogPdf, UniformCaseIsZero) {
  for (double x : {1e-9, 0.1, 0.5, 0.9, 1.0 - 1e-9}) {
    EXPECT_NEAR(beta_logpdf(x, 1.0, 1.0), 0.0, 1e-15);
  }
}

TEST(BetaLogPdf, LinearDensityAtHalf) {
  // Beta(1, 2) density is 2(1 - x), so 1 at x = 0.5.
  EXPECT_NEAR(beta_logpdf(0.5, 1.0, 2.0), 0.0, 1e-15);
  // Beta(1, k) density k (1 - x)^(k - 1).
  EXPECT_NEAR(beta_logpdf(0.3, 1.0, 4.0), std::log(4.0) + 3.0 * std::log(0.7), 1e-13);
}

TEST(BetaLogPdf, IntegratesToOne) {
  const double total = oracle::simpson(
      [](double x) { return (x <= 0.0 || x >= 1.0) ? 0.0 : std::exp(beta_logpdf(x, 2.0, 3.5)); },
      0.0, 1.0, 200000);
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(BetaLogPdf, RejectsOutsideSupport) {
  EXPECT_THROW(beta_logpdf(0.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(beta_logpdf(1.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(beta_logpdf(0.5, 0.0, 1.0), std::invalid_argument);
}

TEST(BetaSample, MeanOneThree) {
  Rng rng(13);
  const auto v = draw(1000000, [&] { return beta_sample(rng, 1.0, 3.0); });
  EXPECT_NEAR(oracle::mean(v), 0.25, 0.002);
  for (double x : v) {
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
}

TEST(BetaSample, MatchesBetaCdf) {
  Rng rng(14);
  const auto v = draw(200000, [&] { return beta_sample(rng, 2.0, 2.0); });
  const double d = oracle::ks_one_sample(v, [](double x) { return x * x * (3.0 - 2.0 * x); });
  EXPECT_LT(d, 0.005);
  EXPECT_THROW(beta_sample(rng, 0.0, 1.0), std::invalid_argument);
}

TEST(Dirichlet, SymmetricPairMeans) {
  Rng rng(15);
  const std::vector<double> conc{1.0, 1.0};
  double s0 = 0.0;
  double s1 = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const auto w = dirichlet_sample(rng, conc);
    s0 += w[0];
    s1 += w[1];
  }
  EXPECT_NEAR(s0 / n, 0.5, 0.002);
  EXPECT_NEAR(s1 / n, 0.5, 0.002);
}

TEST(Dirichlet, FirstComponentMean) {
  Rng rng(16);
  const std::vector<double> conc{2.0, 1.0, 1.0};
  double s = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const auto w = dirichlet_sample(rng, conc);
    ASSERT_NEAR(w[0] + w[1] + w[2], 1.0, 1e-12);
    s += w[0];
  }
  EXPECT_NEAR(s / n, 0.5, 0.002);
}

TEST(Dirichlet, SingleComponentIsDegenerate) {
  Rng rng(17);
  const std::vector<double> conc{3.0};
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(dirichlet_sample(rng, conc), std::vector<double>{1.0});
  }
  EXPECT_THROW(dirichlet_sample(rng, std::vector<double>{1.0, 0.0}), std::invalid_argument);
}

TEST(Dirichlet, LogPdfFlatCase) {
  // Dirichlet(1, ..., 1) on the k-simplex has constant density (k - 1)!.
  const std::vector<double> w{0.2, 0.3, 0.5};
  EXPECT_NEAR(dirichlet_logpdf(w, 1.0), std::log(2.0), 1e-14);
  const std::vector<double> w2{0.1, 0.9};
  EXPECT_NEAR(dirichlet_logpdf(w2, 2.0), std::log(6.0 * 0.1 * 0.9), 1e-13);
}

TEST(Dirichlet, LogPdfIntegratesOverTwoSimplex) {
  const double total = oracle::simpson(
      [](double x) {
        if (x <= 0.0 || x >= 1.0) {
          return 0.0;
        }
        const std::vector<double> w{x, 1.0 - x};
        return std::exp(dirichlet_logpdf(w, 2.5));
      },
      0.0, 1.0, 200000);
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(Categorical, PointMass) {
  Rng rng(18);
  const std::vector<double> p{0.0, 1.0, 0.0};
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(categorical_sample(rng, p), 1u);
  }
}

TEST(Categorical, FrequenciesMatchProbabilities) {
  Rng rng(19);
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  std::vector<std::int64_t> counts(4, 0);
  for (int i = 0; i < 200000; ++i) {
    ++counts[categorical_sample(rng, p)];
  }
  EXPECT_GT(oracle::chisq_gof_pvalue(counts, p), 0.001);
}

TEST(Categorical, RejectsBadProbabilities) {
  Rng rng(20);
  EXPECT_THROW(categorical_sample(rng, std::vector<double>{-0.1, 1.1}), std::invalid_argument);
  EXPECT_THROW(categorical_sample(rng, std::vector<double>{0.5, 0.4}), std::invalid_argument);
}

TEST(Poisson, LogPmfExamples) {
  EXPECT_NEAR(poisson_logpmf(0, 1.0), -1.0, 1e-15);
  EXPECT_NEAR(poisson_logpmf(3, 2.0), 3.0 * std::log(2.0) - 2.0 - std::log(6.0), 1e-14);
  EXPECT_NEAR(poisson_logpmf(3, 2.0), -1.712318, 1e-6);
  EXPECT_THROW(poisson_logpmf(1, 0.0), std::invalid_argument);
  EXPECT_THROW(poisson_logpmf(-1, 1.0), std::invalid_argument);
}

TEST(Poisson, LargeCountsStayFinite) {
  const double v = poisson_logpmf(1000000, 1000000.0);
  EXPECT_TRUE(std::isfinite(v));
  // Stirling: log pmf at the mode is about -0.5 log(2 pi n).
  EXPECT_NEAR(v, -0.5 * std::log(2.0 * M_PI * 1e6), 1e-6);
}

TEST(Poisson, PmfSumsToOne) {
  double total = 0.0;
  for (int d = 0; d < 200; ++d) {
    total += std::exp(poisson_logpmf(d, 17.3));
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(LogFactorial, MatchesLgammaAcrossTableBoundary) {
  for (std::int64_t n : {0, 1, 2, 10, 170, 1023, 1024, 1025, 5000, 1000000}) {
    EXPECT_NEAR(log_factorial(n), std::lgamma(static_cast<double>(n) + 1.0),
                1e-12 * std::max(1.0, std::lgamma(static_cast<double>(n) + 1.0)));
  }
}

TEST(PoissonSample, MeanAndDeterminism) {
  Rng a(21);
  Rng b(21);
  double s = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const auto x = poisson_sample(a, 3.5);
    EXPECT_EQ(x, poisson_sample(b, 3.5));
    s += static_cast<double>(x);
  }
  EXPECT_NEAR(s / 100000.0, 3.5, 0.03);
}

TEST(LogSumExp, HandlesInfinities) {
  const std::vector<double> v{-kInf, std::log(2.0), std::log(3.0)};
  EXPECT_NEAR(log_sum_exp(v), std::log(5.0), 1e-15);
  const std::vector<double> none{-kInf, -kInf};
  EXPECT_EQ(log_sum_exp(none), -kInf);
  const std::vector<double> big{1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(big), 1000.0 + std::log(2.0), 1e-12);
}

TEST(Samplers, DeterministicGivenSeedAndCallSequence) {
  auto run = [](std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out;
    for (int i = 0; i < 200; ++i) {
      out.push_back(gamma_sample(rng, 0.7, 1.3));
      out.push_back(truncated_gamma_sample(rng, 2.0, 1.0, 0.5, 1.5));
      out.push_back(beta_sample(rng, 2.0, 2.0));
      const auto w = dirichlet_sample(rng, std::vector<double>{1.0, 2.0, 3.0});
      out.insert(out.end(), w.begin(), w.end());
      out.push_back(static_cast<double>(categorical_sample(rng, w)));
      out.push_back(static_cast<double>(poisson_sample(rng, 4.0)));
      out.push_back(rng.normal());
    }
    return out;
  };
  EXPECT_EQ(run(5), run(5));
  EXPECT_NE(run(5), run(6));
}
