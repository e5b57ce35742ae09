#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fatpipe/rng.hpp"
#include "fatpipe/traffic.hpp"

using namespace fatpipe;

TEST(Rng, ExponentialInverseCdf)
{
    EXPECT_NEAR(exponential_from_uniform(std::exp(-1.0), 1.0), 1.0, 1e-15);
    EXPECT_NEAR(exponential_from_uniform(1.0, 3.0), 0.0, 1e-15);
}

TEST(Rng, UniformRangeAndDeterminism)
{
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform01();
        EXPECT_GT(u, 0.0);
        EXPECT_LE(u, 1.0);
        EXPECT_EQ(u, b.uniform01());
        differs |= u != c.uniform01();
    }
    EXPECT_TRUE(differs);
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_EQ(derive_seed(9, 3), derive_seed(9, 3));
}

TEST(Traffic, BurstIntervalMeanScalesWithDemandCount)
{
    TrafficGenerator g({1.0, 290.0, 30.0, 10.0}, 12, 5);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dt = g.sample_burst_interval();
        ASSERT_GT(dt, 0.0);
        sum += dt;
    }
    EXPECT_NEAR(sum / n, 1.0 / 12.0, 0.02 / 12.0);
}

TEST(Traffic, SameSeedSameSequence)
{
    TrafficGenerator a({1.0, 290.0, 30.0, 10.0}, 3, 77), b({1.0, 290.0, 30.0, 10.0}, 3, 77);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(a.sample_burst_interval(), b.sample_burst_interval());
    for (int i = 0; i < 50; ++i) {
        const auto ra = a.sample_instant_rates();
        const auto rb = b.sample_instant_rates();
        for (std::size_t d = 0; d < 3; ++d) EXPECT_EQ(ra[d], rb[d]);
    }
}

TEST(Traffic, ZeroSigmaBGivesMuB)
{
    TrafficGenerator g({1.0, 290.0, 0.0, 10.0}, 4, 1);
    for (double m : g.short_term_means()) EXPECT_EQ(m, 290.0);
    for (int i = 0; i < 20; ++i) {
        const std::size_t d = g.apply_burst();
        EXPECT_EQ(g.short_term_means()[d], 290.0);
    }
}

TEST(Traffic, BurstOnlyChangesSelectedDemand)
{
    TrafficGenerator g({1.0, 290.0, 30.0, 10.0}, 6, 3);
    for (int i = 0; i < 50; ++i) {
        const std::vector<double> before(g.short_term_means().begin(), g.short_term_means().end());
        const double t_before = g.next_burst_time();
        const std::size_t d = g.apply_burst();
        EXPECT_GT(g.next_burst_time(), t_before);
        for (std::size_t j = 0; j < before.size(); ++j)
            if (j != d) EXPECT_EQ(before[j], g.short_term_means()[j]);
    }
}

TEST(Traffic, BurstMeanAndSpread)
{
    TrafficGenerator g({1.0, 290.0, 30.0, 10.0}, 4, 11);
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    std::vector<int> picks(4, 0);
    for (int i = 0; i < n; ++i) {
        const std::size_t d = g.apply_burst();
        ++picks[d];
        const double v = g.short_term_means()[d];
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    EXPECT_NEAR(mean, 290.0, 1.0);
    EXPECT_NEAR(sd, 30.0, 1.0);
    for (int p : picks) EXPECT_NEAR(static_cast<double>(p) / n, 0.25, 0.01);
}

TEST(Traffic, ZeroSigmaStGivesShortTermMean)
{
    TrafficGenerator g({1.0, 290.0, 30.0, 0.0}, 3, 8);
    const auto r = g.sample_instant_rates();
    for (std::size_t d = 0; d < 3; ++d) EXPECT_EQ(r[d], g.short_term_means()[d]);
}

TEST(Traffic, RatesClampedAtZero)
{
    TrafficGenerator g({0.0, 5.0, 0.0, 10.0}, 2, 8);
    int zeros = 0;
    for (int i = 0; i < 10000; ++i) {
        for (double v : g.sample_instant_rates()) {
            EXPECT_GE(v, 0.0);
            zeros += v == 0.0;
        }
    }
    EXPECT_GT(zeros, 0);
}

TEST(Traffic, NoBurstsWhenLambdaZero)
{
    TrafficGenerator g({0.0, 290.0, 30.0, 10.0}, 3, 8);
    EXPECT_TRUE(std::isinf(g.next_burst_time()));
    EXPECT_EQ(g.advance_to(100.0), 0u);
}

TEST(Traffic, StationaryWithoutBursts)
{
    TrafficGenerator g({0.0, 290.0, 0.0, 10.0}, 1, 21);
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = g.sample_instant_rates()[0];
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    EXPECT_NEAR(mean, 290.0, 0.2);
    EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 10.0, 0.2);
}

// Burst counts over a horizon follow Poisson(lambda * |D| * H): chi-square
// goodness of fit over 10^4 independent horizons.
TEST(Traffic, BurstCountIsPoisson)
{
    const double lambda = 1.0, horizon = 1.0;
    const std::size_t demands = 4;
    const double mean = lambda * static_cast<double>(demands) * horizon;
    const int samples = 10000;
    const int bins = 11;  // 0..9 and >= 10
    std::vector<int> observed(bins, 0);
    for (int s = 0; s < samples; ++s) {
        TrafficGenerator g({lambda, 290.0, 30.0, 10.0}, demands, 1000 + s);
        const std::size_t k = g.advance_to(horizon);
        ++observed[std::min<std::size_t>(k, bins - 1)];
    }
    std::vector<double> p(bins, 0.0);
    double term = std::exp(-mean), tail = 1.0;
    for (int k = 0; k < bins - 1; ++k) {
        p[k] = term;
        tail -= term;
        term *= mean / (k + 1);
    }
    p[bins - 1] = tail;
    double chi2 = 0.0;
    for (int k = 0; k < bins; ++k) {
        const double e = p[k] * samples;
        chi2 += (observed[k] - e) * (observed[k] - e) / e;
    }
    // 10 degrees of freedom, p = 0.01.
    EXPECT_LT(chi2, 23.209);
}
