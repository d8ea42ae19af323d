#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "grgc/harness.hpp"
#include "grgc/stats.hpp"
#include "oracles.hpp"

using namespace grgc;

namespace {

EmpiricalLaw poisson_law(double mu, std::uint64_t m, std::uint64_t seed)
{
    RngStream rng(seed);
    EmpiricalLaw law;
    for (std::uint64_t i = 0; i < m; ++i)
        law.add(sample_poisson(mu, rng));
    return law;
}

}  // namespace

TEST(Stats, TvExamples)
{
    EmpiricalLaw zeros;
    zeros.add(0, 1000000);
    EXPECT_EQ(tv_distance(zeros, 0.0).value, 0.0);
    EmpiricalLaw point;
    point.add(0);
    EXPECT_NEAR(tv_distance(point, 1.0).value, 1 - std::exp(-1.0), 1e-12);
    EXPECT_NEAR(tv_distance(point, 1.0).value, 0.632121, 1e-6);
    EXPECT_EQ(tv_distance(point, 1.0).method, DistanceMethod::PluginTV);
    EXPECT_LE(tv_distance(poisson_law(0.7, 1000000, 1), 0.7).value, 0.005);
    EXPECT_THROW(tv_distance(EmpiricalLaw{}, 1.0), DomainError);
}

TEST(Stats, TvIncludesReferenceTailBeyondSupport)
{
    EmpiricalLaw law;
    law.add(0, 50);
    law.add(1, 50);
    const double mu = 2.0;
    double expected = std::abs(0.5 - poisson_pmf(mu, 0)) + std::abs(0.5 - poisson_pmf(mu, 1));
    expected += 1.0 - poisson_pmf(mu, 0) - poisson_pmf(mu, 1);
    EXPECT_NEAR(tv_distance(law, mu, 0).value, expected / 2, 1e-12);
}

TEST(Stats, TvBootstrapSeIsPositiveAndValueBounded)
{
    const auto law = poisson_law(1.3, 5000, 2);
    RngStream rng(1);
    const auto d = tv_distance(law, 1.3, rng);
    EXPECT_GT(d.standard_error, 0.0);
    EXPECT_GE(d.value, 0.0);
    EXPECT_LE(d.value, 1.0);
}

TEST(Stats, TwoLawTvIsAMetric)
{
    RngStream rng(3);
    for (int t = 0; t < 200; ++t) {
        EmpiricalLaw a, b, c;
        for (int i = 0; i < 50; ++i) {
            a.add(rng() % 6);
            b.add(rng() % 4);
            c.add(rng() % 8);
        }
        EXPECT_DOUBLE_EQ(tv_distance(a, b), tv_distance(b, a));
        EXPECT_EQ(tv_distance(a, a), 0.0);
        EXPECT_LE(tv_distance(a, c), tv_distance(a, b) + tv_distance(b, c) + 1e-12);
    }
}

TEST(Stats, PluginTvDecaysLikeInverseRoot)
{
    std::vector<RatePoint> pts;
    for (std::uint64_t m : {1000u, 10000u, 100000u, 1000000u}) {
        // average over independent laws so the slope reflects the mean behaviour
        double s = 0.0;
        const int laws = 8;
        for (int j = 0; j < laws; ++j)
            s += tv_distance(poisson_law(2.0, m, 100 * m + j), 2.0, 0).value;
        pts.push_back({static_cast<double>(m), s / laws, 0.0});
    }
    const auto f = fit_rate(pts);
    EXPECT_GE(f.slope, -0.65);
    EXPECT_LE(f.slope, -0.35);
}

TEST(Stats, KolmogorovExamples)
{
    const PoissonReference half(0.5);
    EmpiricalLaw point;
    point.add(0);
    const auto d = kolmogorov_distance(point, cycle_length_cdf(half, false));
    EXPECT_NEAR(d.value, 1 - 0.966500, 1e-6);
    EXPECT_EQ(d.method, DistanceMethod::KolmogorovSup);

    // exact atoms of Poi(1) as a law with 1e9 total mass: distance ~ rounding only
    EmpiricalLaw exact;
    for (std::uint64_t j = 0; j < 20; ++j)
        exact.add(j, static_cast<std::uint64_t>(std::llround(poisson_pmf(1.0, j) * 1e9)));
    const auto ref = [](long t) { return t < 0 ? 0.0 : poisson_cdf(1.0, static_cast<std::uint64_t>(t)); };
    EXPECT_LT(kolmogorov_distance(exact, ref, 0).value, 1e-8);
}

TEST(Stats, KolmogorovSupAttainedAtIntegerPoints)
{
    RngStream rng(5);
    for (int t = 0; t < 50; ++t) {
        EmpiricalLaw law;
        for (int i = 0; i < 30; ++i)
            law.add(rng() % 7);
        const double mu = 0.5 + 4 * rng.uniform();
        const IntegerCdf ref = [mu](long x) {
            return x < 0 ? 0.0 : poisson_cdf(mu, static_cast<std::uint64_t>(x));
        };
        double dense = 0.0;
        for (double x = -1.0; x < 60.0; x += 0.01) {
            const double r = x < 0 ? 0.0 : ref(static_cast<long>(std::floor(x)));
            dense = std::max(dense, std::abs(law.cdf(x) - r));
        }
        EXPECT_NEAR(kolmogorov_distance(law, ref, 0).value, dense, 1e-12);
    }
}

TEST(Stats, ThinExamples)
{
    RngStream rng(7);
    EXPECT_EQ(thin(5, 0.0, rng), 0u);
    EXPECT_EQ(thin(5, 1.0, rng), 5u);
    EXPECT_THROW(thin(5, 1.5, rng), DomainError);
    EXPECT_THROW(thin(5, -0.1, rng), DomainError);
    RunningMoments m;
    for (int i = 0; i < 1000000; ++i)
        m.add(static_cast<double>(thin(10, 0.3, rng)));
    EXPECT_LE(std::abs(m.mean() - 3.0), 3 * m.standard_error());
}

TEST(Stats, ThinnedPoissonIsPoisson)
{
    RngStream rng(8);
    EmpiricalLaw law;
    for (int i = 0; i < 1000000; ++i)
        law.add(thin(sample_poisson(1.7, rng), 0.4, rng));
    EXPECT_LE(tv_distance(law, 0.4 * 1.7, 0).value, 0.005);
}

TEST(Stats, AggregateExamples)
{
    const std::vector<std::uint64_t> obs{0, 0, 1};
    const auto a = aggregate(obs);
    EXPECT_NEAR(a.mean(), 1.0 / 3.0, 1e-15);
    EXPECT_EQ(a.law.counts(), (std::map<std::uint64_t, std::uint64_t>{{0, 2}, {1, 1}}));
    EXPECT_THROW(aggregate(std::vector<std::uint64_t>{}), DomainError);

    RngStream rng(9);
    std::vector<std::uint64_t> xs(1000000);
    for (auto& x : xs)
        x = sample_poisson(2.0, rng);
    const auto big = aggregate(xs);
    EXPECT_GE(big.variance() / big.mean(), 0.99);
    EXPECT_LE(big.variance() / big.mean(), 1.01);
}

TEST(Stats, AggregationIsPartitionAndOrderIndependent)
{
    RngStream rng(10);
    std::vector<std::uint64_t> xs(10007);
    for (auto& x : xs)
        x = sample_poisson(3.0, rng);
    const auto whole = aggregate(xs);
    for (std::size_t parts : {2u, 7u, 64u}) {
        Aggregate merged;
        const std::size_t step = xs.size() / parts + 1;
        for (std::size_t s = 0; s < xs.size(); s += step) {
            const std::size_t e = std::min(xs.size(), s + step);
            merged.merge(aggregate(std::span<const std::uint64_t>(xs.data() + s, e - s)));
        }
        EXPECT_EQ(merged.law, whole.law);
        EXPECT_NEAR(merged.mean(), whole.mean(), 1e-12);
        EXPECT_NEAR(merged.variance(), whole.variance(), 1e-12);
    }
    auto shuffled = xs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto s = aggregate(shuffled);
    EXPECT_EQ(s.law, whole.law);
    EXPECT_NEAR(s.mean(), whole.mean(), 1e-12);
    EXPECT_NEAR(s.variance(), whole.variance(), 1e-12);
}

TEST(Stats, RunningCovarianceMerge)
{
    RngStream rng(12);
    RunningCovariance all, a, b;
    double sx = 0, sy = 0, sxy = 0;
    const int m = 5000;
    for (int i = 0; i < m; ++i) {
        const double x = rng.uniform(), y = x + rng.uniform();
        all.add(x, y);
        (i % 3 ? a : b).add(x, y);
        sx += x;
        sy += y;
        sxy += x * y;
    }
    a.merge(b);
    const double direct = (sxy - sx * sy / m) / (m - 1);
    EXPECT_NEAR(all.covariance(), direct, 1e-12);
    EXPECT_NEAR(a.covariance(), direct, 1e-12);
}
