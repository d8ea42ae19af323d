#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "grgc/harness.hpp"
#include "grgc/steinchen.hpp"
#include "oracles.hpp"

using namespace grgc;

namespace {

WeightVector random_weights(std::size_t m, std::uint64_t seed)
{
    RngStream rng(seed);
    std::vector<double> w(m);
    for (auto& x : w)
        x = 0.2 + 3.0 * rng.uniform();
    return WeightVector(std::move(w));
}

double cycles(std::size_t m, int k)
{
    return static_cast<double>(k) > static_cast<double>(m)
               ? 0.0
               : std::exp(log_falling_factorial(static_cast<double>(m), k)) / (2.0 * k);
}

}  // namespace

TEST(SteinChen, ConditionalCycleProbMatchesEdgeProduct)
{
    const WeightVector w({1.0, 2.0, 3.0, 0.5});
    const double L = 6.5;
    // edges of (0,1,2,3): 01 12 23 30
    const double direct =
        (2.0 / (L + 2.0)) * (6.0 / (L + 6.0)) * (1.5 / (L + 1.5)) * (0.5 / (L + 0.5));
    EXPECT_NEAR(conditional_cycle_prob(w, canonical_cycle({0, 1, 2, 3})), direct, 1e-15);
    EXPECT_THROW(conditional_cycle_prob(w, canonical_cycle({0, 1, 7})), DomainError);

    const WeightVector r = random_weights(7, 3);
    for (int k = 3; k <= 6; ++k)
        for (auto& [vs, es] : oracle::cycles_by_permutation(7, k))
            ASSERT_NEAR(conditional_cycle_prob(r, canonical_cycle(vs)), oracle::prob_all(r, es),
                        1e-14);
}

TEST(SteinChen, ExactSumsMatchSegmentOracle)
{
    for (std::size_t m : {4u, 5u, 6u, 7u}) {
        for (const std::set<int>& a : {std::set<int>{3}, std::set<int>{3, 4}, std::set<int>{4, 5}}) {
            if (static_cast<std::size_t>(*a.rbegin()) > m)
                continue;
            const WeightVector w = random_weights(m, 10 * m + *a.rbegin());
            const auto o = oracle::pair_sums(w, a);
            const double tol = 1e-12;
            EXPECT_NEAR(b1_exact(w, a, Neighborhood::VertexSharing), o.b1_vertex,
                        tol * (1 + o.b1_vertex));
            EXPECT_NEAR(b2_exact(w, a, Neighborhood::VertexSharing), o.b2_vertex,
                        tol * (1 + o.b2_vertex));
            EXPECT_NEAR(b1_exact(w, a, Neighborhood::EdgeSharing), o.b1_edge,
                        tol * (1 + o.b1_edge));
            EXPECT_NEAR(b2_exact(w, a, Neighborhood::EdgeSharing), o.b2_edge,
                        tol * (1 + o.b2_edge));
        }
    }
}

TEST(SteinChen, EdgeNeighbourhoodIsSmaller)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const WeightVector w = random_weights(7, seed);
        const std::set<int> a{3, 4, 5};
        EXPECT_LE(b1_exact(w, a, Neighborhood::EdgeSharing),
                  b1_exact(w, a, Neighborhood::VertexSharing) + 1e-15);
        EXPECT_LE(b2_exact(w, a, Neighborhood::EdgeSharing),
                  b2_exact(w, a, Neighborhood::VertexSharing) + 1e-15);
    }
}

TEST(SteinChen, ExactRefusals)
{
    const WeightVector w = random_weights(9, 1);
    EXPECT_THROW(b1_exact(w, {3}, Neighborhood::VertexSharing), RefusalError);
    EXPECT_THROW(b2_exact(w, {3}, Neighborhood::EdgeSharing), RefusalError);
    EXPECT_EQ(b1_exact(random_weights(5, 1), {}, Neighborhood::VertexSharing), 0.0);
    EXPECT_THROW(pair_classes(7, 8), RefusalError);
    EXPECT_THROW(pair_classes(2, 3), DomainError);
}

TEST(SteinChen, TriangleClasses)
{
    const auto cls = pair_classes(3, 3);
    ASSERT_EQ(cls.size(), 2u);
    std::map<std::vector<int>, std::uint64_t> per;
    for (const auto& c : cls) {
        per[c.cls.segments] = c.cycles_per_fresh_set;
        EXPECT_EQ(c.union_edges.size(), static_cast<std::size_t>(c.cls.union_edges()));
    }
    EXPECT_EQ(per.at({1}), 3u);
    EXPECT_EQ(per.at({2}), 3u);
    double total = 0.0;
    for (const auto& c : cls)
        total += class_pair_count(c, 6);
    EXPECT_NEAR(total, 360.0, 1e-9);
}

TEST(SteinChen, ClassCountsPartitionIntersectingPairs)
{
    for (int k = 3; k <= 6; ++k) {
        for (int l = 3; l <= 14 - k && l <= 7; ++l) {
            const auto cls = pair_classes(k, l);
            for (std::size_t n : {static_cast<std::size_t>(k + l), std::size_t{20}}) {
                double total = 0.0;
                for (const auto& c : cls) {
                    EXPECT_GE(c.cls.segment_count(), 1);
                    EXPECT_LE(c.cls.shared_vertices(), std::min(k, l));
                    total += class_pair_count(c, n);
                }
                const double expected = cycles(n, k) * (cycles(n, l) - cycles(n - k, l)) -
                                        (k == l ? cycles(n, k) : 0.0);
                EXPECT_NEAR(total, expected, 1e-9 * expected) << k << " " << l << " " << n;
            }
        }
    }
}

TEST(SteinChen, ClassRepresentativesAreConsistent)
{
    for (const auto& c : pair_classes(5, 4)) {
        const auto prof = segment_decomposition(c.alpha, c.beta);
        ASSERT_TRUE(prof.has_value());
        EXPECT_EQ(prof->segment_lengths, c.cls.segments);
        EXPECT_EQ(prof->shared_edges, c.cls.shared_edges());
    }
}

TEST(SteinChen, PkConstantExamples)
{
    EXPECT_NEAR(pk_constant(1.0, 3, 3), 1.0 / 64.0, 1e-15);
    RngStream rng(1);
    const auto e = pk_mc(WeightModel::constant(0.9), 100, 3, 1, rng);
    EXPECT_NEAR(e.value, std::pow(0.9 / 100.9, 3), 1e-18);
    EXPECT_EQ(e.standard_error, 0.0);
    EXPECT_THROW(pk_mc(WeightModel::constant(0.9), 2, 3, 1, rng), DomainError);
}

TEST(SteinChen, PkMonteCarloAgreesWithIndependentEstimate)
{
    const auto model = WeightModel::exponential(1.5);
    const std::size_t n = 30;
    RngStream rng(2), other(3);
    const auto e = pk_mc(model, n, 4, 200000, rng);
    RunningMoments m;
    oracle::EdgeSet es{{0, 1}, {1, 2}, {2, 3}, {0, 3}};
    for (int r = 0; r < 200000; ++r)
        m.add(oracle::prob_all(sample_weights(model, n, other), es));
    const double se = std::hypot(e.standard_error, m.standard_error());
    EXPECT_LE(std::abs(e.value - m.mean()), 4 * se);
}

TEST(SteinChen, ReportMatchesExactSumsForConstantWeights)
{
    const double c = 0.9;
    for (std::size_t n : {5u, 6u, 7u}) {
        const WeightVector w(std::vector<double>(n, c));
        for (const std::set<int>& a : {std::set<int>{3}, std::set<int>{3, 4}}) {
            const auto model = WeightModel::constant(c);
            const auto in = exact_bound_inputs(model, n, a);
            for (auto v : {Neighborhood::VertexSharing, Neighborhood::EdgeSharing}) {
                const auto rep = lemma_tv_bound(model, n, a, in, v);
                const double b1 = b1_exact(w, a, v), b2 = b2_exact(w, a, v);
                EXPECT_NEAR(rep.b1, b1, 1e-12 * b1) << n << to_string(v);
                EXPECT_NEAR(rep.b2, b2, 1e-12 * b2) << n << to_string(v);
            }
        }
    }
}

TEST(SteinChen, TriangleBoundAsymptotics)
{
    const double c = 0.9;
    const auto model = WeightModel::constant(c);
    std::vector<RatePoint> pts;
    for (std::size_t n : {1000u, 10000u, 100000u}) {
        const auto rep = lemma_tv_bound(model, n, {3}, exact_bound_inputs(model, n, {3}));
        const double nn = static_cast<double>(n);
        EXPECT_NEAR(rep.summand1 * nn, std::pow(c, 6) / 2, 0.01);
        EXPECT_NEAR(rep.summand2 * nn, std::pow(c, 5) + std::pow(c, 6), 0.02);
        EXPECT_NEAR(rep.total_bound, rep.summand1 + rep.summand2 + rep.summand3, 1e-15);
        EXPECT_EQ(rep.realizable_classes, 2);
        EXPECT_EQ(rep.unrealizable_classes, 3 + 9 + 27 - 2);
        EXPECT_EQ(rep.vacuous(), rep.total_bound >= 1.0);
        EXPECT_EQ(rep.b3, 0.0);
        pts.push_back({nn, rep.total_bound, 0.0});
    }
    const auto fit = fit_rate(pts);
    EXPECT_NEAR(fit.slope, -1.0, 0.05);
    EXPECT_GT(pts[0].estimate, pts[1].estimate);
}

TEST(SteinChen, MissingInputsAreReported)
{
    const auto model = WeightModel::constant(0.5);
    auto in = exact_bound_inputs(model, 50, {3, 4});
    in.pk.erase(4);
    EXPECT_THROW(lemma_tv_bound(model, 50, {3, 4}, in), IncompleteInputError);
    in = exact_bound_inputs(model, 50, {3, 4});
    in.pair.erase(in.pair.begin());
    EXPECT_THROW(lemma_tv_bound(model, 50, {3, 4}, in), IncompleteInputError);
    EXPECT_THROW(exact_bound_inputs(WeightModel::exponential(1), 50, {3}), DomainError);
    EXPECT_THROW(exact_bound_inputs(model, 50, {51}), DomainError);
}

TEST(SteinChen, MonteCarloInputsReproduceExactForConstant)
{
    const auto model = WeightModel::constant(0.7);
    RngStream rng(4);
    const auto mc = mc_bound_inputs(model, 40, {3, 4}, 10, rng);
    const auto ex = exact_bound_inputs(model, 40, {3, 4});
    ASSERT_EQ(mc.pair.size(), ex.pair.size());
    for (auto& [cls, e] : ex.pair)
        EXPECT_NEAR(mc.pair.at(cls).value, e.value, 1e-15 + 1e-12 * e.value);
}
