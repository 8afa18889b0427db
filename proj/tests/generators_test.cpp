#include "perturb/generators.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace perturb {
namespace {

TEST(RngTest, SplitStreamsAreIndependentOfParentUse)
{
    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) a();
    Rng ca = a.split(3), cb = b.split(3);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(ca(), cb());
    EXPECT_NE(Rng(7).split(3)(), Rng(7).split(4)());
}

TEST(RngTest, BelowStaysInRange)
{
    Rng rng(1);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 7000; ++i) {
        auto v = rng.below(7);
        ASSERT_LT(v, 7u);
        ++counts[v];
    }
    for (int c : counts) EXPECT_NEAR(c, 1000, 4 * std::sqrt(7000 * (1.0 / 7) * (6.0 / 7)));
    EXPECT_EQ(rng.below(1), 0u);
}

TEST(SampleGnpTest, Extremes)
{
    Rng rng(3);
    EXPECT_EQ(sample_gnp(10, 0.0, rng).edge_count(), 0u);
    auto full = sample_gnp(10, 1.0, rng);
    EXPECT_EQ(full.edge_count(), 45u);
    EXPECT_EQ(full.min_degree(), 9u);
    EXPECT_THROW(sample_gnp(10, 1.5, rng), ConfigError);
    EXPECT_EQ(sample_gnp(1, 0.5, rng).edge_count(), 0u);
}

TEST(SampleGnpTest, MeanEdgeCount)
{
    // 4950 pairs at p = 0.1: mean 495, standard error of a 1000-sample mean
    // sqrt(4950 * 0.1 * 0.9 / 1000) = 0.66746.
    Rng rng(11);
    double total = 0;
    for (int i = 0; i < 1000; ++i) total += static_cast<double>(sample_gnp(100, 0.1, rng).edge_count());
    EXPECT_NEAR(total / 1000.0, 495.0, 4 * 0.66746);
}

TEST(SampleGnpTest, EveryPairEquallyLikely)
{
    // The skip sampler must not favour early or late pairs.
    Rng rng(5);
    const std::size_t n = 12;
    std::vector<int> hits(n * n, 0);
    const int trials = 4000;
    for (int t = 0; t < trials; ++t) {
        Graph g = sample_gnp(n, 0.3, rng);
        for (const auto& e : g.edges()) ++hits[e.u * n + e.v];
    }
    const double se = std::sqrt(trials * 0.3 * 0.7);
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v) EXPECT_NEAR(hits[u * n + v], trials * 0.3, 4.5 * se) << u << "," << v;
}

TEST(MakeSeedTest, Complete)
{
    Rng rng(1);
    auto g = make_seed(SeedFamily::complete, 5, 0.4, rng);
    EXPECT_EQ(g.edge_count(), 10u);
    EXPECT_EQ(g.min_degree(), 4u);
}

TEST(MakeSeedTest, BipartiteHasSidesOfCeilDn)
{
    Rng rng(1);
    auto g = make_seed(SeedFamily::bipartite, 100, 0.4, rng);
    EXPECT_EQ(g.edge_count(), 40u * 60u);
    EXPECT_EQ(g.min_degree(), 40u);
    EXPECT_TRUE(g.has_edge(0, 40));
    EXPECT_FALSE(g.has_edge(0, 39));
    EXPECT_FALSE(g.has_edge(40, 99));
}

TEST(MakeSeedTest, TwoCliques)
{
    Rng rng(1);
    auto g = make_seed(SeedFamily::two_cliques, 101, 0.4, rng);
    EXPECT_EQ(g.min_degree(), 49u);
    EXPECT_TRUE(g.has_edge(50, 51));
    EXPECT_FALSE(g.has_edge(49, 51));
    EXPECT_EQ(g.edge_count(), 51u * 50 / 2 + 50u * 49 / 2 + 1);
}

TEST(MakeSeedTest, SupercriticalMeetsMinimumDegree)
{
    Rng rng(9);
    auto g = make_seed(SeedFamily::supercritical_gnq, 300, 0.3, rng);
    EXPECT_GE(g.min_degree(), min_degree_target(300, 0.3));
}

TEST(MakeSeedTest, InfeasibleConfigsRejected)
{
    Rng rng(1);
    EXPECT_THROW(make_seed(SeedFamily::complete, 10, 1.0, rng), ConfigError);
    EXPECT_THROW(make_seed(SeedFamily::two_cliques, 20, 0.5, rng), ConfigError);
    EXPECT_THROW(make_seed(SeedFamily::bipartite, 20, 0.6, rng), ConfigError);
    // Degree target 17 against mean degree 18.85: a hundred resamples never all clear it.
    EXPECT_THROW(make_seed(SeedFamily::supercritical_gnq, 30, 0.55, rng), ConfigError);
}

TEST(MakeSeedTest, MinimumDegreeProperty)
{
    Rng rng(21);
    for (int i = 0; i < 40; ++i) {
        std::size_t n = 20 + rng.below(80);
        double d = 0.05 + 0.4 * rng.uniform01();
        for (auto fam : {SeedFamily::complete, SeedFamily::bipartite, SeedFamily::two_cliques,
                         SeedFamily::supercritical_gnq}) {
            Graph g;
            try {
                g = make_seed(fam, n, d, rng);
            } catch (const ConfigError&) {
                continue;
            }
            EXPECT_GE(g.min_degree(), min_degree_target(n, d)) << to_string(fam) << " n=" << n << " d=" << d;
        }
    }
}

TEST(MinDegreeTargetTest, IgnoresFloatingNoise)
{
    EXPECT_EQ(min_degree_target(500, 0.3), 150u);
    EXPECT_EQ(min_degree_target(100, 0.4), 40u);
    EXPECT_EQ(min_degree_target(101, 0.4), 41u);
    EXPECT_EQ(min_degree_target(3, 0.5), 2u);
}

TEST(TwoRoundSplitTest, Values)
{
    EXPECT_DOUBLE_EQ(two_round_split(51, 50, 100), 0.02);
    EXPECT_DOUBLE_EQ(two_round_split(6, 5, 1000), 1.0 / 995);
    EXPECT_NEAR(two_round_split(6, 5, 1000), 1.00503e-3, 1e-8);
    EXPECT_GE(two_round_split(6, 5, 1000), 1.0 / 1000);
}

TEST(TwoRoundSplitTest, SatisfiesIdentity)
{
    for (double K : {1.0, 5.0, 20.0})
        for (double C : {K + 0.5, K + 1, K + 7}) {
            const double n = 400;
            double p = two_round_split(C, K, 400);
            EXPECT_NEAR((1 - K / n) * (1 - p), 1 - C / n, 1e-15);
        }
}

TEST(TwoRoundSplitTest, DegenerateSplitRejected)
{
    EXPECT_THROW(two_round_split(5, 5, 100), ConfigError);
    EXPECT_THROW(two_round_split(4, 5, 100), ConfigError);
    EXPECT_THROW(two_round_split(100, 5, 100), ConfigError);
    EXPECT_THROW(two_round_split(6, 0, 100), ConfigError);
}

TEST(PerturbationConfigTest, DerivedValuesAndValidation)
{
    PerturbationConfig c;
    c.n = 500;
    c.d = 0.3;
    c.family = SeedFamily::bipartite;
    c.K = 20;
    c.C = 21;
    c.alpha = 1;
    EXPECT_EQ(c.palette(), 1000u);
    EXPECT_DOUBLE_EQ(c.effective_epsilon(), 0.027 / 220);
    EXPECT_NO_THROW(c.validate());
    c.epsilon = 0.1;
    EXPECT_EQ(c.path_target(), 450u);
    c.C = 20;
    EXPECT_THROW(c.validate(), ConfigError);
    c.C = 21;
    c.alpha = 0.001;
    try {
        c.validate();
        FAIL() << "palette below n + 1 accepted";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "alpha");
    }
}

TEST(ColourUnionTest, SinglePaletteColour)
{
    Rng rng(2);
    Graph h = sample_gnp(10, 0.5, rng), r1 = sample_gnp(10, 0.2, rng), r2 = sample_gnp(10, 0.2, rng);
    auto u = colour_union(h, r1, r2, 1, rng);
    for (const auto& e : u.graph().edges()) EXPECT_EQ(e.colour, 1u);
}

TEST(ColourUnionTest, EmptyUnion)
{
    Rng rng(2);
    Graph e(6);
    auto u = colour_union(e, e, e, 5, rng);
    EXPECT_EQ(u.graph().edge_count(), 0u);
    EXPECT_EQ(u.graph().vertex_count(), 6u);
}

TEST(ColourUnionTest, TagsRecordEveryRound)
{
    Graph h(4), r1(4), r2(4);
    h.add_edge(0, 1);
    r1.add_edge(0, 1);
    r1.add_edge(1, 2);
    r2.add_edge(2, 3);
    r2.add_edge(1, 2);
    Rng rng(3);
    auto u = colour_union(h, r1, r2, 10, rng);
    EXPECT_EQ(u.graph().edge_count(), 3u);
    EXPECT_EQ(u.tags(0, 1), kSeedRound | kFirstRound);
    EXPECT_EQ(u.tags(2, 1), kFirstRound | kSecondRound);
    EXPECT_TRUE(u.in_round(3, 2, kSecondRound));
    EXPECT_FALSE(u.in_round(3, 2, kSeedRound));
    EXPECT_EQ(u.tags(0, 3), 0);
}

TEST(ColourUnionTest, ColoursAreUniform)
{
    // K_50 has 1225 edges; two draws give 2450 >= 2000 coloured edges over r = 100.
    // Per-colour frequency standard error sqrt(0.01 * 0.99 / m).
    Rng rng(17);
    Rng seed_rng(0);
    Graph h = make_seed(SeedFamily::complete, 50, 0.5, seed_rng);
    Graph empty(50);
    std::vector<int> counts(101, 0);
    std::size_t m = 0;
    for (int rep = 0; rep < 2; ++rep) {
        auto u = colour_union(h, empty, empty, 100, rng);
        for (const auto& e : u.graph().edges()) {
            ASSERT_GE(e.colour, 1u);
            ASSERT_LE(e.colour, 100u);
            ++counts[e.colour];
            ++m;
        }
    }
    ASSERT_GE(m, 2000u);
    const double se = std::sqrt(0.01 * 0.99 / static_cast<double>(m));
    for (Colour c = 1; c <= 100; ++c) EXPECT_NEAR(counts[c] / static_cast<double>(m), 0.01, 4 * se) << c;
}

TEST(ColourUnionTest, DeterministicForFixedSeed)
{
    auto draw = [] {
        Rng rng(99);
        Graph h = make_seed(SeedFamily::supercritical_gnq, 60, 0.2, rng);
        Graph r1 = sample_gnp(60, 0.05, rng), r2 = sample_gnp(60, 0.02, rng);
        return colour_union(h, r1, r2, 90, rng).graph();
    };
    auto a = draw(), b = draw();
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.edges(), b.edges());
}

TEST(RelabelTest, IdentityAndInverse)
{
    Rng rng(4);
    auto g = testing::random_coloured(15, 0.3, 20, rng);
    EXPECT_EQ(relabel(g, testing::identity_permutation(15)), g);
    auto shifted = relabel_random(g, rng);
    auto back = relabel(shifted.graph, inverse_permutation(shifted.permutation));
    EXPECT_EQ(back, g);
}

TEST(RelabelTest, PreservesDegreeAndColourMultisets)
{
    Rng rng(8);
    for (int i = 0; i < 20; ++i) {
        auto g = testing::random_coloured(30, 0.2, 25, rng);
        auto h = relabel_random(g, rng);
        std::vector<std::size_t> da, db;
        for (Vertex v = 0; v < 30; ++v) {
            da.push_back(g.degree(v));
            db.push_back(h.graph.degree(v));
            EXPECT_EQ(h.graph.degree(h.permutation[v]), g.degree(v));
        }
        std::sort(da.begin(), da.end());
        std::sort(db.begin(), db.end());
        EXPECT_EQ(da, db);
        for (const auto& e : g.edges())
            EXPECT_EQ(h.graph.colour(h.permutation[e.u], h.permutation[e.v]), e.colour);
    }
}

TEST(RelabelTest, RandomPermutationIsUniformOnSmallN)
{
    Rng rng(12);
    std::vector<int> counts(6, 0);
    const int trials = 6000;
    for (int t = 0; t < trials; ++t) {
        auto p = random_permutation(3, rng);
        int code = static_cast<int>(p[0] * 2 + (p[1] > p[2]));
        ++counts[code];
    }
    for (int c : counts) EXPECT_NEAR(c, 1000, 4 * std::sqrt(trials * (1.0 / 6) * (5.0 / 6)));
}

TEST(TwoRoundCouplingTest, PairInclusionMatchesTotalDensity)
{
    // P(pair in R1 ∪ R2) = 1 - (1 - K/n)(1 - p2) = C/n.
    const std::size_t n = 60;
    const double K = 3, C = 5;
    const double p2 = two_round_split(C, K, n);
    Rng rng(31);
    const int trials = 20000;
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
        Graph r1 = sample_gnp(n, K / n, rng), r2 = sample_gnp(n, p2, rng);
        hits += r1.has_edge(7, 33) || r2.has_edge(7, 33);
    }
    const double q = C / n;
    EXPECT_NEAR(hits / double(trials), q, 4 * std::sqrt(q * (1 - q) / trials));
}

} // namespace
} // namespace perturb
