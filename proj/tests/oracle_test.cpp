#include "perturb/oracle.hpp"

#include <algorithm>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace perturb {
namespace {

/// Plain permutation enumeration for cross-checking the backtracking search.
bool has_rainbow_hamilton_by_permutation(const ColouredGraph& g)
{
    const std::size_t n = g.vertex_count();
    std::vector<Vertex> seq(n);
    for (Vertex v = 0; v < n; ++v) seq[v] = v;
    do {
        if (is_rainbow(g, seq, true)) return true;
    } while (std::next_permutation(seq.begin() + 1, seq.end()));
    return false;
}

TEST(OracleTest, RainbowTriangle)
{
    ColouredGraph g(3, 3);
    g.add_edge(0, 1, 1);
    g.add_edge(1, 2, 2);
    g.add_edge(0, 2, 3);
    auto c = brute_rainbow_hamilton(g);
    ASSERT_TRUE(c.cycle);
    EXPECT_TRUE(c.cycle->is_hamilton(3));
    EXPECT_EQ(brute_longest_rainbow_path(g).path.edge_count(), 2u);
}

TEST(OracleTest, MonochromaticTriangleHasNoCycle)
{
    ColouredGraph g(3, 1);
    g.add_edge(0, 1, 1);
    g.add_edge(1, 2, 1);
    g.add_edge(0, 2, 1);
    auto c = brute_rainbow_hamilton(g);
    EXPECT_FALSE(c.cycle);
    EXPECT_EQ(c.status, OracleStatus::ok);
    EXPECT_EQ(brute_longest_rainbow_path(g).path.edge_count(), 1u);
}

TEST(OracleTest, FourCycleWithRepeatedColour)
{
    ColouredGraph g(4, 3);
    g.add_edge(0, 1, 1);
    g.add_edge(1, 2, 2);
    g.add_edge(2, 3, 3);
    g.add_edge(3, 0, 1);
    EXPECT_FALSE(brute_rainbow_hamilton(g).cycle);
    auto p = brute_longest_rainbow_path(g);
    EXPECT_EQ(p.path.edge_count(), 3u);
    EXPECT_TRUE(p.path.rainbow());
}

TEST(OracleTest, TinyAndEmptyGraphs)
{
    EXPECT_FALSE(brute_rainbow_hamilton(ColouredGraph(2, 1)).cycle);
    EXPECT_EQ(brute_longest_rainbow_path(ColouredGraph(1, 1)).path.vertex_count(), 1u);
    EXPECT_EQ(brute_longest_rainbow_path(ColouredGraph(5, 1)).path.edge_count(), 0u);
}

TEST(OracleTest, SizeLimits)
{
    EXPECT_THROW(brute_longest_rainbow_path(ColouredGraph(15, 1)), ContractError);
    EXPECT_THROW(brute_rainbow_hamilton(ColouredGraph(13, 1)), ContractError);
    EXPECT_THROW(brute_rainbow_hamilton(ColouredGraph(5, 1), OracleBudget{13, 10}), ContractError);
}

TEST(OracleTest, BudgetExhaustionIsReported)
{
    auto g = testing::injective_complete(12);
    ColouredGraph nocycle(12, 66);
    // K_12 minus one vertex's edges but one: degree 1 vertex, so no Hamilton cycle.
    for (const auto& e : g.edges())
        if (e.u != 11 && e.v != 11) nocycle.add_edge(e.u, e.v, e.colour);
    nocycle.add_edge(0, 11, 66);
    auto c = brute_rainbow_hamilton(nocycle, OracleBudget{12, 1000});
    EXPECT_EQ(c.status, OracleStatus::budget_exhausted);
    EXPECT_FALSE(c.cycle);
}

TEST(OracleTest, AgreesWithPermutationEnumeration)
{
    Rng rng(101);
    int found = 0;
    for (int i = 0; i < 120; ++i) {
        std::size_t n = 3 + rng.below(5);
        auto g = testing::random_coloured(n, 0.5 + 0.5 * rng.uniform01(), static_cast<Colour>(n + rng.below(3)), rng);
        auto c = brute_rainbow_hamilton(g);
        ASSERT_EQ(c.status, OracleStatus::ok);
        bool expected = has_rainbow_hamilton_by_permutation(g);
        EXPECT_EQ(c.cycle.has_value(), expected);
        if (c.cycle) {
            ++found;
            EXPECT_TRUE(is_rainbow(g, c.cycle->vertices, true));
            EXPECT_TRUE(c.cycle->is_hamilton(n));
        }
    }
    EXPECT_GT(found, 0);
}

TEST(OracleTest, LongestPathIsMaximal)
{
    // No rainbow path of the reported length + 1 exists among all vertex orders.
    Rng rng(55);
    for (int i = 0; i < 40; ++i) {
        std::size_t n = 3 + rng.below(4);
        auto g = testing::random_coloured(n, 0.6, static_cast<Colour>(n - 1), rng);
        auto best = brute_longest_rainbow_path(g);
        ASSERT_EQ(best.status, OracleStatus::ok);
        EXPECT_TRUE(is_rainbow(g, best.path.vertices, false));
        std::size_t longest = 0;
        std::vector<Vertex> perm(n);
        for (Vertex v = 0; v < n; ++v) perm[v] = v;
        do {
            for (std::size_t len = 2; len <= n; ++len)
                if (is_rainbow(g, std::span<const Vertex>(perm.data(), len), false)) longest = std::max(longest, len - 1);
        } while (std::next_permutation(perm.begin(), perm.end()));
        EXPECT_EQ(best.path.edge_count(), longest);
    }
}

TEST(OracleTest, InjectiveCompleteIsHamiltonian)
{
    for (std::size_t n : {3u, 6u, 12u}) {
        auto g = testing::injective_complete(n);
        auto c = brute_rainbow_hamilton(g);
        ASSERT_TRUE(c.cycle);
        EXPECT_TRUE(c.cycle->is_hamilton(n));
        EXPECT_EQ(brute_longest_rainbow_path(g).path.vertex_count(), n);
    }
}

} // namespace
} // namespace perturb
