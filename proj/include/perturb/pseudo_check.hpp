#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perturb/errors.hpp"
#include "perturb/generators.hpp"
#include "perturb/graph.hpp"
#include "perturb/rng.hpp"

namespace perturb {

// Discrepancy checks. Both quantify over disjoint nonempty X, Y; e(X, Y) is
// the number of edges with one end in X and the other in Y. With disjoint
// sets K_n at p = 1 has zero discrepancy.

inline constexpr std::size_t kJumblednessExactMaxN = 16;
inline constexpr std::size_t kCoverageExactMaxN = 14;

enum class CheckMode { exact, sampled };

inline const char* to_string(CheckMode m) { return m == CheckMode::exact ? "exact" : "sampled"; }

struct DiscrepancyReport {
    /// max |e(X,Y) - p|X||Y|| / sqrt(|X||Y|) over the examined pairs.
    double beta_observed = 0.0;
    std::vector<Vertex> witness_x;
    std::vector<Vertex> witness_y;
    CheckMode mode = CheckMode::exact;
    std::uint64_t pairs_examined = 0;
};

struct PseudoParams {
    double p = 0.0;
    double D = 1.0;
    std::size_t k = 1;
    double epsilon = 0.0;
    std::size_t threshold = 0;

    /// k = ceil(eps n / 2).
    static std::size_t k_for(double epsilon, std::size_t n)
    {
        return std::max<std::size_t>(1, ceil_tolerant(epsilon * static_cast<double>(n) / 2.0));
    }
    /// Density forced by sqrt(pn) <= beta <= pn/D. Reported, never enforced.
    double implied_min_p(std::size_t n) const { return D * D / static_cast<double>(n); }
    bool beta_within_bound(double beta, std::size_t n) const { return beta <= p * static_cast<double>(n) / D; }
};

inline double discrepancy_ratio(std::uint64_t e, std::size_t x, std::size_t y, double p)
{
    const double sz = static_cast<double>(x) * static_cast<double>(y);
    return std::abs(static_cast<double>(e) - p * sz) / std::sqrt(sz);
}

namespace detail {

inline std::vector<Vertex> mask_members(std::uint32_t mask)
{
    std::vector<Vertex> out;
    while (mask) {
        out.push_back(static_cast<Vertex>(std::countr_zero(mask)));
        mask &= mask - 1;
    }
    return out;
}

/// Next integer with the same popcount (Gosper).
inline std::uint32_t next_same_popcount(std::uint32_t v)
{
    std::uint32_t c = v & (0u - v);
    std::uint32_t r = v + c;
    return (((r ^ v) >> 2) / c) | r;
}

} // namespace detail

/// Exact jumbledness by enumerating every nonempty X. For fixed X and |Y| = t,
/// Y outside X, the extremes of e(X, Y) are the sums of the t largest and t
/// smallest X-degrees among V \ X, so Y need not be enumerated.
inline DiscrepancyReport jumbledness_exact(const Graph& g, double p)
{
    const std::size_t n = g.vertex_count();
    if (n > kJumblednessExactMaxN)
        throw ConfigError("n", "exact jumbledness is limited to n <= 16; use sampled mode");
    DiscrepancyReport rep;
    rep.mode = CheckMode::exact;
    if (n == 0) return rep;

    std::vector<std::uint32_t> adj(n, 0);
    for (const auto& e : g.edges()) {
        adj[e.u] |= 1u << e.v;
        adj[e.v] |= 1u << e.u;
    }
    const std::uint32_t full = (1u << n) - 1;
    std::vector<std::pair<std::uint32_t, Vertex>> deg;
    deg.reserve(n);
    bool have = false;
    for (std::uint32_t x = 1; x < full; ++x) {
        const auto xs = static_cast<std::size_t>(std::popcount(x));
        deg.clear();
        for (Vertex y = 0; y < n; ++y)
            if (!(x >> y & 1)) deg.emplace_back(static_cast<std::uint32_t>(std::popcount(adj[y] & x)), y);
        std::sort(deg.begin(), deg.end(), [](auto a, auto b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
        const std::size_t m = deg.size();
        std::uint64_t top = 0;
        std::uint64_t bottom = 0;
        for (std::size_t t = 1; t <= m; ++t) {
            top += deg[t - 1].first;
            bottom += deg[m - t].first;
            double hi = discrepancy_ratio(top, xs, t, p);
            double lo = discrepancy_ratio(bottom, xs, t, p);
            bool use_top = hi >= lo;
            double val = use_top ? hi : lo;
            if (!have || val > rep.beta_observed) {
                have = true;
                rep.beta_observed = val;
                rep.witness_x = detail::mask_members(x);
                rep.witness_y.clear();
                for (std::size_t i = 0; i < t; ++i)
                    rep.witness_y.push_back(use_top ? deg[i].second : deg[m - 1 - i].second);
                std::sort(rep.witness_y.begin(), rep.witness_y.end());
            }
        }
        rep.pairs_examined += (std::uint64_t{1} << m) - 1;
    }
    return rep;
}

/// Lower bound on the jumbledness constant from random disjoint (X, Y) pairs.
/// Each sample draws |X| and |Y| uniformly from `sizes`, redrawing while
/// |X| + |Y| > n, then the sets uniformly among disjoint sets of those sizes.
inline DiscrepancyReport jumbledness_sampled(const Graph& g, double p, std::span<const std::size_t> sizes,
                                             std::uint64_t samples, Rng& rng)
{
    const std::size_t n = g.vertex_count();
    DiscrepancyReport rep;
    rep.mode = CheckMode::sampled;
    if (samples == 0 || n < 2) return rep;
    if (sizes.empty()) throw ConfigError("sizes", "no set sizes given");
    for (auto s : sizes)
        if (s < 1 || s > n) throw ConfigError("sizes", "set size outside 1..n");
    if (2 * *std::min_element(sizes.begin(), sizes.end()) > n)
        throw ConfigError("sizes", "no two sizes fit disjointly in n vertices");

    std::vector<Vertex> pool(n);
    std::iota(pool.begin(), pool.end(), Vertex{0});
    std::vector<char> in_x(n, 0);
    for (std::uint64_t s = 0; s < samples; ++s) {
        std::size_t sx = 0;
        std::size_t sy = 0;
        do {
            sx = sizes[rng.below(sizes.size())];
            sy = sizes[rng.below(sizes.size())];
        } while (sx + sy > n);
        for (std::size_t i = 0; i < sx + sy; ++i) std::swap(pool[i], pool[i + rng.below(n - i)]);
        std::vector<Vertex> xs(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(sx));
        std::vector<Vertex> ys(pool.begin() + static_cast<std::ptrdiff_t>(sx),
                               pool.begin() + static_cast<std::ptrdiff_t>(sx + sy));
        for (Vertex v : xs) in_x[v] = 1;
        std::uint64_t e = 0;
        for (Vertex y : ys)
            for (Vertex w : g.neighbours(y)) e += in_x[w];
        for (Vertex v : xs) in_x[v] = 0;
        double val = discrepancy_ratio(e, sx, sy, p);
        if (rep.pairs_examined == 0 || val > rep.beta_observed) {
            rep.beta_observed = val;
            std::sort(xs.begin(), xs.end());
            std::sort(ys.begin(), ys.end());
            rep.witness_x = std::move(xs);
            rep.witness_y = std::move(ys);
        }
        ++rep.pairs_examined;
    }
    return rep;
}

struct CoverageResult {
    bool holds = true;
    /// A disjoint pair carrying fewer than `threshold` colours, when !holds.
    std::vector<Vertex> witness_x;
    std::vector<Vertex> witness_y;
    std::uint64_t pairs_examined = 0;
    /// Fewest distinct colours seen on any examined pair.
    std::size_t min_colours = 0;
    /// Sampled mode with zero samples: vacuously true.
    bool no_evidence = false;
};

namespace detail {

class PairColourCounter {
  public:
    explicit PairColourCounter(const ColouredGraph& g) : g_(g), stamp_(g.palette_size() + std::size_t{1}, 0) {}

    std::size_t count(std::span<const Vertex> xs, std::span<const Vertex> ys)
    {
        ++epoch_;
        std::size_t distinct = 0;
        for (Vertex x : xs)
            for (Vertex y : ys) {
                Colour c = g_.colour(x, y);
                if (c != kNoColour && stamp_[c] != epoch_) {
                    stamp_[c] = epoch_;
                    ++distinct;
                }
            }
        return distinct;
    }

  private:
    const ColouredGraph& g_;
    std::vector<std::uint64_t> stamp_;
    std::uint64_t epoch_ = 0;
};

inline void check_coverage_args(std::size_t n, std::size_t k)
{
    if (k < 1) throw ConfigError("k", "must be at least 1");
    if (2 * k > n) throw ConfigError("k", "needs 2k <= n");
}

} // namespace detail

/// Whether every pair of disjoint k-sets X, Y sees at least `threshold`
/// distinct colours on E(X, Y). Pairs are unordered; enumeration visits X in
/// increasing bitmask order, so the first violation found is reported.
inline CoverageResult coverage_condition_exact(const ColouredGraph& g, std::size_t k, std::size_t threshold)
{
    const std::size_t n = g.vertex_count();
    if (n > kCoverageExactMaxN)
        throw ConfigError("n", "exact coverage check is limited to n <= 14; use sampled mode");
    detail::check_coverage_args(n, k);
    CoverageResult res;
    res.min_colours = static_cast<std::size_t>(-1);
    detail::PairColourCounter counter(g);
    const std::uint32_t limit = 1u << n;
    for (std::uint32_t x = (1u << k) - 1; x < limit; x = detail::next_same_popcount(x)) {
        const std::uint32_t x_low = x & (0u - x);
        auto xs = detail::mask_members(x);
        for (std::uint32_t y = (1u << k) - 1; y < limit; y = detail::next_same_popcount(y)) {
            if ((y & x) || (y & (0u - y)) < x_low) continue;
            auto ys = detail::mask_members(y);
            std::size_t c = counter.count(xs, ys);
            ++res.pairs_examined;
            res.min_colours = std::min(res.min_colours, c);
            if (c < threshold) {
                res.holds = false;
                res.witness_x = std::move(xs);
                res.witness_y = std::move(ys);
                return res;
            }
        }
    }
    if (res.pairs_examined == 0) res.min_colours = 0;
    return res;
}

/// Monte Carlo relaxation: only `samples` uniformly drawn disjoint pairs are
/// examined. A false answer is always backed by a genuine witness.
inline CoverageResult coverage_condition_sampled(const ColouredGraph& g, std::size_t k, std::size_t threshold,
                                                 std::uint64_t samples, Rng& rng)
{
    const std::size_t n = g.vertex_count();
    detail::check_coverage_args(n, k);
    CoverageResult res;
    if (samples == 0) {
        res.no_evidence = true;
        return res;
    }
    res.min_colours = static_cast<std::size_t>(-1);
    detail::PairColourCounter counter(g);
    std::vector<Vertex> pool(n);
    std::iota(pool.begin(), pool.end(), Vertex{0});
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (std::size_t i = 0; i < 2 * k; ++i) std::swap(pool[i], pool[i + rng.below(n - i)]);
        std::span<const Vertex> xs(pool.data(), k);
        std::span<const Vertex> ys(pool.data() + k, k);
        std::size_t c = counter.count(xs, ys);
        ++res.pairs_examined;
        res.min_colours = std::min(res.min_colours, c);
        if (c < threshold) {
            res.holds = false;
            res.witness_x.assign(xs.begin(), xs.end());
            res.witness_y.assign(ys.begin(), ys.end());
            std::sort(res.witness_x.begin(), res.witness_x.end());
            std::sort(res.witness_y.begin(), res.witness_y.end());
            return res;
        }
    }
    return res;
}

} // namespace perturb
