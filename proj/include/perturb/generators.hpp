#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perturb/errors.hpp"
#include "perturb/graph.hpp"
#include "perturb/rng.hpp"

namespace perturb {

enum class SeedFamily { complete, bipartite, two_cliques, supercritical_gnq };

inline std::string_view to_string(SeedFamily f)
{
    switch (f) {
    case SeedFamily::complete: return "complete";
    case SeedFamily::bipartite: return "bipartite";
    case SeedFamily::two_cliques: return "two_cliques";
    case SeedFamily::supercritical_gnq: return "supercritical_gnq";
    }
    return "?";
}

inline std::optional<SeedFamily> parse_family(std::string_view name)
{
    for (auto f : {SeedFamily::complete, SeedFamily::bipartite, SeedFamily::two_cliques,
                   SeedFamily::supercritical_gnq})
        if (to_string(f) == name) return f;
    return std::nullopt;
}

/// ceil(x) that ignores floating-point noise just above an integer (0.3 * 500 etc.).
inline std::size_t ceil_tolerant(double x)
{
    double r = std::round(x);
    if (std::abs(x - r) < 1e-9) return static_cast<std::size_t>(std::max(0.0, r));
    return static_cast<std::size_t>(std::max(0.0, std::ceil(x)));
}

inline std::size_t floor_tolerant(double x)
{
    double r = std::round(x);
    if (std::abs(x - r) < 1e-9) return static_cast<std::size_t>(std::max(0.0, r));
    return static_cast<std::size_t>(std::max(0.0, std::floor(x)));
}

/// Required seed minimum degree ceil(d n).
inline std::size_t min_degree_target(std::size_t n, double d) { return ceil_tolerant(d * static_cast<double>(n)); }

/// Second-round density p2 with (1 - C/n) = (1 - K/n)(1 - p2).
inline double two_round_split(double C, double K, std::size_t n)
{
    const double nn = static_cast<double>(n);
    if (!(K > 0)) throw ConfigError("K", "must be positive");
    if (!(K < C)) throw ConfigError("C", "must exceed K (the split is degenerate otherwise)");
    if (!(C < nn)) throw ConfigError("C", "must be below n");
    return (C - K) / (nn - K);
}

/// Parameters of one draw from the perturbed, randomly coloured model.
struct PerturbationConfig {
    std::size_t n = 0;
    double d = 0.0;
    SeedFamily family = SeedFamily::complete;
    /// Total perturbation density is C/n, exposed as K/n then p2.
    double C = 0.0;
    double K = 0.0;
    double alpha = 0.0;
    /// Absorption margin. Unset means the default d^3/220.
    std::optional<double> epsilon;
    std::uint64_t master_seed = 0;

    static double default_epsilon(double d) { return d * d * d / 220.0; }

    double effective_epsilon() const { return epsilon.value_or(default_epsilon(d)); }
    Colour palette() const
    {
        return static_cast<Colour>(std::llround((1.0 + alpha) * static_cast<double>(n)));
    }
    double p1() const { return K / static_cast<double>(n); }
    double p2() const { return two_round_split(C, K, n); }
    /// Number of vertices the first-round rainbow path must reach, floor((1 - eps) n).
    std::size_t path_target() const
    {
        return floor_tolerant((1.0 - effective_epsilon()) * static_cast<double>(n));
    }

    /// Throws ConfigError naming the first infeasible field.
    void validate() const
    {
        if (n < 4) throw ConfigError("n", "must be at least 4");
        if (!(d > 0.0 && d < 1.0)) throw ConfigError("d", "must lie in (0, 1)");
        if (min_degree_target(n, d) > n - 1) throw ConfigError("d", "ceil(d n) exceeds n - 1");
        if (!(alpha > 0.0)) throw ConfigError("alpha", "must be positive");
        if (palette() < n + 1) throw ConfigError("alpha", "palette round((1+alpha) n) must be at least n + 1");
        double p = two_round_split(C, K, n);
        if (!(p > 0.0 && p <= 1.0)) throw ConfigError("C", "second-round density outside (0, 1]");
        if (!(K / static_cast<double>(n) <= 1.0)) throw ConfigError("K", "K/n exceeds 1");
        double eps = effective_epsilon();
        if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("epsilon", "must lie in (0, 1)");
        if (path_target() < 2) throw ConfigError("epsilon", "path target floor((1-eps) n) below 2");
    }
};

/// G(n, p): every pair independently with probability p. Geometric skipping
/// over the lexicographic pair order, so cost is O(n + edges).
inline Graph sample_gnp(std::size_t n, double p, Rng& rng)
{
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p", "edge probability outside [0, 1]");
    Graph g(n);
    if (n < 2 || p == 0.0) return g;
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    g.reserve_edges(static_cast<std::size_t>(pairs * p * 1.1 + 16));
    if (p == 1.0) {
        for (Vertex v = 1; v < n; ++v)
            for (Vertex w = 0; w < v; ++w) g.add_edge(v, w);
        return g;
    }
    std::uint64_t v = 1;
    std::uint64_t w = 0;
    bool first = true;
    const std::uint64_t limit = static_cast<std::uint64_t>(n) * n;
    while (v < n) {
        std::uint64_t skip = rng.geometric(p);
        std::uint64_t step = std::min<std::uint64_t>(skip, limit) + (first ? 0 : 1);
        first = false;
        w += step;
        while (w >= v && v < n) {
            w -= v;
            ++v;
        }
        if (v < n) g.add_edge(static_cast<Vertex>(v), static_cast<Vertex>(w));
    }
    return g;
}

/// Dense seed graph with minimum degree at least ceil(d n).
///
///  - complete: K_n.
///  - bipartite: K_{a, n-a} with a = ceil(d n); sides {0..a-1} and {a..n-1}.
///    Not Hamiltonian when a < n - a.
///  - two_cliques: cliques on the first ceil(n/2) and last floor(n/2) vertices,
///    joined by the single bridge edge (ceil(n/2) - 1, ceil(n/2)).
///  - supercritical_gnq: G(n, min(1, d + 0.1)) resampled (at most 100 times)
///    until the minimum degree target holds.
inline Graph make_seed(SeedFamily family, std::size_t n, double d, Rng& rng)
{
    if (n < 2) throw ConfigError("n", "seed needs at least two vertices");
    if (!(d > 0.0 && d < 1.0)) throw ConfigError("d", "must lie in (0, 1)");
    const std::size_t target = min_degree_target(n, d);
    if (target > n - 1) throw ConfigError("d", "ceil(d n) exceeds n - 1");

    switch (family) {
    case SeedFamily::complete: return sample_gnp(n, 1.0, rng);
    case SeedFamily::bipartite: {
        const std::size_t a = target;
        if (n - a < a) throw ConfigError("d", "bipartite seed needs n - ceil(d n) >= ceil(d n)");
        Graph g(n);
        g.reserve_edges(a * (n - a));
        for (Vertex u = 0; u < a; ++u)
            for (Vertex v = static_cast<Vertex>(a); v < n; ++v) g.add_edge(u, v);
        return g;
    }
    case SeedFamily::two_cliques: {
        const std::size_t big = (n + 1) / 2;
        const std::size_t small = n / 2;
        if (small < 1 || small - 1 < target)
            throw ConfigError("d", "two_cliques needs floor(n/2) - 1 >= ceil(d n)");
        Graph g(n);
        for (Vertex u = 0; u < big; ++u)
            for (Vertex v = u + 1; v < big; ++v) g.add_edge(u, v);
        for (Vertex u = static_cast<Vertex>(big); u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v) g.add_edge(u, v);
        g.add_edge(static_cast<Vertex>(big - 1), static_cast<Vertex>(big));
        return g;
    }
    case SeedFamily::supercritical_gnq: {
        const double q = std::min(1.0, d + 0.1);
        for (int attempt = 0; attempt < 100; ++attempt) {
            Graph g = sample_gnp(n, q, rng);
            if (g.min_degree() >= target) return g;
        }
        throw ConfigError("d", "supercritical_gnq: no sample reached the minimum degree in 100 attempts");
    }
    }
    throw ConfigError("family", "unknown seed family");
}

/// Which exposure rounds contributed an edge. Tags may overlap.
enum RoundTag : std::uint8_t {
    kSeedRound = 1,
    kFirstRound = 2,
    kSecondRound = 4,
};

class ColouredUnion;
inline ColouredUnion colour_union(const Graph& h, const Graph& r1, const Graph& r2, Colour r, Rng& rng);

/// H ∪ R1 ∪ R2 coloured once, plus per-edge provenance.
class ColouredUnion {
  public:
    ColouredUnion(ColouredGraph graph, std::size_t n) : graph_(std::move(graph)), tags_(n) {}

    const ColouredGraph& graph() const { return graph_; }
    std::uint8_t tags(Vertex u, Vertex v) const { return tags_.get(u, v); }
    bool in_round(Vertex u, Vertex v, RoundTag t) const { return (tags(u, v) & t) != 0; }

  private:
    friend ColouredUnion colour_union(const Graph&, const Graph&, const Graph&, Colour, Rng&);
    ColouredGraph graph_;
    detail::PairTable<std::uint8_t> tags_;
};

/// Colours every edge of h ∪ r1 ∪ r2 exactly once, uniformly from {1..r}.
/// Edges are visited h, then r1, then r2, each in insertion order.
inline ColouredUnion colour_union(const Graph& h, const Graph& r1, const Graph& r2, Colour r, Rng& rng)
{
    const std::size_t n = h.vertex_count();
    if (r1.vertex_count() != n || r2.vertex_count() != n)
        throw ContractError("colour_union: graphs on different vertex sets");
    if (r < 1) throw ContractError("colour_union: empty palette");
    ColouredGraph g(n, r);
    g.reserve_edges(h.edge_count() + r1.edge_count() + r2.edge_count());
    ColouredUnion out(std::move(g), n);
    auto add_all = [&](const Graph& part, RoundTag tag) {
        for (const auto& e : part.edges()) {
            std::uint8_t t = out.tags_.get(e.u, e.v);
            if (t == 0) out.graph_.add_edge(e.u, e.v, static_cast<Colour>(1 + rng.below(r)));
            out.tags_.set(e.u, e.v, static_cast<std::uint8_t>(t | tag));
        }
    };
    add_all(h, kSeedRound);
    add_all(r1, kFirstRound);
    add_all(r2, kSecondRound);
    return out;
}

/// Uniformly random permutation of {0..n-1}, as a vertex -> image map.
inline std::vector<Vertex> random_permutation(std::size_t n, Rng& rng)
{
    std::vector<Vertex> perm(n);
    std::iota(perm.begin(), perm.end(), Vertex{0});
    rng.shuffle(perm);
    return perm;
}

inline std::vector<Vertex> inverse_permutation(std::span<const Vertex> perm)
{
    std::vector<Vertex> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inv.at(perm[i]) = static_cast<Vertex>(i);
    return inv;
}

/// Renames vertex v to perm[v]; colours travel with their edges.
inline ColouredGraph relabel(const ColouredGraph& g, std::span<const Vertex> perm)
{
    if (perm.size() != g.vertex_count()) throw ContractError("relabel: permutation size mismatch");
    ColouredGraph out(g.vertex_count(), g.palette_size());
    out.reserve_edges(g.edge_count());
    for (const auto& e : g.edges()) out.add_edge(perm[e.u], perm[e.v], e.colour);
    return out;
}

inline Graph relabel(const Graph& g, std::span<const Vertex> perm)
{
    if (perm.size() != g.vertex_count()) throw ContractError("relabel: permutation size mismatch");
    Graph out(g.vertex_count());
    out.reserve_edges(g.edge_count());
    for (const auto& e : g.edges()) out.add_edge(perm[e.u], perm[e.v]);
    return out;
}

struct Relabelled {
    ColouredGraph graph;
    std::vector<Vertex> permutation;
};

/// Relabels by a uniformly random permutation (the randomness-shift device).
inline Relabelled relabel_random(const ColouredGraph& g, Rng& rng)
{
    auto perm = random_permutation(g.vertex_count(), rng);
    auto out = relabel(g, perm);
    return {std::move(out), std::move(perm)};
}

} // namespace perturb
