#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "perturb/errors.hpp"

namespace perturb {

/// Vertices are 0-based: an n-vertex graph lives on {0, ..., n-1}.
using Vertex = std::uint32_t;
/// Colours are 1-based: a palette of size r is {1, ..., r}. 0 means "no colour".
using Colour = std::uint32_t;
inline constexpr Colour kNoColour = 0;

struct Edge {
    Vertex u;
    Vertex v;
    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// (min, max) form of an unordered pair.
constexpr Edge canonical(Vertex a, Vertex b) noexcept { return a < b ? Edge{a, b} : Edge{b, a}; }

constexpr std::uint64_t edge_key(Vertex a, Vertex b) noexcept
{
    Edge e = canonical(a, b);
    return (static_cast<std::uint64_t>(e.u) << 32) | e.v;
}

namespace detail {

/// Symmetric pair -> value table. Dense n*n storage when it fits the byte
/// budget, hash map otherwise. A default-constructed T means "absent".
template <class T>
class PairTable {
  public:
    static constexpr std::size_t kDenseBytes = std::size_t{16} << 20;

    PairTable() = default;
    explicit PairTable(std::size_t n) : n_(n)
    {
        if (n * n * sizeof(T) <= kDenseBytes) dense_.assign(n * n, T{});
    }

    T get(Vertex a, Vertex b) const
    {
        if (!dense_.empty()) return dense_[index(a, b)];
        auto it = sparse_.find(edge_key(a, b));
        return it == sparse_.end() ? T{} : it->second;
    }

    void set(Vertex a, Vertex b, T value)
    {
        if (!dense_.empty()) {
            dense_[index(a, b)] = value;
            return;
        }
        sparse_[edge_key(a, b)] = value;
    }

    void reserve(std::size_t m)
    {
        if (dense_.empty()) sparse_.reserve(m);
    }

  private:
    std::size_t index(Vertex a, Vertex b) const
    {
        Edge e = canonical(a, b);
        return static_cast<std::size_t>(e.u) * n_ + e.v;
    }

    std::size_t n_ = 0;
    std::vector<T> dense_;
    std::unordered_map<std::uint64_t, T> sparse_;
};

} // namespace detail

/// Simple undirected graph. Edges keep insertion order; neighbourhoods are
/// adjacency lists, membership is O(1).
class Graph {
  public:
    explicit Graph(std::size_t n = 0) : adjacency_(n), present_(n) {}

    std::size_t vertex_count() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    /// Returns false if the edge was already present.
    bool add_edge(Vertex u, Vertex v)
    {
        check_pair(u, v);
        if (present_.get(u, v)) return false;
        present_.set(u, v, 1);
        adjacency_[u].push_back(v);
        adjacency_[v].push_back(u);
        edges_.push_back(canonical(u, v));
        return true;
    }

    bool has_edge(Vertex u, Vertex v) const
    {
        if (u == v || u >= vertex_count() || v >= vertex_count()) return false;
        return present_.get(u, v) != 0;
    }

    std::span<const Vertex> neighbours(Vertex v) const { return adjacency_.at(v); }
    std::size_t degree(Vertex v) const { return adjacency_.at(v).size(); }

    std::size_t min_degree() const
    {
        if (adjacency_.empty()) return 0;
        std::size_t best = adjacency_.front().size();
        for (const auto& a : adjacency_) best = std::min(best, a.size());
        return best;
    }

    const std::vector<Edge>& edges() const { return edges_; }

    void reserve_edges(std::size_t m)
    {
        edges_.reserve(m);
        present_.reserve(m);
    }

    friend bool operator==(const Graph& a, const Graph& b)
    {
        if (a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count()) return false;
        return std::all_of(a.edges_.begin(), a.edges_.end(),
                           [&](const Edge& e) { return b.has_edge(e.u, e.v); });
    }

  private:
    void check_pair(Vertex u, Vertex v) const
    {
        if (u == v) throw ContractError("self-loop at vertex " + std::to_string(u));
        if (u >= vertex_count() || v >= vertex_count())
            throw ContractError("vertex out of range: (" + std::to_string(u) + ", " +
                                std::to_string(v) + ") with n = " + std::to_string(vertex_count()));
    }

    std::vector<std::vector<Vertex>> adjacency_;
    std::vector<Edge> edges_;
    detail::PairTable<std::uint8_t> present_;
};

struct ColouredEdge {
    Vertex u;
    Vertex v;
    Colour colour;
    friend bool operator==(const ColouredEdge&, const ColouredEdge&) = default;
};

struct Neighbour {
    Vertex vertex;
    Colour colour;
};

struct InsertResult {
    bool inserted = false;
    /// The edge already existed; its original colour was kept.
    bool collision = false;
};

/// Undirected graph with a total edge colouring into {1..r}.
class ColouredGraph {
  public:
    ColouredGraph() = default;
    ColouredGraph(std::size_t n, Colour palette) : palette_(palette), adjacency_(n), colour_(n) {}

    std::size_t vertex_count() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    Colour palette_size() const { return palette_; }

    InsertResult add_edge(Vertex u, Vertex v, Colour c)
    {
        if (u == v) throw ContractError("self-loop at vertex " + std::to_string(u));
        if (u >= vertex_count() || v >= vertex_count())
            throw ContractError("vertex out of range: (" + std::to_string(u) + ", " +
                                std::to_string(v) + ") with n = " + std::to_string(vertex_count()));
        if (c < 1 || c > palette_)
            throw ContractError("colour " + std::to_string(c) + " outside palette 1.." +
                                std::to_string(palette_));
        if (colour_.get(u, v) != kNoColour) return {false, true};
        colour_.set(u, v, c);
        adjacency_[u].push_back({v, c});
        adjacency_[v].push_back({u, c});
        Edge e = canonical(u, v);
        edges_.push_back({e.u, e.v, c});
        return {true, false};
    }

    /// kNoColour when the pair is not an edge.
    Colour colour(Vertex u, Vertex v) const
    {
        if (u == v || u >= vertex_count() || v >= vertex_count()) return kNoColour;
        return colour_.get(u, v);
    }

    bool has_edge(Vertex u, Vertex v) const { return colour(u, v) != kNoColour; }

    std::span<const Neighbour> neighbours(Vertex v) const { return adjacency_.at(v); }
    std::size_t degree(Vertex v) const { return adjacency_.at(v).size(); }
    const std::vector<ColouredEdge>& edges() const { return edges_; }

    void reserve_edges(std::size_t m)
    {
        edges_.reserve(m);
        colour_.reserve(m);
    }

    Graph uncoloured() const
    {
        Graph g(vertex_count());
        g.reserve_edges(edge_count());
        for (const auto& e : edges_) g.add_edge(e.u, e.v);
        return g;
    }

    friend bool operator==(const ColouredGraph& a, const ColouredGraph& b)
    {
        if (a.vertex_count() != b.vertex_count() || a.palette_ != b.palette_ ||
            a.edge_count() != b.edge_count())
            return false;
        return std::all_of(a.edges_.begin(), a.edges_.end(),
                           [&](const ColouredEdge& e) { return b.colour(e.u, e.v) == e.colour; });
    }

  private:
    Colour palette_ = 0;
    std::vector<std::vector<Neighbour>> adjacency_;
    std::vector<ColouredEdge> edges_;
    detail::PairTable<Colour> colour_;
};

/// Union of two coloured graphs on the same vertex set and palette.
/// A shared edge must carry the same colour in both: the model colours the
/// union once, so disagreement means the caller coloured the parts separately.
inline ColouredGraph graph_union(const ColouredGraph& a, const ColouredGraph& b)
{
    if (a.vertex_count() != b.vertex_count())
        throw ContractError("union of graphs with different vertex counts");
    if (a.palette_size() != b.palette_size())
        throw ContractError("union of graphs with different palettes");
    ColouredGraph out(a.vertex_count(), a.palette_size());
    out.reserve_edges(a.edge_count() + b.edge_count());
    for (const auto& e : a.edges()) out.add_edge(e.u, e.v, e.colour);
    for (const auto& e : b.edges()) {
        Colour existing = out.colour(e.u, e.v);
        if (existing != kNoColour && existing != e.colour)
            throw ContractError("colour disagreement on shared edge (" + std::to_string(e.u) + ", " +
                                std::to_string(e.v) + ")");
        out.add_edge(e.u, e.v, e.colour);
    }
    return out;
}

/// Subgraph of `g` on the edges of `keep`, carrying g's colours.
inline ColouredGraph restrict_to(const ColouredGraph& g, const Graph& keep)
{
    ColouredGraph out(g.vertex_count(), g.palette_size());
    out.reserve_edges(keep.edge_count());
    for (const auto& e : keep.edges()) {
        Colour c = g.colour(e.u, e.v);
        if (c == kNoColour) throw ContractError("restrict_to: edge missing from coloured graph");
        out.add_edge(e.u, e.v, c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Paths, cycles and rainbow verification

enum class RainbowFailure {
    none,
    too_short,
    vertex_out_of_range,
    repeated_vertex,
    missing_edge,
    colour_repeat,
};

inline const char* to_string(RainbowFailure f)
{
    switch (f) {
    case RainbowFailure::none: return "none";
    case RainbowFailure::too_short: return "too_short";
    case RainbowFailure::vertex_out_of_range: return "vertex_out_of_range";
    case RainbowFailure::repeated_vertex: return "repeated_vertex";
    case RainbowFailure::missing_edge: return "missing_edge";
    case RainbowFailure::colour_repeat: return "colour_repeat";
    }
    return "unknown";
}

struct RainbowCheck {
    RainbowFailure reason = RainbowFailure::none;
    /// Index into the sequence where the failure was detected.
    std::size_t position = 0;

    bool ok() const { return reason == RainbowFailure::none; }
    explicit operator bool() const { return ok(); }
};

/// Checks that `seq` is a path (or a cycle, with the wrap-around edge) of
/// `g` whose edge colours are pairwise distinct. Open sequences of fewer
/// than two vertices are vacuously rainbow; cycles need at least three.
inline RainbowCheck check_rainbow(const ColouredGraph& g, std::span<const Vertex> seq, bool cyclic)
{
    const std::size_t len = seq.size();
    if (cyclic && len < 3) return {RainbowFailure::too_short, 0};
    std::vector<char> seen(g.vertex_count(), 0);
    for (std::size_t i = 0; i < len; ++i) {
        if (seq[i] >= g.vertex_count()) return {RainbowFailure::vertex_out_of_range, i};
        if (seen[seq[i]]) return {RainbowFailure::repeated_vertex, i};
        seen[seq[i]] = 1;
    }
    std::unordered_set<Colour> colours;
    colours.reserve(len);
    const std::size_t edges = len < 2 ? 0 : (cyclic ? len : len - 1);
    for (std::size_t i = 0; i < edges; ++i) {
        Colour c = g.colour(seq[i], seq[(i + 1) % len]);
        if (c == kNoColour) return {RainbowFailure::missing_edge, i};
        if (!colours.insert(c).second) return {RainbowFailure::colour_repeat, i};
    }
    return {};
}

inline bool is_rainbow(const ColouredGraph& g, std::span<const Vertex> seq, bool cyclic)
{
    return check_rainbow(g, seq, cyclic).ok();
}

/// Ordered vertex sequence with the colour of each traversed edge
/// (colours[i] is the colour of vertices[i] vertices[i+1]).
struct VertexPath {
    std::vector<Vertex> vertices;
    std::vector<Colour> colours;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t edge_count() const { return vertices.empty() ? 0 : vertices.size() - 1; }
    std::size_t distinct_colours() const
    {
        return std::unordered_set<Colour>(colours.begin(), colours.end()).size();
    }
    bool rainbow() const { return distinct_colours() == colours.size(); }
};

/// Cyclic vertex sequence; colours.back() is the wrap-around edge.
struct VertexCycle {
    std::vector<Vertex> vertices;
    std::vector<Colour> colours;

    std::size_t length() const { return vertices.size(); }
    std::size_t distinct_colours() const
    {
        return std::unordered_set<Colour>(colours.begin(), colours.end()).size();
    }
    bool is_hamilton(std::size_t n) const { return vertices.size() == n; }
};

/// Reads colours off `g`. Throws ContractError if a consecutive pair is not an edge.
inline VertexPath make_path(const ColouredGraph& g, std::vector<Vertex> seq)
{
    VertexPath p;
    p.colours.reserve(seq.empty() ? 0 : seq.size() - 1);
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        Colour c = g.colour(seq[i], seq[i + 1]);
        if (c == kNoColour)
            throw ContractError("make_path: missing edge (" + std::to_string(seq[i]) + ", " +
                                std::to_string(seq[i + 1]) + ")");
        p.colours.push_back(c);
    }
    p.vertices = std::move(seq);
    return p;
}

inline VertexCycle make_cycle(const ColouredGraph& g, std::vector<Vertex> seq)
{
    VertexCycle cyc;
    if (seq.size() < 3) throw ContractError("make_cycle: a cycle needs at least 3 vertices");
    cyc.colours.reserve(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        Vertex a = seq[i];
        Vertex b = seq[(i + 1) % seq.size()];
        Colour c = g.colour(a, b);
        if (c == kNoColour)
            throw ContractError("make_cycle: missing edge (" + std::to_string(a) + ", " +
                                std::to_string(b) + ")");
        cyc.colours.push_back(c);
    }
    cyc.vertices = std::move(seq);
    return cyc;
}

} // namespace perturb
