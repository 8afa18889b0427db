#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <tuple>
#include <string>
#include <vector>

#include "perturb/errors.hpp"
#include "perturb/generators.hpp"
#include "perturb/graph.hpp"
#include "perturb/rdfs.hpp"
#include "perturb/rng.hpp"

namespace perturb {

// Absorption. Let P0 = p_1 ... p_l be a rainbow path and I the vertices at
// even positions 2, 4, ... of P0 other than p_l. An unused x in I whose two
// P0-neighbours are seed-neighbours of an outside vertex v, and which is a
// seed-neighbour of the current end z, can hand its slot to v and move to the
// end: p_1 ... x- v x+ ... z x. The path stays rainbow when the three new
// colours are distinct and absent from the path.

inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

struct PathNeighbours {
    Vertex before = kNoVertex;
    Vertex after = kNoVertex;
};

/// Vertices at 1-based positions 2, 4, ... of `path`, excluding the last vertex.
inline std::vector<Vertex> compute_interior(std::span<const Vertex> path)
{
    std::vector<Vertex> out;
    for (std::size_t pos = 2; pos < path.size(); pos += 2) out.push_back(path[pos - 1]);
    return out;
}

class AbsorberContext;
inline void absorb(AbsorberContext& ctx, Vertex v, Vertex x, const Graph& seed, const ColouredGraph& psi);

/// Mutable state of the absorption phase on an n-vertex host.
///
/// The path is a doubly linked list so that an absorption is O(1). p_1 stays
/// the head throughout; the tail is the current end z. For every unused
/// interior vertex the neighbours on the current path equal its neighbours on
/// P0, which is what the cached `path_neighbours` returns.
class AbsorberContext {
  public:
    AbsorberContext(const VertexPath& path0, std::size_t n, Colour palette)
        : next_(n, kNoVertex), prev_(n, kNoVertex), on_path_(n, 0), interior_flag_(n, 0), used_flag_(n, 0),
          position_(n, kNoVertex), cache_(n), colour_count_(palette + std::size_t{1}, 0)
    {
        const auto& seq = path0.vertices;
        if (seq.size() < 2) throw ContractError("absorber: the initial path needs at least 2 vertices");
        if (path0.colours.size() + 1 != seq.size())
            throw ContractError("absorber: path colours do not match its vertices");
        for (std::size_t i = 0; i < seq.size(); ++i) {
            Vertex v = seq[i];
            if (v >= n || on_path_[v]) throw ContractError("absorber: invalid initial path");
            on_path_[v] = 1;
            position_[v] = static_cast<Vertex>(i);
            if (i > 0) prev_[v] = seq[i - 1];
            if (i + 1 < seq.size()) next_[v] = seq[i + 1];
        }
        for (Colour c : path0.colours) {
            if (c == kNoColour || c > palette) throw ContractError("absorber: path colour outside palette");
            if (colour_count_[c]++) throw ContractError("absorber: initial path is not rainbow");
        }
        distinct_colours_ = path0.colours.size();
        head_ = seq.front();
        end_ = seq.back();
        size_ = seq.size();
        original_ = seq;
        interior_ = compute_interior(seq);
        for (Vertex x : interior_) {
            interior_flag_[x] = 1;
            cache_[x] = {prev_[x], next_[x]};
        }
    }

    std::size_t host_size() const { return on_path_.size(); }
    std::size_t path_size() const { return size_; }
    Vertex head() const { return head_; }
    /// Current end z (p_l before any absorption, the last absorber afterwards).
    Vertex end() const { return end_; }
    bool on_path(Vertex v) const { return v < on_path_.size() && on_path_[v]; }

    const std::vector<Vertex>& original_path() const { return original_; }
    /// Position of v on P0, or kNoVertex.
    Vertex original_position(Vertex v) const { return position_.at(v); }

    const std::vector<Vertex>& interior() const { return interior_; }
    bool is_interior(Vertex v) const { return v < interior_flag_.size() && interior_flag_[v]; }
    bool is_used(Vertex v) const { return v < used_flag_.size() && used_flag_[v]; }
    bool is_available(Vertex v) const { return is_interior(v) && !is_used(v); }
    /// Absorbers u_1, u_2, ... in order of use.
    const std::vector<Vertex>& used() const { return used_; }

    /// P0-neighbours of an interior vertex.
    PathNeighbours path_neighbours(Vertex x) const
    {
        if (!is_interior(x)) throw ContractError("absorber: path_neighbours of a non-interior vertex");
        return cache_[x];
    }
    Vertex next(Vertex v) const { return next_.at(v); }
    Vertex prev(Vertex v) const { return prev_.at(v); }

    bool colour_on_path(Colour c) const { return c < colour_count_.size() && colour_count_[c] != 0; }
    std::size_t colour_count() const { return distinct_colours_; }
    std::size_t edge_count() const { return size_ - 1; }

    /// Current path from p_1 to z.
    std::vector<Vertex> sequence() const
    {
        std::vector<Vertex> out;
        out.reserve(size_);
        for (Vertex v = head_; v != kNoVertex; v = next_[v]) out.push_back(v);
        return out;
    }

    // Leftover bookkeeping: reserved x, y and the pending v_1 ... v_s.
    Vertex reserved_x() const { return reserved_x_; }
    Vertex reserved_y() const { return reserved_y_; }
    const std::vector<Vertex>& pending() const { return pending_; }

    /// Splits V \ V(P0) into the reserved pair (its two lowest vertices) and
    /// the absorption queue in increasing vertex order.
    void reserve_leftovers()
    {
        std::vector<Vertex> rest;
        for (Vertex v = 0; v < on_path_.size(); ++v)
            if (!on_path_[v]) rest.push_back(v);
        if (rest.size() < 2) throw ContractError("absorber: need two vertices off the path to reserve");
        reserved_x_ = rest[0];
        reserved_y_ = rest[1];
        pending_.assign(rest.begin() + 2, rest.end());
    }

  private:
    friend void absorb(AbsorberContext&, Vertex, Vertex, const Graph&, const ColouredGraph&);

    void remove_colour(Colour c)
    {
        if (--colour_count_[c] == 0) --distinct_colours_;
    }
    void add_colour(Colour c)
    {
        if (colour_count_[c]++ == 0) ++distinct_colours_;
    }

    std::vector<Vertex> next_;
    std::vector<Vertex> prev_;
    std::vector<char> on_path_;
    std::vector<char> interior_flag_;
    std::vector<char> used_flag_;
    std::vector<Vertex> position_;
    std::vector<PathNeighbours> cache_;
    std::vector<std::uint32_t> colour_count_;
    std::size_t distinct_colours_ = 0;
    Vertex head_ = kNoVertex;
    Vertex end_ = kNoVertex;
    std::size_t size_ = 0;
    std::vector<Vertex> original_;
    std::vector<Vertex> interior_;
    std::vector<Vertex> used_;
    Vertex reserved_x_ = kNoVertex;
    Vertex reserved_y_ = kNoVertex;
    std::vector<Vertex> pending_;
};

enum class CandidateScope {
    /// I \ used: the shrinking candidate pool B_i.
    unused,
    /// All of I: the plain B(u, v).
    all,
};

/// B(u, v) = {x in N_H(u) ∩ I : both P0-neighbours of x lie in N_H(v)}, in P0
/// order. With CandidateScope::unused, already-used absorbers are removed.
inline std::vector<Vertex> compute_B(Vertex u, Vertex v, const AbsorberContext& ctx, const Graph& seed,
                                     CandidateScope scope = CandidateScope::unused)
{
    std::vector<Vertex> out;
    if (u >= seed.vertex_count() || v >= seed.vertex_count()) return out;
    for (Vertex x : seed.neighbours(u)) {
        if (!ctx.is_interior(x)) continue;
        if (scope == CandidateScope::unused && ctx.is_used(x)) continue;
        auto np = ctx.path_neighbours(x);
        if (seed.has_edge(np.before, v) && seed.has_edge(np.after, v)) out.push_back(x);
    }
    std::sort(out.begin(), out.end(),
              [&](Vertex a, Vertex b) { return ctx.original_position(a) < ctx.original_position(b); });
    return out;
}

/// The three colours an absorption by x would introduce: psi(u x), psi(x- v), psi(x+ v).
inline std::array<Colour, 3> absorption_colours(Vertex u, Vertex v, Vertex x, const AbsorberContext& ctx,
                                                const ColouredGraph& psi)
{
    auto np = ctx.path_neighbours(x);
    return {psi.colour(u, x), psi.colour(np.before, v), psi.colour(np.after, v)};
}

inline bool fresh_and_distinct(std::span<const Colour> cs, const AbsorberContext& ctx)
{
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (cs[i] == kNoColour || ctx.colour_on_path(cs[i])) return false;
        for (std::size_t j = 0; j < i; ++j)
            if (cs[i] == cs[j]) return false;
    }
    return true;
}

/// B^r(u, v): members of B whose three absorption colours are pairwise
/// distinct and absent from the current path.
inline std::vector<Vertex> compute_Br(Vertex u, Vertex v, std::span<const Vertex> B, const AbsorberContext& ctx,
                                      const ColouredGraph& psi)
{
    std::vector<Vertex> out;
    for (Vertex x : B) {
        auto cs = absorption_colours(u, v, x, ctx, psi);
        if (fresh_and_distinct(cs, ctx)) out.push_back(x);
    }
    return out;
}

/// Absorbs v using the unused interior vertex x: v takes x's slot and x is
/// appended after the current end. Throws ContractError unless x ∈ B^r(z, v)
/// with respect to the unused pool.
inline void absorb(AbsorberContext& ctx, Vertex v, Vertex x, const Graph& seed, const ColouredGraph& psi)
{
    const Vertex z = ctx.end_;
    if (v >= ctx.host_size() || ctx.on_path(v)) throw ContractError("absorb: v must lie off the path");
    if (v == ctx.reserved_x_ || v == ctx.reserved_y_) throw ContractError("absorb: v is a reserved vertex");
    if (!ctx.is_available(x)) throw ContractError("absorb: x is not an unused interior vertex");
    auto np = ctx.cache_[x];
    if (ctx.prev_[x] != np.before || ctx.next_[x] != np.after)
        throw ContractError("absorb: path neighbours of x changed since P0");
    if (!seed.has_edge(z, x) || !seed.has_edge(np.before, v) || !seed.has_edge(np.after, v))
        throw ContractError("absorb: x is not in B(z, v)");
    auto cs = absorption_colours(z, v, x, ctx, psi);
    if (!fresh_and_distinct(cs, ctx)) throw ContractError("absorb: x is not in B^r(z, v)");

    ctx.remove_colour(psi.colour(np.before, x));
    ctx.remove_colour(psi.colour(x, np.after));
    for (Colour c : cs) ctx.add_colour(c);

    ctx.next_[np.before] = v;
    ctx.prev_[v] = np.before;
    ctx.next_[v] = np.after;
    ctx.prev_[np.after] = v;
    ctx.on_path_[v] = 1;

    ctx.next_[z] = x;
    ctx.prev_[x] = z;
    ctx.next_[x] = kNoVertex;
    ctx.end_ = x;

    ctx.used_flag_[x] = 1;
    ctx.used_.push_back(x);
    ++ctx.size_;
    std::erase(ctx.pending_, v);
}

struct AbsorbStep {
    Vertex vertex = kNoVertex;
    Vertex end = kNoVertex;
    /// |B(z, v)| over all of I.
    std::size_t b_size = 0;
    /// |B_i(z, v)| = |B(z, v) \ {u_1..u_i}|.
    std::size_t bi_size = 0;
    /// |B_i(z, v) ∩ B^r(z, v)|.
    std::size_t bi_rainbow_size = 0;
    Vertex absorber = kNoVertex;
};

struct AbsorbOutcome {
    std::optional<AbsorberContext> context;
    std::vector<AbsorbStep> steps;
    /// First vertex that could not be absorbed.
    Vertex failed_vertex = kNoVertex;
    bool ok() const { return context.has_value(); }
};

/// Absorbs every non-reserved leftover vertex one at a time, keeping p_1 as
/// an end. Among eligible absorbers one is picked uniformly at random.
inline AbsorbOutcome absorb_all(const VertexPath& path0, const Graph& seed, const ColouredGraph& psi, Rng& rng)
{
    const std::size_t n = seed.vertex_count();
    if (psi.vertex_count() != n) throw ContractError("absorb_all: seed and colouring differ in size");
    if (path0.vertex_count() + 2 > n) throw ContractError("absorb_all: path must leave two vertices for x and y");
    AbsorberContext ctx(path0, n, psi.palette_size());
    ctx.reserve_leftovers();
    AbsorbOutcome out;
    const std::vector<Vertex> queue = ctx.pending();
    for (Vertex v : queue) {
        AbsorbStep step;
        step.vertex = v;
        step.end = ctx.end();
        auto bi = compute_B(ctx.end(), v, ctx, seed, CandidateScope::unused);
        step.b_size = compute_B(ctx.end(), v, ctx, seed, CandidateScope::all).size();
        step.bi_size = bi.size();
        auto br = compute_Br(ctx.end(), v, bi, ctx, psi);
        step.bi_rainbow_size = br.size();
        if (br.empty()) {
            out.steps.push_back(step);
            out.failed_vertex = v;
            return out;
        }
        step.absorber = br[rng.below(br.size())];
        absorb(ctx, v, step.absorber, seed, psi);
        out.steps.push_back(step);
    }
    out.context = std::move(ctx);
    return out;
}

struct ClosingStats {
    std::size_t x_size = 0;       // |X| = |B_s(p_1, x)|
    std::size_t y_size = 0;       // |Y| = |B_s(p_{n-2}, y)|
    std::size_t x_clear = 0;      // |X'|
    std::size_t y_clear = 0;      // |Y'|
    std::size_t x_rainbow = 0;    // |X' ∩ B^r(p_1, x)|
    std::size_t y_rainbow = 0;    // |Y' ∩ B^r(p_{n-2}, y)|
    std::size_t pairs_examined = 0; // second-round edges between X' and Y' outside R1
};

struct ClosingOutcome {
    std::optional<VertexCycle> cycle;
    ClosingStats stats;
    bool ok() const { return cycle.has_value(); }
};

/// Closes the (n-2)-vertex path into a rainbow Hamilton cycle through the
/// reserved x, y and one second-round edge p_i p_j:
///
///   p_i p_1 ... p_{i-1} x p_{i+1} ... p_{j-1} y p_{j+1} ... p_{n-2} p_j p_i
///
/// Candidates whose three defining edges meet R1 are dropped (X', Y'). R2
/// edges are scanned with p_i in P0 order and the first valid pair is used.
inline ClosingOutcome close_cycle(const AbsorberContext& ctx, const Graph& seed, const Graph& first_round,
                                  const Graph& second_round, const ColouredGraph& psi)
{
    const std::size_t n = seed.vertex_count();
    if (ctx.path_size() + 2 != n) throw ContractError("close_cycle: the path must span n - 2 vertices");
    const Vertex x = ctx.reserved_x();
    const Vertex y = ctx.reserved_y();
    const Vertex p1 = ctx.head();
    const Vertex pz = ctx.end();
    ClosingOutcome out;

    auto clear_of_r1 = [&](Vertex end, Vertex reserved, Vertex cand) {
        auto np = ctx.path_neighbours(cand);
        return !first_round.has_edge(cand, end) && !first_round.has_edge(np.before, reserved) &&
               !first_round.has_edge(np.after, reserved);
    };
    auto side = [&](Vertex end, Vertex reserved, std::size_t& total, std::size_t& clear, std::size_t& rainbow) {
        auto b = compute_B(end, reserved, ctx, seed, CandidateScope::unused);
        total = b.size();
        std::erase_if(b, [&](Vertex c) { return !clear_of_r1(end, reserved, c); });
        clear = b.size();
        std::vector<char> good(n, 0), member(n, 0);
        for (Vertex c : b) member[c] = 1;
        for (Vertex c : compute_Br(end, reserved, b, ctx, psi)) good[c] = 1;
        rainbow = static_cast<std::size_t>(std::count(good.begin(), good.end(), 1));
        return std::tuple{std::move(b), std::move(member), std::move(good)};
    };
    auto [xs, x_member, x_good] = side(p1, x, out.stats.x_size, out.stats.x_clear, out.stats.x_rainbow);
    auto [ys, y_member, y_good] = side(pz, y, out.stats.y_size, out.stats.y_clear, out.stats.y_rainbow);

    for (Vertex pi : xs) {
        for (Vertex pj : second_round.neighbours(pi)) {
            if (!y_member[pj] || pj == pi || first_round.has_edge(pi, pj)) continue;
            ++out.stats.pairs_examined;
            if (out.cycle || !x_good[pi] || !y_good[pj]) continue;
            Colour link = psi.colour(pi, pj);
            auto cx = absorption_colours(p1, x, pi, ctx, psi);
            auto cy = absorption_colours(pz, y, pj, ctx, psi);
            std::array<Colour, 7> seven{link, cx[0], cx[1], cx[2], cy[0], cy[1], cy[2]};
            if (!fresh_and_distinct(seven, ctx)) continue;

            std::vector<Vertex> seq;
            seq.reserve(n);
            seq.push_back(pi);
            for (Vertex v = p1; v != kNoVertex; v = ctx.next(v)) seq.push_back(v == pi ? x : v == pj ? y : v);
            seq.push_back(pj);
            VertexCycle cyc = make_cycle(psi, std::move(seq));
            auto check = check_rainbow(psi, cyc.vertices, true);
            if (!check || !cyc.is_hamilton(n))
                throw ContractError(std::string("close_cycle: constructed cycle failed verification: ") +
                                    to_string(check.reason));
            out.cycle = std::move(cyc);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// End-to-end pipeline

enum class Stage { r1_path, absorption, closing };

inline const char* to_string(Stage s)
{
    switch (s) {
    case Stage::r1_path: return "r1_path";
    case Stage::absorption: return "absorption";
    case Stage::closing: return "closing";
    }
    return "?";
}

struct PipelineStats {
    std::size_t n = 0;
    Colour palette = 0;
    double p2 = 0.0;
    std::size_t seed_edges = 0;
    std::size_t r1_edges = 0;
    std::size_t r2_edges = 0;
    /// Vertices on the RDFS path in R1, before truncation to the target.
    std::size_t rdfs_path_vertices = 0;
    /// floor((1 - eps) n), capped at n - 2.
    std::size_t path_target = 0;
    std::vector<AbsorbStep> steps;
    /// Floor d^3 n / 220 on |B_i|; logged for comparison, not enforced.
    double bi_floor = 0.0;
    std::optional<ClosingStats> closing;

    std::optional<std::size_t> min_bi_size() const
    {
        if (steps.empty()) return std::nullopt;
        std::size_t m = steps.front().bi_size;
        for (const auto& s : steps) m = std::min(m, s.bi_size);
        return m;
    }
};

struct PipelineOptions {
    /// Keep the coloured union graph in the result (for dumps and oracle checks).
    bool keep_graph = false;
    /// Keep the RDFS trace of the first round.
    bool keep_trace = false;
};

struct PipelineResult {
    bool success = false;
    /// Stage that failed, or closing on success.
    Stage stage = Stage::r1_path;
    std::optional<VertexCycle> cycle;
    PipelineStats stats;
    std::optional<ColouredGraph> graph;
    std::optional<RdfsTrace> trace;
};

/// One draw of the perturbed coloured model followed by the constructive
/// search: a rainbow path in R1 via RDFS, absorption of all but two leftover
/// vertices through the seed, and closing through one R2 edge.
///
/// Sub-streams of `rng`: 0 seed, 1 R1, 2 R2, 3 colours, 4 RDFS order, 5 absorber picks.
inline PipelineResult run_pipeline(const PerturbationConfig& cfg, const Rng& rng, PipelineOptions opts = {})
{
    cfg.validate();
    const std::size_t n = cfg.n;
    PipelineResult res;
    auto& st = res.stats;
    st.n = n;
    st.palette = cfg.palette();
    st.p2 = cfg.p2();
    st.bi_floor = cfg.d * cfg.d * cfg.d * static_cast<double>(n) / 220.0;
    st.path_target = std::min(cfg.path_target(), n - 2);

    Rng seed_rng = rng.split(0), r1_rng = rng.split(1), r2_rng = rng.split(2), colour_rng = rng.split(3),
        order_rng = rng.split(4), pick_rng = rng.split(5);
    Graph seed = make_seed(cfg.family, n, cfg.d, seed_rng);
    Graph r1 = sample_gnp(n, cfg.p1(), r1_rng);
    Graph r2 = sample_gnp(n, st.p2, r2_rng);
    st.seed_edges = seed.edge_count();
    st.r1_edges = r1.edge_count();
    st.r2_edges = r2.edge_count();
    ColouredUnion coloured = colour_union(seed, r1, r2, st.palette, colour_rng);
    const ColouredGraph& psi = coloured.graph();

    ColouredGraph r1_coloured = restrict_to(psi, r1);
    auto pi = random_permutation(n, order_rng);
    RdfsTrace trace = rdfs_run(r1_coloured, pi);
    VertexPath path = longest_rainbow_path(r1_coloured, trace);
    st.rdfs_path_vertices = path.vertex_count();
    if (opts.keep_trace) res.trace = std::move(trace);
    if (opts.keep_graph) res.graph = psi;

    if (path.vertex_count() < st.path_target) {
        res.stage = Stage::r1_path;
        return res;
    }
    path.vertices.resize(st.path_target);
    path.colours.resize(st.path_target - 1);

    AbsorbOutcome absorbed = absorb_all(path, seed, psi, pick_rng);
    st.steps = std::move(absorbed.steps);
    if (!absorbed.ok()) {
        res.stage = Stage::absorption;
        return res;
    }

    ClosingOutcome closed = close_cycle(*absorbed.context, seed, r1, r2, psi);
    st.closing = closed.stats;
    res.stage = Stage::closing;
    if (closed.ok()) {
        res.success = true;
        res.cycle = std::move(closed.cycle);
    }
    return res;
}

} // namespace perturb
