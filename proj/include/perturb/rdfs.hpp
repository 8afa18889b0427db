#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "perturb/errors.hpp"
#include "perturb/graph.hpp"

namespace perturb {

// Rainbow depth-first search.
//
// The search keeps explored vertices S, unvisited vertices T (ordered by a
// permutation pi) and a stack U = u_1 ... u_t whose consecutive pairs form a
// rainbow path with colour set A_U. Each round either pushes the pi-first
// vertex w of T adjacent to u_t with psi(u_t w) not in A_U, or pops u_t into
// S. With U empty, the pi-first vertex of T is pushed.

enum class RdfsMove : std::uint8_t { push, pop };

struct RdfsEvent {
    std::size_t round;
    RdfsMove move;
    Vertex vertex;
};

/// The partition at one moment. T is listed in pi-order, U bottom to top.
struct RdfsSnapshot {
    std::size_t round = 0;
    std::vector<Vertex> explored;
    std::vector<Vertex> unvisited;
    std::vector<Vertex> stack;
};

struct RdfsTrace {
    /// pi[v] is the rank of v in the scan order.
    std::vector<Vertex> pi;
    std::vector<RdfsEvent> events;
    /// Largest stack seen; earliest round wins ties.
    std::vector<Vertex> best_stack;
    std::size_t best_round = 0;
    /// State after the first round with |S| = |T|.
    std::optional<RdfsSnapshot> balanced;
    /// Pushes onto a non-empty stack. Each is a distinct edge of the DFS forest.
    std::size_t tree_edge_count = 0;
};

namespace detail {

inline void check_permutation(std::span<const Vertex> pi, std::size_t n)
{
    if (pi.size() != n) throw ContractError("rdfs: permutation has wrong size");
    std::vector<char> seen(n, 0);
    for (Vertex r : pi) {
        if (r >= n || seen[r]) throw ContractError("rdfs: pi is not a permutation");
        seen[r] = 1;
    }
}

} // namespace detail

inline RdfsTrace rdfs_run(const ColouredGraph& g, std::span<const Vertex> pi)
{
    const std::size_t n = g.vertex_count();
    detail::check_permutation(pi, n);

    RdfsTrace trace;
    trace.pi.assign(pi.begin(), pi.end());
    trace.events.reserve(2 * n);

    std::vector<Vertex> order(n);
    for (Vertex v = 0; v < n; ++v) order[pi[v]] = v;

    // Neighbours sorted by rank. While u is on top of the stack, A_U is the
    // colour set of the path below u, which is the same every time u returns
    // to the top; and T only shrinks. So a candidate rejected once stays
    // rejected and a per-vertex cursor makes the scans amortised O(deg).
    std::vector<std::vector<Neighbour>> sorted(n);
    for (Vertex v = 0; v < n; ++v) {
        auto nb = g.neighbours(v);
        sorted[v].assign(nb.begin(), nb.end());
        std::sort(sorted[v].begin(), sorted[v].end(),
                  [&](const Neighbour& a, const Neighbour& b) { return pi[a.vertex] < pi[b.vertex]; });
    }
    std::vector<std::size_t> cursor(n, 0);
    std::vector<char> in_unvisited(n, 1);
    std::vector<char> colour_on_stack(static_cast<std::size_t>(g.palette_size()) + 1, 0);
    std::vector<Vertex> stack;
    std::vector<Colour> stack_colours;
    stack.reserve(n);
    std::size_t first_unvisited = 0;
    std::size_t explored = 0;
    std::size_t unvisited = n;

    auto note_balance = [&](std::size_t round) {
        if (trace.balanced || explored != unvisited) return;
        RdfsSnapshot snap;
        snap.round = round;
        for (Vertex v = 0; v < n; ++v)
            if (!in_unvisited[v]) snap.explored.push_back(v);
        for (Vertex v : order)
            if (in_unvisited[v]) snap.unvisited.push_back(v);
        snap.stack = stack;
        std::unordered_set<Vertex> on_stack(stack.begin(), stack.end());
        std::erase_if(snap.explored, [&](Vertex v) { return on_stack.contains(v); });
        trace.balanced = std::move(snap);
    };

    auto push = [&](std::size_t round, Vertex w, Colour c) {
        if (!stack.empty()) {
            colour_on_stack[c] = 1;
            stack_colours.push_back(c);
            ++trace.tree_edge_count;
        }
        stack.push_back(w);
        in_unvisited[w] = 0;
        --unvisited;
        trace.events.push_back({round, RdfsMove::push, w});
        if (stack.size() > trace.best_stack.size()) {
            trace.best_stack = stack;
            trace.best_round = round;
        }
    };

    if (n == 0) note_balance(0);
    for (std::size_t round = 0; round < 2 * n; ++round) {
        if (stack.empty()) {
            while (!in_unvisited[order[first_unvisited]]) ++first_unvisited;
            push(round, order[first_unvisited], kNoColour);
        } else {
            const Vertex top = stack.back();
            auto& nb = sorted[top];
            auto& at = cursor[top];
            while (at < nb.size() && (!in_unvisited[nb[at].vertex] || colour_on_stack[nb[at].colour])) ++at;
            if (at < nb.size()) {
                push(round, nb[at].vertex, nb[at].colour);
                ++at;
            } else {
                stack.pop_back();
                if (!stack_colours.empty()) {
                    colour_on_stack[stack_colours.back()] = 0;
                    stack_colours.pop_back();
                }
                ++explored;
                trace.events.push_back({round, RdfsMove::pop, top});
            }
        }
        note_balance(round);
    }
    return trace;
}

/// The longer of the largest stack and the stack at the balanced moment.
/// Always a rainbow path of g.
inline VertexPath longest_rainbow_path(const ColouredGraph& g, const RdfsTrace& trace)
{
    const std::vector<Vertex>* pick = &trace.best_stack;
    if (trace.balanced && trace.balanced->stack.size() > pick->size()) pick = &trace.balanced->stack;
    return make_path(g, *pick);
}

inline VertexPath longest_rainbow_path(const ColouredGraph& g, std::span<const Vertex> pi)
{
    return longest_rainbow_path(g, rdfs_run(g, pi));
}

// ---------------------------------------------------------------------------
// Trace replay

enum class TraceProperty {
    single_move,   // D1: one vertex moves per round
    rainbow_stack, // D3: the stack spans a rainbow path
    partition,     // S, T, U partition the vertex set; moves are legal
    scan_rule,     // the pushed vertex is the pi-first eligible one; pops only when none is eligible
    forest_bound,  // tree edges <= n - 1 and match the recorded count
    balanced_colours, // D2 at |S| = |T|
    snapshot,      // recorded snapshots agree with the replay
    termination,   // 2n rounds, ending with S = V
};

inline const char* to_string(TraceProperty p)
{
    switch (p) {
    case TraceProperty::single_move: return "D1";
    case TraceProperty::rainbow_stack: return "D3";
    case TraceProperty::partition: return "partition";
    case TraceProperty::scan_rule: return "scan_rule";
    case TraceProperty::forest_bound: return "forest_bound";
    case TraceProperty::balanced_colours: return "D2";
    case TraceProperty::snapshot: return "snapshot";
    case TraceProperty::termination: return "termination";
    }
    return "?";
}

struct TraceViolation {
    std::size_t round;
    TraceProperty property;
    std::string detail;
};

struct TraceReport {
    std::vector<TraceViolation> violations;
    std::size_t rounds = 0;
    /// Distinct colours on E(S, T) at the balanced moment.
    std::size_t balanced_colour_count = 0;

    bool ok() const { return violations.empty(); }
    bool has(TraceProperty p) const
    {
        return std::any_of(violations.begin(), violations.end(),
                           [&](const TraceViolation& v) { return v.property == p; });
    }
};

/// Replays `trace` against `g` from scratch and reports every broken property.
inline TraceReport check_trace(const RdfsTrace& trace, const ColouredGraph& g)
{
    enum class Where : std::uint8_t { unvisited, stack, explored };
    const std::size_t n = g.vertex_count();
    TraceReport report;
    auto fail = [&](std::size_t round, TraceProperty p, std::string what) {
        report.violations.push_back({round, p, std::move(what)});
    };

    if (trace.pi.size() != n) {
        fail(0, TraceProperty::snapshot, "permutation size differs from n");
        return report;
    }
    std::vector<Vertex> order(n);
    {
        std::vector<char> seen(n, 0);
        for (Vertex v = 0; v < n; ++v) {
            Vertex r = trace.pi[v];
            if (r >= n || seen[r]) {
                fail(0, TraceProperty::snapshot, "pi is not a permutation");
                return report;
            }
            seen[r] = 1;
            order[r] = v;
        }
    }

    std::vector<Where> where(n, Where::unvisited);
    std::vector<Vertex> stack;
    std::vector<Colour> stack_colours;
    std::unordered_multiset<Colour> colours_on_stack;
    std::size_t explored = 0;
    std::size_t unvisited = n;
    std::size_t tree_edges = 0;
    std::size_t first_unvisited = 0;
    bool balanced_seen = false;

    auto eligible_min = [&](Vertex top) -> std::optional<Vertex> {
        std::optional<Vertex> best;
        for (const auto& nb : g.neighbours(top)) {
            if (where[nb.vertex] != Where::unvisited || colours_on_stack.contains(nb.colour)) continue;
            if (!best || trace.pi[nb.vertex] < trace.pi[*best]) best = nb.vertex;
        }
        return best;
    };

    auto check_balance = [&](std::size_t round) {
        if (balanced_seen || explored != unvisited) return;
        balanced_seen = true;
        std::unordered_set<Colour> cross;
        for (Vertex s = 0; s < n; ++s) {
            if (where[s] != Where::explored) continue;
            for (const auto& nb : g.neighbours(s))
                if (where[nb.vertex] == Where::unvisited) cross.insert(nb.colour);
        }
        report.balanced_colour_count = cross.size();
        if (n > 0 && cross.size() > n - 1)
            fail(round, TraceProperty::balanced_colours,
                 std::to_string(cross.size()) + " colours on E(S,T) exceed n - 1");
        if (!trace.balanced) {
            fail(round, TraceProperty::snapshot, "no balanced snapshot recorded");
        } else {
            const auto& b = *trace.balanced;
            if (b.round != round || b.stack != stack || b.explored.size() != explored ||
                b.unvisited.size() != unvisited)
                fail(round, TraceProperty::snapshot, "balanced snapshot differs from replay");
            else {
                for (Vertex v : b.explored)
                    if (v >= n || where[v] != Where::explored) {
                        fail(round, TraceProperty::snapshot, "snapshot S differs from replay");
                        break;
                    }
                for (Vertex v : b.unvisited)
                    if (v >= n || where[v] != Where::unvisited) {
                        fail(round, TraceProperty::snapshot, "snapshot T differs from replay");
                        break;
                    }
            }
        }
    };

    if (n == 0) check_balance(0);
    std::size_t best = 0;
    std::optional<std::size_t> prev_round;
    for (const auto& ev : trace.events) {
        const std::size_t round = ev.round;
        if (prev_round && round == *prev_round)
            fail(round, TraceProperty::single_move, "more than one vertex moved in this round");
        else if (round != (prev_round ? *prev_round + 1 : 0))
            fail(round, TraceProperty::single_move, "round numbering skips");
        prev_round = round;
        const Vertex v = ev.vertex;
        if (v >= n) {
            fail(round, TraceProperty::partition, "vertex out of range");
            continue;
        }

        if (ev.move == RdfsMove::push) {
            if (where[v] != Where::unvisited) {
                fail(round, TraceProperty::partition, "pushed vertex " + std::to_string(v) + " is not in T");
                continue;
            }
            if (stack.empty()) {
                while (first_unvisited < n && where[order[first_unvisited]] != Where::unvisited)
                    ++first_unvisited;
                if (order[first_unvisited] != v)
                    fail(round, TraceProperty::scan_rule, "restart did not take the pi-first vertex of T");
            } else {
                const Vertex top = stack.back();
                Colour c = g.colour(top, v);
                if (c == kNoColour) {
                    fail(round, TraceProperty::rainbow_stack, "stack step is not an edge");
                } else if (colours_on_stack.contains(c)) {
                    fail(round, TraceProperty::rainbow_stack,
                         "colour " + std::to_string(c) + " repeats on the stack path");
                }
                auto expect = eligible_min(top);
                if (!expect || *expect != v)
                    fail(round, TraceProperty::scan_rule, "push is not the pi-first eligible neighbour");
                stack_colours.push_back(c);
                colours_on_stack.insert(c);
                ++tree_edges;
            }
            stack.push_back(v);
            where[v] = Where::stack;
            --unvisited;
            best = std::max(best, stack.size());
        } else {
            if (stack.empty() || stack.back() != v) {
                fail(round, TraceProperty::partition, "popped vertex " + std::to_string(v) + " is not the stack top");
                continue;
            }
            if (eligible_min(v))
                fail(round, TraceProperty::scan_rule, "pop while an eligible neighbour remains");
            stack.pop_back();
            if (!stack_colours.empty()) {
                auto it = colours_on_stack.find(stack_colours.back());
                if (it != colours_on_stack.end()) colours_on_stack.erase(it);
                stack_colours.pop_back();
            }
            where[v] = Where::explored;
            ++explored;
        }
        if (explored + unvisited + stack.size() != n)
            fail(round, TraceProperty::partition, "S, T, U do not partition V");
        check_balance(round);
    }

    report.rounds = prev_round ? *prev_round + 1 : 0;
    if (trace.events.size() != 2 * n || report.rounds != 2 * n)
        fail(report.rounds, TraceProperty::termination,
             "expected 2n = " + std::to_string(2 * n) + " single-move rounds");
    if (explored != n) fail(report.rounds, TraceProperty::termination, "S is not the full vertex set at the end");
    if (n > 0 && tree_edges > n - 1)
        fail(report.rounds, TraceProperty::forest_bound, "more than n - 1 tree edges");
    if (tree_edges != trace.tree_edge_count)
        fail(report.rounds, TraceProperty::forest_bound, "recorded tree edge count differs from replay");
    if (trace.best_stack.size() != best)
        fail(report.rounds, TraceProperty::snapshot, "best stack size differs from replay");
    if (!is_rainbow(g, trace.best_stack, false))
        fail(trace.best_round, TraceProperty::rainbow_stack, "best stack is not a rainbow path");
    return report;
}

/// One line per round: `PUSH v` or `POP v`.
inline void write_trace(std::ostream& os, const RdfsTrace& trace)
{
    for (const auto& ev : trace.events) os << (ev.move == RdfsMove::push ? "PUSH " : "POP ") << ev.vertex << '\n';
}

} // namespace perturb
