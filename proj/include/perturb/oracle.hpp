#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "perturb/errors.hpp"
#include "perturb/graph.hpp"

namespace perturb {

// Exponential-time ground truth for small instances. Plain backtracking over
// vertex sequences with the running colour set as the only pruning, so the
// answers are exact whenever the node budget is not exhausted.

struct OracleBudget {
    std::size_t max_n = 14;
    std::uint64_t node_limit = 200'000'000;

    static OracleBudget for_paths() { return {14, 200'000'000}; }
    static OracleBudget for_cycles() { return {12, 200'000'000}; }
};

enum class OracleStatus { ok, budget_exhausted };

inline const char* to_string(OracleStatus s) { return s == OracleStatus::ok ? "ok" : "budget_exhausted"; }

struct PathOracleResult {
    OracleStatus status = OracleStatus::ok;
    /// Longest rainbow path found; exact when status is ok.
    VertexPath path;
    std::uint64_t nodes = 0;
};

struct CycleOracleResult {
    OracleStatus status = OracleStatus::ok;
    std::optional<VertexCycle> cycle;
    std::uint64_t nodes = 0;
};

namespace detail {

class RainbowSearch {
  public:
    RainbowSearch(const ColouredGraph& g, std::uint64_t node_limit)
        : g_(g), limit_(node_limit), visited_(g.vertex_count(), 0),
          colour_used_(g.palette_size() + std::size_t{1}, 0)
    {
    }

    bool exhausted() const { return exhausted_; }
    std::uint64_t nodes() const { return nodes_; }

    // Longest path -------------------------------------------------------

    std::vector<Vertex> longest_path()
    {
        const std::size_t n = g_.vertex_count();
        for (Vertex s = 0; s < n && !exhausted_ && best_.size() < n; ++s) {
            enter(s);
            extend_path();
            leave();
        }
        return best_;
    }

    // Hamilton cycle, anchored at vertex 0 -------------------------------

    std::optional<std::vector<Vertex>> hamilton_cycle()
    {
        const std::size_t n = g_.vertex_count();
        if (n < 3) return std::nullopt;
        enter(0);
        bool found = extend_cycle();
        if (!found) return std::nullopt;
        return seq_;
    }

  private:
    bool tick()
    {
        if (++nodes_ > limit_) exhausted_ = true;
        return !exhausted_;
    }

    void enter(Vertex v)
    {
        visited_[v] = 1;
        seq_.push_back(v);
    }
    void leave()
    {
        visited_[seq_.back()] = 0;
        seq_.pop_back();
    }

    void extend_path()
    {
        if (!tick()) return;
        if (seq_.size() > best_.size()) best_ = seq_;
        if (best_.size() == g_.vertex_count()) return;
        for (const auto& nb : g_.neighbours(seq_.back())) {
            if (visited_[nb.vertex] || colour_used_[nb.colour]) continue;
            colour_used_[nb.colour] = 1;
            enter(nb.vertex);
            extend_path();
            leave();
            colour_used_[nb.colour] = 0;
            if (exhausted_ || best_.size() == g_.vertex_count()) return;
        }
    }

    bool extend_cycle()
    {
        if (!tick()) return false;
        const std::size_t n = g_.vertex_count();
        if (seq_.size() == n) {
            // One orientation per cycle: second vertex below the last.
            if (seq_[1] > seq_.back()) return false;
            Colour c = g_.colour(seq_.back(), seq_.front());
            return c != kNoColour && !colour_used_[c];
        }
        for (const auto& nb : g_.neighbours(seq_.back())) {
            if (visited_[nb.vertex] || colour_used_[nb.colour]) continue;
            colour_used_[nb.colour] = 1;
            enter(nb.vertex);
            bool found = extend_cycle();
            if (found) return true;
            leave();
            colour_used_[nb.colour] = 0;
            if (exhausted_) return false;
        }
        return false;
    }

    const ColouredGraph& g_;
    std::uint64_t limit_;
    std::uint64_t nodes_ = 0;
    bool exhausted_ = false;
    std::vector<char> visited_;
    std::vector<char> colour_used_;
    std::vector<Vertex> seq_;
    std::vector<Vertex> best_;
};

} // namespace detail

inline PathOracleResult brute_longest_rainbow_path(const ColouredGraph& g,
                                                   OracleBudget budget = OracleBudget::for_paths())
{
    if (budget.max_n > 14) throw ContractError("oracle: path budget max_n must be <= 14");
    if (g.vertex_count() > budget.max_n)
        throw ContractError("oracle: n = " + std::to_string(g.vertex_count()) + " exceeds max_n = " +
                            std::to_string(budget.max_n));
    detail::RainbowSearch search(g, budget.node_limit);
    auto seq = search.longest_path();
    PathOracleResult res;
    res.status = search.exhausted() ? OracleStatus::budget_exhausted : OracleStatus::ok;
    res.path = make_path(g, std::move(seq));
    res.nodes = search.nodes();
    return res;
}

inline CycleOracleResult brute_rainbow_hamilton(const ColouredGraph& g,
                                                OracleBudget budget = OracleBudget::for_cycles())
{
    if (budget.max_n > 12) throw ContractError("oracle: cycle budget max_n must be <= 12");
    if (g.vertex_count() > budget.max_n)
        throw ContractError("oracle: n = " + std::to_string(g.vertex_count()) + " exceeds max_n = " +
                            std::to_string(budget.max_n));
    detail::RainbowSearch search(g, budget.node_limit);
    auto seq = search.hamilton_cycle();
    CycleOracleResult res;
    res.nodes = search.nodes();
    if (seq) {
        res.cycle = make_cycle(g, std::move(*seq));
    } else if (search.exhausted()) {
        res.status = OracleStatus::budget_exhausted;
    }
    return res;
}

} // namespace perturb
