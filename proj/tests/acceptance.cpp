// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "perturb/absorber.hpp"
#include "perturb/experiment.hpp"
#include "perturb/oracle.hpp"
#include "perturb/pseudo_check.hpp"
#include "perturb/rdfs.hpp"

namespace {

using namespace perturb;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ColouredGraph random_coloured(std::size_t n, double p, Colour r, Rng& rng)
{
    Graph g = sample_gnp(n, std::min(1.0, p), rng);
    Graph empty(n);
    return colour_union(g, empty, empty, r, rng).graph();
}

/// RDFS invariants over 1000 random instances.
Outcome criterion_rdfs_invariants()
{
    const auto t0 = Clock::now();
    Rng master(1001);
    std::size_t violations = 0, instances = 0;
    std::string first;
    for (std::size_t i = 0; i < 1000; ++i) {
        Rng rng = master.split(i);
        const std::size_t n = 20 + rng.below(181);
        const double c = 2.0 + 18.0 * rng.uniform01();
        const Colour r = static_cast<Colour>(n + rng.below(2 * n + 1));
        auto g = random_coloured(n, c / static_cast<double>(n), r, rng);
        auto trace = rdfs_run(g, random_permutation(n, rng));
        auto report = check_trace(trace, g);
        ++instances;
        bool bad = !report.ok() || !trace.balanced || report.balanced_colour_count > n - 1 ||
                   trace.tree_edge_count > n - 1;
        if (bad) {
            ++violations;
            if (first.empty())
                first = " first at instance " + std::to_string(i) +
                        (report.ok() ? "" : std::string(": ") + to_string(report.violations[0].property));
        }
    }
    const double secs = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu instances, %zu with violations, %.1f s (limit 60 s)", instances, violations,
                  secs);
    return {violations == 0 && secs < 60.0, buf + first};
}

/// Colour coverage at threshold n forces a rainbow path of n - 2k edges.
Outcome criterion_coverage_contract()
{
    Rng master(2002);
    std::size_t qualifying = 0, violations = 0, drawn = 0;
    while (qualifying < 500 && drawn < 200000) {
        Rng rng = master.split(drawn++);
        const std::size_t n = 8 + rng.below(5);
        std::size_t k_min = 1;
        while (k_min * k_min < n) ++k_min;
        const std::size_t k = k_min + rng.below(n / 2 - k_min + 1);
        auto g = random_coloured(n, 0.75 + 0.25 * rng.uniform01(), static_cast<Colour>(3 * n), rng);
        if (!coverage_condition_exact(g, k, n).holds) continue;
        ++qualifying;
        auto path = longest_rainbow_path(g, random_permutation(n, rng));
        if (!path.rainbow() || path.edge_count() + 2 * k < n) ++violations;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu qualifying instances (of %zu drawn), %zu short paths", qualifying, drawn,
                  violations);
    return {qualifying == 500 && violations == 0, buf};
}

/// Exact oracle dominates RDFS; pipeline successes agree with the oracle.
Outcome criterion_oracle_agreement()
{
    Rng master(3003);
    std::size_t dominance_violations = 0;
    for (std::size_t i = 0; i < 200; ++i) {
        Rng rng = master.split(i);
        const std::size_t n = 3 + rng.below(8);
        auto g = random_coloured(n, 0.3 + 0.7 * rng.uniform01(), static_cast<Colour>(n + rng.below(2 * n)), rng);
        auto rdfs = longest_rainbow_path(g, random_permutation(n, rng));
        auto best = brute_longest_rainbow_path(g);
        if (best.status != OracleStatus::ok || best.path.edge_count() < rdfs.edge_count() || !best.path.rainbow())
            ++dominance_violations;
    }

    PerturbationConfig c;
    c.n = 10;
    c.d = 0.5;
    c.family = SeedFamily::complete;
    c.K = 5;
    c.C = 9.5;
    c.alpha = 4;
    c.epsilon = 0.2;
    std::size_t successes = 0, pipeline_violations = 0;
    for (std::size_t t = 0; t < 4000; ++t) {
        auto res = run_pipeline(c, Rng(3003).split(100000 + t), {true, false});
        if (!res.success) continue;
        ++successes;
        const auto& g = *res.graph;
        if (!res.cycle || !is_rainbow(g, res.cycle->vertices, true) || !res.cycle->is_hamilton(c.n) ||
            !brute_rainbow_hamilton(g).cycle)
            ++pipeline_violations;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "200 instances, %zu dominance violations; %zu pipeline successes at n=10, %zu not confirmed",
                  dominance_violations, successes, pipeline_violations);
    return {dominance_violations == 0 && pipeline_violations == 0 && successes > 0, buf};
}

/// Inclusion frequency of fixed pairs in R1 ∪ R2.
Outcome criterion_two_round_coupling()
{
    const std::size_t n = 1000;
    const double K = 5, C = 6;
    const double p2 = two_round_split(C, K, n);
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (Vertex i = 0; i < 20; ++i) pairs.emplace_back(i * 37 % n, (i * 37 + 1 + i * 211) % n);
    std::vector<std::size_t> hits(pairs.size(), 0);
    Rng master(4004);
    const std::size_t trials = 2000;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng = master.split(t);
        Graph r1 = sample_gnp(n, K / n, rng);
        Graph r2 = sample_gnp(n, p2, rng);
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (r1.has_edge(pairs[i].first, pairs[i].second) || r2.has_edge(pairs[i].first, pairs[i].second))
                ++hits[i];
    }
    const double q = C / n;
    const double se = std::sqrt(q * (1 - q) / trials);
    std::size_t within = 0;
    double worst = 0;
    for (std::size_t h : hits) {
        double z = std::abs(static_cast<double>(h) / trials - q) / se;
        worst = std::max(worst, z);
        if (z <= 4.0) ++within;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "p2=%.10g, %zu/20 pairs within 4 SE of %.3f (largest deviation %.2f SE)", p2,
                  within, q, worst);
    return {within >= 19, buf};
}

/// |B(u, v)| against the floor d^3 n / 110 on a bipartite seed.
Outcome criterion_absorber_floor()
{
    const std::size_t n = 3000;
    const double d = 0.4, eps = 0.1, K = 40;
    Rng rng(5005);
    Rng seed_rng = rng.split(0), r1_rng = rng.split(1), colour_rng = rng.split(2), order_rng = rng.split(3),
        pair_rng = rng.split(4);
    Graph seed = make_seed(SeedFamily::bipartite, n, d, seed_rng);
    Graph r1 = sample_gnp(n, K / n, r1_rng);
    Graph empty(n);
    auto psi = colour_union(seed, r1, empty, static_cast<Colour>(2 * n), colour_rng);
    auto r1_coloured = restrict_to(psi.graph(), r1);
    auto path = longest_rainbow_path(r1_coloured, random_permutation(n, order_rng));
    const std::size_t target = floor_tolerant((1 - eps) * static_cast<double>(n));
    if (path.vertex_count() < target)
        return {false, "RDFS path has " + std::to_string(path.vertex_count()) + " vertices, below " +
                           std::to_string(target)};
    const std::size_t found = path.vertex_count();
    path.vertices.resize(target);
    path.colours.resize(target - 1);
    AbsorberContext ctx(path, n, psi.graph().palette_size());

    std::vector<Vertex> off;
    for (Vertex v = 0; v < n; ++v)
        if (!ctx.on_path(v)) off.push_back(v);
    const double floor_value = d * d * d * static_cast<double>(n) / 110.0;
    std::size_t below = 0, min_b = static_cast<std::size_t>(-1), total = 0;
    for (int s = 0; s < 100; ++s) {
        Vertex u = static_cast<Vertex>(pair_rng.below(n));
        Vertex v = off[pair_rng.below(off.size())];
        if (v == u) v = off[(std::find(off.begin(), off.end(), v) - off.begin() + 1) % off.size()];
        std::size_t b = compute_B(u, v, ctx, seed, CandidateScope::all).size();
        min_b = std::min(min_b, b);
        total += b;
        if (static_cast<double>(b) < floor_value) ++below;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "path %zu -> %zu vertices, %zu/100 pairs below %.4f (min |B| %zu, mean %.1f)",
                  found, target, below,
                  floor_value, min_b, static_cast<double>(total) / 100.0);
    return {below < 1, buf};
}

ExperimentConfig end_to_end_config()
{
    ExperimentConfig cfg;
    auto& m = cfg.model;
    m.n = 500;
    m.d = 0.3;
    m.family = SeedFamily::bipartite;
    m.alpha = 1;
    m.K = 20;
    m.C = 21;
    m.epsilon = 0.1;
    m.master_seed = 6006;
    cfg.trials = 50;
    cfg.threads = 1;
    return cfg;
}

/// End-to-end success rate at n = 500.
Outcome criterion_end_to_end()
{
    auto cfg = end_to_end_config();
    std::size_t successes = 0, unverified = 0, r1_fail = 0, absorb_fail = 0, close_fail = 0;
    const auto t0 = Clock::now();
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        auto res = run_pipeline(cfg.model, trial_rng(cfg.model.master_seed, t), {true, false});
        if (res.success) {
            ++successes;
            if (!is_rainbow(*res.graph, res.cycle->vertices, true) || !res.cycle->is_hamilton(cfg.model.n))
                ++unverified;
        } else if (res.stage == Stage::r1_path) {
            ++r1_fail;
        } else if (res.stage == Stage::absorption) {
            ++absorb_fail;
        } else {
            ++close_fail;
        }
    }
    const double mean_s = seconds_since(t0) / static_cast<double>(cfg.trials);
    const double rate = static_cast<double>(successes) / static_cast<double>(cfg.trials);
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "%zu/50 successes (rate %.2f, need 0.90), %zu unverified; failures r1_path=%zu absorption=%zu "
                  "closing=%zu; mean %.3f s/trial",
                  successes, rate, unverified, r1_fail, absorb_fail, close_fail, mean_s);
    return {rate >= 0.9 && unverified == 0 && mean_s < 5.0, buf};
}

/// Sampled jumbledness never exceeds exact; K_n at p = 1 is exactly zero.
Outcome criterion_jumbledness()
{
    Rng master(7007);
    std::size_t violations = 0;
    std::vector<std::size_t> sizes{1, 2, 3, 4, 5, 6, 7, 8, 9};
    for (std::size_t i = 0; i < 50; ++i) {
        Rng rng = master.split(i);
        const double p = 0.1 + 0.8 * rng.uniform01();
        Graph g = sample_gnp(10, p, rng);
        double exact = jumbledness_exact(g, p).beta_observed;
        double sampled = jumbledness_sampled(g, p, sizes, 2000, rng).beta_observed;
        if (sampled > exact) ++violations;
    }
    Rng rng(0);
    double kn = jumbledness_exact(sample_gnp(10, 1.0, rng), 1.0).beta_observed;
    char buf[160];
    std::snprintf(buf, sizeof buf, "50 instances at n=10, %zu with sampled > exact; exact(K_10, p=1) = %g",
                  violations, kn);
    return {violations == 0 && kn == 0.0, buf};
}

/// Repeating the end-to-end run with the same seed gives identical JSONL.
Outcome criterion_determinism()
{
    auto cfg = end_to_end_config();
    std::ostringstream a, b, c;
    run_experiment(cfg, a);
    run_experiment(cfg, b);
    cfg.threads = 4;
    run_experiment(cfg, c);
    const bool same = a.str() == b.str() && a.str() == c.str();
    std::string detail = std::to_string(a.str().size()) + " bytes; repeat " +
                         (a.str() == b.str() ? "identical" : "differs") + ", 4 threads " +
                         (a.str() == c.str() ? "identical" : "differs");
    return {same && !a.str().empty(), detail};
}

} // namespace

int main()
{
    struct Entry {
        int id;
        const char* name;
        Outcome (*run)();
    };
    const Entry criteria[] = {
        {1, "RDFS invariant suite", criterion_rdfs_invariants},
        {2, "coverage implies long rainbow path", criterion_coverage_contract},
        {3, "oracle dominance and agreement", criterion_oracle_agreement},
        {4, "two-round coupling", criterion_two_round_coupling},
        {5, "absorber count floor", criterion_absorber_floor},
        {6, "end-to-end success rate", criterion_end_to_end},
        {7, "jumbledness oracle equivalence", criterion_jumbledness},
        {8, "determinism", criterion_determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    std::printf("%d of %zu criteria failed\n", failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}
