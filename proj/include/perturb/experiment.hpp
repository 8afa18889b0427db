#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "perturb/absorber.hpp"
#include "perturb/generators.hpp"
#include "perturb/graph_io.hpp"
#include "perturb/rdfs.hpp"

namespace perturb {

struct ExperimentConfig {
    PerturbationConfig model;
    std::size_t trials = 1;
    /// 0 picks std::thread::hardware_concurrency().
    std::size_t threads = 0;
    /// Per-trial graph, cycle and (with `trace`) RDFS trace files go here.
    std::optional<std::filesystem::path> dump_dir;
    bool trace = false;
    /// Include wall-clock runtime_ms in records. Off by default so that a
    /// fixed seed reproduces the output byte for byte.
    bool timings = false;
};

struct ExperimentRecord {
    PerturbationConfig config;
    std::size_t trial_index = 0;
    double p2 = 0.0;
    Colour r = 0;
    Stage stage_reached = Stage::r1_path;
    bool success = false;
    std::size_t rdfs_path_vertices = 0;
    std::size_t path_target = 0;
    std::optional<std::size_t> min_bi_size;
    std::size_t absorb_steps = 0;
    std::optional<std::size_t> closing_pairs_examined;
    bool cycle_verified = false;
    std::optional<double> runtime_ms;
};

inline nlohmann::ordered_json to_json(const ExperimentRecord& rec)
{
    nlohmann::ordered_json j;
    const auto& c = rec.config;
    j["n"] = c.n;
    j["d"] = c.d;
    j["family"] = std::string(to_string(c.family));
    j["C"] = c.C;
    j["K"] = c.K;
    j["alpha"] = c.alpha;
    j["epsilon"] = c.effective_epsilon();
    j["faithful_epsilon"] = !c.epsilon.has_value();
    j["master_seed"] = c.master_seed;
    j["trial_index"] = rec.trial_index;
    j["p2"] = rec.p2;
    j["r"] = rec.r;
    j["stage_reached"] = to_string(rec.stage_reached);
    j["success"] = rec.success;
    j["rdfs_path_vertices"] = rec.rdfs_path_vertices;
    j["path_target"] = rec.path_target;
    j["min_Bi_size"] = rec.min_bi_size ? nlohmann::ordered_json(*rec.min_bi_size) : nlohmann::ordered_json();
    j["absorb_steps"] = rec.absorb_steps;
    j["closing_pairs_examined"] =
        rec.closing_pairs_examined ? nlohmann::ordered_json(*rec.closing_pairs_examined) : nlohmann::ordered_json();
    j["cycle_verified"] = rec.cycle_verified;
    if (rec.runtime_ms) j["runtime_ms"] = *rec.runtime_ms;
    return j;
}

/// Per-trial generator: stream `trial_index` of the master seed.
inline Rng trial_rng(std::uint64_t master_seed, std::size_t trial_index)
{
    return Rng(master_seed).split(trial_index);
}

/// Runs one trial and, when asked, writes its dump files.
inline ExperimentRecord run_trial(const ExperimentConfig& cfg, std::size_t trial_index)
{
    auto t0 = std::chrono::steady_clock::now();
    PipelineOptions opts;
    opts.keep_graph = cfg.dump_dir.has_value();
    opts.keep_trace = cfg.dump_dir.has_value() && cfg.trace;
    PipelineResult res = run_pipeline(cfg.model, trial_rng(cfg.model.master_seed, trial_index), opts);
    auto t1 = std::chrono::steady_clock::now();

    ExperimentRecord rec;
    rec.config = cfg.model;
    rec.trial_index = trial_index;
    rec.p2 = res.stats.p2;
    rec.r = res.stats.palette;
    rec.stage_reached = res.stage;
    rec.success = res.success;
    rec.rdfs_path_vertices = res.stats.rdfs_path_vertices;
    rec.path_target = res.stats.path_target;
    rec.min_bi_size = res.stats.min_bi_size();
    rec.absorb_steps = res.stats.steps.size();
    if (res.stats.closing) rec.closing_pairs_examined = res.stats.closing->pairs_examined;
    if (cfg.timings) rec.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    if (res.success) {
        // run_pipeline verifies the cycle; this repeats it against the record.
        rec.cycle_verified = res.cycle->is_hamilton(cfg.model.n) && res.cycle->distinct_colours() == cfg.model.n;
    }

    if (cfg.dump_dir) {
        const auto stem = *cfg.dump_dir / ("trial_" + std::to_string(trial_index));
        std::ofstream g(stem.string() + ".graph");
        write_graph(g, *res.graph);
        if (res.cycle) {
            std::ofstream c(stem.string() + ".cycle");
            write_sequence(c, res.cycle->vertices);
        }
        if (res.trace) {
            std::ofstream t(stem.string() + ".trace");
            write_trace(t, *res.trace);
        }
        if (!g) throw std::runtime_error("cannot write dump files under " + cfg.dump_dir->string());
    }
    return rec;
}

/// Runs all trials on a worker pool. Records are committed to `sink` in
/// trial order as soon as each prefix is complete, so the output is the same
/// for any thread count.
inline void run_experiment(const ExperimentConfig& cfg, const std::function<void(const ExperimentRecord&)>& sink)
{
    cfg.model.validate();
    if (cfg.trials < 1) throw ConfigError("trials", "must be at least 1");
    if (cfg.dump_dir) std::filesystem::create_directories(*cfg.dump_dir);

    std::size_t workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, cfg.trials);
    if (workers <= 1) {
        for (std::size_t i = 0; i < cfg.trials; ++i) sink(run_trial(cfg, i));
        return;
    }

    std::vector<std::optional<ExperimentRecord>> slots(cfg.trials);
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::condition_variable ready;
    std::exception_ptr error;

    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= cfg.trials) return;
            try {
                auto rec = run_trial(cfg, i);
                std::lock_guard lock(mu);
                slots[i] = std::move(rec);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error) error = std::current_exception();
                next = cfg.trials;
            }
            ready.notify_one();
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);

    std::size_t committed = 0;
    while (committed < cfg.trials) {
        std::unique_lock lock(mu);
        ready.wait(lock, [&] { return error || slots[committed].has_value(); });
        if (error) break;
        ExperimentRecord rec = std::move(*slots[committed]);
        slots[committed].reset();
        lock.unlock();
        sink(rec);
        ++committed;
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// JSONL convenience wrapper: one line per trial, flushed after each line.
inline void run_experiment(const ExperimentConfig& cfg, std::ostream& out)
{
    run_experiment(cfg, [&](const ExperimentRecord& rec) {
        out << to_json(rec).dump() << '\n';
        out.flush();
    });
}

// ---------------------------------------------------------------------------
// Summaries

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// Wilson score interval for `successes` out of `trials` (z = 1.96 for 95%).
inline Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96)
{
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct SummaryRow {
    std::string n, d, family, C, K, alpha, epsilon;
    std::size_t trials = 0;
    std::size_t successes = 0;
    std::size_t fail_r1_path = 0;
    std::size_t fail_absorption = 0;
    std::size_t fail_closing = 0;
    double rdfs_ratio_sum = 0.0;
    double min_bi_sum = 0.0;
    std::size_t min_bi_count = 0;
    double runtime_sum = 0.0;
    std::size_t runtime_count = 0;

    double success_rate() const { return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
};

struct Summary {
    std::vector<SummaryRow> rows;
    std::size_t malformed_lines = 0;
};

inline Summary summarize(std::istream& in)
{
    Summary out;
    std::map<std::string, std::size_t> index;
    std::string line;
    auto key_text = [](const nlohmann::json& v) { return v.dump(); };
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = nlohmann::json::parse(line);
            std::string key;
            for (const char* f : {"n", "d", "family", "C", "K", "alpha", "epsilon"}) key += key_text(j.at(f)) + "|";
            auto [it, fresh] = index.try_emplace(key, out.rows.size());
            if (fresh) {
                SummaryRow row;
                row.n = key_text(j.at("n"));
                row.d = key_text(j.at("d"));
                row.family = j.at("family").get<std::string>();
                row.C = key_text(j.at("C"));
                row.K = key_text(j.at("K"));
                row.alpha = key_text(j.at("alpha"));
                row.epsilon = key_text(j.at("epsilon"));
                out.rows.push_back(row);
            }
            SummaryRow& row = out.rows[it->second];
            const bool success = j.at("success").get<bool>();
            const std::string stage = j.at("stage_reached").get<std::string>();
            if (!success && stage != "r1_path" && stage != "absorption" && stage != "closing")
                throw ParseError("unknown stage");
            ++row.trials;
            if (success) ++row.successes;
            else if (stage == "r1_path") ++row.fail_r1_path;
            else if (stage == "absorption") ++row.fail_absorption;
            else ++row.fail_closing;
            const double n = j.at("n").get<double>();
            row.rdfs_ratio_sum += j.at("rdfs_path_vertices").get<double>() / n;
            if (!j.at("min_Bi_size").is_null()) {
                row.min_bi_sum += j.at("min_Bi_size").get<double>();
                ++row.min_bi_count;
            }
            if (j.contains("runtime_ms")) {
                row.runtime_sum += j.at("runtime_ms").get<double>();
                ++row.runtime_count;
            }
        } catch (const std::exception&) {
            ++out.malformed_lines;
        }
    }
    return out;
}

inline void write_summary_csv(std::ostream& os, const Summary& s)
{
    os << "n,d,family,C,K,alpha,epsilon,trials,successes,success_rate,wilson_low,wilson_high,"
          "fail_r1_path,fail_absorption,fail_closing,mean_rdfs_path_ratio,mean_min_Bi_size,mean_runtime_ms\n";
    auto num = [](double v) {
        std::ostringstream ss;
        ss << std::setprecision(6) << v;
        return ss.str();
    };
    for (const auto& r : s.rows) {
        auto w = wilson_interval(r.successes, r.trials);
        os << r.n << ',' << r.d << ',' << r.family << ',' << r.C << ',' << r.K << ',' << r.alpha << ','
           << r.epsilon << ',' << r.trials << ',' << r.successes << ',' << num(r.success_rate()) << ','
           << num(w.low) << ',' << num(w.high) << ',' << r.fail_r1_path << ',' << r.fail_absorption << ','
           << r.fail_closing << ',' << num(r.rdfs_ratio_sum / static_cast<double>(r.trials)) << ','
           << (r.min_bi_count ? num(r.min_bi_sum / static_cast<double>(r.min_bi_count)) : "") << ','
           << (r.runtime_count ? num(r.runtime_sum / static_cast<double>(r.runtime_count)) : "") << '\n';
    }
}

} // namespace perturb
