// perturb: Monte Carlo driver for rainbow Hamilton cycles in randomly
// perturbed, randomly edge-coloured graphs.
//
//   perturb run --n 500 --d 0.3 --family bipartite --C 21 --K 20 --alpha 1 --epsilon 0.1 --trials 50 --seed 7 --out runs.jsonl
//   perturb summarize --in runs.jsonl --out summary.csv
//   perturb pseudo-check --in g.txt --p 0.1 --k 2 --mode exact
//   perturb oracle --in g.txt

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "perturb/experiment.hpp"
#include "perturb/graph_io.hpp"
#include "perturb/oracle.hpp"
#include "perturb/pseudo_check.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadConfig = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunArgs {
    std::string config_file;
    std::size_t n = 0;
    double d = 0;
    std::string family;
    double C = 0;
    double K = 0;
    double alpha = 0;
    double epsilon = 0;
    bool faithful_epsilon = false;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    std::string out;
    std::string dump;
    bool trace = false;
    bool timings = false;
};

perturb::ColouredGraph load_graph(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return perturb::read_graph(in);
}

/// Config file values first, then every flag given on the command line.
perturb::ExperimentConfig build_config(const RunArgs& a, const CLI::App& cmd)
{
    using perturb::ConfigError;
    nlohmann::json file = nlohmann::json::object();
    if (!a.config_file.empty()) {
        std::ifstream in(a.config_file);
        if (!in) throw IoError("cannot open config " + a.config_file);
        try {
            file = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config", e.what());
        }
    }
    auto given = [&](const char* flag) { return cmd.count(std::string("--") + flag) > 0; };
    auto pick = [&]<class T>(const char* key, const T& flag_value, bool required) -> std::optional<T> {
        if (given(key)) return flag_value;
        if (file.contains(key)) {
            try {
                return file.at(key).get<T>();
            } catch (const nlohmann::json::exception&) {
                throw ConfigError(key, "wrong type in config file");
            }
        }
        if (required) throw ConfigError(key, "missing");
        return std::nullopt;
    };

    perturb::ExperimentConfig cfg;
    auto& m = cfg.model;
    m.n = *pick("n", a.n, true);
    m.d = *pick("d", a.d, true);
    const std::string family = *pick("family", a.family, true);
    auto fam = perturb::parse_family(family);
    if (!fam) throw ConfigError("family", "unknown seed family '" + family + "'");
    m.family = *fam;
    m.C = *pick("C", a.C, true);
    m.K = *pick("K", a.K, true);
    m.alpha = *pick("alpha", a.alpha, true);
    const bool faithful = pick("faithful-epsilon", a.faithful_epsilon, false).value_or(false);
    auto eps = pick("epsilon", a.epsilon, false);
    if (faithful && eps && given("epsilon")) throw ConfigError("epsilon", "conflicts with --faithful-epsilon");
    if (!faithful) m.epsilon = eps;
    m.master_seed = *pick("seed", a.seed, true);
    cfg.trials = *pick("trials", a.trials, true);
    cfg.threads = pick("threads", a.threads, false).value_or(0);
    cfg.trace = pick("trace", a.trace, false).value_or(false);
    cfg.timings = pick("timings", a.timings, false).value_or(false);
    if (auto dump = pick("dump", a.dump, false); dump && !dump->empty()) cfg.dump_dir = *dump;
    if (cfg.trace && !cfg.dump_dir) throw ConfigError("trace", "needs --dump DIR to write trace files");
    m.validate();
    if (cfg.trials < 1) throw ConfigError("trials", "must be at least 1");
    return cfg;
}

nlohmann::ordered_json report_json(const perturb::DiscrepancyReport& r)
{
    nlohmann::ordered_json j;
    j["mode"] = perturb::to_string(r.mode);
    j["beta_observed"] = r.beta_observed;
    j["witness_x"] = r.witness_x;
    j["witness_y"] = r.witness_y;
    j["pairs_examined"] = r.pairs_examined;
    return j;
}

nlohmann::ordered_json coverage_json(const perturb::CoverageResult& r)
{
    nlohmann::ordered_json j;
    j["holds"] = r.holds;
    j["no_evidence"] = r.no_evidence;
    j["pairs_examined"] = r.pairs_examined;
    j["min_colours"] = r.min_colours;
    if (!r.holds) {
        j["witness_x"] = r.witness_x;
        j["witness_y"] = r.witness_y;
    }
    return j;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Rainbow Hamilton cycles in randomly perturbed coloured graphs"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run Monte Carlo trials of the full construction");
    run_cmd->add_option("--config", run.config_file, "JSON file with default values for the flags below");
    run_cmd->add_option("--n", run.n, "Number of vertices");
    run_cmd->add_option("--d", run.d, "Seed minimum-degree density in (0,1)");
    run_cmd->add_option("--family", run.family, "complete | bipartite | two_cliques | supercritical_gnq");
    run_cmd->add_option("--C", run.C, "Total perturbation constant (density C/n)");
    run_cmd->add_option("--K", run.K, "First-round constant (density K/n)");
    run_cmd->add_option("--alpha", run.alpha, "Colour surplus; palette is round((1+alpha) n)");
    auto* eps_opt = run_cmd->add_option("--epsilon", run.epsilon, "Absorption margin (default d^3/220)");
    run_cmd->add_flag("--faithful-epsilon", run.faithful_epsilon, "Pin epsilon to d^3/220")->excludes(eps_opt);
    run_cmd->add_option("--trials", run.trials, "Number of trials");
    run_cmd->add_option("--seed", run.seed, "Master seed");
    run_cmd->add_option("--threads", run.threads, "Worker threads (0 = all cores)");
    run_cmd->add_option("--out", run.out, "JSONL output path")->required();
    run_cmd->add_option("--dump", run.dump, "Directory for per-trial graph/cycle files");
    run_cmd->add_flag("--trace", run.trace, "Also dump the first-round RDFS trace (needs --dump)");
    run_cmd->add_flag("--timings", run.timings, "Record runtime_ms (output is then not byte-reproducible)");

    std::string sum_in, sum_out;
    auto* sum_cmd = app.add_subcommand("summarize", "Aggregate a JSONL run into a CSV table");
    sum_cmd->add_option("--in", sum_in, "JSONL records")->required();
    sum_cmd->add_option("--out", sum_out, "CSV output path")->required();

    std::string pc_in, pc_mode = "exact";
    double pc_p = 0;
    std::size_t pc_k = 1;
    std::optional<std::size_t> pc_threshold;
    std::uint64_t pc_samples = 1000, pc_seed = 0;
    auto* pc_cmd = app.add_subcommand("pseudo-check", "Jumbledness and colour-coverage report for a graph");
    pc_cmd->add_option("--in", pc_in, "Graph file (n r header, then u v c lines)")->required();
    pc_cmd->add_option("--p", pc_p, "Density parameter p")->required();
    pc_cmd->add_option("--k", pc_k, "Set size for the coverage condition")->required();
    pc_cmd->add_option("--mode", pc_mode, "exact | sampled")->check(CLI::IsMember({"exact", "sampled"}));
    pc_cmd->add_option("--threshold", pc_threshold, "Required distinct colours (default n)");
    pc_cmd->add_option("--samples", pc_samples, "Sampled mode: number of pairs");
    pc_cmd->add_option("--seed", pc_seed, "Sampled mode: seed");

    std::string or_in;
    auto* or_cmd = app.add_subcommand("oracle", "Exact longest rainbow path and rainbow Hamilton cycle search");
    or_cmd->add_option("--in", or_in, "Graph file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadConfig;
    }

    try {
        if (*run_cmd) {
            auto cfg = build_config(run, *run_cmd);
            std::ofstream out(run.out, std::ios::binary);
            if (!out) throw IoError("cannot open " + run.out);
            perturb::run_experiment(cfg, out);
            if (!out) throw IoError("write failed on " + run.out);
        } else if (*sum_cmd) {
            std::ifstream in(sum_in);
            if (!in) throw IoError("cannot open " + sum_in);
            auto summary = perturb::summarize(in);
            std::ofstream out(sum_out, std::ios::binary);
            if (!out) throw IoError("cannot open " + sum_out);
            perturb::write_summary_csv(out, summary);
            if (summary.malformed_lines)
                std::cerr << "summarize: skipped " << summary.malformed_lines << " malformed line(s)\n";
        } else if (*pc_cmd) {
            auto g = load_graph(pc_in);
            const std::size_t threshold = pc_threshold.value_or(g.vertex_count());
            nlohmann::ordered_json j;
            j["n"] = g.vertex_count();
            j["p"] = pc_p;
            j["k"] = pc_k;
            j["threshold"] = threshold;
            perturb::Rng rng(pc_seed);
            if (pc_mode == "exact") {
                j["discrepancy"] = report_json(perturb::jumbledness_exact(g.uncoloured(), pc_p));
                j["coverage"] = coverage_json(perturb::coverage_condition_exact(g, pc_k, threshold));
            } else {
                std::vector<std::size_t> sizes;
                for (std::size_t s = 1; s <= g.vertex_count(); ++s) sizes.push_back(s);
                j["discrepancy"] = report_json(perturb::jumbledness_sampled(g.uncoloured(), pc_p, sizes, pc_samples, rng));
                j["coverage"] = coverage_json(perturb::coverage_condition_sampled(g, pc_k, threshold, pc_samples, rng));
            }
            std::cout << j.dump() << '\n';
        } else if (*or_cmd) {
            auto g = load_graph(or_in);
            auto path = perturb::brute_longest_rainbow_path(g);
            auto cyc = perturb::brute_rainbow_hamilton(g);
            nlohmann::ordered_json j;
            j["n"] = g.vertex_count();
            j["longest_path"] = {{"status", perturb::to_string(path.status)},
                                 {"edges", path.path.edge_count()},
                                 {"vertices", path.path.vertices}};
            j["hamilton_cycle"] = {{"status", perturb::to_string(cyc.status)},
                                   {"found", cyc.cycle.has_value()},
                                   {"vertices", cyc.cycle ? cyc.cycle->vertices : std::vector<perturb::Vertex>{}}};
            std::cout << j.dump() << '\n';
        }
    } catch (const perturb::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadConfig;
    } catch (const perturb::ContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadConfig;
    } catch (const perturb::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}
