// seqseed command-line tool: generate graphs, rank nodes, simulate one
// configuration, run a grid and summarize its records.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqseed/experiment.hpp"
#include "seqseed/generators.hpp"
#include "seqseed/graph.hpp"
#include "seqseed/grid_config.hpp"
#include "seqseed/ranking.hpp"
#include "seqseed/strategies.hpp"

namespace fs = std::filesystem;
using namespace seqseed;

namespace {

constexpr std::uint64_t default_seed = 20170101;

struct SeedFlags {
    std::uint64_t seed = default_seed;
    bool entropy = false;

    void add_to(CLI::App* cmd)
    {
        cmd->add_option("--seed", seed, "master seed")->capture_default_str();
        cmd->add_flag("--entropy", entropy, "draw the master seed from the OS instead");
    }

    std::uint64_t resolve() const
    {
        if (!entropy) return seed;
        std::random_device rd;
        const std::uint64_t s = (std::uint64_t{rd()} << 32) ^ rd();
        std::cerr << "master seed " << s << '\n';
        return s;
    }
};

std::ofstream open_out(const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

Graph load_graph(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph " + path.string());
    const auto load = load_edge_list(in);
    if (load.dropped.self_loops || load.dropped.duplicate_edges)
        std::cerr << path.string() << ": dropped " << load.dropped.self_loops << " self-loops, "
                  << load.dropped.duplicate_edges << " duplicate edges\n";
    return load.graph;
}

RankingMethod ranking_from(const std::string& text)
{
    const auto m = parse_ranking_method(text);
    if (!m) throw ParameterError("unknown ranking '" + text + "'");
    return *m;
}

std::size_t jobs_from_env(std::size_t fallback)
{
    if (const char* env = std::getenv("SEQSEED_JOBS")) {
        try {
            const auto v = std::stoul(env);
            if (v >= 1) return v;
        } catch (const std::exception&) {
        }
        std::cerr << "ignoring SEQSEED_JOBS='" << env << "'\n";
    }
    return fallback;
}

// ---------------------------------------------------------------------------

struct GenArgs {
    std::string kind;
    std::size_t n = 0;
    std::optional<std::size_t> m;
    std::optional<double> p;
    SeedFlags seed;
    fs::path out;
};

void cmd_gen(const GenArgs& a)
{
    RandomStream rng(a.seed.resolve());
    Graph g;
    if (a.kind == "ba") {
        if (!a.m || a.p) throw ParameterError("gen ba takes --m and no --p");
        g = generate_ba(a.n, *a.m, rng);
    } else {
        if (!a.p || a.m) throw ParameterError("gen er takes --p and no --m");
        g = generate_er(a.n, *a.p, rng);
    }
    auto out = open_out(a.out);
    write_edge_list(out, g);
    std::cout << "nodes " << g.node_count() << "\nedges " << g.edge_count() << '\n';
}

struct RankArgs {
    fs::path graph;
    std::string method;
    SeedFlags seed;
    fs::path out;
};

void cmd_rank(const RankArgs& a)
{
    const auto method = ranking_from(a.method);
    const Graph g = load_graph(a.graph);
    RandomStream rng(a.seed.resolve());
    const Ranking r = rank(g, method, rng);
    auto out = open_out(a.out);
    write_ranking_csv(out, g, r);
}

struct SimulateArgs {
    fs::path graph;
    std::string strategy;
    std::optional<std::size_t> k, t_sn;
    std::string ranking;
    double sp = 0.0, pp = 0.0;
    std::size_t runs = 100;
    SeedFlags seed;
    fs::path out_dir;
};

void cmd_simulate(const SimulateArgs& a)
{
    auto spec = parse_strategy(a.strategy, a.k, a.t_sn);
    const auto method = ranking_from(a.ranking);
    if (!(a.pp >= 0.0 && a.pp <= 1.0)) throw ParameterError("--pp must lie in [0, 1]");
    if (a.runs < 1) throw ParameterError("--runs must be at least 1");
    const Graph g = load_graph(a.graph);
    const std::size_t n = seed_count(g.node_count(), a.sp);
    const std::uint64_t master = a.seed.resolve();

    auto rank_rng = RandomStream::derive(master, {hash_label("ranking")});
    const Ranking ranking = rank(g, method, rank_rng);

    if (uses_tsn(spec.kind) && !spec.t_sn) {
        double total = 0.0;
        for (std::size_t r = 0; r < a.runs; ++r) {
            auto rng = RandomStream::derive(master, {hash_label("SN"), r});
            total += static_cast<double>(run_sn(g, ranking, n, a.pp, rng).duration());
        }
        spec.t_sn = reference_duration(total / static_cast<double>(a.runs));
        std::cout << "t_sn " << *spec.t_sn << " (from " << a.runs << " SN runs)\n";
    }
    if (spec.k && *spec.k > n)
        throw ParameterError("k = " + std::to_string(*spec.k) + " exceeds the budget n = " +
                             std::to_string(n));

    const std::string label = spec.label();
    std::vector<DiffusionTrace> traces;
    traces.reserve(a.runs);
    for (std::size_t r = 0; r < a.runs; ++r) {
        auto rng = RandomStream::derive(master, {hash_label(label), r});
        traces.push_back(run_strategy(spec, g, ranking, n, a.pp, rng));
    }

    std::size_t longest = 0;
    double coverage = 0.0, duration = 0.0;
    for (std::size_t r = 0; r < traces.size(); ++r) {
        auto out = open_out(a.out_dir / "traces" / ("trace_" + std::to_string(r) + ".csv"));
        write_trace_csv(out, traces[r]);
        longest = std::max(longest, traces[r].steps.size());
        coverage += static_cast<double>(traces[r].coverage());
        duration += static_cast<double>(traces[r].duration());
    }
    auto curve = open_out(a.out_dir / "curve.csv");
    curve << "step,mean_cumulative_coverage\n";
    for (std::size_t s = 0; s < longest; ++s) {
        double sum = 0.0;
        for (const auto& t : traces) sum += static_cast<double>(t.coverage_at(s));
        curve << s << ',' << format_real(sum / static_cast<double>(traces.size())) << '\n';
    }

    const double runs = static_cast<double>(a.runs);
    std::cout << "strategy " << label << "\nranking " << to_string(method) << "\nseeds " << n
              << "\nruns " << a.runs << "\nmean_coverage " << format_real(coverage / runs)
              << "\nmean_duration " << format_real(duration / runs) << '\n';
}

struct GridArgs {
    fs::path config;
    fs::path out_dir;
    std::size_t jobs = 1;
    std::optional<std::uint64_t> seed;
    bool entropy = false;
};

void write_summaries(const fs::path& dir, const ComparisonSummary& s)
{
    auto summary = open_out(dir / "summary.csv");
    write_summary_csv(summary, s);
    auto configs = open_out(dir / "configs.csv");
    write_configs_csv(configs, s);
    auto ratios = open_out(dir / "ratios.csv");
    write_ratios_csv(ratios, s);
}

int cmd_grid(const GridArgs& a, bool jobs_given)
{
    GridSpec spec = load_grid_config(a.config);
    if (a.seed) spec.master_seed = *a.seed;
    if (a.entropy) spec.master_seed = SeedFlags{0, true}.resolve();
    const std::size_t jobs = jobs_given ? a.jobs : jobs_from_env(a.jobs);
    if (jobs < 1) throw ParameterError("--jobs must be at least 1");

    auto out = open_out(a.out_dir / "records.csv");
    out << records_csv_header << '\n';
    std::vector<RunRecord> all;
    const auto outcome = run_grid(
        spec,
        [&](std::span<const RunRecord> recs) {
            for (const auto& r : recs) write_record_row(out, r);
            all.insert(all.end(), recs.begin(), recs.end());
        },
        jobs);
    out.close();
    for (const auto& f : outcome.failures)
        std::cerr << "config " << f.config_id << " failed: " << f.message << '\n';

    std::cout << "configs " << outcome.configs << "\nrecords " << outcome.records << '\n';
    if (!all.empty()) write_summaries(a.out_dir, summarize(all));
    return outcome.failures.empty() ? 0 : 1;
}

struct SummarizeArgs {
    fs::path records;
    fs::path out_dir;
};

void cmd_summarize(const SummarizeArgs& a)
{
    std::ifstream in(a.records);
    if (!in) throw std::runtime_error("cannot open records " + a.records.string());
    const auto records = read_records_csv(in);
    if (records.empty()) throw ParseError(a.records.string() + ": no records");
    const auto s = summarize(records);
    write_summaries(a.out_dir, s);
    std::cout << "configs " << s.configs.size() << "\nstrategies " << s.strategies.size() << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sequential seeding experiments on the independent cascade model"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate a random graph as an edge list");
    gen_cmd->add_option("kind", gen.kind, "ba or er")->required()->check(CLI::IsMember({"ba", "er"}));
    gen_cmd->add_option("--n", gen.n, "node count")->required();
    gen_cmd->add_option("--m", gen.m, "edges per new node (ba)");
    gen_cmd->add_option("--p", gen.p, "edge probability (er)");
    gen_cmd->add_option("--out", gen.out, "edge-list file")->required();
    gen.seed.add_to(gen_cmd);

    RankArgs rk;
    auto* rank_cmd = app.add_subcommand("rank", "rank the nodes of a graph");
    rank_cmd->add_option("--graph", rk.graph, "edge-list file")->required();
    rank_cmd->add_option("--method", rk.method, "RANDOM, DEGREE, DEGREE2, PAGERANK or EIGENVECTOR")
        ->required();
    rank_cmd->add_option("--out", rk.out, "ranking CSV")->required();
    rk.seed.add_to(rank_cmd);

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "run one strategy on one configuration");
    sim_cmd->add_option("--graph", sim.graph, "edge-list file")->required();
    sim_cmd->add_option("--strategy", sim.strategy, "SN, SQ_kPS, SQ_kPS_R, SQ_kPS_B, SQ_TSN, SQ_TSN_R")
        ->required();
    sim_cmd->add_option("--k", sim.k, "seeds per stage");
    sim_cmd->add_option("--t-sn", sim.t_sn, "reference duration; estimated from SN when absent");
    sim_cmd->add_option("--ranking", sim.ranking, "ranking method")->required();
    sim_cmd->add_option("--sp", sim.sp, "seed fraction of the node count")->required();
    sim_cmd->add_option("--pp", sim.pp, "propagation probability")->required();
    sim_cmd->add_option("--runs", sim.runs, "replications")->capture_default_str();
    sim_cmd->add_option("--out-dir", sim.out_dir, "output directory")->required();
    sim.seed.add_to(sim_cmd);

    GridArgs grid;
    auto* grid_cmd = app.add_subcommand("grid", "run every configuration of a JSON grid");
    grid_cmd->add_option("--config", grid.config, "grid JSON")->required();
    grid_cmd->add_option("--out-dir", grid.out_dir, "output directory")->required();
    auto* jobs_opt =
        grid_cmd->add_option("--jobs", grid.jobs, "worker threads (default: $SEQSEED_JOBS or 1)");
    grid_cmd->add_option("--seed", grid.seed, "override the config's master seed");
    grid_cmd->add_flag("--entropy", grid.entropy, "draw the master seed from the OS");

    SummarizeArgs sum;
    auto* sum_cmd = app.add_subcommand("summarize", "compare every strategy with SN");
    sum_cmd->add_option("--records", sum.records, "records CSV from grid")->required();
    sum_cmd->add_option("--out-dir", sum.out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen_cmd) cmd_gen(gen);
        if (*rank_cmd) cmd_rank(rk);
        if (*sim_cmd) cmd_simulate(sim);
        if (*grid_cmd) return cmd_grid(grid, jobs_opt->count() > 0);
        if (*sum_cmd) cmd_summarize(sum);
    } catch (const std::exception& e) {
        std::cerr << "seqseed: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
