#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "seqseed/csv.hpp"
#include "seqseed/diffusion.hpp"
#include "seqseed/errors.hpp"
#include "seqseed/graph.hpp"
#include "seqseed/random.hpp"
#include "seqseed/ranking.hpp"
#include "seqseed/stats.hpp"
#include "seqseed/strategies.hpp"

namespace seqseed {

struct NamedGraph {
    std::string name;
    std::shared_ptr<const Graph> graph;
};

struct GridSpec {
    std::vector<NamedGraph> graphs;
    std::vector<double> pp_values;
    std::vector<double> sp_values;
    std::vector<RankingMethod> rankings;
    std::vector<StrategySpec> strategies;  // SN is always run; listing it is optional
    std::size_t replications = 100;
    std::uint64_t master_seed = 20170101;

    std::size_t config_count() const noexcept
    {
        return graphs.size() * pp_values.size() * sp_values.size() * rankings.size();
    }

    void validate() const
    {
        if (graphs.empty()) throw ParameterError("grid: no graphs");
        for (const auto& g : graphs)
            if (!g.graph) throw ParameterError("grid: graph '" + g.name + "' is not loaded");
        if (pp_values.empty()) throw ParameterError("grid: no propagation probabilities");
        for (double p : pp_values)
            if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("grid: pp outside [0, 1]");
        if (sp_values.empty()) throw ParameterError("grid: no seed percentages");
        for (double s : sp_values)
            if (!(s > 0.0 && s <= 1.0)) throw ParameterError("grid: sp outside (0, 1]");
        if (rankings.empty()) throw ParameterError("grid: no rankings");
        if (strategies.empty()) throw ParameterError("grid: no strategies");
        if (replications < 1) throw ParameterError("grid: replications must be at least 1");
        std::set<std::string> labels;
        for (const auto& s : strategies) {
            s.validate();
            if (!labels.insert(s.label()).second)
                throw ParameterError("grid: strategy " + s.label() + " listed twice");
        }
    }
};

/// One cell of the grid: graph x pp x sp x ranking.
struct ConfigKey {
    std::size_t config_id = 0;
    std::string graph;
    double pp = 0.0;
    double sp = 0.0;
    RankingMethod ranking = RankingMethod::Random;
};

struct RunRecord {
    ConfigKey config;
    std::string strategy;
    std::size_t run_id = 0;
    std::size_t coverage = 0;
    std::size_t duration = 0;
    std::optional<std::size_t> t_reach_csn;  // first step with coverage >= mean SN coverage
    std::size_t coverage_at_tsn = 0;         // coverage at step t_sn

    friend bool operator==(const RunRecord& a, const RunRecord& b)
    {
        return a.config.config_id == b.config.config_id && a.strategy == b.strategy &&
               a.run_id == b.run_id && a.coverage == b.coverage && a.duration == b.duration &&
               a.t_reach_csn == b.t_reach_csn && a.coverage_at_tsn == b.coverage_at_tsn;
    }
};

/// Reference duration from a mean SN duration: max(1, round(mean)).
inline std::size_t reference_duration(double mean_duration)
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(mean_duration)));
}

/// Runs SN `replications` times on one stream and derives t_sn from the mean duration.
template <AttemptSource Source>
std::size_t estimate_tsn(const Graph& g, const Ranking& ranking, std::size_t n, double pp,
                         std::size_t replications, Source& source)
{
    if (replications < 1) throw ParameterError("estimate_tsn: replications must be at least 1");
    double total = 0.0;
    for (std::size_t r = 0; r < replications; ++r)
        total += static_cast<double>(run_sn(g, ranking, n, pp, source).duration());
    return reference_duration(total / static_cast<double>(replications));
}

/// Stream for one run of one strategy in one configuration.
inline RandomStream run_stream(std::uint64_t master, std::size_t config_id, std::string_view strategy,
                               std::size_t run_id)
{
    return RandomStream::derive(master, {config_id, hash_label(strategy), run_id});
}

inline RandomStream ranking_stream(std::uint64_t master, std::size_t config_id)
{
    return RandomStream::derive(master, {config_id, hash_label("ranking")});
}

/// Keys of every configuration, in config_id order (graph, pp, sp, ranking
/// nested outermost to innermost).
inline std::vector<ConfigKey> enumerate_configs(const GridSpec& spec)
{
    std::vector<ConfigKey> out;
    out.reserve(spec.config_count());
    for (const auto& g : spec.graphs)
        for (double pp : spec.pp_values)
            for (double sp : spec.sp_values)
                for (auto method : spec.rankings)
                    out.push_back(ConfigKey{out.size(), g.name, pp, sp, method});
    return out;
}

/**
 * All runs of one configuration. The ranking is computed once. The SN block
 * runs first and fixes the mean SN coverage (for t_reach_csn) and t_sn (for
 * the TSN family and for coverage_at_tsn); then every sequential strategy.
 */
inline std::vector<RunRecord> run_config(const GridSpec& spec, const ConfigKey& key)
{
    const auto& named = *std::find_if(spec.graphs.begin(), spec.graphs.end(),
                                      [&](const NamedGraph& g) { return g.name == key.graph; });
    const Graph& g = *named.graph;
    const std::size_t n = seed_count(g.node_count(), key.sp);
    auto rank_rng = ranking_stream(spec.master_seed, key.config_id);
    const Ranking ranking = rank(g, key.ranking, rank_rng);

    std::vector<DiffusionTrace> sn_traces;
    sn_traces.reserve(spec.replications);
    double sn_coverage = 0.0, sn_duration = 0.0;
    for (std::size_t r = 0; r < spec.replications; ++r) {
        auto rng = run_stream(spec.master_seed, key.config_id, "SN", r);
        sn_traces.push_back(run_sn(g, ranking, n, key.pp, rng));
        sn_coverage += static_cast<double>(sn_traces.back().coverage());
        sn_duration += static_cast<double>(sn_traces.back().duration());
    }
    const double reps = static_cast<double>(spec.replications);
    const double mean_sn_coverage = sn_coverage / reps;
    const std::size_t t_sn = reference_duration(sn_duration / reps);

    std::vector<RunRecord> out;
    auto emit = [&](const std::string& label, std::size_t run_id, const DiffusionTrace& t) {
        out.push_back(RunRecord{key, label, run_id, t.coverage(), t.duration(),
                                t.first_step_reaching(mean_sn_coverage), t.coverage_at(t_sn)});
    };
    for (std::size_t r = 0; r < sn_traces.size(); ++r) emit("SN", r, sn_traces[r]);

    for (auto strategy : spec.strategies) {
        if (strategy.kind == StrategyKind::SN) continue;
        if (uses_tsn(strategy.kind) && !strategy.t_sn) strategy.t_sn = t_sn;
        const std::string label = strategy.label();
        for (std::size_t r = 0; r < spec.replications; ++r) {
            auto rng = run_stream(spec.master_seed, key.config_id, label, r);
            emit(label, r, run_strategy(strategy, g, ranking, n, key.pp, rng));
        }
    }
    return out;
}

struct ConfigFailure {
    std::size_t config_id = 0;
    std::string message;
};

struct GridOutcome {
    std::size_t configs = 0;
    std::size_t records = 0;
    std::vector<ConfigFailure> failures;
};

/**
 * Runs the whole grid on up to `jobs` threads. Records reach `sink` one
 * configuration at a time in config_id order, whatever the scheduling, so the
 * emitted stream only depends on the spec. A configuration that throws is
 * skipped and reported; the rest of the grid still runs.
 */
inline GridOutcome run_grid(const GridSpec& spec,
                            const std::function<void(std::span<const RunRecord>)>& sink,
                            std::size_t jobs = 1)
{
    spec.validate();
    const auto configs = enumerate_configs(spec);
    GridOutcome outcome;
    outcome.configs = configs.size();

    std::vector<std::optional<std::vector<RunRecord>>> done(configs.size());
    std::vector<std::string> errors(configs.size());
    std::size_t next_to_emit = 0;
    std::mutex mutex;
    std::atomic<std::size_t> next_to_run{0};

    auto flush_ready = [&] {
        // Caller holds the mutex.
        while (next_to_emit < configs.size() && done[next_to_emit]) {
            auto& recs = *done[next_to_emit];
            if (errors[next_to_emit].empty()) {
                sink(recs);
                outcome.records += recs.size();
            } else {
                outcome.failures.push_back({next_to_emit, errors[next_to_emit]});
            }
            done[next_to_emit]->clear();
            done[next_to_emit]->shrink_to_fit();
            ++next_to_emit;
        }
    };

    auto worker = [&] {
        for (std::size_t i; (i = next_to_run.fetch_add(1)) < configs.size();) {
            std::vector<RunRecord> recs;
            std::string error;
            try {
                recs = run_config(spec, configs[i]);
            } catch (const std::exception& e) {
                error = e.what();
            }
            std::lock_guard lock(mutex);
            done[i] = std::move(recs);
            errors[i] = std::move(error);
            flush_ready();
        }
    };

    jobs = std::max<std::size_t>(1, std::min(jobs, configs.size()));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    return outcome;
}

/// Convenience: the full record stream in memory.
inline std::vector<RunRecord> run_grid_collect(const GridSpec& spec, std::size_t jobs = 1,
                                               GridOutcome* outcome = nullptr)
{
    std::vector<RunRecord> all;
    auto result = run_grid(
        spec, [&](std::span<const RunRecord> recs) { all.insert(all.end(), recs.begin(), recs.end()); },
        jobs);
    if (outcome) *outcome = std::move(result);
    return all;
}

// ---------------------------------------------------------------------------
// Records CSV

inline constexpr const char* records_csv_header =
    "config_id,graph,pp,sp,ranking,strategy,run_id,coverage,duration,t_reach_csn,coverage_at_tsn";

inline void write_record_row(std::ostream& out, const RunRecord& r)
{
    out << r.config.config_id << ',' << r.config.graph << ',' << format_real(r.config.pp) << ','
        << format_real(r.config.sp) << ',' << to_string(r.config.ranking) << ',' << r.strategy << ','
        << r.run_id << ',' << r.coverage << ',' << r.duration << ',';
    if (r.t_reach_csn) out << *r.t_reach_csn;
    out << ',' << r.coverage_at_tsn << '\n';
}

inline void write_records_csv(std::ostream& out, std::span<const RunRecord> records)
{
    out << records_csv_header << '\n';
    for (const auto& r : records) write_record_row(out, r);
}

inline std::vector<RunRecord> read_records_csv(std::istream& in)
{
    const CsvTable t = read_csv(in);
    const auto c_config = t.column("config_id"), c_graph = t.column("graph"), c_pp = t.column("pp"),
               c_sp = t.column("sp"), c_rank = t.column("ranking"), c_strat = t.column("strategy"),
               c_run = t.column("run_id"), c_cov = t.column("coverage"), c_dur = t.column("duration"),
               c_reach = t.column("t_reach_csn"), c_at = t.column("coverage_at_tsn");

    std::vector<RunRecord> out;
    out.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        auto fail = [&](const std::string& what) {
            return ParseError("records row " + std::to_string(i + 1) + ": " + what);
        };
        auto to_size = [&](const std::string& s, const char* field) -> std::size_t {
            try {
                std::size_t pos = 0;
                const auto v = std::stoull(s, &pos);
                if (pos != s.size()) throw std::invalid_argument(s);
                return static_cast<std::size_t>(v);
            } catch (const std::exception&) {
                throw fail(std::string("bad integer in ") + field);
            }
        };
        auto to_real = [&](const std::string& s, const char* field) {
            try {
                return std::stod(s);
            } catch (const std::exception&) {
                throw fail(std::string("bad number in ") + field);
            }
        };
        RunRecord r;
        r.config.config_id = to_size(row[c_config], "config_id");
        r.config.graph = row[c_graph];
        r.config.pp = to_real(row[c_pp], "pp");
        r.config.sp = to_real(row[c_sp], "sp");
        const auto method = parse_ranking_method(row[c_rank]);
        if (!method) throw fail("unknown ranking '" + row[c_rank] + "'");
        r.config.ranking = *method;
        r.strategy = row[c_strat];
        r.run_id = to_size(row[c_run], "run_id");
        r.coverage = to_size(row[c_cov], "coverage");
        r.duration = to_size(row[c_dur], "duration");
        if (!row[c_reach].empty()) r.t_reach_csn = to_size(row[c_reach], "t_reach_csn");
        r.coverage_at_tsn = to_size(row[c_at], "coverage_at_tsn");
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Summary

struct ConfigSummary {
    ConfigKey config;
    std::size_t sn_runs = 0;
    double sn_mean_coverage = 0.0;
    double sn_mean_duration = 0.0;
    std::size_t t_sn = 1;
};

/// One point of the coverage-ratio / duration-ratio scatter.
struct RatioPoint {
    ConfigKey config;
    std::string strategy;
    double mean_coverage = 0.0;
    double mean_duration = 0.0;
    double coverage_ratio = 0.0;            // mean C_SQ / mean C_SN
    std::optional<double> duration_ratio;   // mean T_SQ / mean T_SN; absent when T_SN is 0
};

/// Strategy-level comparison against SN across all configurations.
struct StrategyComparison {
    std::string strategy;
    std::size_t configs = 0;
    double win_fraction = 0.0;       // configs with mean C_SQ > mean C_SN (ties lose)
    double run_win_fraction = 0.0;   // run pairs (same run_id) with C_SQ > C_SN
    double mean_coverage = 0.0;      // average of per-config means
    double mean_duration = 0.0;
    double coverage_increase = 0.0;  // average of per-config coverage ratios, minus 1
    double duration_ratio = 0.0;     // average of per-config duration ratios where defined
    double hl_delta = 0.0;           // Hodges-Lehmann shift of per-config mean coverage
    double wilcoxon_p = 1.0;
    double hl_delta_duration = 0.0;
    double wilcoxon_p_duration = 1.0;
};

struct ComparisonSummary {
    std::vector<ConfigSummary> configs;
    std::vector<RatioPoint> ratios;
    std::vector<StrategyComparison> strategies;

    const StrategyComparison* find(std::string_view label) const
    {
        for (const auto& s : strategies)
            if (s.strategy == label) return &s;
        return nullptr;
    }
};

namespace detail {

// Sort key for strategy labels: known families in declaration order, then k.
inline std::tuple<int, std::size_t, std::string> strategy_order(const std::string& label)
{
    try {
        const auto spec = parse_strategy(label);
        return {static_cast<int>(spec.kind), spec.k.value_or(0), label};
    } catch (const ParameterError&) {
        return {1000, 0, label};
    }
}

struct RunOutcome {
    std::size_t run_id;
    double coverage;
    double duration;
};

inline double mean_of(const std::vector<RunOutcome>& runs, double RunOutcome::*field)
{
    double total = 0.0;
    for (const auto& r : runs) total += r.*field;
    return total / static_cast<double>(runs.size());
}

}  // namespace detail

/**
 * Pairs every sequential strategy with the SN baseline of its configuration.
 * Depends only on the multiset of records, not their order.
 */
inline ComparisonSummary summarize(std::span<const RunRecord> records)
{
    using detail::RunOutcome;
    struct ConfigRuns {
        ConfigKey key;
        std::map<std::string, std::vector<RunOutcome>> by_strategy;
    };
    std::map<std::size_t, ConfigRuns> configs;
    for (const auto& r : records) {
        auto& c = configs[r.config.config_id];
        c.key = r.config;
        c.by_strategy[r.strategy].push_back(
            {r.run_id, static_cast<double>(r.coverage), static_cast<double>(r.duration)});
    }

    ComparisonSummary out;
    struct Accum {
        std::vector<double> coverage_diff, duration_diff, coverage_ratio, duration_ratio;
        double coverage_sum = 0.0, duration_sum = 0.0;
        std::size_t wins = 0, run_pairs = 0, run_wins = 0;
    };
    std::map<std::string, Accum> acc;

    for (auto& [id, c] : configs) {
        for (auto& [label, runs] : c.by_strategy)
            std::sort(runs.begin(), runs.end(),
                      [](const RunOutcome& a, const RunOutcome& b) { return a.run_id < b.run_id; });
        const auto base = c.by_strategy.find("SN");
        if (base == c.by_strategy.end())
            throw ParseError("config " + std::to_string(id) + " (" + c.key.graph +
                             ") has no SN baseline records");
        const auto& sn = base->second;
        ConfigSummary cs{c.key, sn.size(), detail::mean_of(sn, &RunOutcome::coverage),
                         detail::mean_of(sn, &RunOutcome::duration), 1};
        cs.t_sn = reference_duration(cs.sn_mean_duration);
        out.configs.push_back(cs);

        std::map<std::size_t, double> sn_by_run;
        for (const auto& r : sn) sn_by_run[r.run_id] = r.coverage;

        for (const auto& [label, runs] : c.by_strategy) {
            if (label == "SN") continue;
            RatioPoint p{c.key, label, detail::mean_of(runs, &RunOutcome::coverage),
                         detail::mean_of(runs, &RunOutcome::duration), 0.0, std::nullopt};
            p.coverage_ratio = p.mean_coverage / cs.sn_mean_coverage;
            if (cs.sn_mean_duration > 0.0) p.duration_ratio = p.mean_duration / cs.sn_mean_duration;
            out.ratios.push_back(p);

            auto& a = acc[label];
            a.coverage_diff.push_back(p.mean_coverage - cs.sn_mean_coverage);
            a.duration_diff.push_back(p.mean_duration - cs.sn_mean_duration);
            a.coverage_ratio.push_back(p.coverage_ratio);
            if (p.duration_ratio) a.duration_ratio.push_back(*p.duration_ratio);
            a.coverage_sum += p.mean_coverage;
            a.duration_sum += p.mean_duration;
            if (p.mean_coverage > cs.sn_mean_coverage) ++a.wins;
            for (const auto& r : runs) {
                const auto it = sn_by_run.find(r.run_id);
                if (it == sn_by_run.end()) continue;
                ++a.run_pairs;
                if (r.coverage > it->second) ++a.run_wins;
            }
        }
    }

    auto average = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    for (const auto& [label, a] : acc) {
        StrategyComparison s;
        s.strategy = label;
        s.configs = a.coverage_diff.size();
        const double nc = static_cast<double>(s.configs);
        s.win_fraction = static_cast<double>(a.wins) / nc;
        s.run_win_fraction =
            a.run_pairs ? static_cast<double>(a.run_wins) / static_cast<double>(a.run_pairs) : 0.0;
        s.mean_coverage = a.coverage_sum / nc;
        s.mean_duration = a.duration_sum / nc;
        s.coverage_increase = average(a.coverage_ratio) - 1.0;
        s.duration_ratio = average(a.duration_ratio);
        s.hl_delta = stats::hodges_lehmann(a.coverage_diff);
        s.wilcoxon_p = stats::wilcoxon_signed_rank(a.coverage_diff).p_value;
        s.hl_delta_duration = stats::hodges_lehmann(a.duration_diff);
        s.wilcoxon_p_duration = stats::wilcoxon_signed_rank(a.duration_diff).p_value;
        out.strategies.push_back(std::move(s));
    }
    std::sort(out.strategies.begin(), out.strategies.end(),
              [](const StrategyComparison& a, const StrategyComparison& b) {
                  return detail::strategy_order(a.strategy) < detail::strategy_order(b.strategy);
              });
    return out;
}

/// Strategy table: one row per sequential strategy, compared with SN.
inline void write_summary_csv(std::ostream& out, const ComparisonSummary& s)
{
    out << "strategy,configs,win_fraction,run_win_fraction,mean_coverage,mean_duration,"
           "coverage_increase,duration_ratio,hl_delta,wilcoxon_p,hl_delta_duration,"
           "wilcoxon_p_duration\n";
    for (const auto& r : s.strategies)
        out << r.strategy << ',' << r.configs << ',' << format_real(r.win_fraction) << ','
            << format_real(r.run_win_fraction) << ',' << format_real(r.mean_coverage) << ','
            << format_real(r.mean_duration) << ',' << format_real(r.coverage_increase) << ','
            << format_real(r.duration_ratio) << ',' << format_real(r.hl_delta) << ','
            << format_real(r.wilcoxon_p) << ',' << format_real(r.hl_delta_duration) << ','
            << format_real(r.wilcoxon_p_duration) << '\n';
}

/// One row per configuration with its SN baseline.
inline void write_configs_csv(std::ostream& out, const ComparisonSummary& s)
{
    out << "config_id,graph,pp,sp,ranking,sn_runs,sn_mean_coverage,sn_mean_duration,t_sn\n";
    for (const auto& c : s.configs)
        out << c.config.config_id << ',' << c.config.graph << ',' << format_real(c.config.pp) << ','
            << format_real(c.config.sp) << ',' << to_string(c.config.ranking) << ',' << c.sn_runs
            << ',' << format_real(c.sn_mean_coverage) << ',' << format_real(c.sn_mean_duration)
            << ',' << c.t_sn << '\n';
}

/// Coverage and duration ratio per (configuration, strategy), for scatter plots.
inline void write_ratios_csv(std::ostream& out, const ComparisonSummary& s)
{
    out << "config_id,graph,pp,sp,ranking,strategy,mean_coverage,mean_duration,coverage_ratio,"
           "duration_ratio\n";
    for (const auto& p : s.ratios) {
        out << p.config.config_id << ',' << p.config.graph << ',' << format_real(p.config.pp) << ','
            << format_real(p.config.sp) << ',' << to_string(p.config.ranking) << ',' << p.strategy
            << ',' << format_real(p.mean_coverage) << ',' << format_real(p.mean_duration) << ','
            << format_real(p.coverage_ratio) << ',';
        if (p.duration_ratio) out << format_real(*p.duration_ratio);
        out << '\n';
    }
}

}  // namespace seqseed
