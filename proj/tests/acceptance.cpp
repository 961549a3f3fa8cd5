// Acceptance checks. Prints one PASS/FAIL line per criterion; `--only N` runs a
// single criterion. Exit status is 0 iff every criterion that ran passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "seqseed/diffusion.hpp"
#include "seqseed/experiment.hpp"
#include "seqseed/generators.hpp"
#include "seqseed/ranking.hpp"
#include "seqseed/stats.hpp"
#include "seqseed/strategies.hpp"
#include "support/centrality_oracles.hpp"
#include "support/coins.hpp"
#include "support/graphs.hpp"

using namespace seqseed;
using seqseed::testing::Rational;

namespace {

constexpr std::uint64_t acceptance_seed = 20170101;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x, int digits = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::size_t worker_count()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

Ranking identity_ranking(std::size_t n)
{
    Ranking r;
    r.order.resize(n);
    std::iota(r.order.begin(), r.order.end(), NodeId{0});
    r.score.assign(n, 0.0);
    return r;
}

// ---------------------------------------------------------------------------
// 1. Monte Carlo against the live-edge oracle

Verdict oracle_equivalence()
{
    RandomStream gen(acceptance_seed);
    constexpr std::size_t runs = 100000;
    std::size_t checks = 0, misses = 0;
    double worst_z = 0.0;
    for (std::size_t trial = 0; trial < 25; ++trial) {
        const std::size_t nodes = 3 + gen.below(8);
        const std::size_t max_edges = std::min<std::size_t>(12, nodes * (nodes - 1) / 2);
        const std::size_t edges = 1 + gen.below(max_edges);
        const Graph g = testing::random_graph(nodes, edges, gen);

        std::vector<NodeId> all(nodes);
        std::iota(all.begin(), all.end(), NodeId{0});
        gen.shuffle(std::span<NodeId>(all));
        const std::vector<NodeId> seeds(all.begin(), all.begin() + 1 + gen.below(3));

        for (double pp : {0.1, 0.5, 0.9}) {
            const double exact = expected_coverage_exact(g, seeds, pp);
            auto rng = RandomStream::derive(acceptance_seed, {trial, static_cast<std::uint64_t>(pp * 10)});
            double sum = 0.0, sum2 = 0.0;
            for (std::size_t r = 0; r < runs; ++r) {
                DiffusionState state(nodes);
                activate_seeds(state, seeds);
                run_until_stop(state, g, pp, rng);
                const auto c = static_cast<double>(state.coverage());
                sum += c;
                sum2 += c * c;
            }
            const double mean = sum / runs;
            const double var = std::max(0.0, (sum2 - runs * mean * mean) / (runs - 1));
            const double se = std::sqrt(var / runs);
            ++checks;
            if (se == 0.0) {
                if (std::abs(mean - exact) > 1e-9) ++misses;
                continue;
            }
            const double z = std::abs(mean - exact) / se;
            worst_z = std::max(worst_z, z);
            if (z > 3.0) ++misses;
        }
    }
    return {misses == 0, std::to_string(checks) + " checks, " + std::to_string(misses) +
                             " outside 3 SE, worst |z| " + fmt(worst_z, 3)};
}

// ---------------------------------------------------------------------------
// 2. pp = 0 and pp = 1

std::size_t expected_zero_pp_duration(const StrategySpec& s, std::size_t n)
{
    if (s.kind == StrategyKind::SN) return 0;
    if (uses_k(s.kind)) return kps_stage_sizes(n, *s.k).size() - 1;
    return tsn_stage_sizes(n, *s.t_sn).size() - 1;
}

Verdict degenerate_exactness()
{
    RandomStream gen(acceptance_seed + 2);
    std::size_t checks = 0;
    std::vector<std::string> failures;
    for (std::size_t trial = 0; trial < 30; ++trial) {
        const std::size_t nodes = 20 + gen.below(120);
        const Graph g = trial % 2 ? generate_er(nodes, 2.0 / static_cast<double>(nodes), gen)
                                  : generate_ba(nodes, 1 + gen.below(3), gen);
        RandomStream rr(trial);
        const Ranking r = rank(g, all_ranking_methods[trial % 5], rr);
        const std::size_t n = 1 + gen.below(12);
        const auto comp = components(g);
        const std::size_t k = 1 + gen.below(n), t_sn = 1 + gen.below(8);
        const std::vector<StrategySpec> specs{
            {StrategyKind::SN, {}, {}},       {StrategyKind::SQ_kPS, k, {}},
            {StrategyKind::SQ_kPS_R, k, {}},  {StrategyKind::SQ_kPS_B, k, {}},
            {StrategyKind::SQ_TSN, {}, t_sn}, {StrategyKind::SQ_TSN_R, {}, t_sn}};
        for (const auto& spec : specs) {
            auto rng = RandomStream::derive(acceptance_seed, {trial, hash_label(spec.label())});
            const auto zero = run_strategy(spec, g, r, n, 0.0, rng);
            ++checks;
            if (zero.coverage() != n || zero.duration() != expected_zero_pp_duration(spec, n))
                failures.push_back(spec.label() + " pp=0 trial " + std::to_string(trial));

            const auto one = run_strategy(spec, g, r, n, 1.0, rng);
            std::vector<std::uint8_t> hit(comp.count, 0);
            std::size_t union_size = 0;
            const auto sizes = comp.groups();
            for (NodeId s : one.all_seeds())
                if (!hit[comp.component[s]]) {
                    hit[comp.component[s]] = 1;
                    union_size += sizes[comp.component[s]].size();
                }
            ++checks;
            if (one.coverage() != union_size)
                failures.push_back(spec.label() + " pp=1 trial " + std::to_string(trial));
            if (spec.kind == StrategyKind::SN) {
                std::vector<std::uint8_t> top(comp.count, 0);
                std::size_t top_union = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const auto c = comp.component[r.order[i]];
                    if (!top[c]) top[c] = 1, top_union += sizes[c].size();
                }
                ++checks;
                if (top_union != one.coverage())
                    failures.push_back("SN top-n union trial " + std::to_string(trial));
            }
        }
    }
    std::string detail = std::to_string(checks) + " exact checks";
    if (!failures.empty()) detail += ", first failure: " + failures.front();
    return {failures.empty(), detail};
}

// ---------------------------------------------------------------------------
// 3. SQ_kPS(k = n) and SQ_TSN(t_sn = 1) against SN

bool same_trace(const DiffusionTrace& a, const DiffusionTrace& b)
{
    if (a.steps.size() != b.steps.size() || a.seeds_spent != b.seeds_spent ||
        a.seeds_forfeited != b.seeds_forfeited)
        return false;
    for (std::size_t i = 0; i < a.steps.size(); ++i)
        if (a.steps[i].seeds != b.steps[i].seeds || a.steps[i].activated != b.steps[i].activated ||
            a.steps[i].cumulative != b.steps[i].cumulative)
            return false;
    return true;
}

Verdict reduction_identities()
{
    RandomStream gen(acceptance_seed + 3);
    const Graph ba = generate_ba(1000, 3, gen);
    const Graph er = generate_er(1000, 0.006, gen);
    std::size_t mismatches = 0;
    for (std::uint64_t run = 0; run < 100; ++run) {
        const Graph& g = run % 2 ? er : ba;
        RandomStream rr(run);
        const Ranking r = rank(g, all_ranking_methods[run % 5], rr);
        const std::size_t n = 10 + run % 41;
        const double pp = 0.05 * static_cast<double>(1 + run % 5);
        auto a = RandomStream::derive(acceptance_seed, {run});
        auto b = a, c = a;
        const auto sn = run_sn(g, r, n, pp, a);
        if (!same_trace(sn, run_sq_kps(g, r, n, n, pp, b))) ++mismatches;
        if (!same_trace(sn, run_sq_tsn(g, r, n, 1, pp, c))) ++mismatches;
    }
    return {mismatches == 0, "100 runs x 2 identities, " + std::to_string(mismatches) + " mismatches"};
}

// ---------------------------------------------------------------------------
// 4. Three-node path, exact expectations

Verdict theorem_instance()
{
    // a-b-c = 0-1-2, ranking [a, c, b], n = 2, pp = 1/2.
    const Graph g = testing::path_graph(3);
    Ranking r;
    r.order = {0, 2, 1};
    r.score.assign(3, 0.0);
    const Rational p(1, 2);
    auto expectation = [&](bool sequential) {
        return testing::enumerate_histories(
            [&](testing::PathCoin& coin) {
                const auto t = sequential ? run_sq_kps_r(g, r, 2, 1, 0.5, coin) : run_sn(g, r, 2, 0.5, coin);
                return Rational(static_cast<std::int64_t>(t.coverage()));
            },
            p);
    };
    const auto sq = expectation(true);
    const auto sn = expectation(false);
    auto show = [](Rational x) { return std::to_string(x.num) + "/" + std::to_string(x.den); };
    return {sq.expectation > sn.expectation,
            "E[C_SQ_1PS_R] = " + show(sq.expectation) + " (" + std::to_string(sq.histories) +
                " histories), E[C_SN] = " + show(sn.expectation) + " (" +
                std::to_string(sn.histories) + " histories)"};
}

// ---------------------------------------------------------------------------
// 5, 6, 9. Desk grid

GridSpec desk_grid()
{
    GridSpec spec;
    RandomStream ba_rng(1), er_rng(2);
    spec.graphs.push_back({"BA1000", std::make_shared<Graph>(generate_ba(1000, 3, ba_rng))});
    spec.graphs.push_back({"ER1000", std::make_shared<Graph>(generate_er(1000, 0.006, er_rng))});
    spec.pp_values = {0.05, 0.1, 0.15, 0.2, 0.25};
    spec.sp_values = {0.01, 0.02, 0.03, 0.04, 0.05};
    spec.rankings.assign(all_ranking_methods.begin(), all_ranking_methods.end());
    spec.strategies = {{StrategyKind::SN, {}, {}}};
    for (std::size_t k : {1, 2, 4, 8}) {
        spec.strategies.push_back({StrategyKind::SQ_kPS, k, {}});
        spec.strategies.push_back({StrategyKind::SQ_kPS_R, k, {}});
    }
    spec.strategies.push_back({StrategyKind::SQ_kPS_B, 1, {}});
    spec.strategies.push_back({StrategyKind::SQ_TSN, {}, {}});
    spec.strategies.push_back({StrategyKind::SQ_TSN_R, {}, {}});
    spec.replications = 100;
    spec.master_seed = acceptance_seed;
    return spec;
}

struct DeskResults {
    std::vector<RunRecord> records;
    ComparisonSummary summary;
    std::size_t failures = 0;
};

const DeskResults& desk_results()
{
    static const DeskResults results = [] {
        DeskResults r;
        GridOutcome outcome;
        r.records = run_grid_collect(desk_grid(), worker_count(), &outcome);
        r.failures = outcome.failures.size();
        r.summary = summarize(r.records);
        return r;
    }();
    return results;
}

Verdict desk_ordering()
{
    const auto& desk = desk_results();
    const auto& s = desk.summary;
    auto get = [&](const char* label) -> const StrategyComparison& {
        const auto* c = s.find(label);
        if (!c) throw std::runtime_error(std::string("no summary row for ") + label);
        return *c;
    };
    double sn_cov = 0.0, sn_dur = 0.0;
    for (const auto& c : s.configs) {
        sn_cov += c.sn_mean_coverage;
        sn_dur += c.sn_mean_duration;
    }
    sn_cov /= static_cast<double>(s.configs.size());
    sn_dur /= static_cast<double>(s.configs.size());

    const auto& r1 = get("SQ_1PS_R");
    const auto& tsn = get("SQ_TSN");
    std::vector<std::string> bad;
    std::ostringstream d;

    const bool a = r1.win_fraction >= 0.85;
    d << "(a) win " << fmt(r1.win_fraction) << (a ? "" : " < 0.85");
    if (!a) bad.push_back("a");

    const bool b = r1.mean_coverage >= tsn.mean_coverage && tsn.mean_coverage >= sn_cov;
    d << "; (b) C " << fmt(r1.mean_coverage, 6) << " >= " << fmt(tsn.mean_coverage, 6) << " >= "
      << fmt(sn_cov, 6);
    if (!b) bad.push_back("b");

    const bool c = r1.mean_duration > tsn.mean_duration && tsn.mean_duration >= sn_dur;
    d << "; (c) T " << fmt(r1.mean_duration) << " > " << fmt(tsn.mean_duration) << " >= " << fmt(sn_dur);
    if (!c) bad.push_back("c");

    bool e_ok = true;
    d << "; (d)";
    for (int k : {1, 2, 4, 8}) {
        const auto& rev = get(("SQ_" + std::to_string(k) + "PS_R").c_str());
        const auto& plain = get(("SQ_" + std::to_string(k) + "PS").c_str());
        const bool ok = rev.mean_coverage >= plain.mean_coverage;
        e_ok = e_ok && ok;
        d << " k=" << k << (ok ? " ok" : " NOT");
    }
    if (!e_ok) bad.push_back("d");

    const bool e = r1.wilcoxon_p < 0.001 && r1.hl_delta > 0.0;
    d << "; (e) p " << fmt(r1.wilcoxon_p, 3) << " HL " << fmt(r1.hl_delta);
    if (!e) bad.push_back("e");
    if (desk.failures) bad.push_back(std::to_string(desk.failures) + " failed configs");

    std::string detail = d.str();
    if (!bad.empty()) {
        detail += "; failing:";
        for (const auto& x : bad) detail += " " + x;
    }
    return {bad.empty(), detail};
}

Verdict gain_trend()
{
    const auto& s = desk_results().summary;
    std::map<double, std::pair<double, std::size_t>> gain;
    for (const auto& p : s.ratios) {
        if (p.strategy != "SQ_1PS_R") continue;
        auto& g = gain[p.config.pp];
        g.first += p.coverage_ratio - 1.0;
        ++g.second;
    }
    auto mean = [&](double pp) { return gain.at(pp).first / static_cast<double>(gain.at(pp).second); };
    const double low = mean(0.05), high = mean(0.25);
    std::ostringstream d;
    d << "mean gain by pp:";
    for (const auto& [pp, g] : gain) d << ' ' << fmt(pp, 2) << "->" << fmt(g.first / static_cast<double>(g.second));
    return {low > high, d.str()};
}

Verdict determinism()
{
    const auto spec = desk_grid();
    auto csv = [&](std::size_t jobs) {
        std::ostringstream out;
        out << records_csv_header << '\n';
        run_grid(spec, [&](std::span<const RunRecord> recs) { for (const auto& r : recs) write_record_row(out, r); },
                 jobs);
        return out.str();
    };
    const std::string first = csv(worker_count());
    const std::string second = csv(std::max<std::size_t>(1, worker_count() / 2 + 1));
    std::ostringstream third;
    write_records_csv(third, desk_results().records);
    const bool same = first == second && first == third.str();
    return {same, std::to_string(first.size()) + " bytes, three runs " + (same ? "identical" : "differ")};
}

// ---------------------------------------------------------------------------
// 7. Statistics oracles

Verdict statistics_oracles()
{
    RandomStream rng(acceptance_seed + 7);
    double worst_w = 0.0, worst_hl = 0.0;
    std::size_t samples = 0;
    for (std::size_t n = 1; n <= 10; ++n) {
        for (int trial = 0; trial < 40; ++trial) {
            std::vector<double> d(n);
            for (auto& x : d) {
                // half the samples draw from a small lattice so ties and zeros occur
                x = trial % 2 ? static_cast<double>(rng.below(7)) - 3.0 : rng.uniform() * 4 - 1.5;
            }
            std::vector<double> mag;
            for (double x : d)
                if (x != 0) mag.push_back(std::abs(x));
            if (mag.empty()) continue;
            ++samples;
            const auto rank = stats::midranks(mag);
            double observed = 0;
            for (std::size_t i = 0, j = 0; i < d.size(); ++i)
                if (d[i] != 0) {
                    if (d[i] > 0) observed += rank[j];
                    ++j;
                }
            double lower = 0, upper = 0;
            const std::size_t m = mag.size();
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
                double w = 0;
                for (std::size_t i = 0; i < m; ++i)
                    if (mask >> i & 1) w += rank[i];
                if (w <= observed + 1e-9) lower += 1;
                if (w >= observed - 1e-9) upper += 1;
            }
            const double brute = std::min(1.0, 2 * std::min(lower, upper) / std::ldexp(1.0, static_cast<int>(m)));
            const double p = stats::wilcoxon_signed_rank(d, stats::WilcoxonMethod::Exact).p_value;
            worst_w = std::max(worst_w, std::abs(p - brute));
        }
    }
    for (std::size_t n = 1; n <= 50; ++n) {
        for (int trial = 0; trial < 4; ++trial) {
            std::vector<double> d(n);
            for (auto& x : d) x = trial % 2 ? static_cast<double>(rng.below(9)) : rng.uniform() * 10 - 5;
            std::vector<double> walsh;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i; j < n; ++j) walsh.push_back((d[i] + d[j]) / 2);
            std::sort(walsh.begin(), walsh.end());
            const std::size_t w = walsh.size();
            const double med = w % 2 ? walsh[w / 2] : (walsh[w / 2 - 1] + walsh[w / 2]) / 2;
            worst_hl = std::max(worst_hl, std::abs(stats::hodges_lehmann(d) - med));
        }
    }
    const bool pass = worst_w <= 1e-12 && worst_hl <= 1e-12;
    return {pass, std::to_string(samples) + " Wilcoxon samples n<=10, max |dp| " + fmt(worst_w, 3) +
                      "; HL n<=50, max |d| " + fmt(worst_hl, 3)};
}

// ---------------------------------------------------------------------------
// 8. Centrality oracles

Verdict ranking_oracles()
{
    RandomStream gen(acceptance_seed + 8);
    double worst_pr = 0.0, worst_ev = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t nodes = 2 + gen.below(14);
        const std::size_t max_edges = nodes * (nodes - 1) / 2;
        // PageRank on arbitrary graphs (isolated nodes included); eigenvector
        // centrality on connected ones, where the dominant eigenvector is unique.
        const Graph any = testing::random_graph(nodes, 1 + gen.below(max_edges), gen);
        const Graph connected = testing::random_connected_graph(nodes, gen.below(nodes), gen);

        const auto pr = pagerank_scores(any).score;
        const auto pr_ref = testing::dense_pagerank(any, 0.85);
        for (std::size_t v = 0; v < nodes; ++v) worst_pr = std::max(worst_pr, std::abs(pr[v] - pr_ref[v]));

        const auto ev = eigenvector_scores(connected).score;
        const auto ev_ref = testing::dense_dominant_eigenvector(connected);
        for (std::size_t v = 0; v < nodes; ++v) worst_ev = std::max(worst_ev, std::abs(ev[v] - ev_ref[v]));
    }
    double cycle_spread = 0.0;
    for (std::size_t n : {3, 4, 7, 12}) {
        const Graph c = testing::cycle_graph(n);
        for (const auto& s : {pagerank_scores(c).score, eigenvector_scores(c).score}) {
            const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
            cycle_spread = std::max(cycle_spread, *hi - *lo);
        }
    }
    const bool pass = worst_pr <= 1e-6 && worst_ev <= 1e-6 && cycle_spread <= 1e-12;
    return {pass, "max |PR - oracle| " + fmt(worst_pr, 3) + ", max |EV - oracle| " + fmt(worst_ev, 3) +
                      ", cycle spread " + fmt(cycle_spread, 3)};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv)
{
    std::optional<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: acceptance [--only N]\n";
            return 2;
        }
    }

    const std::vector<Criterion> criteria{
        {1, "oracle equivalence", oracle_equivalence},
        {2, "degenerate exactness", degenerate_exactness},
        {3, "reduction identities", reduction_identities},
        {4, "three-node path: revival strictly above SN", theorem_instance},
        {5, "desk grid ordering", desk_ordering},
        {6, "gain shrinks with pp", gain_trend},
        {7, "statistics oracles", statistics_oracles},
        {8, "ranking oracles", ranking_oracles},
        {9, "determinism", determinism},
    };
    if (only && (*only < 1 || *only > static_cast<int>(criteria.size()))) {
        std::cerr << "no criterion " << *only << '\n';
        return 2;
    }

    bool all = true;
    for (const auto& c : criteria) {
        if (only && *only != c.id) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << v.detail
                  << " [" << fmt(secs, 3) << " s]" << std::endl;
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
