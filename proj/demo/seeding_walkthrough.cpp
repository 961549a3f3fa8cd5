// Single-stage versus one-seed-per-step seeding on a small BA graph.
//
// Both runs use the same graph, the same degree ranking and six seeds. The
// sequential run injects one seed per step and skips nodes the cascade has
// already reached, so its later seeds land elsewhere.

#include <iostream>

#include "seqseed/generators.hpp"
#include "seqseed/ranking.hpp"
#include "seqseed/strategies.hpp"

using namespace seqseed;

namespace {

void print_trace(const char* title, const DiffusionTrace& t)
{
    std::cout << title << '\n';
    for (const auto& s : t.steps) {
        std::cout << "  step " << s.step << "  seeds [";
        for (std::size_t i = 0; i < s.seeds.size(); ++i) std::cout << (i ? " " : "") << s.seeds[i];
        std::cout << "]  newly active " << s.activated.size() << "  total " << s.cumulative << '\n';
    }
    std::cout << "  coverage " << t.coverage() << ", duration " << t.duration() << "\n\n";
}

}  // namespace

int main()
{
    RandomStream gen(7);
    const Graph g = generate_ba(30, 2, gen);
    RandomStream tie(1);
    const Ranking r = rank(g, RankingMethod::Degree, tie);

    std::cout << "BA graph: " << g.node_count() << " nodes, " << g.edge_count() << " edges\n";
    std::cout << "top of the degree ranking:";
    for (std::size_t i = 0; i < 8; ++i) std::cout << ' ' << r.order[i] << "(d=" << g.degree(r.order[i]) << ')';
    std::cout << "\n\n";

    constexpr std::size_t seeds = 6;
    constexpr double pp = 0.5;
    RandomStream a(2017), b(2017);
    print_trace("SN: all six seeds at step 0", run_sn(g, r, seeds, pp, a));
    print_trace("SQ_1PS: one seed per step", run_sq_kps(g, r, seeds, 1, pp, b));

    // Averages over many runs show the typical trade: more coverage, more steps.
    double c_sn = 0, c_sq = 0, t_sn = 0, t_sq = 0;
    constexpr std::size_t runs = 2000;
    for (std::size_t i = 0; i < runs; ++i) {
        auto x = RandomStream::derive(1, {0, i});
        auto y = RandomStream::derive(1, {1, i});
        const auto sn = run_sn(g, r, seeds, pp, x);
        const auto sq = run_sq_kps(g, r, seeds, 1, pp, y);
        c_sn += static_cast<double>(sn.coverage());
        c_sq += static_cast<double>(sq.coverage());
        t_sn += static_cast<double>(sn.duration());
        t_sq += static_cast<double>(sq.duration());
    }
    std::cout << "over " << runs << " runs: SN coverage " << c_sn / runs << " in " << t_sn / runs
              << " steps, SQ_1PS coverage " << c_sq / runs << " in " << t_sq / runs << " steps\n";
}
