#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "seqseed/errors.hpp"
#include "seqseed/graph.hpp"
#include "seqseed/random.hpp"

namespace seqseed {

/// What happened at one step: seeds injected at its start, nodes the cascade
/// activated during it, and the coverage after both.
struct StepRecord {
    std::size_t step = 0;
    std::vector<NodeId> seeds;
    std::vector<NodeId> activated;
    std::size_t cumulative = 0;

    bool empty() const noexcept { return seeds.empty() && activated.empty(); }
};

/**
 * Per-step history of one run.
 *
 * `steps[i].step == i`. Coverage is the final cumulative count; duration is the
 * index of the last step at which any node became active, seeds included.
 */
struct DiffusionTrace {
    std::vector<StepRecord> steps;
    std::size_t seeds_spent = 0;
    std::size_t seeds_forfeited = 0;  // budget left when no inactive node remained

    std::size_t coverage() const noexcept { return steps.empty() ? 0 : steps.back().cumulative; }

    std::size_t duration() const noexcept
    {
        for (std::size_t i = steps.size(); i-- > 0;)
            if (!steps[i].empty()) return i;
        return 0;
    }

    /// Cumulative coverage at the end of `step` (coverage itself past the end).
    std::size_t coverage_at(std::size_t step) const noexcept
    {
        if (steps.empty()) return 0;
        return step < steps.size() ? steps[step].cumulative : steps.back().cumulative;
    }

    /// First step whose cumulative coverage is >= target.
    std::optional<std::size_t> first_step_reaching(double target) const noexcept
    {
        for (const auto& s : steps)
            if (static_cast<double>(s.cumulative) >= target) return s.step;
        return std::nullopt;
    }

    std::vector<NodeId> all_seeds() const
    {
        std::vector<NodeId> out;
        for (const auto& s : steps) out.insert(out.end(), s.seeds.begin(), s.seeds.end());
        return out;
    }
};

/// Trace dump, one row per step: step,seeds_injected,activated,cumulative_coverage
inline void write_trace_csv(std::ostream& out, const DiffusionTrace& trace)
{
    out << "step,seeds_injected,activated,cumulative_coverage\n";
    for (const auto& s : trace.steps)
        out << s.step << ',' << s.seeds.size() << ',' << s.activated.size() << ',' << s.cumulative
            << '\n';
}

/**
 * Mutable state of a single cascade run.
 *
 * The frontier holds the nodes that will make their single round of attempts
 * in the next step: nodes activated in the latest step plus seeds injected at
 * it. Active nodes never deactivate.
 */
class DiffusionState {
public:
    explicit DiffusionState(std::size_t node_count) : active_(node_count, 0)
    {
        trace_.steps.push_back(StepRecord{});
    }

    std::size_t node_count() const noexcept { return active_.size(); }
    std::size_t coverage() const noexcept { return coverage_; }
    std::size_t step() const noexcept { return trace_.steps.size() - 1; }
    bool is_active(NodeId v) const noexcept { return active_[v] != 0; }
    bool saturated() const noexcept { return coverage_ == active_.size(); }

    /// Indexable by node id; suitable for top_inactive.
    const std::vector<std::uint8_t>& active_mask() const noexcept { return active_; }
    std::span<const NodeId> frontier() const noexcept { return frontier_; }
    const DiffusionTrace& trace() const noexcept { return trace_; }

    /// Ends the run: drops trailing steps where nothing happened and hands
    /// over the trace.
    DiffusionTrace finish(std::size_t forfeited = 0) &&
    {
        while (trace_.steps.size() > 1 && trace_.steps.back().empty()) trace_.steps.pop_back();
        trace_.seeds_forfeited = forfeited;
        return std::move(trace_);
    }

private:
    friend void activate_seeds(DiffusionState&, std::span<const NodeId>);
    template <AttemptSource Source>
    friend std::vector<NodeId> ic_step(DiffusionState&, const Graph&, double, Source&);

    std::vector<std::uint8_t> active_;
    std::vector<NodeId> frontier_;
    std::size_t coverage_ = 0;
    DiffusionTrace trace_;
};

/// Injects seeds at the current step. They join the frontier, so they make
/// their attempts in the next ic_step.
inline void activate_seeds(DiffusionState& state, std::span<const NodeId> seeds)
{
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const NodeId v = seeds[i];
        if (v >= state.node_count())
            throw ContractViolation("seed " + std::to_string(v) + " is not a node");
        if (state.active_[v])
            throw ContractViolation("seed " + std::to_string(v) + " is already active");
        state.active_[v] = 1;
    }
    if (seeds.empty()) return;

    state.coverage_ += seeds.size();
    state.trace_.seeds_spent += seeds.size();
    auto& rec = state.trace_.steps.back();
    rec.seeds.insert(rec.seeds.end(), seeds.begin(), seeds.end());
    rec.cumulative = state.coverage_;
    state.frontier_.insert(state.frontier_.end(), seeds.begin(), seeds.end());
    std::sort(state.frontier_.begin(), state.frontier_.end());
}

/**
 * One cascade step. Every frontier node tries each of its inactive neighbors
 * once with probability pp, in (frontier id, neighbor id) ascending order. A
 * node already taken earlier in the same step is not tried again; that only
 * skips draws whose outcome cannot matter. The newly activated nodes become
 * the next frontier. Returns them in ascending order.
 */
template <AttemptSource Source>
std::vector<NodeId> ic_step(DiffusionState& state, const Graph& g, double pp, Source& source)
{
    if (!(pp >= 0.0 && pp <= 1.0)) throw ParameterError("propagation probability must lie in [0, 1]");

    std::vector<NodeId> fresh;
    for (NodeId u : state.frontier_) {
        for (NodeId v : g.neighbors(u)) {
            if (state.active_[v]) continue;
            if (source.attempt(u, v, pp)) {
                state.active_[v] = 1;
                fresh.push_back(v);
            }
        }
    }
    std::sort(fresh.begin(), fresh.end());
    state.coverage_ += fresh.size();
    state.trace_.steps.push_back(
        StepRecord{state.trace_.steps.size(), {}, fresh, state.coverage_});
    state.frontier_ = fresh;
    return fresh;
}

/// Steps until a step activates nothing. At most node_count + 1 steps.
template <AttemptSource Source>
void run_until_stop(DiffusionState& state, const Graph& g, double pp, Source& source)
{
    while (!ic_step(state, g, pp, source).empty()) {
    }
}

inline constexpr std::size_t max_exact_edges = 20;

/**
 * Exact expected final coverage of a cascade from a fixed seed set.
 *
 * A cascade run has the same final active set as reachability from the seeds
 * over the edges whose coin came up live, with each edge live independently
 * with probability pp. Summing over all 2^E live-edge subsets gives the
 * expectation exactly (up to floating-point summation).
 */
inline double expected_coverage_exact(const Graph& g, std::span<const NodeId> seeds, double pp)
{
    if (g.edge_count() > max_exact_edges)
        throw ParameterError("exact coverage refuses graphs with more than " +
                             std::to_string(max_exact_edges) + " edges");
    if (!(pp >= 0.0 && pp <= 1.0)) throw ParameterError("propagation probability must lie in [0, 1]");

    const auto edges = g.edges();
    const std::size_t e = edges.size();
    const std::size_t n = g.node_count();
    double expected = 0.0;

    std::vector<std::uint8_t> reached(n);
    std::vector<NodeId> stack;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << e); ++mask) {
        double weight = 1.0;
        for (std::size_t i = 0; i < e; ++i) weight *= (mask >> i & 1) ? pp : 1.0 - pp;
        if (weight == 0.0) continue;

        std::fill(reached.begin(), reached.end(), 0);
        std::size_t count = 0;
        for (NodeId s : seeds) {
            if (!reached[s]) {
                reached[s] = 1;
                ++count;
                stack.push_back(s);
            }
        }
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (std::size_t i = 0; i < e; ++i) {
                if (!(mask >> i & 1)) continue;
                auto [a, b] = edges[i];
                const NodeId other = a == u ? b : (b == u ? a : u);
                if (other != u && !reached[other]) {
                    reached[other] = 1;
                    ++count;
                    stack.push_back(other);
                }
            }
        }
        expected += weight * static_cast<double>(count);
    }
    return expected;
}

}  // namespace seqseed
