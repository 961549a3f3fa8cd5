#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqseed/diffusion.hpp"
#include "seqseed/errors.hpp"
#include "seqseed/graph.hpp"
#include "seqseed/ranking.hpp"

namespace seqseed {

enum class StrategyKind { SN, SQ_kPS, SQ_kPS_R, SQ_kPS_B, SQ_TSN, SQ_TSN_R };

constexpr std::string_view to_string(StrategyKind k) noexcept
{
    switch (k) {
    case StrategyKind::SN: return "SN";
    case StrategyKind::SQ_kPS: return "SQ_kPS";
    case StrategyKind::SQ_kPS_R: return "SQ_kPS_R";
    case StrategyKind::SQ_kPS_B: return "SQ_kPS_B";
    case StrategyKind::SQ_TSN: return "SQ_TSN";
    case StrategyKind::SQ_TSN_R: return "SQ_TSN_R";
    }
    return "?";
}

constexpr bool uses_k(StrategyKind k) noexcept
{
    return k == StrategyKind::SQ_kPS || k == StrategyKind::SQ_kPS_R || k == StrategyKind::SQ_kPS_B;
}

constexpr bool uses_tsn(StrategyKind k) noexcept
{
    return k == StrategyKind::SQ_TSN || k == StrategyKind::SQ_TSN_R;
}

/**
 * Which strategy to run. `k` is required for the kPS family. `t_sn` may be
 * left empty for the TSN family when a caller (the experiment grid, the CLI)
 * derives it from a block of SN runs first.
 */
struct StrategySpec {
    StrategyKind kind = StrategyKind::SN;
    std::optional<std::size_t> k;
    std::optional<std::size_t> t_sn;

    /// Identifier with k filled in: SN, SQ_1PS, SQ_2PS_R, SQ_1PS_B, SQ_TSN, ...
    std::string label() const
    {
        if (!uses_k(kind)) return std::string(to_string(kind));
        std::string s = "SQ_" + (k ? std::to_string(*k) : std::string("k")) + "PS";
        if (kind == StrategyKind::SQ_kPS_R) s += "_R";
        if (kind == StrategyKind::SQ_kPS_B) s += "_B";
        return s;
    }

    void validate() const
    {
        if (uses_k(kind) && (!k || *k < 1))
            throw ParameterError(std::string(to_string(kind)) + " needs k >= 1");
        if (!uses_k(kind) && k)
            throw ParameterError(std::string(to_string(kind)) + " takes no k");
        if (uses_tsn(kind) && t_sn && *t_sn < 1)
            throw ParameterError(std::string(to_string(kind)) + " needs t_sn >= 1");
        if (!uses_tsn(kind) && t_sn)
            throw ParameterError(std::string(to_string(kind)) + " takes no t_sn");
    }

    friend bool operator==(const StrategySpec&, const StrategySpec&) = default;
};

inline std::optional<StrategyKind> parse_strategy_kind(std::string_view s)
{
    for (auto k : {StrategyKind::SN, StrategyKind::SQ_kPS, StrategyKind::SQ_kPS_R,
                   StrategyKind::SQ_kPS_B, StrategyKind::SQ_TSN, StrategyKind::SQ_TSN_R})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

/// Parses a strategy identifier: either a family name (SQ_kPS_R, with k
/// passed separately) or a label with k filled in (SQ_4PS_R).
inline StrategySpec parse_strategy(std::string_view name, std::optional<std::size_t> k = {},
                                   std::optional<std::size_t> t_sn = {})
{
    StrategySpec spec;
    spec.t_sn = t_sn;
    if (auto kind = parse_strategy_kind(name)) {
        spec.kind = *kind;
        spec.k = k;
    } else {
        // SQ_<digits>PS[_R|_B]
        const std::string_view prefix = "SQ_";
        if (name.substr(0, prefix.size()) != prefix)
            throw ParameterError("unknown strategy '" + std::string(name) + "'");
        std::size_t i = prefix.size(), value = 0, digits = 0;
        while (i < name.size() && name[i] >= '0' && name[i] <= '9') {
            value = value * 10 + static_cast<std::size_t>(name[i] - '0');
            ++i, ++digits;
        }
        const auto rest = name.substr(i);
        if (digits == 0 || (rest != "PS" && rest != "PS_R" && rest != "PS_B"))
            throw ParameterError("unknown strategy '" + std::string(name) + "'");
        if (k && *k != value)
            throw ParameterError("strategy '" + std::string(name) + "' conflicts with k=" +
                                 std::to_string(*k));
        spec.kind = rest == "PS"     ? StrategyKind::SQ_kPS
                    : rest == "PS_R" ? StrategyKind::SQ_kPS_R
                                     : StrategyKind::SQ_kPS_B;
        spec.k = value;
    }
    spec.validate();
    return spec;
}

/// Seed budget n = max(1, round(sp * node_count)).
inline std::size_t seed_count(std::size_t node_count, double sp)
{
    if (!(sp > 0.0 && sp <= 1.0)) throw ParameterError("seed percentage must lie in (0, 1]");
    const auto n = static_cast<std::size_t>(std::llround(sp * static_cast<double>(node_count)));
    return std::max<std::size_t>(1, n);
}

/// Stage sizes for the TSN family: t_sn stages of floor(n / t_sn) seeds, the
/// remainder handed out one each to the earliest stages. When n < t_sn the
/// schedule falls back to n stages of one seed.
inline std::vector<std::size_t> tsn_stage_sizes(std::size_t n, std::size_t t_sn)
{
    if (t_sn < 1) throw ParameterError("t_sn must be at least 1");
    if (n < t_sn) return std::vector<std::size_t>(n, 1);
    std::vector<std::size_t> sizes(t_sn, n / t_sn);
    for (std::size_t i = 0; i < n % t_sn; ++i) ++sizes[i];
    return sizes;
}

/// Stage sizes for the kPS family: ceil(n / k) stages of k, the last one short.
inline std::vector<std::size_t> kps_stage_sizes(std::size_t n, std::size_t k)
{
    std::vector<std::size_t> sizes;
    for (std::size_t left = n; left > 0; left -= std::min(k, left)) sizes.push_back(std::min(k, left));
    return sizes;
}

namespace detail {

inline void check_budget(const Graph& g, std::size_t n)
{
    if (n < 1) throw ParameterError("seed budget must be at least 1");
    if (n > g.node_count())
        throw ParameterError("seed budget " + std::to_string(n) + " exceeds node count " +
                             std::to_string(g.node_count()));
}

inline void check_k(std::size_t n, std::size_t k)
{
    if (k < 1 || k > n)
        throw ParameterError("k must satisfy 1 <= k <= n (k=" + std::to_string(k) +
                             ", n=" + std::to_string(n) + ")");
}

/**
 * Shared driver for every schedule that injects fixed-size batches of top
 * inactive nodes. Without revival the next batch comes one step later; with
 * revival it comes at the first step in which the cascade activated nothing.
 * Whatever budget is left when no inactive node remains is forfeited.
 */
template <AttemptSource Source>
DiffusionTrace run_stages(const Graph& g, const Ranking& ranking, std::span<const std::size_t> stages,
                          double pp, bool revival, Source& source)
{
    DiffusionState state(g.node_count());
    std::size_t forfeited = 0;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const auto batch = top_inactive(ranking, state.active_mask(), stages[i]);
        activate_seeds(state, batch);
        if (batch.size() < stages[i]) {
            for (std::size_t j = i; j < stages.size(); ++j) forfeited += stages[j];
            forfeited -= batch.size();
            break;
        }
        if (i + 1 == stages.size()) break;
        if (revival)
            run_until_stop(state, g, pp, source);
        else
            ic_step(state, g, pp, source);
    }
    run_until_stop(state, g, pp, source);
    return std::move(state).finish(forfeited);
}

}  // namespace detail

/// Single stage: the top n nodes at step 0, then the cascade runs out.
template <AttemptSource Source>
DiffusionTrace run_sn(const Graph& g, const Ranking& ranking, std::size_t n, double pp, Source& source)
{
    detail::check_budget(g, n);
    const std::size_t stages[] = {n};
    return detail::run_stages(g, ranking, stages, pp, false, source);
}

/// k top inactive nodes at each of steps 0, 1, 2, ... until the budget is spent.
template <AttemptSource Source>
DiffusionTrace run_sq_kps(const Graph& g, const Ranking& ranking, std::size_t n, std::size_t k,
                          double pp, Source& source)
{
    detail::check_budget(g, n);
    detail::check_k(n, k);
    const auto stages = kps_stage_sizes(n, k);
    return detail::run_stages(g, ranking, stages, pp, false, source);
}

/// As SQ_kPS, but each batch waits until the cascade has stopped.
template <AttemptSource Source>
DiffusionTrace run_sq_kps_r(const Graph& g, const Ranking& ranking, std::size_t n, std::size_t k,
                            double pp, Source& source)
{
    detail::check_budget(g, n);
    detail::check_k(n, k);
    const auto stages = kps_stage_sizes(n, k);
    return detail::run_stages(g, ranking, stages, pp, true, source);
}

/**
 * SQ_kPS with buffering.
 *
 * Walks the initial top-n list k entries per step. An entry still inactive is
 * injected; an entry the cascade already reached adds one unit to the buffer
 * instead. Once the list is exhausted and the cascade has stopped, the whole
 * buffer is spent on the top inactive nodes, and the cascade runs out again.
 */
template <AttemptSource Source>
DiffusionTrace run_sq_kps_b(const Graph& g, const Ranking& ranking, std::size_t n, std::size_t k,
                            double pp, Source& source)
{
    detail::check_budget(g, n);
    detail::check_k(n, k);

    DiffusionState state(g.node_count());
    std::size_t buffered = 0;
    std::vector<NodeId> batch;
    for (std::size_t pos = 0; pos < n;) {
        batch.clear();
        const std::size_t end = std::min(n, pos + k);
        for (; pos < end; ++pos) {
            const NodeId v = ranking.order[pos];
            if (state.is_active(v))
                ++buffered;
            else
                batch.push_back(v);
        }
        activate_seeds(state, batch);
        if (pos < n) ic_step(state, g, pp, source);
    }
    run_until_stop(state, g, pp, source);

    std::size_t forfeited = 0;
    while (buffered > 0) {
        const auto extra = top_inactive(ranking, state.active_mask(), buffered);
        if (extra.empty()) {
            forfeited = buffered;
            break;
        }
        activate_seeds(state, extra);
        buffered -= extra.size();
        run_until_stop(state, g, pp, source);
    }
    return std::move(state).finish(forfeited);
}

/// t_sn stages, one per step, sizes from tsn_stage_sizes. Falls back to
/// SQ_1PS when n < t_sn.
template <AttemptSource Source>
DiffusionTrace run_sq_tsn(const Graph& g, const Ranking& ranking, std::size_t n, std::size_t t_sn,
                          double pp, Source& source)
{
    detail::check_budget(g, n);
    const auto stages = tsn_stage_sizes(n, t_sn);
    return detail::run_stages(g, ranking, stages, pp, false, source);
}

/// TSN allocation, each stage fired once the previous cascade has stopped.
template <AttemptSource Source>
DiffusionTrace run_sq_tsn_r(const Graph& g, const Ranking& ranking, std::size_t n, std::size_t t_sn,
                            double pp, Source& source)
{
    detail::check_budget(g, n);
    const auto stages = tsn_stage_sizes(n, t_sn);
    return detail::run_stages(g, ranking, stages, pp, true, source);
}

/// Dispatch on a spec. TSN strategies need spec.t_sn set.
template <AttemptSource Source>
DiffusionTrace run_strategy(const StrategySpec& spec, const Graph& g, const Ranking& ranking,
                            std::size_t n, double pp, Source& source)
{
    spec.validate();
    if (uses_tsn(spec.kind) && !spec.t_sn)
        throw ParameterError(spec.label() + " needs a reference duration t_sn");
    switch (spec.kind) {
    case StrategyKind::SN: return run_sn(g, ranking, n, pp, source);
    case StrategyKind::SQ_kPS: return run_sq_kps(g, ranking, n, *spec.k, pp, source);
    case StrategyKind::SQ_kPS_R: return run_sq_kps_r(g, ranking, n, *spec.k, pp, source);
    case StrategyKind::SQ_kPS_B: return run_sq_kps_b(g, ranking, n, *spec.k, pp, source);
    case StrategyKind::SQ_TSN: return run_sq_tsn(g, ranking, n, *spec.t_sn, pp, source);
    case StrategyKind::SQ_TSN_R: return run_sq_tsn_r(g, ranking, n, *spec.t_sn, pp, source);
    }
    throw ParameterError("unknown strategy kind");
}

}  // namespace seqseed
