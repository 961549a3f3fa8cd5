#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqseed/csv.hpp"
#include "seqseed/errors.hpp"
#include "seqseed/graph.hpp"
#include "seqseed/random.hpp"

namespace seqseed {

enum class RankingMethod { Random, Degree, Degree2, PageRank, Eigenvector };

inline constexpr std::array<RankingMethod, 5> all_ranking_methods{
    RankingMethod::Random, RankingMethod::Degree, RankingMethod::Degree2,
    RankingMethod::PageRank, RankingMethod::Eigenvector};

constexpr std::string_view to_string(RankingMethod m) noexcept
{
    switch (m) {
    case RankingMethod::Random: return "RANDOM";
    case RankingMethod::Degree: return "DEGREE";
    case RankingMethod::Degree2: return "DEGREE2";
    case RankingMethod::PageRank: return "PAGERANK";
    case RankingMethod::Eigenvector: return "EIGENVECTOR";
    }
    return "?";
}

/// Accepts the long tags (DEGREE2) and the short ones (D2), any case.
inline std::optional<RankingMethod> parse_ranking_method(std::string_view text)
{
    std::string s(text);
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (s == "RANDOM" || s == "R") return RankingMethod::Random;
    if (s == "DEGREE" || s == "D") return RankingMethod::Degree;
    if (s == "DEGREE2" || s == "D2") return RankingMethod::Degree2;
    if (s == "PAGERANK" || s == "PR") return RankingMethod::PageRank;
    if (s == "EIGENVECTOR" || s == "EV") return RankingMethod::Eigenvector;
    return std::nullopt;
}

struct Ranking {
    RankingMethod method = RankingMethod::Random;
    std::vector<NodeId> order;  // best first
    std::vector<double> score;  // indexed by node id
};

struct CentralityResult {
    std::vector<double> score;
    std::size_t iterations = 0;
    bool converged = false;
};

struct PageRankOptions {
    double damping = 0.85;
    double tol = 1e-10;
    std::size_t max_iter = 1000;
};

/**
 * PageRank by power iteration on the random-walk matrix of the undirected
 * graph. Mass leaving a node without neighbors is spread uniformly, the same
 * way as teleportation, so the vector keeps unit sum. Stops when the L1 change
 * between iterates drops below tol.
 */
inline CentralityResult pagerank_scores(const Graph& g, PageRankOptions opt = {})
{
    if (!(opt.damping > 0.0 && opt.damping < 1.0))
        throw ParameterError("pagerank: damping must lie in (0, 1)");
    if (!(opt.tol > 0.0)) throw ParameterError("pagerank: tol must be positive");

    const std::size_t n = g.node_count();
    const double inv_n = 1.0 / static_cast<double>(n);
    CentralityResult r;
    r.score.assign(n, inv_n);
    std::vector<double> next(n);

    for (r.iterations = 0; r.iterations < opt.max_iter;) {
        double dangling = 0.0;
        for (NodeId v = 0; v < n; ++v)
            if (g.degree(v) == 0) dangling += r.score[v];
        const double base = ((1.0 - opt.damping) + opt.damping * dangling) * inv_n;

        for (NodeId v = 0; v < n; ++v) {
            double in = 0.0;
            for (NodeId u : g.neighbors(v)) in += r.score[u] / static_cast<double>(g.degree(u));
            next[v] = base + opt.damping * in;
        }
        double change = 0.0;
        for (NodeId v = 0; v < n; ++v) change += std::abs(next[v] - r.score[v]);
        r.score.swap(next);
        ++r.iterations;
        if (change < opt.tol) {
            r.converged = true;
            break;
        }
    }
    return r;
}

struct EigenvectorOptions {
    double tol = 1e-12;
    std::size_t max_iter = 100000;
};

/**
 * Eigenvector centrality by power iteration from the uniform vector,
 * L2-normalized each step.
 *
 * Iterates A + I rather than A. Both share eigenvectors, but on bipartite
 * graphs A has eigenvalues +l and -l of equal modulus and the plain iteration
 * oscillates forever (the path 0-1-2 already does). Nodes outside the
 * dominant component(s) decay towards 0.
 */
inline CentralityResult eigenvector_scores(const Graph& g, EigenvectorOptions opt = {})
{
    if (!(opt.tol > 0.0)) throw ParameterError("eigenvector: tol must be positive");

    const std::size_t n = g.node_count();
    CentralityResult r;
    r.score.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> next(n);

    for (r.iterations = 0; r.iterations < opt.max_iter;) {
        double norm2 = 0.0;
        for (NodeId v = 0; v < n; ++v) {
            double s = r.score[v];
            for (NodeId u : g.neighbors(v)) s += r.score[u];
            next[v] = s;
            norm2 += s * s;
        }
        const double inv = 1.0 / std::sqrt(norm2);
        double dist2 = 0.0;
        for (NodeId v = 0; v < n; ++v) {
            next[v] *= inv;
            const double d = next[v] - r.score[v];
            dist2 += d * d;
        }
        r.score.swap(next);
        ++r.iterations;
        if (std::sqrt(dist2) < opt.tol) {
            r.converged = true;
            break;
        }
    }
    return r;
}

/**
 * Orders nodes best-first by score. Equal scores are ordered by a uniform
 * random permutation drawn from `rng`.
 */
inline std::vector<NodeId> order_by_score(std::span<const double> score, RandomStream& rng)
{
    const std::size_t n = score.size();
    std::vector<NodeId> tiebreak(n);
    std::iota(tiebreak.begin(), tiebreak.end(), NodeId{0});
    rng.shuffle(std::span<NodeId>(tiebreak));
    std::vector<std::size_t> position(n);
    for (std::size_t i = 0; i < n; ++i) position[tiebreak[i]] = i;

    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return position[a] < position[b];
    });
    return order;
}

namespace detail {

// Iterative scores carry round-off, so symmetric nodes can differ in the last
// bits. Snapping to a 1e-12 grid makes them compare equal and lets the random
// tie-break treat them alike.
inline void snap_scores(std::vector<double>& score)
{
    for (auto& s : score) s = std::round(s * 1e12) / 1e12;
}

}  // namespace detail

/// Computes one of the five rankings on the (initial) graph.
inline Ranking rank(const Graph& g, RankingMethod method, RandomStream& rng)
{
    const std::size_t n = g.node_count();
    if (n == 0) throw ParameterError("rank: empty graph");

    Ranking r;
    r.method = method;
    r.score.assign(n, 0.0);
    switch (method) {
    case RankingMethod::Random:
        break;
    case RankingMethod::Degree:
        for (NodeId v = 0; v < n; ++v) r.score[v] = static_cast<double>(g.degree(v));
        break;
    case RankingMethod::Degree2:
        for (NodeId v = 0; v < n; ++v) {
            std::size_t s = g.degree(v);
            for (NodeId u : g.neighbors(v)) s += g.degree(u);
            r.score[v] = static_cast<double>(s);
        }
        break;
    case RankingMethod::PageRank:
        r.score = pagerank_scores(g).score;
        detail::snap_scores(r.score);
        break;
    case RankingMethod::Eigenvector:
        r.score = eigenvector_scores(g).score;
        detail::snap_scores(r.score);
        break;
    }
    r.order = order_by_score(r.score, rng);
    return r;
}

/// The first min(k, #inactive) nodes of `ranking.order` that are not active,
/// in ranking order.
template <class ActiveSet>
std::vector<NodeId> top_inactive(const Ranking& ranking, const ActiveSet& active, std::size_t k)
{
    std::vector<NodeId> out;
    for (NodeId v : ranking.order) {
        if (out.size() >= k) break;
        if (!active[v]) out.push_back(v);
    }
    return out;
}

/// CSV dump: node_label,method,score,rank_position (position is 1-based).
inline void write_ranking_csv(std::ostream& out, const Graph& g, const Ranking& r)
{
    out << "node_label,method,score,rank_position\n";
    for (std::size_t i = 0; i < r.order.size(); ++i) {
        const NodeId v = r.order[i];
        out << g.label(v) << ',' << to_string(r.method) << ',' << format_real(r.score[v]) << ','
            << (i + 1) << '\n';
    }
}

}  // namespace seqseed
