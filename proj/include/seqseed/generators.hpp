#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "seqseed/errors.hpp"
#include "seqseed/graph.hpp"
#include "seqseed/random.hpp"

namespace seqseed {

/**
 * Barabási–Albert preferential attachment.
 *
 * Starts from a clique on m0 = max(m, 3) nodes (capped at n), then each new
 * node attaches to m distinct existing nodes chosen with probability
 * proportional to degree. Edge count is m0(m0-1)/2 + m(n-m0).
 */
inline Graph generate_ba(std::size_t n, std::size_t m, RandomStream& rng)
{
    if (m < 1) throw ParameterError("BA: m must be at least 1");
    if (n <= m)
        throw ParameterError("BA: need n > m, got n=" + std::to_string(n) +
                             " m=" + std::to_string(m));

    const std::size_t m0 = std::min(n, std::max<std::size_t>(m, 3));
    std::vector<Edge> edges;
    edges.reserve(m0 * (m0 - 1) / 2 + m * (n - m0));
    // Every edge endpoint appears once here, so a uniform pick from this list
    // is a degree-proportional pick.
    std::vector<NodeId> endpoints;
    endpoints.reserve(2 * edges.capacity());

    for (NodeId u = 0; u < m0; ++u) {
        for (NodeId v = u + 1; v < m0; ++v) {
            edges.emplace_back(u, v);
            endpoints.push_back(u);
            endpoints.push_back(v);
        }
    }

    std::vector<NodeId> targets;
    for (auto v = static_cast<NodeId>(m0); v < n; ++v) {
        targets.clear();
        while (targets.size() < m) {
            const NodeId t = endpoints[rng.below(endpoints.size())];
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
        }
        for (NodeId t : targets) {
            edges.emplace_back(t, v);
            endpoints.push_back(t);
            endpoints.push_back(v);
        }
    }
    return Graph::from_edges(n, edges);
}

/// G(n, p): every unordered pair independently with probability p.
inline Graph generate_er(std::size_t n, double p, RandomStream& rng)
{
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("ER: p must lie in [0, 1]");
    if (n == 0) throw ParameterError("ER: n must be at least 1");

    std::vector<Edge> edges;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v)
            if (rng.bernoulli(p)) edges.emplace_back(u, v);
    return Graph::from_edges(n, edges);
}

}  // namespace seqseed
