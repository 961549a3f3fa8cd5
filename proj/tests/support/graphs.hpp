#pragma once

#include <vector>

#include "seqseed/graph.hpp"
#include "seqseed/random.hpp"

namespace seqseed::testing {

inline Graph path_graph(std::size_t n)
{
    std::vector<Edge> e;
    for (NodeId v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
    return Graph::from_edges(n, e);
}

inline Graph cycle_graph(std::size_t n)
{
    std::vector<Edge> e;
    for (NodeId v = 0; v < n; ++v) e.emplace_back(v, static_cast<NodeId>((v + 1) % n));
    return Graph::from_edges(n, e);
}

/// Center 0, leaves 1..leaves.
inline Graph star_graph(std::size_t leaves)
{
    std::vector<Edge> e;
    for (NodeId v = 1; v <= leaves; ++v) e.emplace_back(0, v);
    return Graph::from_edges(leaves + 1, e);
}

inline Graph complete_graph(std::size_t n)
{
    std::vector<Edge> e;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return Graph::from_edges(n, e);
}

/// Random simple graph on `nodes` nodes with exactly `edges` distinct edges.
inline Graph random_graph(std::size_t nodes, std::size_t edges, RandomStream& rng)
{
    std::vector<Edge> all;
    for (NodeId u = 0; u < nodes; ++u)
        for (NodeId v = u + 1; v < nodes; ++v) all.emplace_back(u, v);
    rng.shuffle(std::span<Edge>(all));
    all.resize(std::min(edges, all.size()));
    return Graph::from_edges(nodes, all);
}

/// Random connected graph: a random spanning tree plus `extra` further edges.
inline Graph random_connected_graph(std::size_t nodes, std::size_t extra, RandomStream& rng)
{
    std::vector<Edge> e;
    for (NodeId v = 1; v < nodes; ++v) e.emplace_back(static_cast<NodeId>(rng.below(v)), v);
    for (std::size_t i = 0; i < extra; ++i) {
        const auto u = static_cast<NodeId>(rng.below(nodes));
        const auto v = static_cast<NodeId>(rng.below(nodes));
        e.emplace_back(u, v);
    }
    return Graph::from_edges(nodes, e);
}

}  // namespace seqseed::testing
