#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "seqseed/errors.hpp"
#include "seqseed/random.hpp"

namespace seqseed {

using Edge = std::pair<NodeId, NodeId>;

/**
 * Undirected simple graph over dense ids 0..node_count-1, stored as CSR.
 *
 * Neighbor lists are sorted ascending; the cascade relies on that for its
 * reproducible attempt order. Immutable after construction.
 */
class Graph {
public:
    struct BuildStats {
        std::size_t self_loops = 0;
        std::size_t duplicate_edges = 0;
    };

    Graph() = default;

    /// Builds from an arbitrary edge list. Direction is discarded, self-loops
    /// and repeated edges are dropped and counted in `stats` if given.
    static Graph from_edges(std::size_t node_count, std::span<const Edge> edges,
                            BuildStats* stats = nullptr)
    {
        if (node_count == 0) throw ParameterError("graph needs at least one node");

        std::vector<Edge> canon;
        canon.reserve(edges.size());
        BuildStats local;
        for (auto [u, v] : edges) {
            if (u >= node_count || v >= node_count)
                throw ParameterError("edge endpoint " + std::to_string(std::max(u, v)) +
                                     " out of range for " + std::to_string(node_count) + " nodes");
            if (u == v) {
                ++local.self_loops;
                continue;
            }
            canon.emplace_back(std::min(u, v), std::max(u, v));
        }
        std::sort(canon.begin(), canon.end());
        const auto last = std::unique(canon.begin(), canon.end());
        local.duplicate_edges = static_cast<std::size_t>(canon.end() - last);
        canon.erase(last, canon.end());
        if (stats) *stats = local;

        Graph g;
        g.offsets_.assign(node_count + 1, 0);
        for (auto [u, v] : canon) {
            ++g.offsets_[u + 1];
            ++g.offsets_[v + 1];
        }
        std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
        g.targets_.resize(2 * canon.size());
        std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
        for (auto [u, v] : canon) {
            g.targets_[cursor[u]++] = v;
            g.targets_[cursor[v]++] = u;
        }
        for (std::size_t v = 0; v < node_count; ++v)
            std::sort(g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]),
                      g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]));
        g.edge_count_ = canon.size();
        return g;
    }

    std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return edge_count_; }

    std::span<const NodeId> neighbors(NodeId v) const noexcept
    {
        return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }

    std::size_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

    bool has_edge(NodeId u, NodeId v) const noexcept
    {
        const auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    /// Each undirected edge once, as (smaller id, larger id), sorted.
    std::vector<Edge> edges() const
    {
        std::vector<Edge> out;
        out.reserve(edge_count_);
        for (NodeId u = 0; u < node_count(); ++u)
            for (NodeId v : neighbors(u))
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    /// Original labels, if the graph came from a file; otherwise ids in decimal.
    std::string label(NodeId v) const { return labels_.empty() ? std::to_string(v) : labels_[v]; }
    bool has_labels() const noexcept { return !labels_.empty(); }

    void set_labels(std::vector<std::string> labels)
    {
        if (!labels.empty() && labels.size() != node_count())
            throw ParameterError("label count does not match node count");
        labels_ = std::move(labels);
    }

    /// Full scan of the representation invariants. Used by tests.
    bool is_consistent() const
    {
        std::size_t half = 0;
        for (NodeId u = 0; u < node_count(); ++u) {
            const auto nb = neighbors(u);
            if (!std::is_sorted(nb.begin(), nb.end())) return false;
            if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) return false;
            for (NodeId v : nb) {
                if (v == u || v >= node_count() || !has_edge(v, u)) return false;
            }
            half += nb.size();
        }
        return half == 2 * edge_count_;
    }

private:
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> targets_;
    std::size_t edge_count_ = 0;
    std::vector<std::string> labels_;
};

struct EdgeListLoad {
    Graph graph;
    Graph::BuildStats dropped;
};

/**
 * Reads a whitespace-separated edge list. '#' starts a comment line.
 *
 * Labels are mapped to ids in order of first appearance. A line with a single
 * label declares a node without edges; that is how isolated nodes survive a
 * write/read cycle.
 */
inline EdgeListLoad load_edge_list(std::istream& in)
{
    std::unordered_map<std::string, NodeId> ids;
    std::vector<std::string> labels;
    std::vector<Edge> edges;

    auto intern = [&](const std::string& label) {
        auto [it, inserted] = ids.try_emplace(label, static_cast<NodeId>(labels.size()));
        if (inserted) labels.push_back(label);
        return it->second;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream fields(line);
        std::string a, b, extra;
        fields >> a;
        if (!(fields >> b)) {
            intern(a);
            continue;
        }
        if (fields >> extra)
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected two node labels, found more fields");
        const NodeId u = intern(a);
        const NodeId v = intern(b);
        edges.emplace_back(u, v);
    }
    if (labels.empty()) throw ParseError("edge list is empty");

    EdgeListLoad out;
    out.graph = Graph::from_edges(labels.size(), edges, &out.dropped);
    out.graph.set_labels(std::move(labels));
    return out;
}

inline EdgeListLoad load_edge_list(const std::string& text)
{
    std::istringstream in(text);
    return load_edge_list(in);
}

/// Writes `u v` per edge using the graph's labels, then isolated nodes as
/// single-label lines.
inline void write_edge_list(std::ostream& out, const Graph& g)
{
    for (auto [u, v] : g.edges()) out << g.label(u) << ' ' << g.label(v) << '\n';
    for (NodeId v = 0; v < g.node_count(); ++v)
        if (g.degree(v) == 0) out << g.label(v) << '\n';
}

/// Connected components. `component[v]` is a dense component index, assigned
/// in order of the smallest node id in each component.
struct Components {
    std::vector<std::size_t> component;
    std::size_t count = 0;

    std::vector<std::vector<NodeId>> groups() const
    {
        std::vector<std::vector<NodeId>> out(count);
        for (NodeId v = 0; v < component.size(); ++v) out[component[v]].push_back(v);
        return out;
    }
};

inline Components components(const Graph& g)
{
    constexpr auto unset = static_cast<std::size_t>(-1);
    Components c;
    c.component.assign(g.node_count(), unset);
    std::vector<NodeId> stack;
    for (NodeId root = 0; root < g.node_count(); ++root) {
        if (c.component[root] != unset) continue;
        c.component[root] = c.count;
        stack.push_back(root);
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (NodeId v : g.neighbors(u)) {
                if (c.component[v] == unset) {
                    c.component[v] = c.count;
                    stack.push_back(v);
                }
            }
        }
        ++c.count;
    }
    return c;
}

/// Hop distances from `source`; unreachable nodes get -1.
inline std::vector<long> bfs_distances(const Graph& g, NodeId source)
{
    std::vector<long> dist(g.node_count(), -1);
    std::vector<NodeId> queue{source};
    dist[source] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeId u = queue[head];
        for (NodeId v : g.neighbors(u)) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

}  // namespace seqseed
