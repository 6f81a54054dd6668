#pragma once

#include "colabm/dtype.hpp"
#include "colabm/error.hpp"
#include "colabm/rng.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

namespace colabm {

/**
 * @brief Adjacency-list graph whose nodes 0..n-1 are agent IDs.
 *
 * Neighbor lists are kept sorted. Undirected graphs store both directions
 * of each edge. Self-loops and parallel edges are rejected. Optional
 * per-edge weights are stored alongside the neighbor lists.
 */
class Graph {
public:
    explicit Graph(std::size_t n, bool directed = false) : directed_(directed), adj_(n), w_(n) {}

    std::size_t node_count() const noexcept { return adj_.size(); }
    bool directed() const noexcept { return directed_; }

    std::size_t edge_count() const noexcept {
        std::size_t s = 0;
        for (const auto& a : adj_) {
            s += a.size();
        }
        return directed_ ? s : s / 2;
    }

    bool has_edge(AgentId a, AgentId b) const {
        check(a);
        check(b);
        return std::binary_search(adj_[a].begin(), adj_[a].end(), b);
    }

    /// Adds an edge; returns false (and changes nothing) if it already exists.
    bool add_edge(AgentId a, AgentId b, std::optional<double> weight = std::nullopt) {
        check(a);
        check(b);
        if (a == b) {
            throw DomainError("self-loops are not allowed");
        }
        if (has_edge(a, b)) {
            return false;
        }
        insert_half(a, b, weight.value_or(1.0));
        if (!directed_) {
            insert_half(b, a, weight.value_or(1.0));
        }
        return true;
    }

    bool remove_edge(AgentId a, AgentId b) {
        if (!has_edge(a, b)) {
            return false;
        }
        erase_half(a, b);
        if (!directed_) {
            erase_half(b, a);
        }
        return true;
    }

    const std::vector<AgentId>& neighbors(AgentId id) const {
        check(id);
        return adj_[id];
    }

    double weight(AgentId a, AgentId b) const {
        check(a);
        auto it = std::lower_bound(adj_[a].begin(), adj_[a].end(), b);
        if (it == adj_[a].end() || *it != b) {
            throw DomainError("no such edge");
        }
        return w_[a][static_cast<std::size_t>(it - adj_[a].begin())];
    }

    std::size_t degree(AgentId id) const { return neighbors(id).size(); }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.directed_ == b.directed_ && a.adj_ == b.adj_ && a.w_ == b.w_;
    }

private:
    void check(AgentId id) const {
        if (id >= adj_.size()) {
            throw DomainError("node " + std::to_string(id) + " out of range");
        }
    }

    void insert_half(AgentId a, AgentId b, double w) {
        auto it = std::lower_bound(adj_[a].begin(), adj_[a].end(), b);
        const auto pos = it - adj_[a].begin();
        adj_[a].insert(it, b);
        w_[a].insert(w_[a].begin() + pos, w);
    }

    void erase_half(AgentId a, AgentId b) {
        auto it = std::lower_bound(adj_[a].begin(), adj_[a].end(), b);
        const auto pos = it - adj_[a].begin();
        adj_[a].erase(it);
        w_[a].erase(w_[a].begin() + pos);
    }

    bool directed_;
    std::vector<std::vector<AgentId>> adj_;
    std::vector<std::vector<double>> w_;
};

// -- generators --

/// G(n, p): pairs (i < j) visited lexicographically, one uniform draw each.
template <RandomSource R>
Graph erdos_renyi(std::size_t n, double p, R& rng) {
    if (n < 1) {
        throw DomainError("erdos_renyi: n must be >= 1");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("erdos_renyi: p must lie in [0, 1]");
    }
    Graph g(n);
    for (AgentId i = 0; i < n; ++i) {
        for (AgentId j = i + 1; j < n; ++j) {
            if (rng.uniform() < p) {
                g.add_edge(i, j);
            }
        }
    }
    return g;
}

/**
 * @brief Small-world ring with rewiring.
 *
 * Ring lattice with k/2 neighbors per side. Edges are visited lane by lane
 * (offset j = 1..k/2), node by node. Each visit draws one uniform; below
 * beta the far endpoint is redrawn with below(n) until it is neither i nor
 * an existing neighbor of i. After n failed draws the edge is kept.
 */
template <RandomSource R>
Graph watts_strogatz(std::size_t n, std::size_t k, double beta, R& rng) {
    if (k % 2 != 0 || k == 0 || k >= n) {
        throw DomainError("watts_strogatz: k must be even with 0 < k < n");
    }
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw DomainError("watts_strogatz: beta must lie in [0, 1]");
    }
    Graph g(n);
    for (std::size_t j = 1; j <= k / 2; ++j) {
        for (AgentId i = 0; i < n; ++i) {
            g.add_edge(i, (i + j) % n);
        }
    }
    for (std::size_t j = 1; j <= k / 2; ++j) {
        for (AgentId i = 0; i < n; ++i) {
            const AgentId far = (i + j) % n;
            if (!(rng.uniform() < beta)) {
                continue;
            }
            for (std::size_t attempt = 0; attempt < n; ++attempt) {
                const AgentId u = rng.below(n);
                if (u != i && !g.has_edge(i, u)) {
                    g.remove_edge(i, far);
                    g.add_edge(i, u);
                    break;
                }
            }
        }
    }
    return g;
}

/**
 * @brief Preferential attachment seeded with a complete graph on m+1 nodes.
 *
 * Each later node draws targets from the list of edge endpoints (so each
 * node appears once per unit of degree), rejecting repeats until it has m
 * distinct targets.
 */
template <RandomSource R>
Graph barabasi_albert(std::size_t n, std::size_t m, R& rng) {
    if (m < 1 || m + 1 > n) {
        throw DomainError("barabasi_albert: requires 1 <= m <= n - 1");
    }
    Graph g(n);
    std::vector<AgentId> endpoints;
    for (AgentId i = 0; i <= m; ++i) {
        for (AgentId j = i + 1; j <= m; ++j) {
            g.add_edge(i, j);
            endpoints.push_back(i);
            endpoints.push_back(j);
        }
    }
    std::vector<AgentId> targets;
    for (AgentId v = m + 1; v < n; ++v) {
        targets.clear();
        while (targets.size() < m) {
            const AgentId t = endpoints[rng.below(endpoints.size())];
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) {
                targets.push_back(t);
            }
        }
        for (AgentId t : targets) {
            g.add_edge(v, t);
            endpoints.push_back(v);
            endpoints.push_back(t);
        }
    }
    return g;
}

// -- metrics (undirected graphs) --

namespace detail {
inline void require_undirected(const Graph& g, const char* what) {
    if (g.directed()) {
        throw DomainError(std::string(what) + " is defined for undirected graphs only");
    }
}
} // namespace detail

/// degree -> number of nodes with that degree
inline std::map<std::size_t, std::size_t> degree_distribution(const Graph& g) {
    std::map<std::size_t, std::size_t> hist;
    for (AgentId i = 0; i < g.node_count(); ++i) {
        ++hist[g.degree(i)];
    }
    return hist;
}

inline double local_clustering(const Graph& g, AgentId v) {
    const auto& nb = g.neighbors(v);
    const std::size_t deg = nb.size();
    if (deg < 2) {
        return 0.0;
    }
    std::size_t links = 0;
    for (std::size_t a = 0; a < deg; ++a) {
        for (std::size_t b = a + 1; b < deg; ++b) {
            if (g.has_edge(nb[a], nb[b])) {
                ++links;
            }
        }
    }
    return static_cast<double>(links) / (static_cast<double>(deg * (deg - 1)) / 2.0);
}

inline double avg_clustering(const Graph& g) {
    detail::require_undirected(g, "avg_clustering");
    if (g.node_count() == 0) {
        return 0.0;
    }
    double s = 0.0;
    for (AgentId v = 0; v < g.node_count(); ++v) {
        s += local_clustering(g, v);
    }
    return s / static_cast<double>(g.node_count());
}

/// Hop distances from `src`; unreachable nodes get SIZE_MAX.
inline std::vector<std::size_t> bfs_distances(const Graph& g, AgentId src) {
    std::vector<std::size_t> dist(g.node_count(), static_cast<std::size_t>(-1));
    std::queue<AgentId> q;
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
        const AgentId u = q.front();
        q.pop();
        for (AgentId w : g.neighbors(u)) {
            if (dist[w] == static_cast<std::size_t>(-1)) {
                dist[w] = dist[u] + 1;
                q.push(w);
            }
        }
    }
    return dist;
}

/// Mean shortest-path length over unordered node pairs. Throws on disconnected graphs.
inline double avg_path_length(const Graph& g) {
    detail::require_undirected(g, "avg_path_length");
    const std::size_t n = g.node_count();
    if (n < 2) {
        return 0.0;
    }
    std::size_t total = 0;
    for (AgentId s = 0; s < n; ++s) {
        const auto dist = bfs_distances(g, s);
        for (AgentId t = s + 1; t < n; ++t) {
            if (dist[t] == static_cast<std::size_t>(-1)) {
                throw DomainError("avg_path_length: graph is disconnected");
            }
            total += dist[t];
        }
    }
    return static_cast<double>(total) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

} // namespace colabm
