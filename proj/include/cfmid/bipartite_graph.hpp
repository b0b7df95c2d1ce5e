#pragma once

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <random>
#include <unordered_set>
#include <vector>

#include "cfmid/deployment.hpp"
#include "cfmid/params.hpp"

namespace cfmid {

/// Bipartite AP/UE graph with alive flags. `*_degree` counts alive
/// neighbors only; adjacency lists are immutable after construction and
/// sorted, removals are expressed through the alive flags and degree
/// counters. Bipartite by construction.
struct BipartiteGraph {
    int n_ap = 0;
    int n_ue = 0;
    std::vector<std::vector<int>> ap_adj;  // per AP, sorted UE indices
    std::vector<std::vector<int>> ue_adj;  // per UE, sorted AP indices
    std::vector<char> ap_alive, ue_alive;
    std::vector<int> ap_degree, ue_degree;
    bool preprocessed = false;

    std::int64_t alive_ap_count() const { return std::count(ap_alive.begin(), ap_alive.end(), 1); }
    std::int64_t alive_ue_count() const { return std::count(ue_alive.begin(), ue_alive.end(), 1); }

    std::int64_t alive_edge_count() const {
        std::int64_t edges = 0;
        for (int k = 0; k < n_ue; ++k)
            if (ue_alive[k]) edges += ue_degree[k];
        return edges;
    }

    static BipartiteGraph from_edges(int n_ap, int n_ue,
                                     const std::vector<std::pair<int, int>>& ap_ue_pairs) {
        BipartiteGraph g;
        g.n_ap = n_ap;
        g.n_ue = n_ue;
        g.ap_adj.resize(n_ap);
        g.ue_adj.resize(n_ue);
        for (auto [ap, ue] : ap_ue_pairs) {
            g.ap_adj[ap].push_back(ue);
            g.ue_adj[ue].push_back(ap);
        }
        for (auto& a : g.ap_adj) std::sort(a.begin(), a.end());
        for (auto& a : g.ue_adj) std::sort(a.begin(), a.end());
        g.reset_alive();
        return g;
    }

    void reset_alive() {
        ap_alive.assign(n_ap, 1);
        ue_alive.assign(n_ue, 1);
        ap_degree.resize(n_ap);
        ue_degree.resize(n_ue);
        for (int l = 0; l < n_ap; ++l) ap_degree[l] = static_cast<int>(ap_adj[l].size());
        for (int k = 0; k < n_ue; ++k) ue_degree[k] = static_cast<int>(ue_adj[k].size());
        preprocessed = false;
    }
};

/// (l,k) in AP l's list iff l in UE k's list, and degree counters match the
/// alive-restricted adjacency. O(V+E); used by tests and debug checks.
inline bool check_adjacency_symmetric(const BipartiteGraph& g) {
    for (int l = 0; l < g.n_ap; ++l)
        for (int k : g.ap_adj[l])
            if (!std::binary_search(g.ue_adj[k].begin(), g.ue_adj[k].end(), l)) return false;
    for (int k = 0; k < g.n_ue; ++k)
        for (int l : g.ue_adj[k])
            if (!std::binary_search(g.ap_adj[l].begin(), g.ap_adj[l].end(), k)) return false;
    for (int l = 0; l < g.n_ap; ++l) {
        if (!g.ap_alive[l]) continue;
        int deg = 0;
        for (int k : g.ap_adj[l]) deg += g.ue_alive[k] ? 1 : 0;
        if (deg != g.ap_degree[l]) return false;
    }
    for (int k = 0; k < g.n_ue; ++k) {
        if (!g.ue_alive[k]) continue;
        int deg = 0;
        for (int l : g.ue_adj[k]) deg += g.ap_alive[l] ? 1 : 0;
        if (deg != g.ue_degree[k]) return false;
    }
    return true;
}

/// Geometric model: graph over the APs and the group-p UEs of a sampled
/// deployment, edge iff distance <= gamma. UE indices are compacted in
/// deployment order.
inline BipartiteGraph from_geometric(const Deployment& dep, double gamma, int group_index) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
    std::vector<int> ue_ids;
    for (int ue = 0; ue < dep.n_ue(); ++ue)
        if (dep.ue_group[ue] == group_index) ue_ids.push_back(ue);

    detail::ApGrid grid(dep, gamma);
    std::vector<std::pair<int, int>> edges;
    for (std::size_t j = 0; j < ue_ids.size(); ++j)
        grid.for_each_ap_near(ue_ids[j], [&](int ap) { edges.emplace_back(ap, static_cast<int>(j)); });
    std::sort(edges.begin(), edges.end());
    return BipartiteGraph::from_edges(dep.n_ap(), static_cast<int>(ue_ids.size()), edges);
}

struct EdgeProbability {
    double p = 0.0;
    bool clamped = false;  // pi*gamma^2 exceeded D^2
};

inline EdgeProbability edge_probability(const NetworkParams& params) {
    const double raw = std::numbers::pi * params.gamma * params.gamma / (params.d * params.d);
    return {std::min(1.0, raw), raw > 1.0};
}

/// Surrogate model: node counts drawn as in the geometric model, every
/// AP-UE pair connected independently with probability pi*gamma^2/D^2 so the
/// two degree distributions match the geometric means. Counts for all groups
/// are drawn in deployment order, so a geometric trial on the same seed has
/// identical node counts.
inline BipartiteGraph from_independent(const NetworkParams& params, int group_index,
                                       std::uint64_t seed, const SampleLimits& limits = {}) {
    validate(params, limits);
    check_budget(params, limits);
    if (group_index < 0 || group_index >= static_cast<int>(params.lambda_t_groups.size()))
        throw std::out_of_range("group index out of range");

    std::mt19937_64 rng(seed);
    const double area = params.d * params.d;
    std::int64_t n_ap = 0;
    if (params.lambda_r > 0.0)
        n_ap = std::poisson_distribution<std::int64_t>(params.lambda_r * area)(rng);
    std::int64_t n_ue = 0;
    for (std::size_t g = 0; g < params.lambda_t_groups.size(); ++g) {
        std::int64_t n = 0;
        if (params.lambda_t_groups[g] > 0.0)
            n = std::poisson_distribution<std::int64_t>(params.lambda_t_groups[g] * area)(rng);
        if (static_cast<int>(g) == group_index) n_ue = n;
    }

    const auto [p_edge, clamped] = edge_probability(params);
    std::vector<std::pair<int, int>> edges;
    if (n_ap > 0 && n_ue > 0) {
        if (clamped || p_edge >= 1.0) {
            for (int ue = 0; ue < n_ue; ++ue)
                for (int ap = 0; ap < n_ap; ++ap) edges.emplace_back(ap, ue);
        } else {
            // Per UE the neighbor count is Binomial(n_ap, p) and the neighbor
            // set is uniform among subsets of that size; sampled with Floyd's
            // algorithm. Equivalent to per-pair Bernoulli draws.
            std::binomial_distribution<int> degree_dist(static_cast<int>(n_ap), p_edge);
            std::unordered_set<int> picked;
            for (int ue = 0; ue < n_ue; ++ue) {
                const int deg = degree_dist(rng);
                picked.clear();
                for (std::int64_t j = n_ap - deg; j < n_ap; ++j) {
                    std::uniform_int_distribution<std::int64_t> pick(0, j);
                    const std::int64_t t = pick(rng);
                    const int ap = static_cast<int>(picked.count(static_cast<int>(t)) ? j : t);
                    picked.insert(ap);
                    edges.emplace_back(ap, ue);
                }
            }
        }
    }
    std::sort(edges.begin(), edges.end());
    return BipartiteGraph::from_edges(static_cast<int>(n_ap), static_cast<int>(n_ue), edges);
}

struct PreprocessReport {
    std::int64_t removed_ue_deg0 = 0;
    std::int64_t removed_ue_deg1 = 0;
    std::int64_t removed_ap_deg0 = 0;
};

/// One-shot removal of degree-0 UEs, degree-1 UEs (with their incident
/// edge) and degree-0 APs, including APs left isolated by the UE removals.
/// UE degrees cannot change during the pass, so a single pass is exact and
/// a second pass removes nothing.
inline PreprocessReport preprocess(BipartiteGraph& g) {
    PreprocessReport report;
    for (int k = 0; k < g.n_ue; ++k) {
        if (!g.ue_alive[k]) continue;
        if (g.ue_degree[k] == 0) {
            g.ue_alive[k] = 0;
            ++report.removed_ue_deg0;
        } else if (g.ue_degree[k] == 1) {
            g.ue_alive[k] = 0;
            ++report.removed_ue_deg1;
            for (int l : g.ue_adj[k])
                if (g.ap_alive[l]) --g.ap_degree[l];
        }
    }
    for (int l = 0; l < g.n_ap; ++l) {
        if (g.ap_alive[l] && g.ap_degree[l] == 0) {
            g.ap_alive[l] = 0;
            ++report.removed_ap_deg0;
        }
    }
    g.preprocessed = true;
    return report;
}

enum class Side { ap, ue };

struct DegreeHistogram {
    std::vector<std::int64_t> counts;  // counts[k] = alive nodes of degree k
    std::int64_t total = 0;

    double mean() const {
        if (total == 0) return 0.0;
        double s = 0.0;
        for (std::size_t k = 0; k < counts.size(); ++k) s += double(k) * double(counts[k]);
        return s / double(total);
    }
};

inline DegreeHistogram degree_histogram(const BipartiteGraph& g, Side side) {
    DegreeHistogram h;
    const auto& alive = side == Side::ap ? g.ap_alive : g.ue_alive;
    const auto& degree = side == Side::ap ? g.ap_degree : g.ue_degree;
    for (std::size_t i = 0; i < alive.size(); ++i) {
        if (!alive[i]) continue;
        const int deg = degree[i];
        if (deg >= static_cast<int>(h.counts.size())) h.counts.resize(deg + 1, 0);
        ++h.counts[deg];
        ++h.total;
    }
    return h;
}

/// Edge-list dump of the alive subgraph: a count header, then one
/// "ap_index ue_index" pair per line.
inline void write_edge_list(const BipartiteGraph& g, std::ostream& os) {
    os << g.alive_ap_count() << ' ' << g.alive_ue_count() << ' ' << g.alive_edge_count() << '\n';
    for (int l = 0; l < g.n_ap; ++l) {
        if (!g.ap_alive[l]) continue;
        for (int k : g.ap_adj[l])
            if (g.ue_alive[k]) os << l << ' ' << k << '\n';
    }
}

}  // namespace cfmid
