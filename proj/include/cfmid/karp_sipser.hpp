#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "cfmid/bipartite_graph.hpp"

namespace cfmid {

struct PeelStep {
    std::int64_t step = 0;
    int ap_removed = -1;
    int ue_removed = -1;
    std::int64_t remaining_ue = 0;
};

struct PeelOptions {
    /// When set, worklist entries are popped in a seed-dependent order
    /// instead of FIFO. The final core is order-independent (confluence),
    /// only the removal order of UEs may change.
    std::optional<std::uint64_t> shuffle_seed;
    std::vector<PeelStep>* trace = nullptr;
};

struct PeelingResult {
    std::vector<int> identified_ue_order;
    std::int64_t core_ue_count = 0;
    std::int64_t core_ap_count = 0;
    std::int64_t initial_ue_count = 0;
    bool verdict = false;  // core empty
    double r_id_ue = 0.0;  // identified / initial, 1 for an empty graph
};

inline bool core_is_empty(const PeelingResult& r) { return r.core_ue_count == 0; }

/// First-phase Karp-Sipser peeling on a preprocessed graph: repeatedly pop a
/// degree-1 AP, identify its unique alive UE, remove both together with the
/// UE's incident edges, and mark APs that reach degree 0 as satisfied. The
/// worklist holds candidate AP leaves; stale entries (dead or degree != 1 at
/// pop time) are skipped. Terminates when no leaf APs remain; the residual
/// alive nodes form the core.
inline PeelingResult peel(BipartiteGraph& g, const PeelOptions& options = {}) {
    if (!g.preprocessed)
        throw std::logic_error("peel requires a preprocessed graph (call preprocess first)");

    PeelingResult result;
    result.initial_ue_count = g.alive_ue_count();

    std::vector<int> worklist;
    worklist.reserve(g.n_ap);
    for (int l = 0; l < g.n_ap; ++l)
        if (g.ap_alive[l] && g.ap_degree[l] == 1) worklist.push_back(l);

    std::mt19937_64 shuffle_rng(options.shuffle_seed.value_or(0));
    std::size_t head = 0;
    std::int64_t ops = 0;
    const std::int64_t op_budget =
        4 * (std::int64_t(g.n_ap) + g.n_ue + g.alive_edge_count()) + 16;

    while (head < worklist.size()) {
        if (options.shuffle_seed) {
            std::uniform_int_distribution<std::size_t> pick(head, worklist.size() - 1);
            std::swap(worklist[head], worklist[pick(shuffle_rng)]);
        }
        const int leaf = worklist[head++];
        ++ops;
        if (!g.ap_alive[leaf] || g.ap_degree[leaf] != 1) continue;

        int ue = -1;
        for (int k : g.ap_adj[leaf]) {
            ++ops;
            if (g.ue_alive[k]) {
                ue = k;
                break;
            }
        }
        if (ue < 0) throw std::logic_error("degree counter out of sync with adjacency");

        g.ap_alive[leaf] = 0;
        g.ap_degree[leaf] = 0;
        g.ue_alive[ue] = 0;
        for (int l : g.ue_adj[ue]) {
            ++ops;
            if (!g.ap_alive[l]) continue;
            if (--g.ap_degree[l] == 1)
                worklist.push_back(l);
            else if (g.ap_degree[l] == 0)
                g.ap_alive[l] = 0;  // equations exhausted, not part of the core
        }
        result.identified_ue_order.push_back(ue);
        if (options.trace)
            options.trace->push_back({static_cast<std::int64_t>(result.identified_ue_order.size()),
                                      leaf, ue,
                                      result.initial_ue_count -
                                          static_cast<std::int64_t>(result.identified_ue_order.size())});
        if (ops > op_budget) throw std::logic_error("peel exceeded its linear operation budget");
    }

    result.core_ue_count = g.alive_ue_count();
    result.core_ap_count = g.alive_ap_count();
    result.verdict = result.core_ue_count == 0;
    result.r_id_ue = result.initial_ue_count > 0
                         ? double(result.identified_ue_order.size()) / double(result.initial_ue_count)
                         : 1.0;
    return result;
}

inline void write_peel_trace_csv(const std::vector<PeelStep>& trace, std::ostream& os) {
    os << "step,ap_removed,ue_removed,remaining_ue\n";
    for (const auto& s : trace)
        os << s.step << ',' << s.ap_removed << ',' << s.ue_removed << ',' << s.remaining_ue << '\n';
}

}  // namespace cfmid
