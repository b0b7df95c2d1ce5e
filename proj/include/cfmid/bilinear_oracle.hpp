#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cfmid/bipartite_graph.hpp"

namespace cfmid {

/// Desk-scale noise-free bilinear system Y = H_I [x^p X^d] over the alive
/// subgraph of a bipartite graph: one pilot symbol (all-ones column, single
/// pilot group), generic real channel values on the edges and generic data
/// symbols. Node indices are compacted, `edges` maps back to (ap, ue) slots.
struct BilinearInstance {
    int n_ap = 0;  // L
    int n_ue = 0;  // K
    int t_d = 0;
    std::vector<std::pair<int, int>> edges;  // compacted (ap, ue), sorted
    std::vector<double> channel;             // h value per edge
    Eigen::MatrixXd data;                    // K x t_d
    Eigen::MatrixXd observations;            // L x (1 + t_d)
};

inline constexpr int kOracleMaxUe = 8;
inline constexpr int kOracleMaxAp = 16;

/// Builds an instance over the alive nodes of `graph`. With the unit pilot,
/// each AP's pilot observation is the sum of its incident channel
/// coefficients. Requires t_d >= K + 2 so that a rank defect reflects graph
/// structure rather than a shortage of generic columns.
inline BilinearInstance build_instance(const BipartiteGraph& graph, int t_d, std::uint64_t seed) {
    std::vector<int> ap_slot(graph.n_ap, -1), ue_slot(graph.n_ue, -1);
    BilinearInstance inst;
    for (int l = 0; l < graph.n_ap; ++l)
        if (graph.ap_alive[l]) ap_slot[l] = inst.n_ap++;
    for (int k = 0; k < graph.n_ue; ++k)
        if (graph.ue_alive[k]) ue_slot[k] = inst.n_ue++;
    if (inst.n_ue > kOracleMaxUe || inst.n_ap > kOracleMaxAp)
        throw std::invalid_argument("bilinear oracle instance too large (K <= 8, L <= 16)");
    if (t_d < inst.n_ue + 2)
        throw std::invalid_argument("bilinear oracle needs t_d >= K + 2");
    inst.t_d = t_d;

    for (int l = 0; l < graph.n_ap; ++l) {
        if (!graph.ap_alive[l]) continue;
        for (int k : graph.ap_adj[l])
            if (graph.ue_alive[k]) inst.edges.emplace_back(ap_slot[l], ue_slot[k]);
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    inst.channel.resize(inst.edges.size());
    for (auto& h : inst.channel) h = gauss(rng);
    inst.data.resize(inst.n_ue, t_d);
    for (int k = 0; k < inst.n_ue; ++k)
        for (int t = 0; t < t_d; ++t) inst.data(k, t) = gauss(rng);

    Eigen::MatrixXd h_mat = Eigen::MatrixXd::Zero(inst.n_ap, inst.n_ue);
    for (std::size_t e = 0; e < inst.edges.size(); ++e)
        h_mat(inst.edges[e].first, inst.edges[e].second) = inst.channel[e];
    Eigen::MatrixXd x(inst.n_ue, 1 + t_d);
    x.col(0).setOnes();
    x.rightCols(t_d) = inst.data;
    inst.observations = h_mat * x;
    return inst;
}

struct RankVerdict {
    bool full_rank = false;
    int rank = 0;
    int defect = 0;
    long rows = 0;
    long cols = 0;
    double sigma_max = 0.0;
};

/// Dimension of the pilot-respecting mixing ambiguity of an instance.
///
/// When H_I has full column rank and the data block is generic, every
/// solution of H~ X~ = H_I X with the same sparsity pattern and the same
/// unit pilot has the form (H_I M, M^{-1} X) for a K x K matrix M with unit
/// row sums whose action preserves the pattern. The returned value is the
/// dimension of that solution space around the identity; it equals the
/// Jacobian rank defect and is zero exactly when the instance is locally
/// identifiable. Graphs in which one UE's neighborhood is contained in
/// another's always have a nonzero dimension here: the shared pilot cannot
/// separate the nested pair even when the Karp-Sipser core is empty.
inline int pilot_mixing_ambiguity(const BilinearInstance& inst, double tol = 1e-8) {
    const int k_count = inst.n_ue;
    if (k_count == 0 || inst.edges.empty())
        throw std::invalid_argument("degenerate instance: no unknowns");

    Eigen::MatrixXd h_mat = Eigen::MatrixXd::Zero(inst.n_ap, k_count);
    for (std::size_t e = 0; e < inst.edges.size(); ++e)
        h_mat(inst.edges[e].first, inst.edges[e].second) = inst.channel[e];

    // constraints on the homogeneous part M0 (flattened row-major):
    // unit row sums -> M0 * 1 = 0, and (H M0)_{lk} = 0 for every non-edge (l,k)
    std::vector<Eigen::RowVectorXd> rows;
    for (int j = 0; j < k_count; ++j) {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(k_count * k_count);
        for (int k = 0; k < k_count; ++k) row(j * k_count + k) = 1.0;
        rows.push_back(row);
    }
    for (int k = 0; k < k_count; ++k)
        for (int l = 0; l < inst.n_ap; ++l) {
            if (h_mat(l, k) != 0.0) continue;  // (l,k) is an edge slot only if nonzero draw
            Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(k_count * k_count);
            bool any = false;
            for (int j = 0; j < k_count; ++j)
                if (h_mat(l, j) != 0.0) {
                    row(j * k_count + k) = h_mat(l, j);
                    any = true;
                }
            if (any) rows.push_back(row);
        }

    Eigen::MatrixXd constraints(rows.size(), k_count * k_count);
    for (std::size_t r = 0; r < rows.size(); ++r) constraints.row(r) = rows[r];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraints);
    const auto& sigma = svd.singularValues();
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > tol * sigma_max) ++rank;
    return k_count * k_count - rank;
}

/// Local identifiability check: the Jacobian of
/// (H_I, X^d) -> H_I [x^p X^d] at the drawn point, with columns for the
/// edge values and the data symbols. Full column rank at a generic point
/// means the parameters are locally identifiable.
inline RankVerdict local_identifiability(const BilinearInstance& inst, double tol_rank = 1e-8) {
    const int t_total = 1 + inst.t_d;
    const long rows = static_cast<long>(inst.n_ap) * t_total;
    const long cols = static_cast<long>(inst.edges.size()) + static_cast<long>(inst.n_ue) * inst.t_d;
    if (inst.edges.empty()) throw std::invalid_argument("degenerate instance: no edges");

    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(rows, cols);
    auto row_of = [&](int l, int t) { return static_cast<long>(l) * t_total + t; };
    // d y_{l,t} / d h_{lk} = x_{k,t}
    for (std::size_t e = 0; e < inst.edges.size(); ++e) {
        const auto [l, k] = inst.edges[e];
        jac(row_of(l, 0), e) = 1.0;  // unit pilot
        for (int t = 0; t < inst.t_d; ++t) jac(row_of(l, 1 + t), e) = inst.data(k, t);
    }
    // d y_{l,1+t} / d x_{k,t} = h_{lk} on the edge pattern
    for (std::size_t e = 0; e < inst.edges.size(); ++e) {
        const auto [l, k] = inst.edges[e];
        for (int t = 0; t < inst.t_d; ++t)
            jac(row_of(l, 1 + t), inst.edges.size() + static_cast<long>(k) * inst.t_d + t) =
                inst.channel[e];
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const auto& sigma = svd.singularValues();
    RankVerdict v;
    v.rows = rows;
    v.cols = cols;
    v.sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    if (v.sigma_max == 0.0) throw std::invalid_argument("degenerate instance: zero Jacobian");
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > tol_rank * v.sigma_max) ++v.rank;
    v.defect = static_cast<int>(cols) - v.rank;
    v.full_rank = v.defect == 0;
    return v;
}

}  // namespace cfmid
