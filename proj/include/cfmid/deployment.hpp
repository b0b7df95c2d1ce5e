#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <random>
#include <utility>
#include <vector>

#include "cfmid/params.hpp"

namespace cfmid {

enum class Topology { flat, torus };

/// Sampled AP/UE positions over the D x D square. Stored as parallel
/// coordinate arrays; `ue_group` holds the pilot-group label of each UE.
struct Deployment {
    std::vector<double> ap_x, ap_y;
    std::vector<double> ue_x, ue_y;
    std::vector<int> ue_group;
    double region = 0.0;
    Topology topology = Topology::flat;

    int n_ap() const { return static_cast<int>(ap_x.size()); }
    int n_ue() const { return static_cast<int>(ue_x.size()); }
};

/// Draws a deployment from independent homogeneous PPPs: AP count is
/// Poisson(lambda_r * D^2), group-p UE count is Poisson(lambda_t^(p) * D^2),
/// every point placed uniformly in the square.
///
/// Draw order is fixed (all counts first, then positions) so that a
/// surrogate-model generator running on the same seed reproduces the node
/// counts exactly.
inline Deployment sample_deployment(const NetworkParams& params, std::uint64_t seed,
                                    Topology topology = Topology::flat,
                                    const SampleLimits& limits = {}) {
    validate(params, limits);
    check_budget(params, limits);

    std::mt19937_64 rng(seed);
    const double area = params.d * params.d;

    std::int64_t n_ap = 0;
    if (params.lambda_r > 0.0)
        n_ap = std::poisson_distribution<std::int64_t>(params.lambda_r * area)(rng);
    std::vector<std::int64_t> n_ue(params.lambda_t_groups.size(), 0);
    for (std::size_t g = 0; g < n_ue.size(); ++g)
        if (params.lambda_t_groups[g] > 0.0)
            n_ue[g] = std::poisson_distribution<std::int64_t>(params.lambda_t_groups[g] * area)(rng);

    Deployment dep;
    dep.region = params.d;
    dep.topology = topology;
    std::uniform_real_distribution<double> coord(0.0, params.d);
    dep.ap_x.reserve(n_ap);
    dep.ap_y.reserve(n_ap);
    for (std::int64_t i = 0; i < n_ap; ++i) {
        dep.ap_x.push_back(coord(rng));
        dep.ap_y.push_back(coord(rng));
    }
    for (std::size_t g = 0; g < n_ue.size(); ++g) {
        for (std::int64_t i = 0; i < n_ue[g]; ++i) {
            dep.ue_x.push_back(coord(rng));
            dep.ue_y.push_back(coord(rng));
            dep.ue_group.push_back(static_cast<int>(g));
        }
    }
    return dep;
}

namespace detail {

inline double axis_delta(double a, double b, double period, Topology topology) {
    double delta = std::abs(a - b);
    if (topology == Topology::torus) delta = std::min(delta, period - delta);
    return delta;
}

inline double pair_dist2(const Deployment& dep, int ap, int ue) {
    const double dx = axis_delta(dep.ap_x[ap], dep.ue_x[ue], dep.region, dep.topology);
    const double dy = axis_delta(dep.ap_y[ap], dep.ue_y[ue], dep.region, dep.topology);
    return dx * dx + dy * dy;
}

/// Uniform grid over the AP positions with cell width >= gamma, so any pair
/// within distance gamma sits in the same or an adjacent cell (with wrap on
/// the torus). Queries scan at most a 3x3 block of cells.
class ApGrid {
public:
    ApGrid(const Deployment& dep, double gamma) : dep_(dep), gamma2_(gamma * gamma) {
        if (dep.topology == Topology::torus) {
            n_ = std::max<int>(1, static_cast<int>(dep.region / gamma));
            width_ = dep.region / n_;
        } else {
            n_ = static_cast<int>(dep.region / gamma) + 1;
            width_ = gamma;
        }
        cells_.assign(static_cast<std::size_t>(n_) * n_, {});
        for (int i = 0; i < dep.n_ap(); ++i)
            cells_[cell_of(dep.ap_x[i]) * n_ + cell_of(dep.ap_y[i])].push_back(i);
    }

    template <typename Visit>
    void for_each_ap_near(int ue, Visit&& visit) const {
        const int cx = cell_of(dep_.ue_x[ue]);
        const int cy = cell_of(dep_.ue_y[ue]);
        int xs[3], ys[3];
        const int nx = neighbor_cells(cx, xs);
        const int ny = neighbor_cells(cy, ys);
        for (int a = 0; a < nx; ++a)
            for (int b = 0; b < ny; ++b)
                for (int ap : cells_[static_cast<std::size_t>(xs[a]) * n_ + ys[b]])
                    if (pair_dist2(dep_, ap, ue) <= gamma2_) visit(ap);
    }

private:
    int cell_of(double coord) const {
        int c = static_cast<int>(coord / width_);
        return std::clamp(c, 0, n_ - 1);
    }

    int neighbor_cells(int c, int out[3]) const {
        int k = 0;
        for (int d = -1; d <= 1; ++d) {
            int v = c + d;
            if (dep_.topology == Topology::torus)
                v = (v % n_ + n_) % n_;
            else if (v < 0 || v >= n_)
                continue;
            bool seen = false;
            for (int j = 0; j < k; ++j) seen = seen || out[j] == v;
            if (!seen) out[k++] = v;
        }
        return k;
    }

    const Deployment& dep_;
    double gamma2_;
    int n_ = 1;
    double width_ = 1.0;
    std::vector<std::vector<int>> cells_;
};

}  // namespace detail

/// All (AP index, UE index) pairs at distance <= gamma, sorted by AP index
/// then UE index. Boundary inclusive; toroidal metric when the deployment
/// was sampled with torus topology.
inline std::vector<std::pair<int, int>> neighbors_within(const Deployment& dep, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
    detail::ApGrid grid(dep, gamma);
    std::vector<std::pair<int, int>> edges;
    for (int ue = 0; ue < dep.n_ue(); ++ue)
        grid.for_each_ap_near(ue, [&](int ap) { edges.emplace_back(ap, ue); });
    std::sort(edges.begin(), edges.end());
    return edges;
}

/// CSV dump for inspection: kind,x,y,group (group left empty for APs).
inline void write_deployment_csv(const Deployment& dep, std::ostream& os) {
    os << "kind,x,y,group\n";
    char buf[80];
    for (int i = 0; i < dep.n_ap(); ++i) {
        std::snprintf(buf, sizeof buf, "ap,%.12g,%.12g,\n", dep.ap_x[i], dep.ap_y[i]);
        os << buf;
    }
    for (int i = 0; i < dep.n_ue(); ++i) {
        std::snprintf(buf, sizeof buf, "ue,%.12g,%.12g,%d\n", dep.ue_x[i], dep.ue_y[i],
                      dep.ue_group[i]);
        os << buf;
    }
}

}  // namespace cfmid
