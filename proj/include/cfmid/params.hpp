#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfmid {

inline constexpr const char* kVersion = "0.1.0";

/// Physical deployment parameters. Intensities are per unit area (1/m^2),
/// lengths in meters. UEs are split into pilot groups; group p has its own
/// intensity and the total UE intensity is the sum over groups.
struct NetworkParams {
    std::vector<double> lambda_t_groups;  // UE intensity per pilot group
    double lambda_r = 0.0;                // AP intensity
    double gamma = 1.0;                   // connectivity radius
    double d = 1.0;                       // side length of the square region
    int t_p = 1;                          // number of orthogonal pilot sequences
    int t_d = 0;                          // data symbols (bilinear oracle only)

    double total_lambda_t() const {
        return std::accumulate(lambda_t_groups.begin(), lambda_t_groups.end(), 0.0);
    }
};

/// Mean-degree parameters of one pilot group: mean counts inside a
/// gamma-disc and the thinned AP-side mean degree after removal of
/// degree-one UE nodes.
struct DensityParams {
    double big_lambda_t = 0.0;        // lambda_t * pi * gamma^2
    double big_lambda_r = 0.0;        // lambda_r * pi * gamma^2
    double big_lambda_t_tilde = 0.0;  // big_lambda_t * (1 - big_lambda_r * exp(-big_lambda_r))
};

/// Deterministic per-trial seeding. Trial i draws from a stream seeded with
/// splitmix64(master + (i+1) * golden), so trials can run in any order, on
/// any number of workers, and still reproduce bit-identically.
struct SeedSpec {
    std::uint64_t master_seed = 0;

    std::uint64_t trial_seed(std::uint64_t trial_index) const {
        return mix(master_seed + (trial_index + 1) * 0x9e3779b97f4a7c15ULL);
    }

    // splitmix64 output function
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/// Guard against accidentally huge deployments. The asymptotic regime of the
/// analysis (D -> infinity) has to be truncated somewhere in practice.
struct SampleLimits {
    double max_expected_nodes = 1e7;
    bool enforce = true;
};

struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double expected_node_count(const NetworkParams& p) {
    return (p.lambda_r + p.total_lambda_t()) * p.d * p.d;
}

inline void check_budget(const NetworkParams& p, const SampleLimits& limits) {
    const double expected = expected_node_count(p);
    if (limits.enforce && expected > limits.max_expected_nodes) {
        std::ostringstream msg;
        msg << "expected node count " << expected << " exceeds budget "
            << limits.max_expected_nodes << " (raise the limit to override)";
        throw budget_error(msg.str());
    }
}

/// Hard validation plus soft warnings. Violations of the domain (negative
/// intensity, non-positive gamma/D, bad group count) throw; everything that
/// merely strains an assumption is returned as a warning string.
inline std::vector<std::string> validate(const NetworkParams& p,
                                         const SampleLimits& limits = {}) {
    if (!(p.gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
    if (!(p.d > 0.0)) throw std::invalid_argument("d must be > 0");
    if (p.t_p < 1) throw std::invalid_argument("t_p must be >= 1");
    if (p.lambda_r < 0.0 || !std::isfinite(p.lambda_r))
        throw std::invalid_argument("lambda_r must be finite and >= 0");
    for (double lt : p.lambda_t_groups)
        if (lt < 0.0 || !std::isfinite(lt))
            throw std::invalid_argument("group intensities must be finite and >= 0");
    if (static_cast<int>(p.lambda_t_groups.size()) > p.t_p)
        throw std::invalid_argument("more pilot groups than pilot sequences");

    std::vector<std::string> warnings;
    if (p.gamma > p.d / 10.0)
        warnings.push_back("gamma not << D: the disc-connectivity analysis assumes gamma << D");
    if (p.lambda_r == 0.0) warnings.push_back("lambda_r is zero: no APs will be deployed");
    for (std::size_t g = 0; g < p.lambda_t_groups.size(); ++g)
        if (p.lambda_t_groups[g] == 0.0)
            warnings.push_back("lambda_t of group " + std::to_string(g) + " is zero");
    if (expected_node_count(p) > limits.max_expected_nodes)
        warnings.push_back("expected node count exceeds the memory budget; sampling will refuse");
    return warnings;
}

/// Mean degrees of group `group_index`:
///   big_lambda_t       = lambda_t * pi * gamma^2
///   big_lambda_r       = lambda_r * pi * gamma^2
///   big_lambda_t_tilde = big_lambda_t * (1 - big_lambda_r * e^{-big_lambda_r})
inline DensityParams derive_density_params(const NetworkParams& p, int group_index) {
    if (group_index < 0 || group_index >= static_cast<int>(p.lambda_t_groups.size()))
        throw std::out_of_range("group index out of range");
    const double disc_area = std::numbers::pi * p.gamma * p.gamma;
    DensityParams out;
    out.big_lambda_t = p.lambda_t_groups[group_index] * disc_area;
    out.big_lambda_r = p.lambda_r * disc_area;
    out.big_lambda_t_tilde =
        out.big_lambda_t * (1.0 - out.big_lambda_r * std::exp(-out.big_lambda_r));
    if (!std::isfinite(out.big_lambda_t_tilde))
        throw std::domain_error("non-finite derived density");
    return out;
}

}  // namespace cfmid
