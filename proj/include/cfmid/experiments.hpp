#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cfmid/bipartite_graph.hpp"
#include "cfmid/deployment.hpp"
#include "cfmid/karp_sipser.hpp"
#include "cfmid/params.hpp"
#include "cfmid/thresholds.hpp"

namespace cfmid {

enum class GraphModel { geometric, independent };

inline const char* to_string(GraphModel m) {
    return m == GraphModel::geometric ? "geometric" : "independent";
}

/// One Monte Carlo campaign: a sweep of AP intensities lambda_r =
/// factor * lambda_r_base for a fixed (d, gamma, lambda_t). The base is the
/// closed-form critical density lambda_r* unless the caller supplies one
/// (mandatory when the threshold does not exist).
struct ExperimentConfig {
    double d = 1000.0;
    double gamma = 70.0;
    double lambda_t = 5e-4;
    std::vector<double> lambda_r_factors = {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    GraphModel model = GraphModel::independent;
    int trials = 1000;
    std::uint64_t master_seed = 1;
    std::optional<double> base_lambda_r;  // overrides lambda_r* as the sweep base
    Topology topology = Topology::flat;
    int workers = 0;  // 0: CFMID_WORKERS env var, then hardware_concurrency
    bool keep_per_trial = false;
    SampleLimits limits;
};

struct TrialOutcome {
    std::uint64_t seed = 0;
    std::int64_t n_ap = 0;
    std::int64_t n_ue = 0;
    bool verdict = false;
    double r_id_ue = 0.0;
    std::int64_t core_ue = 0;
    std::int64_t core_ap = 0;
    std::int64_t pre_removed_ue_deg0 = 0;
    std::int64_t pre_removed_ue_deg1 = 0;
    std::int64_t pre_removed_ap_deg0 = 0;
};

struct ExperimentRecord {
    GraphModel model = GraphModel::independent;
    double d = 0.0, gamma = 0.0, lambda_t = 0.0, lambda_r = 0.0, factor = 0.0;
    int trials = 0;
    double r_id = 0.0, r_id_ci_lo = 0.0, r_id_ci_hi = 0.0;
    double r_id_ue_mean = 0.0, r_id_ue_std = 0.0;
    double mean_core_ue = 0.0, mean_core_ap = 0.0;
    double pre_removed_ue_deg0 = 0.0, pre_removed_ue_deg1 = 0.0, pre_removed_ap_deg0 = 0.0;
    std::uint64_t master_seed = 0;
    double wall_seconds = 0.0;
    std::vector<TrialOutcome> per_trial;  // populated only when requested
};

/// 95% Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t n,
                                                 double z = 1.959963984540054) {
    if (n <= 0) return {0.0, 1.0};
    const double p = double(successes) / double(n);
    const double z2n = z * z / double(n);
    const double center = (p + z2n / 2.0) / (1.0 + z2n);
    const double half = z * std::sqrt(p * (1.0 - p) / double(n) + z2n / (4.0 * double(n))) / (1.0 + z2n);
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

inline int resolve_worker_count(const ExperimentConfig& config) {
    if (config.workers > 0) return config.workers;
    if (const char* env = std::getenv("CFMID_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

inline double resolve_base_lambda_r(const ExperimentConfig& config) {
    if (config.base_lambda_r) {
        if (!(*config.base_lambda_r > 0.0))
            throw std::invalid_argument("base lambda_r must be > 0");
        return *config.base_lambda_r;
    }
    const double big_lambda_t = config.lambda_t * std::numbers::pi * config.gamma * config.gamma;
    const ThresholdResult t = critical_lambda_r(big_lambda_t, config.gamma);
    if (!t.exists)
        throw std::invalid_argument(
            "no critical lambda_r exists for these parameters; supply a base lambda_r");
    return t.lambda_r_crit;
}

namespace detail {

inline TrialOutcome run_trial(const NetworkParams& params, GraphModel model, Topology topology,
                              std::uint64_t seed, const SampleLimits& limits) {
    TrialOutcome out;
    out.seed = seed;
    BipartiteGraph graph;
    if (model == GraphModel::geometric) {
        const Deployment dep = sample_deployment(params, seed, topology, limits);
        graph = from_geometric(dep, params.gamma, 0);
    } else {
        graph = from_independent(params, 0, seed, limits);
    }
    out.n_ap = graph.n_ap;
    out.n_ue = graph.n_ue;
    const PreprocessReport pre = preprocess(graph);
    out.pre_removed_ue_deg0 = pre.removed_ue_deg0;
    out.pre_removed_ue_deg1 = pre.removed_ue_deg1;
    out.pre_removed_ap_deg0 = pre.removed_ap_deg0;
    const PeelingResult res = peel(graph);
    out.verdict = res.verdict;
    out.r_id_ue = res.r_id_ue;
    out.core_ue = res.core_ue_count;
    out.core_ap = res.core_ap_count;
    return out;
}

}  // namespace detail

/// Runs the sweep. Trials are independent work units with preassigned
/// seeds (trial i of factor j uses SeedSpec::trial_seed(j * trials + i)),
/// merged by index, so results do not depend on worker count or scheduling.
inline std::vector<ExperimentRecord> run_sweep(const ExperimentConfig& config) {
    if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
    for (double f : config.lambda_r_factors)
        if (!(f > 0.0)) throw std::invalid_argument("lambda_r factors must be > 0");

    const double base = resolve_base_lambda_r(config);
    const SeedSpec seeds{config.master_seed};
    const int workers = resolve_worker_count(config);

    std::vector<ExperimentRecord> records;
    for (std::size_t fi = 0; fi < config.lambda_r_factors.size(); ++fi) {
        const double factor = config.lambda_r_factors[fi];
        NetworkParams params;
        params.lambda_t_groups = {config.lambda_t};
        params.lambda_r = factor * base;
        params.gamma = config.gamma;
        params.d = config.d;
        params.t_p = 1;

        validate(params, config.limits);
        check_budget(params, config.limits);

        const auto t0 = std::chrono::steady_clock::now();
        std::vector<TrialOutcome> outcomes(config.trials);
        std::atomic<int> next{0};
        std::atomic<bool> failed{false};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&]() {
            try {
                for (int i = next.fetch_add(1); i < config.trials && !failed.load();
                     i = next.fetch_add(1))
                    outcomes[i] = detail::run_trial(
                        params, config.model, config.topology,
                        seeds.trial_seed(fi * static_cast<std::uint64_t>(config.trials) + i),
                        config.limits);
            } catch (...) {
                std::scoped_lock lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                failed.store(true);
            }
        };
        if (workers <= 1 || config.trials == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < std::min(workers, config.trials); ++w) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }
        if (failure) std::rethrow_exception(failure);

        ExperimentRecord rec;
        rec.model = config.model;
        rec.d = config.d;
        rec.gamma = config.gamma;
        rec.lambda_t = config.lambda_t;
        rec.lambda_r = params.lambda_r;
        rec.factor = factor;
        rec.trials = config.trials;
        rec.master_seed = config.master_seed;

        std::int64_t id_count = 0;
        double ue_sum = 0.0, ue_sq = 0.0;
        for (const auto& o : outcomes) {
            id_count += o.verdict ? 1 : 0;
            ue_sum += o.r_id_ue;
            ue_sq += o.r_id_ue * o.r_id_ue;
            rec.mean_core_ue += double(o.core_ue);
            rec.mean_core_ap += double(o.core_ap);
            rec.pre_removed_ue_deg0 += double(o.pre_removed_ue_deg0);
            rec.pre_removed_ue_deg1 += double(o.pre_removed_ue_deg1);
            rec.pre_removed_ap_deg0 += double(o.pre_removed_ap_deg0);
        }
        const double n = double(config.trials);
        rec.r_id = double(id_count) / n;
        std::tie(rec.r_id_ci_lo, rec.r_id_ci_hi) = wilson_interval(id_count, config.trials);
        rec.r_id_ue_mean = ue_sum / n;
        rec.r_id_ue_std =
            config.trials > 1
                ? std::sqrt(std::max(0.0, (ue_sq - n * rec.r_id_ue_mean * rec.r_id_ue_mean) / (n - 1.0)))
                : 0.0;
        rec.mean_core_ue /= n;
        rec.mean_core_ap /= n;
        rec.pre_removed_ue_deg0 /= n;
        rec.pre_removed_ue_deg1 /= n;
        rec.pre_removed_ap_deg0 /= n;
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (config.keep_per_trial) rec.per_trial = std::move(outcomes);
        records.push_back(std::move(rec));
    }
    return records;
}

struct ModelComparison {
    std::vector<ExperimentRecord> geometric;
    std::vector<ExperimentRecord> independent;
};

/// Same sweep under both graph models. Trial seeds depend only on
/// (factor index, trial index) and node counts are drawn first in both
/// generators, so the paired trials share their node-count draws.
inline ModelComparison compare_models(const ExperimentConfig& config) {
    ModelComparison cmp;
    ExperimentConfig c = config;
    c.model = GraphModel::geometric;
    cmp.geometric = run_sweep(c);
    c.model = GraphModel::independent;
    cmp.independent = run_sweep(c);
    return cmp;
}

inline void write_records_csv(const std::vector<ExperimentRecord>& records, std::ostream& os,
                              bool header = true) {
    if (header)
        os << "model,d,gamma,lambda_t,lambda_r,factor,trials,r_id,r_id_ci_lo,r_id_ci_hi,"
              "r_id_ue_mean,r_id_ue_std,pre_removed_ue_deg0,pre_removed_ue_deg1,"
              "pre_removed_ap_deg0,seed\n";
    char buf[512];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf,
                      "%s,%.12g,%.12g,%.12g,%.12g,%.12g,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,"
                      "%.12g,%.12g,%llu\n",
                      to_string(r.model), r.d, r.gamma, r.lambda_t, r.lambda_r, r.factor, r.trials,
                      r.r_id, r.r_id_ci_lo, r.r_id_ci_hi, r.r_id_ue_mean, r.r_id_ue_std,
                      r.pre_removed_ue_deg0, r.pre_removed_ue_deg1, r.pre_removed_ap_deg0,
                      static_cast<unsigned long long>(r.master_seed));
        os << buf;
    }
}

inline void write_per_trial_csv(const std::vector<ExperimentRecord>& records, std::ostream& os) {
    os << "model,factor,trial,seed,n_ap,n_ue,verdict,r_id_ue,core_ue,core_ap\n";
    char buf[256];
    for (const auto& r : records)
        for (std::size_t i = 0; i < r.per_trial.size(); ++i) {
            const auto& t = r.per_trial[i];
            std::snprintf(buf, sizeof buf, "%s,%.12g,%zu,%llu,%lld,%lld,%d,%.12g,%lld,%lld\n",
                          to_string(r.model), r.factor, i,
                          static_cast<unsigned long long>(t.seed),
                          static_cast<long long>(t.n_ap), static_cast<long long>(t.n_ue),
                          t.verdict ? 1 : 0, t.r_id_ue, static_cast<long long>(t.core_ue),
                          static_cast<long long>(t.core_ap));
            os << buf;
        }
}

}  // namespace cfmid
