// Command-line surface over the cfmid library: density-evolution traces,
// fixed-point classification, closed-form thresholds, identifiability-region
// curves, pilot dimensioning and Monte Carlo sweeps. Every run echoes its
// fully resolved configuration (defaults and seeds included) into the output
// metadata so results are reproducible from the output alone.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cfmid/cfmid.hpp"

using json = nlohmann::ordered_json;

namespace {

std::string fmt12(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// All floating-point output carries 12 significant digits; JSON payload
// values are rounded to the same precision so csv/json runs diff cleanly.
double round12(double v) { return std::strtod(fmt12(v).c_str(), nullptr); }

using MetaList = std::vector<std::pair<std::string, std::string>>;

void write_meta_csv(std::ostream& os, const std::string& command, const MetaList& inputs) {
    os << "# cfmid " << command << " v" << cfmid::kVersion << '\n';
    for (const auto& [k, v] : inputs) os << "# " << k << '=' << v << '\n';
}

json inputs_to_json(const MetaList& inputs) {
    json j = json::object();
    for (const auto& [k, v] : inputs) {
        char* end = nullptr;
        const double num = std::strtod(v.c_str(), &end);
        if (end && *end == '\0' && !v.empty())
            j[k] = num;
        else
            j[k] = v;
    }
    return j;
}

struct OutputTarget {
    std::string path = "-";
    std::ofstream file;

    std::ostream& open() {
        if (path == "-") return std::cout;
        file.open(path);
        if (!file) throw std::runtime_error("cannot open output file: " + path);
        return file;
    }
};

std::string join_factors(const std::vector<double>& factors) {
    std::string s;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) s += ',';
        s += fmt12(factors[i]);
    }
    return s;
}

void emit_json(std::ostream& os, const std::string& command, const MetaList& inputs,
               json outputs, std::optional<std::uint64_t> seed = std::nullopt) {
    json doc;
    doc["inputs"] = inputs_to_json(inputs);
    doc["inputs"]["command"] = command;
    doc["outputs"] = std::move(outputs);
    doc["meta"]["version"] = cfmid::kVersion;
    if (seed) doc["meta"]["seed"] = *seed;
    os << doc.dump(2) << '\n';
}

// --- de-trace ---------------------------------------------------------------

struct DeTraceArgs {
    double lambda_t = 0.0, lambda_r = 0.0, gamma = 0.0;
    std::string model = "exact";
    double tol = cfmid::kDefaultDETol;
    long max_iter = cfmid::kDefaultDEMaxIter;
    std::string format = "csv";
    OutputTarget out;
};

cfmid::DEVariant parse_variant(const std::string& name) {
    if (name == "exact") return cfmid::DEVariant::exact;
    if (name == "approx" || name == "approximate") return cfmid::DEVariant::approximate;
    throw CLI::ValidationError("--model", "expected exact or approx");
}

int run_de_trace(DeTraceArgs& a) {
    cfmid::NetworkParams params;
    params.lambda_t_groups = {a.lambda_t};
    params.lambda_r = a.lambda_r;
    params.gamma = a.gamma;
    params.d = 1.0;  // intensities enter the recursion only through the disc means
    const cfmid::DEModel model = cfmid::make_de_model(params, 0, parse_variant(a.model));
    const cfmid::DensityEvolutionTrace trace = cfmid::iterate(model, a.tol, a.max_iter);

    MetaList inputs = {{"lambda_t", fmt12(a.lambda_t)}, {"lambda_r", fmt12(a.lambda_r)},
                       {"gamma", fmt12(a.gamma)},       {"model", a.model},
                       {"tol", fmt12(a.tol)},           {"max_iter", std::to_string(a.max_iter)}};
    std::ostream& os = a.out.open();
    if (a.format == "json") {
        json out;
        out["verdict"] = cfmid::to_string(trace.verdict);
        out["iterations_used"] = trace.iterations_used;
        out["converged_value"] = round12(trace.converged_value);
        out["epsilon_delta"] = round12(model.epsilon_delta);
        out["trace"] = json::array();
        for (double z : trace.iterates) out["trace"].push_back(round12(z));
        emit_json(os, "de-trace", inputs, std::move(out));
    } else {
        write_meta_csv(os, "de-trace", inputs);
        os << "# epsilon_delta=" << fmt12(model.epsilon_delta) << '\n';
        os << "# verdict=" << cfmid::to_string(trace.verdict) << '\n';
        os << "# iterations_used=" << trace.iterations_used << '\n';
        os << "# converged_value=" << fmt12(trace.converged_value) << '\n';
        cfmid::write_trace_csv(trace, os);
    }
    return 0;
}

// --- classify ----------------------------------------------------------------

struct ClassifyArgs {
    double lambda_t = 0.0, lambda_r = 0.0, gamma = 0.0;
    std::string model = "exact";
    long grid_points = 10000;
    std::string format = "json";
    OutputTarget out;
};

int run_classify(ClassifyArgs& a) {
    cfmid::NetworkParams params;
    params.lambda_t_groups = {a.lambda_t};
    params.lambda_r = a.lambda_r;
    params.gamma = a.gamma;
    const cfmid::DEModel model = cfmid::make_de_model(params, 0, parse_variant(a.model));
    const cfmid::DEVerdict verdict = cfmid::classify(model, a.grid_points);

    MetaList inputs = {{"lambda_t", fmt12(a.lambda_t)},
                       {"lambda_r", fmt12(a.lambda_r)},
                       {"gamma", fmt12(a.gamma)},
                       {"model", a.model},
                       {"grid_points", std::to_string(a.grid_points)}};
    std::ostream& os = a.out.open();
    if (a.format == "json") {
        json out;
        out["verdict"] = cfmid::to_string(verdict);
        emit_json(os, "classify", inputs, std::move(out));
    } else {
        write_meta_csv(os, "classify", inputs);
        os << "verdict\n" << cfmid::to_string(verdict) << '\n';
    }
    return 0;
}

// --- threshold ----------------------------------------------------------------

struct ThresholdArgs {
    double lambda_t = 0.0, gamma = 0.0;
    std::string format = "json";
    OutputTarget out;
};

int run_threshold(ThresholdArgs& a) {
    const double big_lambda_t = a.lambda_t * std::numbers::pi * a.gamma * a.gamma;
    const cfmid::ThresholdResult r = cfmid::critical_lambda_r(big_lambda_t, a.gamma);

    MetaList inputs = {{"lambda_t", fmt12(a.lambda_t)}, {"gamma", fmt12(a.gamma)}};
    std::ostream& os = a.out.open();
    if (a.format == "json") {
        json out;
        out["big_lambda_t"] = round12(r.big_lambda_t);
        out["epsilon_delta_hat"] = round12(r.epsilon_delta_hat);
        out["exists"] = r.exists;
        if (r.exists) {
            out["big_lambda_r_crit"] = round12(r.big_lambda_r_crit);
            out["lambda_r_crit"] = round12(r.lambda_r_crit);
            out["z_crit"] = round12(r.z_crit);
            out["tangency_residual_value"] = round12(r.tangency_residual_value);
            out["tangency_residual_slope"] = round12(r.tangency_residual_slope);
        }
        emit_json(os, "threshold", inputs, std::move(out));
    } else {
        write_meta_csv(os, "threshold", inputs);
        os << "big_lambda_t,epsilon_delta_hat,exists,big_lambda_r_crit,lambda_r_crit,z_crit\n";
        os << fmt12(r.big_lambda_t) << ',' << fmt12(r.epsilon_delta_hat) << ','
           << (r.exists ? 1 : 0) << ',' << fmt12(r.big_lambda_r_crit) << ','
           << fmt12(r.lambda_r_crit) << ',' << fmt12(r.z_crit) << '\n';
    }
    return 0;
}

// --- region -------------------------------------------------------------------

struct RegionArgs {
    double gamma = 0.0;
    double lambda_t_min = 0.0, lambda_t_max = 0.0;
    int steps = 50;
    std::string format = "csv";
    OutputTarget out;
};

int run_region(RegionArgs& a) {
    if (a.steps < 2) throw CLI::ValidationError("--steps", "need at least 2 grid points");
    if (!(a.lambda_t_min > 0.0) || !(a.lambda_t_max > a.lambda_t_min))
        throw CLI::ValidationError("--lambda-t-min/--lambda-t-max", "need 0 < min < max");
    std::vector<double> grid(a.steps);
    for (int i = 0; i < a.steps; ++i)
        grid[i] = a.lambda_t_min + (a.lambda_t_max - a.lambda_t_min) * double(i) / double(a.steps - 1);
    const std::vector<cfmid::RegionPoint> points = cfmid::region_curve(a.gamma, grid);

    MetaList inputs = {{"gamma", fmt12(a.gamma)},
                       {"lambda_t_min", fmt12(a.lambda_t_min)},
                       {"lambda_t_max", fmt12(a.lambda_t_max)},
                       {"steps", std::to_string(a.steps)}};
    std::ostream& os = a.out.open();
    if (a.format == "json") {
        json rows = json::array();
        for (const auto& p : points) {
            json r;
            r["gamma"] = round12(p.gamma);
            r["lambda_t"] = round12(p.lambda_t);
            r["Lambda_t"] = round12(p.big_lambda_t);
            r["exists"] = p.exists;
            if (p.exists) {
                r["Lambda_r_crit"] = round12(p.big_lambda_r_crit);
                r["lambda_r_crit"] = round12(p.lambda_r_crit);
                r["z_crit"] = round12(p.z_crit);
            }
            r["epsilon_delta_hat"] = round12(p.epsilon_delta_hat);
            rows.push_back(std::move(r));
        }
        emit_json(os, "region", inputs, json{{"points", std::move(rows)}});
    } else {
        write_meta_csv(os, "region", inputs);
        cfmid::write_region_csv(points, os);
    }
    return 0;
}

// --- pilots -------------------------------------------------------------------

struct PilotsArgs {
    double lambda_t_total = 0.0, lambda_r = 0.0, gamma = 0.0;
    std::string format = "json";
    OutputTarget out;
};

int run_pilots(PilotsArgs& a) {
    const cfmid::PilotPlan plan = cfmid::min_pilots(a.lambda_t_total, a.lambda_r, a.gamma);
    MetaList inputs = {{"lambda_t_total", fmt12(a.lambda_t_total)},
                       {"lambda_r", fmt12(a.lambda_r)},
                       {"gamma", fmt12(a.gamma)}};
    std::ostream& os = a.out.open();
    if (a.format == "json") {
        json out;
        out["exists"] = plan.exists;
        if (plan.exists) {
            out["t_p"] = plan.t_p;
            out["lambda_t_star"] = round12(plan.lambda_t_star);
        }
        emit_json(os, "pilots", inputs, std::move(out));
    } else {
        write_meta_csv(os, "pilots", inputs);
        os << "exists,t_p,lambda_t_star\n";
        os << (plan.exists ? 1 : 0) << ',' << plan.t_p << ',' << fmt12(plan.lambda_t_star) << '\n';
    }
    return 0;
}

// --- simulate / compare ---------------------------------------------------------

struct SimulateArgs {
    double d = 1000.0, gamma = 70.0, lambda_t = 5e-4;
    std::vector<double> factors = {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    std::string model = "independent";
    int trials = 1000;
    std::uint64_t seed = 1;
    double base_lambda_r = 0.0;  // 0: derive lambda_r* from the threshold
    std::string topology = "flat";
    double max_nodes = 1e7;
    bool no_budget_check = false;
    std::string per_trial_path;
    std::string dump_graph_path;
    std::string dump_deployment_path;
    std::string format = "csv";
    OutputTarget out;
};

cfmid::GraphModel parse_model(const std::string& name) {
    if (name == "geometric") return cfmid::GraphModel::geometric;
    if (name == "independent") return cfmid::GraphModel::independent;
    throw CLI::ValidationError("--model", "expected geometric or independent");
}

cfmid::Topology parse_topology(const std::string& name) {
    if (name == "flat") return cfmid::Topology::flat;
    if (name == "torus") return cfmid::Topology::torus;
    throw CLI::ValidationError("--topology", "expected flat or torus");
}

cfmid::ExperimentConfig make_config(const SimulateArgs& a) {
    cfmid::ExperimentConfig config;
    config.d = a.d;
    config.gamma = a.gamma;
    config.lambda_t = a.lambda_t;
    config.lambda_r_factors = a.factors;
    config.trials = a.trials;
    config.master_seed = a.seed;
    if (a.base_lambda_r > 0.0) config.base_lambda_r = a.base_lambda_r;
    config.topology = parse_topology(a.topology);
    config.limits.max_expected_nodes = a.max_nodes;
    config.limits.enforce = !a.no_budget_check;
    config.keep_per_trial = !a.per_trial_path.empty();
    return config;
}

MetaList simulate_inputs(const SimulateArgs& a, double resolved_base, bool with_model) {
    MetaList inputs;
    if (with_model) inputs.emplace_back("model", a.model);
    inputs.emplace_back("d", fmt12(a.d));
    inputs.emplace_back("gamma", fmt12(a.gamma));
    inputs.emplace_back("lambda_t", fmt12(a.lambda_t));
    inputs.emplace_back("factors", join_factors(a.factors));
    inputs.emplace_back("trials", std::to_string(a.trials));
    inputs.emplace_back("seed", std::to_string(a.seed));
    inputs.emplace_back("base_lambda_r", fmt12(resolved_base));
    inputs.emplace_back("topology", a.topology);
    inputs.emplace_back("max_nodes", fmt12(a.max_nodes));
    return inputs;
}

json records_to_json(const std::vector<cfmid::ExperimentRecord>& records) {
    json rows = json::array();
    for (const auto& r : records) {
        json row;
        row["model"] = cfmid::to_string(r.model);
        row["d"] = round12(r.d);
        row["gamma"] = round12(r.gamma);
        row["lambda_t"] = round12(r.lambda_t);
        row["lambda_r"] = round12(r.lambda_r);
        row["factor"] = round12(r.factor);
        row["trials"] = r.trials;
        row["r_id"] = round12(r.r_id);
        row["r_id_ci_lo"] = round12(r.r_id_ci_lo);
        row["r_id_ci_hi"] = round12(r.r_id_ci_hi);
        row["r_id_ue_mean"] = round12(r.r_id_ue_mean);
        row["r_id_ue_std"] = round12(r.r_id_ue_std);
        row["pre_removed_ue_deg0"] = round12(r.pre_removed_ue_deg0);
        row["pre_removed_ue_deg1"] = round12(r.pre_removed_ue_deg1);
        row["pre_removed_ap_deg0"] = round12(r.pre_removed_ap_deg0);
        row["seed"] = r.master_seed;
        rows.push_back(std::move(row));
    }
    return rows;
}

void maybe_dump_first_trial(const SimulateArgs& a, const cfmid::ExperimentConfig& config) {
    if (a.dump_graph_path.empty() && a.dump_deployment_path.empty()) return;
    const cfmid::GraphModel model = parse_model(a.model);
    if (!a.dump_deployment_path.empty() && model != cfmid::GraphModel::geometric)
        throw CLI::ValidationError("--dump-deployment", "only meaningful for the geometric model");

    cfmid::NetworkParams params;
    params.lambda_t_groups = {config.lambda_t};
    params.lambda_r = config.lambda_r_factors.at(0) * cfmid::resolve_base_lambda_r(config);
    params.gamma = config.gamma;
    params.d = config.d;
    params.t_p = 1;
    const std::uint64_t seed = cfmid::SeedSpec{config.master_seed}.trial_seed(0);

    if (model == cfmid::GraphModel::geometric) {
        const cfmid::Deployment dep =
            cfmid::sample_deployment(params, seed, config.topology, config.limits);
        if (!a.dump_deployment_path.empty()) {
            std::ofstream f(a.dump_deployment_path);
            if (!f) throw std::runtime_error("cannot open " + a.dump_deployment_path);
            cfmid::write_deployment_csv(dep, f);
        }
        if (!a.dump_graph_path.empty()) {
            const cfmid::BipartiteGraph g = cfmid::from_geometric(dep, params.gamma, 0);
            std::ofstream f(a.dump_graph_path);
            if (!f) throw std::runtime_error("cannot open " + a.dump_graph_path);
            cfmid::write_edge_list(g, f);
        }
    } else if (!a.dump_graph_path.empty()) {
        const cfmid::BipartiteGraph g = cfmid::from_independent(params, 0, seed, config.limits);
        std::ofstream f(a.dump_graph_path);
        if (!f) throw std::runtime_error("cannot open " + a.dump_graph_path);
        cfmid::write_edge_list(g, f);
    }
}

int run_simulate(SimulateArgs& a) {
    cfmid::ExperimentConfig config = make_config(a);
    config.model = parse_model(a.model);
    const double resolved_base = cfmid::resolve_base_lambda_r(config);
    config.base_lambda_r = resolved_base;

    maybe_dump_first_trial(a, config);
    const std::vector<cfmid::ExperimentRecord> records = cfmid::run_sweep(config);

    if (!a.per_trial_path.empty()) {
        std::ofstream f(a.per_trial_path);
        if (!f) throw std::runtime_error("cannot open " + a.per_trial_path);
        cfmid::write_per_trial_csv(records, f);
    }

    const MetaList inputs = simulate_inputs(a, resolved_base, true);
    std::ostream& os = a.out.open();
    if (a.format == "json") {
        emit_json(os, "simulate", inputs, json{{"records", records_to_json(records)}}, a.seed);
    } else {
        write_meta_csv(os, "simulate", inputs);
        cfmid::write_records_csv(records, os);
    }
    return 0;
}

int run_compare(SimulateArgs& a) {
    cfmid::ExperimentConfig config = make_config(a);
    const double resolved_base = cfmid::resolve_base_lambda_r(config);
    config.base_lambda_r = resolved_base;
    const cfmid::ModelComparison cmp = cfmid::compare_models(config);

    if (!a.per_trial_path.empty()) {
        std::ofstream f(a.per_trial_path);
        if (!f) throw std::runtime_error("cannot open " + a.per_trial_path);
        std::vector<cfmid::ExperimentRecord> all = cmp.geometric;
        all.insert(all.end(), cmp.independent.begin(), cmp.independent.end());
        cfmid::write_per_trial_csv(all, f);
    }

    const MetaList inputs = simulate_inputs(a, resolved_base, false);
    std::ostream& os = a.out.open();
    if (a.format == "json") {
        json out;
        out["geometric"] = records_to_json(cmp.geometric);
        out["independent"] = records_to_json(cmp.independent);
        emit_json(os, "compare", inputs, std::move(out), a.seed);
    } else {
        write_meta_csv(os, "compare", inputs);
        cfmid::write_records_csv(cmp.geometric, os, true);
        cfmid::write_records_csv(cmp.independent, os, false);
    }
    return 0;
}

// --- oracle-check (hidden) ------------------------------------------------------

struct OracleArgs {
    int instances = 100;
    std::uint64_t seed = 2024;
    int max_ue = 6;
    int max_ap = 12;
    std::string format = "json";
    OutputTarget out;
};

int run_oracle_check(OracleArgs& a) {
    std::mt19937_64 rng(a.seed);
    int empty_core = 0, nonempty_core = 0, degenerate = 0;
    int deficient_empty_core = 0, deficient_with_core = 0, unexplained = 0;
    for (int i = 0; i < a.instances; ++i) {
        std::uniform_int_distribution<int> ue_dist(1, a.max_ue), ap_dist(2, a.max_ap);
        std::uniform_real_distribution<double> p_dist(0.15, 0.55);
        const int n_ue = ue_dist(rng), n_ap = ap_dist(rng);
        const double p = p_dist(rng);
        std::vector<std::pair<int, int>> edges;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int l = 0; l < n_ap; ++l)
            for (int k = 0; k < n_ue; ++k)
                if (unit(rng) < p) edges.emplace_back(l, k);
        cfmid::BipartiteGraph g = cfmid::BipartiteGraph::from_edges(n_ap, n_ue, edges);
        cfmid::preprocess(g);
        cfmid::BipartiteGraph peeled = g;
        const cfmid::PeelingResult res = cfmid::peel(peeled);
        if (g.alive_ue_count() == 0 || g.alive_edge_count() == 0) {
            ++degenerate;
            continue;
        }
        const int k_alive = static_cast<int>(g.alive_ue_count());
        const cfmid::BilinearInstance inst = cfmid::build_instance(g, k_alive + 2, rng());
        const cfmid::RankVerdict rank = cfmid::local_identifiability(inst);
        if (res.verdict) {
            ++empty_core;
            if (!rank.full_rank) {
                // an empty core with a rank defect means a shared-pilot
                // mixing ambiguity (nested UE neighborhoods); anything the
                // mixing dimension cannot account for is a genuine bug
                ++deficient_empty_core;
                if (rank.defect != cfmid::pilot_mixing_ambiguity(inst)) ++unexplained;
            }
        } else {
            ++nonempty_core;
            if (!rank.full_rank) ++deficient_with_core;
        }
    }
    MetaList inputs = {{"instances", std::to_string(a.instances)},
                       {"seed", std::to_string(a.seed)},
                       {"max_ue", std::to_string(a.max_ue)},
                       {"max_ap", std::to_string(a.max_ap)}};
    json out;
    out["empty_core"] = empty_core;
    out["nonempty_core"] = nonempty_core;
    out["degenerate"] = degenerate;
    out["deficient_empty_core"] = deficient_empty_core;
    out["deficient_with_nonempty_core"] = deficient_with_core;
    out["unexplained_defects"] = unexplained;
    emit_json(a.out.open(), "oracle-check", inputs, std::move(out), a.seed);
    return unexplained == 0 ? 0 : 1;
}

void add_common(CLI::App* cmd, std::string& format, OutputTarget& out,
                const std::string& default_format) {
    format = default_format;
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", out.path, "output file path, - for stdout")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"identifiability analysis for PPP-deployed cell-free massive MIMO networks"};
    app.require_subcommand(1);

    DeTraceArgs de;
    auto* de_cmd = app.add_subcommand("de-trace", "density-evolution iterates for one parameter point");
    de_cmd->add_option("--lambda-t", de.lambda_t, "UE intensity of the pilot group (1/m^2)")->required();
    de_cmd->add_option("--lambda-r", de.lambda_r, "AP intensity (1/m^2)")->required();
    de_cmd->add_option("--gamma", de.gamma, "connectivity radius (m)")->required();
    de_cmd->add_option("--model", de.model, "exact or approx")->capture_default_str();
    de_cmd->add_option("--tol", de.tol, "convergence tolerance on |dz|")->capture_default_str();
    de_cmd->add_option("--max-iter", de.max_iter, "iteration cap")->capture_default_str();
    add_common(de_cmd, de.format, de.out, "csv");

    ClassifyArgs cl;
    auto* cl_cmd = app.add_subcommand("classify", "fixed-point classification (iteration-free for the exact model)");
    cl_cmd->add_option("--lambda-t", cl.lambda_t)->required();
    cl_cmd->add_option("--lambda-r", cl.lambda_r)->required();
    cl_cmd->add_option("--gamma", cl.gamma)->required();
    cl_cmd->add_option("--model", cl.model)->capture_default_str();
    cl_cmd->add_option("--grid-points", cl.grid_points)->capture_default_str();
    add_common(cl_cmd, cl.format, cl.out, "json");

    ThresholdArgs th;
    auto* th_cmd = app.add_subcommand("threshold", "closed-form critical AP density for one UE intensity");
    th_cmd->add_option("--lambda-t", th.lambda_t)->required();
    th_cmd->add_option("--gamma", th.gamma)->required();
    add_common(th_cmd, th.format, th.out, "json");

    RegionArgs rg;
    auto* rg_cmd = app.add_subcommand("region", "identifiability-region curve lambda_R*(lambda_T)");
    rg_cmd->add_option("--gamma", rg.gamma)->required();
    rg_cmd->add_option("--lambda-t-min", rg.lambda_t_min)->required();
    rg_cmd->add_option("--lambda-t-max", rg.lambda_t_max)->required();
    rg_cmd->add_option("--steps", rg.steps)->capture_default_str();
    add_common(rg_cmd, rg.format, rg.out, "csv");

    PilotsArgs pl;
    auto* pl_cmd = app.add_subcommand("pilots", "minimum pilot count for identifiability under an equal split");
    pl_cmd->add_option("--lambda-t-total", pl.lambda_t_total)->required();
    pl_cmd->add_option("--lambda-r", pl.lambda_r)->required();
    pl_cmd->add_option("--gamma", pl.gamma)->required();
    add_common(pl_cmd, pl.format, pl.out, "json");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo sweep of lambda_R = factor * base");
    sim_cmd->add_option("--d", sim.d)->capture_default_str();
    sim_cmd->add_option("--gamma", sim.gamma)->capture_default_str();
    sim_cmd->add_option("--lambda-t", sim.lambda_t)->capture_default_str();
    sim_cmd->add_option("--factors", sim.factors)->delimiter(',')->capture_default_str();
    sim_cmd->add_option("--model", sim.model, "geometric or independent")->capture_default_str();
    sim_cmd->add_option("--trials", sim.trials)->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
    sim_cmd->add_option("--base-lambda-r", sim.base_lambda_r,
                        "sweep base; default is the closed-form lambda_R*");
    sim_cmd->add_option("--topology", sim.topology)->capture_default_str();
    sim_cmd->add_option("--max-nodes", sim.max_nodes)->capture_default_str();
    sim_cmd->add_flag("--no-budget-check", sim.no_budget_check);
    sim_cmd->add_option("--per-trial", sim.per_trial_path, "write per-trial CSV here");
    sim_cmd->add_option("--dump-graph", sim.dump_graph_path, "write the first trial's edge list here");
    sim_cmd->add_option("--dump-deployment", sim.dump_deployment_path,
                        "write the first trial's deployment CSV here (geometric)");
    add_common(sim_cmd, sim.format, sim.out, "csv");

    SimulateArgs cmp;
    auto* cmp_cmd = app.add_subcommand("compare", "paired geometric vs independent sweep");
    cmp_cmd->add_option("--d", cmp.d)->capture_default_str();
    cmp_cmd->add_option("--gamma", cmp.gamma)->capture_default_str();
    cmp_cmd->add_option("--lambda-t", cmp.lambda_t)->capture_default_str();
    cmp_cmd->add_option("--factors", cmp.factors)->delimiter(',')->capture_default_str();
    cmp_cmd->add_option("--trials", cmp.trials)->capture_default_str();
    cmp_cmd->add_option("--seed", cmp.seed)->capture_default_str();
    cmp_cmd->add_option("--base-lambda-r", cmp.base_lambda_r);
    cmp_cmd->add_option("--topology", cmp.topology)->capture_default_str();
    cmp_cmd->add_option("--max-nodes", cmp.max_nodes)->capture_default_str();
    cmp_cmd->add_flag("--no-budget-check", cmp.no_budget_check);
    cmp_cmd->add_option("--per-trial", cmp.per_trial_path);
    add_common(cmp_cmd, cmp.format, cmp.out, "csv");

    OracleArgs oc;
    auto* oc_cmd = app.add_subcommand("oracle-check",
                                      "bilinear-system rank check on random tiny instances");
    oc_cmd->group("");  // hidden
    oc_cmd->add_option("--instances", oc.instances)->capture_default_str();
    oc_cmd->add_option("--seed", oc.seed)->capture_default_str();
    oc_cmd->add_option("--max-ue", oc.max_ue)->capture_default_str();
    oc_cmd->add_option("--max-ap", oc.max_ap)->capture_default_str();
    add_common(oc_cmd, oc.format, oc.out, "json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (de_cmd->parsed()) return run_de_trace(de);
        if (cl_cmd->parsed()) return run_classify(cl);
        if (th_cmd->parsed()) return run_threshold(th);
        if (rg_cmd->parsed()) return run_region(rg);
        if (pl_cmd->parsed()) return run_pilots(pl);
        if (sim_cmd->parsed()) return run_simulate(sim);
        if (cmp_cmd->parsed()) return run_compare(cmp);
        if (oc_cmd->parsed()) return run_oracle_check(oc);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
