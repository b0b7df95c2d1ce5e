// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Monte Carlo criteria run at desk scale (10^3 trials) with fixed
// seeds; everything analytic is checked at its stated tolerance.

#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cfmid/cfmid.hpp"
#include "support/oracles.hpp"
#include "support/stats.hpp"

using namespace cfmid;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

NetworkParams reference_params(double lambda_r) {
    NetworkParams p;
    p.lambda_t_groups = {5e-4};
    p.lambda_r = lambda_r;
    p.gamma = 70.0;
    p.d = 1000.0;
    return p;
}

// --- criterion 1: derived parameters ------------------------------------------

void criterion_1() {
    const DensityParams d = derive_density_params(reference_params(0.0036), 0);
    const DEModel m = make_exact_model(d.big_lambda_t, d.big_lambda_r);
    const bool tilde_ok = std::abs(d.big_lambda_t_tilde - 7.7) <= 0.05;
    const bool eps_ok = std::abs(m.epsilon_delta - 0.9965) <= 0.0005;
    report(1, tilde_ok && eps_ok,
           "derived parameters: Lambda_T_tilde=" + fmt(d.big_lambda_t_tilde) +
               " (7.7 +- 0.05), epsilon_delta=" + fmt(m.epsilon_delta) + " (0.9965 +- 0.0005)");
}

// --- criterion 2: density-evolution verdicts ----------------------------------

void criterion_2() {
    const auto dense = iterate(make_de_model(reference_params(0.0144), 0, DEVariant::exact));
    const auto sparse = iterate(make_de_model(reference_params(0.0036), 0, DEVariant::exact));

    // the critical density itself; 0.0072 is its two-significant-figure print
    const ThresholdResult thr =
        critical_lambda_r(derive_density_params(reference_params(0.0), 0).big_lambda_t, 70.0);
    const auto critical = iterate(make_de_model(reference_params(thr.lambda_r_crit), 0,
                                                DEVariant::exact));
    const bool near_critical =
        critical.verdict == DEVerdict::undetermined || critical.iterations_used > 10000;

    const bool ok = dense.verdict == DEVerdict::identifiable &&
                    sparse.verdict == DEVerdict::unidentifiable && near_critical;
    report(2, ok,
           std::string("density-evolution verdicts: 0.0144 -> ") + to_string(dense.verdict) +
               ", 0.0036 -> " + to_string(sparse.verdict) + " (limit " +
               fmt(sparse.converged_value) + "), critical " + fmt(thr.lambda_r_crit) + " -> " +
               to_string(critical.verdict) + " after " +
               std::to_string(critical.iterations_used) + " iterations");
}

// --- criterion 3: closed-form threshold ----------------------------------------

void criterion_3() {
    const DensityParams d = derive_density_params(reference_params(0.0), 0);
    const ThresholdResult thr = critical_lambda_r(d.big_lambda_t, 70.0);
    const bool ok = thr.exists && std::abs(thr.lambda_r_crit - 0.0072) <= 0.0002 &&
                    thr.tangency_residual_value <= 1e-9 && thr.tangency_residual_slope <= 1e-9;
    report(3, ok,
           "closed-form threshold: lambda_r_crit=" + fmt(thr.lambda_r_crit) +
               " (0.0072 +- 0.0002), tangency residuals " + fmt(thr.tangency_residual_value) +
               " / " + fmt(thr.tangency_residual_slope) + " (<= 1e-9)");
}

// --- criterion 4: existence boundary --------------------------------------------

void criterion_4() {
    const double boundary = existence_boundary();
    report(4, std::abs(boundary - 3.1606) <= 0.0005,
           "existence boundary: " + fmt(boundary) + " (3.1606 +- 0.0005)");
}

// --- criteria 5 and 6: Monte Carlo phase transition ------------------------------

struct CrossingWidth {
    bool bracketed = false;
    double width = 0.0;  // log2-factor span between the 0.05 and 0.95 crossings
};

CrossingWidth transition_width(const std::vector<ExperimentRecord>& records) {
    CrossingWidth w;
    const double lo_level = 0.05, hi_level = 0.95;
    if (records.front().r_id > lo_level || records.back().r_id < hi_level) return w;
    auto cross = [&](double level) {
        for (std::size_t i = 1; i < records.size(); ++i) {
            if (records[i].r_id >= level && records[i - 1].r_id < level) {
                const double x0 = std::log2(records[i - 1].factor);
                const double x1 = std::log2(records[i].factor);
                const double r0 = records[i - 1].r_id, r1 = records[i].r_id;
                return x0 + (level - r0) * (x1 - x0) / (r1 - r0);
            }
        }
        return std::log2(records.back().factor);
    };
    w.bracketed = true;
    w.width = cross(hi_level) - cross(lo_level);
    return w;
}

bool monotone_within_noise(const std::vector<ExperimentRecord>& records) {
    for (std::size_t i = 1; i < records.size(); ++i) {
        const double r0 = records[i - 1].r_id, r1 = records[i].r_id;
        const double n = double(records[i].trials);
        const double sigma = std::sqrt((r0 * (1.0 - r0) + r1 * (1.0 - r1)) / n) + 1.0 / n;
        if (r1 - r0 < -2.0 * sigma) return false;
    }
    return true;
}

void criteria_5_and_6() {
    ExperimentConfig config;
    config.d = 1000.0;
    config.gamma = 70.0;
    config.lambda_t = 5e-4;
    config.lambda_r_factors = {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    config.trials = 1000;
    config.master_seed = 20240901;
    const ModelComparison cmp = compare_models(config);

    double r_at_half = -1.0, r_at_two = -1.0;
    for (const auto& rec : cmp.independent) {
        if (rec.factor == 0.5) r_at_half = rec.r_id;
        if (rec.factor == 2.0) r_at_two = rec.r_id;
    }
    report(5, r_at_two >= 0.95 && r_at_half <= 0.05,
           "independent-model phase transition: r_ID=" + fmt(r_at_two) +
               " at 2*lambda_r* (>= 0.95), r_ID=" + fmt(r_at_half) +
               " at lambda_r*/2 (<= 0.05), 1000 trials");

    const CrossingWidth geo = transition_width(cmp.geometric);
    const CrossingWidth ind = transition_width(cmp.independent);
    const bool mono_geo = monotone_within_noise(cmp.geometric);
    const bool mono_ind = monotone_within_noise(cmp.independent);
    std::string detail = "geometric vs independent: ";
    if (!geo.bracketed || !ind.bracketed) {
        detail += "transition not bracketed by the factor grid (geometric endpoints r_id=" +
                  fmt(cmp.geometric.front().r_id) + ".." + fmt(cmp.geometric.back().r_id) + ")";
    } else {
        detail += "width " + fmt(geo.width) + " vs " + fmt(ind.width) +
                  " octaves (strictly wider), monotone: " + (mono_geo ? "yes" : "no") + "/" +
                  (mono_ind ? "yes" : "no");
    }
    report(6, geo.bracketed && ind.bracketed && geo.width > ind.width && mono_geo && mono_ind,
           detail);
}

// --- criterion 7: identifiability-region properties -------------------------------

void criterion_7() {
    const std::vector<double> radii = {30.0, 50.0, 70.0, 100.0};
    bool convex = true;

    for (double gamma : radii) {
        const double disc = std::numbers::pi * gamma * gamma;
        std::vector<double> grid;
        for (int i = 0; i < 40; ++i) grid.push_back((3.4 + (12.0 - 3.4) * i / 39.0) / disc);
        const auto curve = region_curve(gamma, grid);
        for (std::size_t i = 2; i < curve.size(); ++i) {
            if (!curve[i].exists) continue;
            const double dd = curve[i].lambda_r_crit - 2.0 * curve[i - 1].lambda_r_crit +
                              curve[i - 2].lambda_r_crit;
            convex = convex && dd >= -1e-9;
        }
    }

    // shared lambda_t grid across radii: existence anchored at the smallest
    bool ordered = true;
    const double disc_small = std::numbers::pi * radii.front() * radii.front();
    std::vector<double> shared;
    for (int i = 0; i < 25; ++i) shared.push_back((3.4 + (12.0 - 3.4) * i / 24.0) / disc_small);
    std::vector<std::vector<RegionPoint>> curves;
    for (double gamma : radii) curves.push_back(region_curve(gamma, shared));
    for (std::size_t g = 1; g < curves.size(); ++g)
        for (std::size_t i = 0; i < shared.size(); ++i) {
            if (!curves[g - 1][i].exists || !curves[g][i].exists) continue;
            ordered = ordered && curves[g - 1][i].lambda_r_crit < curves[g][i].lambda_r_crit;
        }

    report(7, convex && ordered,
           std::string("region curves: second differences >= -1e-9 (") +
               (convex ? "yes" : "no") + "), smaller gamma pointwise below (" +
               (ordered ? "yes" : "no") + ") for gamma in {30,50,70,100}");
}

// --- criterion 8: property suites ---------------------------------------------------

bool confluence_suite(std::string& note) {
    std::mt19937_64 rng(606060);
    for (int trial = 0; trial < 200; ++trial) {
        BipartiteGraph base = testsupport::random_bipartite(rng, 300, 200);
        preprocess(base);
        BipartiteGraph fifo = base;
        peel(fifo);
        std::vector<char> ref_ue = fifo.ue_alive, ref_ap = fifo.ap_alive;
        for (std::uint64_t discipline = 1; discipline <= 10; ++discipline) {
            BipartiteGraph shuffled = base;
            PeelOptions opt;
            opt.shuffle_seed = discipline;
            peel(shuffled, opt);
            if (shuffled.ue_alive != ref_ue || shuffled.ap_alive != ref_ap) {
                note = "confluence violated on instance " + std::to_string(trial);
                return false;
            }
        }
    }
    return true;
}

bool neighbor_suite(std::string& note) {
    std::mt19937_64 rng(515151);
    for (int trial = 0; trial < 100; ++trial) {
        NetworkParams p;
        p.d = std::uniform_real_distribution<double>(20.0, 150.0)(rng);
        p.gamma = std::uniform_real_distribution<double>(0.05 * p.d, 0.45 * p.d)(rng);
        const double nodes = std::uniform_real_distribution<double>(10.0, 600.0)(rng);
        p.lambda_r = nodes / (p.d * p.d);
        p.lambda_t_groups = {nodes / (p.d * p.d)};
        const Topology topo = trial % 2 == 0 ? Topology::flat : Topology::torus;
        const Deployment dep = sample_deployment(p, 7000 + trial, topo);
        if (neighbors_within(dep, p.gamma) != testsupport::brute_force_neighbors(dep, p.gamma)) {
            note = "grid/brute-force mismatch on instance " + std::to_string(trial);
            return false;
        }
    }
    return true;
}

bool lambert_suite(std::string& note) {
    const double branch = -std::exp(-1.0);
    for (double log_offset = -12.0; log_offset <= 6.0; log_offset += 0.125) {
        const double x = branch + std::pow(10.0, log_offset);
        const double w = lambert_w0(x);
        if (std::abs(w * std::exp(w) - x) > 1e-12 * std::max(1.0, std::abs(x))) {
            note = "lambert residual above 1e-12 at x=" + fmt(x);
            return false;
        }
    }
    return true;
}

bool degree_fit_suite(std::string& note) {
    // UE side: truncated Poisson B_k at (L_T, L_R) = (5, 8)
    {
        NetworkParams p;
        p.gamma = 20.0;
        p.d = 300.0;
        const double disc = std::numbers::pi * p.gamma * p.gamma;
        p.lambda_t_groups = {5.0 / disc};
        p.lambda_r = 8.0 / disc;
        std::vector<std::int64_t> counts;
        std::int64_t total = 0;
        const SeedSpec seeds{987654};
        for (int i = 0; total < 100000; ++i) {
            BipartiteGraph g = from_independent(p, 0, seeds.trial_seed(i));
            preprocess(g);
            const DegreeHistogram h = degree_histogram(g, Side::ue);
            if (h.counts.size() > counts.size()) counts.resize(h.counts.size(), 0);
            for (std::size_t k = 0; k < h.counts.size(); ++k) counts[k] += h.counts[k];
            total += h.total;
        }
        const double renorm = 1.0 - std::exp(-8.0) * 9.0;
        const auto gof = testsupport::chi_square_gof(
            counts, total, [&](int k) { return testsupport::poisson_pmf(k, 8.0) / renorm; }, 2);
        if (gof.p_value <= 0.001) {
            note = "B_k fit rejected, p=" + fmt(gof.p_value);
            return false;
        }
    }
    // AP side at (L_T, L_R) = (6, 12): A_k (k >= 1) and the full thinned Poisson
    {
        NetworkParams p;
        p.gamma = 20.0;
        p.d = 400.0;
        const double disc = std::numbers::pi * p.gamma * p.gamma;
        p.lambda_t_groups = {6.0 / disc};
        p.lambda_r = 12.0 / disc;
        const double tilde = derive_density_params(p, 0).big_lambda_t_tilde;
        std::vector<std::int64_t> alive_counts(1, 0), full_counts(1, 0);
        std::int64_t alive_total = 0, full_total = 0;
        const SeedSpec seeds{13579};
        for (int i = 0; full_total < 100000; ++i) {
            BipartiteGraph g = from_independent(p, 0, seeds.trial_seed(i));
            const PreprocessReport rep = preprocess(g);
            const DegreeHistogram h = degree_histogram(g, Side::ap);
            if (h.counts.size() > alive_counts.size()) alive_counts.resize(h.counts.size(), 0);
            if (h.counts.size() > full_counts.size()) full_counts.resize(h.counts.size(), 0);
            for (std::size_t k = 0; k < h.counts.size(); ++k) {
                alive_counts[k] += h.counts[k];
                full_counts[k] += h.counts[k];
            }
            alive_total += h.total;
            full_counts[0] += rep.removed_ap_deg0;
            full_total += h.total + rep.removed_ap_deg0;
        }
        const double renorm = -std::expm1(-tilde);
        const auto ak = testsupport::chi_square_gof(
            alive_counts, alive_total,
            [&](int k) { return testsupport::poisson_pmf(k, tilde) / renorm; }, 1);
        const auto full = testsupport::chi_square_gof(
            full_counts, full_total, [&](int k) { return testsupport::poisson_pmf(k, tilde); }, 0);
        if (ak.p_value <= 0.001 || full.p_value <= 0.001) {
            note = "A_k / Poisson(tilde) fit rejected, p=" + fmt(ak.p_value) + " / " +
                   fmt(full.p_value);
            return false;
        }
    }
    return true;
}

bool oracle_soundness_suite(std::string& note) {
    // literal form: empty core => full Jacobian rank, zero violations.
    // Empty-core graphs in which one UE's neighborhood is contained in
    // another's carry an exact shared-pilot mixing ambiguity, so violations
    // of the literal form do occur; each one is checked to be exactly of
    // that kind (defect == mixing dimension) and counted.
    std::mt19937_64 rng(112233);
    int empty_core = 0, violations = 0, unexplained = 0;
    while (empty_core < 100) {
        BipartiteGraph g = testsupport::random_bipartite(rng, 12, 6, 0.15, 0.55);
        preprocess(g);
        if (g.alive_ue_count() == 0 || g.alive_edge_count() == 0) continue;
        BipartiteGraph peeled = g;
        const PeelingResult res = peel(peeled);
        if (!res.verdict) continue;
        ++empty_core;
        const BilinearInstance inst =
            build_instance(g, static_cast<int>(g.alive_ue_count()) + 2, rng());
        const RankVerdict v = local_identifiability(inst);
        if (!v.full_rank) {
            ++violations;
            if (v.defect != pilot_mixing_ambiguity(inst)) ++unexplained;
        }
    }
    if (violations == 0) return true;
    note = "oracle soundness: " + std::to_string(violations) +
           "/100 empty-core instances are rank-deficient (all " +
           (unexplained == 0 ? "attributable to shared-pilot mixing ambiguities of nested UE "
                               "neighborhoods; defect equals the mixing dimension on each"
                             : "NOT attributable to mixing ambiguities") +
           ")";
    return false;
}

void criterion_8() {
    std::string note;
    bool all = true;
    std::string detail = "property suites:";

    if (confluence_suite(note)) {
        detail += " confluence ok;";
    } else {
        detail += " confluence FAILED (" + note + ");";
        all = false;
    }
    if (neighbor_suite(note)) {
        detail += " grid=brute-force ok;";
    } else {
        detail += " neighbor search FAILED (" + note + ");";
        all = false;
    }
    if (lambert_suite(note)) {
        detail += " lambert residual ok;";
    } else {
        detail += " lambert FAILED (" + note + ");";
        all = false;
    }
    if (degree_fit_suite(note)) {
        detail += " degree fits ok;";
    } else {
        detail += " degree fits FAILED (" + note + ");";
        all = false;
    }
    if (oracle_soundness_suite(note)) {
        detail += " oracle soundness ok";
    } else {
        detail += " " + note;
        all = false;
    }
    report(8, all, detail);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criteria_5_and_6();
    criterion_7();
    criterion_8();
    if (failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
