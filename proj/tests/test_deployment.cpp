#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "cfmid/deployment.hpp"
#include "support/oracles.hpp"
#include "support/stats.hpp"

using namespace cfmid;

TEST_CASE("zero AP intensity always yields zero APs", "[deployment]") {
    NetworkParams p;
    p.lambda_t_groups = {1e-4};
    p.lambda_r = 0.0;
    p.gamma = 10.0;
    p.d = 200.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed)
        CHECK(sample_deployment(p, seed).n_ap() == 0);
}

TEST_CASE("sampled counts match the Poisson means", "[deployment]") {
    NetworkParams p;
    p.lambda_t_groups = {5e-4};
    p.lambda_r = 0.0072;
    p.gamma = 70.0;
    p.d = 1000.0;
    std::vector<double> ap_counts, ue_counts;
    const SeedSpec seeds{404};
    for (int i = 0; i < 1000; ++i) {
        const Deployment dep = sample_deployment(p, seeds.trial_seed(i));
        ap_counts.push_back(double(dep.n_ap()));
        ue_counts.push_back(double(dep.n_ue()));
        if (i == 0) {
            for (double x : dep.ap_x) REQUIRE((x >= 0.0 && x <= p.d));
            for (double y : dep.ue_y) REQUIRE((y >= 0.0 && y <= p.d));
        }
    }
    const auto ap = testsupport::mean_stderr(ap_counts);
    const auto ue = testsupport::mean_stderr(ue_counts);
    CHECK(std::abs(ap.mean - 7200.0) <= 3.0 * ap.stderr_mean);
    CHECK(std::abs(ue.mean - 500.0) <= 3.0 * ue.stderr_mean);
}

TEST_CASE("same seed reproduces the deployment bit for bit", "[deployment]") {
    NetworkParams p;
    p.lambda_t_groups = {2e-3};
    p.lambda_r = 1e-3;
    p.gamma = 15.0;
    p.d = 300.0;
    const Deployment a = sample_deployment(p, 99);
    const Deployment b = sample_deployment(p, 99);
    REQUIRE(a.ap_x == b.ap_x);
    REQUIRE(a.ue_x == b.ue_x);
    CHECK(sample_deployment(p, 100).ap_x != a.ap_x);
}

TEST_CASE("neighborhood boundary is inclusive", "[deployment]") {
    Deployment dep;
    dep.region = 10.0;
    dep.topology = Topology::flat;
    dep.ap_x = {0.0};
    dep.ap_y = {0.0};
    dep.ue_x = {0.0, 0.0};
    dep.ue_y = {1.0, std::nextafter(1.0, 2.0)};
    dep.ue_group = {0, 0};
    const auto edges = neighbors_within(dep, 1.0);
    REQUIRE(edges.size() == 1);
    CHECK(edges[0] == std::pair<int, int>{0, 0});
}

TEST_CASE("grid neighbor search equals brute force", "[deployment]") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 100; ++trial) {
        NetworkParams p;
        p.d = std::uniform_real_distribution<double>(10.0, 120.0)(rng);
        p.gamma = std::uniform_real_distribution<double>(0.05 * p.d, 0.45 * p.d)(rng);
        const double mean_nodes = std::uniform_real_distribution<double>(5.0, 400.0)(rng);
        p.lambda_r = mean_nodes / (p.d * p.d);
        p.lambda_t_groups = {mean_nodes / (p.d * p.d)};
        const Topology topo = trial % 2 == 0 ? Topology::flat : Topology::torus;
        const Deployment dep = sample_deployment(p, 1000 + trial, topo);
        CHECK(neighbors_within(dep, p.gamma) == testsupport::brute_force_neighbors(dep, p.gamma));
    }
}

TEST_CASE("probe UE degree is Poisson over the ensemble", "[deployment]") {
    // torus topology so the disc never clips the boundary
    NetworkParams p;
    p.lambda_t_groups = {};
    p.gamma = 10.0;
    p.d = 40.0;
    const double big_lambda_r = 15.0;
    p.lambda_r = big_lambda_r / (std::numbers::pi * p.gamma * p.gamma);

    std::vector<std::int64_t> counts;
    const SeedSpec seeds{777};
    const int samples = 100000;
    for (int i = 0; i < samples; ++i) {
        Deployment dep = sample_deployment(p, seeds.trial_seed(i), Topology::torus);
        dep.ue_x = {26.1};
        dep.ue_y = {14.9};
        dep.ue_group = {0};
        const int degree = static_cast<int>(neighbors_within(dep, p.gamma).size());
        if (degree >= static_cast<int>(counts.size())) counts.resize(degree + 1, 0);
        ++counts[degree];
    }
    const auto gof = testsupport::chi_square_gof(
        counts, samples, [&](int k) { return testsupport::poisson_pmf(k, big_lambda_r); }, 0);
    INFO("chi2=" << gof.chi2 << " dof=" << gof.dof << " p=" << gof.p_value);
    CHECK(gof.p_value > 0.001);
}

TEST_CASE("deployment CSV round trip", "[deployment]") {
    NetworkParams p;
    p.lambda_t_groups = {1e-3, 2e-3};
    p.t_p = 2;
    p.lambda_r = 1e-3;
    p.gamma = 10.0;
    p.d = 100.0;
    const Deployment dep = sample_deployment(p, 5);
    std::ostringstream os;
    write_deployment_csv(dep, os);
    std::istringstream is(os.str());
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "kind,x,y,group");
    int rows = 0, ue_rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        if (line.rfind("ue,", 0) == 0) ++ue_rows;
    }
    CHECK(rows == dep.n_ap() + dep.n_ue());
    CHECK(ue_rows == dep.n_ue());
}
