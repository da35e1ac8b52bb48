#include <doctest.h>

#include <cmath>

#include "fairshare/harness.h"
#include "fairshare/partition.h"
#include "fixtures.h"

using namespace fairshare;

namespace {

ExperimentConfig small_convergence() {
  ExperimentConfig c;
  c.generator.nodes = 30;
  c.generator.requests = 30;
  c.seeds = {0, 1};
  c.domain_counts = {1, 4};
  c.stop.max_iters = 300;
  return c;
}

ExperimentConfig small_reconfig() {
  ExperimentConfig c;
  c.mode = ExperimentMode::kReconfig;
  c.generator.nodes = 20;
  c.generator.requests = 15;
  c.seeds = {0, 1, 2};
  c.theta_grid = {0.0, 0.1, 10.0};
  return c;
}

}  // namespace

TEST_CASE("config JSON round trip and hash") {
  auto c = small_reconfig();
  c.lambda = 3.5;
  c.weight_min = 2.0;
  const auto text = config_to_json(c);
  const auto back = config_from_json(text);
  CHECK(config_to_json(back) == text);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 64);

  auto d = c;
  d.workers = 8;
  CHECK(config_hash(d) == config_hash(c));
  d.alpha = 2.0;
  CHECK(config_hash(d) != config_hash(c));
}

TEST_CASE("config defaults and errors") {
  const auto c = config_from_json("{}");
  CHECK(c.mode == ExperimentMode::kConvergence);
  CHECK(c.domain_counts == std::vector<std::size_t>{1});
  CHECK_FALSE(c.lambda.has_value());
  CHECK(c.stop.residual_threshold == 1e-2);

  CHECK_THROWS_AS(config_from_json("{"), ConfigError);
  CHECK_THROWS_AS(config_from_json("[]"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"generator": {"bogus": 1}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"mode": "other"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"alpha": 0})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"alpha": "one"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"seeds": []})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"seeds": [1, 1]})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"domain_counts": [0]})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"weight_range": [5, 1]})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"weight_range": [1]})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"theta_grid": [-1]})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"generator": {"topology": "ring"}})"), ConfigError);
}

TEST_CASE("mean and t interval") {
  // t_{0.975, 4} = 2.776445105; sd of 1..5 is sqrt(2.5).
  const auto [mean, hw] = mean_ci({1, 2, 3, 4, 5});
  CHECK(mean == doctest::Approx(3.0));
  CHECK(hw == doctest::Approx(2.776445105 * std::sqrt(2.5) / std::sqrt(5.0)).epsilon(1e-8));
  const auto [m1, h1] = mean_ci({7.0});
  CHECK(m1 == 7.0);
  CHECK(std::isnan(h1));
  CHECK(mean_ci({4.0, 4.0}).second == 0.0);
}

TEST_CASE("reconfiguration counts") {
  const std::vector<double> x0{1.0, 2.0, 3.0};
  const std::vector<double> x{1.005, 2.5, 1.0};
  CHECK(reconfigured_paths(x, x0, 1e-2) == 2);
  CHECK(movement(x, x0, 1e-2) == doctest::Approx(2.5));
  CHECK(reconfigured_paths(x, x0, 1.0) == 1);
}

TEST_CASE("feasibility check reads link ids") {
  const auto inst = fairshare::testing::linear_instance();
  CHECK(allocation_feasible(inst, {0.5, 0.5, 0.5}));
  CHECK_FALSE(allocation_feasible(inst, {0.5, 0.6, 0.4}));
  CHECK_FALSE(allocation_feasible(inst, {-1e-3, 0.5, 0.5}));
  CHECK_FALSE(allocation_feasible(inst, {0.5, 0.5}));
}

TEST_CASE("convergence study") {
  const auto config = small_convergence();
  const auto study = run_convergence(config);
  REQUIRE(study.cells.size() == 4);
  CHECK(study.cells[0].domains == 1);
  CHECK(study.cells[3].domains == 4);
  for (const auto& cell : study.cells) {
    CHECK(cell.feasible);
    CHECK(cell.gaps.size() == cell.trace.rows.size() + 1);
    CHECK(cell.gaps[0] == 1.0);
    CHECK(cell.gaps.back() < 0.05);
  }
  // Gap curves are the same whatever the partition.
  for (std::size_t s = 0; s < 2; ++s) {
    const auto& a = study.cells[s].gaps;
    const auto& b = study.cells[2 + s].gaps;
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-9));
  }
  CHECK(study.rounds_summary.size() == 2);
  CHECK(study.gap_summary.front().mean == 1.0);
}

TEST_CASE("unsorted domain counts keep every group") {
  auto config = small_convergence();
  config.domain_counts = {4, 1};
  config.seeds = {0};
  config.stop.max_iters = 5;
  const auto study = run_convergence(config);
  CHECK(study.rounds_summary.size() == 2);
}

TEST_CASE("convergence on a 50 node network") {
  ExperimentConfig config;
  config.generator.nodes = 50;
  config.generator.requests = 100;
  config.alpha = 1.0;
  const auto study = run_convergence(config);
  REQUIRE(study.cells.size() == 1);
  CHECK(study.cells[0].trace.converged);
  CHECK(study.cells[0].gaps.back() < 0.02);
}

TEST_CASE("reconfiguration study") {
  const auto config = small_reconfig();
  const auto study = run_reconfig(config);
  REQUIRE(study.results.size() == 9);
  REQUIRE(study.summary.size() == 3);
  for (std::size_t s = 0; s < 3; ++s) {
    const auto& r0 = study.results[3 * s];
    CHECK(r0.theta == 0.0);
    CHECK(r0.n == study.unconstrained_n[s]);
    CHECK(study.results[3 * s + 2].n <= r0.n);
  }
  CHECK(study.summary[2].n_mean <= study.summary[0].n_mean);
  CHECK(study.summary[2].phi_mean <= study.summary[0].phi_mean + 1e-9);
}

TEST_CASE("overhead report") {
  const auto inst = fairshare::testing::random_instance(5);
  const auto inc = build_incidence(inst);
  SolveOptions opt;
  opt.stop.max_iters = 10;
  SUBCASE("one domain sends nothing") {
    auto s = init_state(inst, single_domain(inst, inc), 10.0);
    const auto report = overhead_report(s, solve(s, opt));
    CHECK(report.pairs.empty());
    CHECK(report.per_domain == std::vector<std::size_t>{0});
    CHECK(report.local_copies[0] == inc.num_paths() + s.domains[0].z.size());
    CHECK(report.consistent);
  }
  SUBCASE("four domains") {
    auto s = init_state(inst, partition_domains(inst, inc, 4, 5), 10.0);
    const auto report = overhead_report(s, solve(s, opt));
    CHECK(report.pairs.size() == 12);
    CHECK(report.consistent);
    std::size_t copies = 0;
    for (auto c : report.local_copies) copies += c;
    CHECK(copies == s.total_copies());
    const auto csv = overhead_csv(report);
    CHECK(csv.rfind("from_domain,to_domain,floats_per_round,closed_form\n", 0) == 0);
  }
}

TEST_CASE("reruns give byte-identical CSVs") {
  auto config = small_convergence();
  config.stop.max_iters = 60;
  const auto a = run_convergence(config);
  config.workers = 4;
  const auto b = run_convergence(config);
  CHECK(convergence_cells_csv(a) == convergence_cells_csv(b));
  CHECK(convergence_summary_csv(a) == convergence_summary_csv(b));

  auto rc = small_reconfig();
  const auto r1 = run_reconfig(rc);
  rc.workers = 3;
  const auto r2 = run_reconfig(rc);
  CHECK(reconfig_csv(r1) == reconfig_csv(r2));
  CHECK(reconfig_summary_csv(r1) == reconfig_summary_csv(r2));
}

TEST_CASE("manifest fields") {
  const auto config = small_reconfig();
  const auto text = manifest_json(config, {"reconfig.csv"});
  CHECK(text.find(config_hash(config)) != std::string::npos);
  CHECK(text.find("\"version\": \"1.0.0\"") != std::string::npos);
  CHECK(text.find("\"reconfig.csv\"") != std::string::npos);
  CHECK(text.find("\"created\"") != std::string::npos);
}
