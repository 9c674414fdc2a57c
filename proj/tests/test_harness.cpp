#include "barbf/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

using namespace barbf;

namespace {

std::vector<double> vector60() {
  std::vector<double> v;
  for (int k = 1; k <= 60; ++k) v.push_back(((k * 37) % 61) / 7.0 + std::sin(k));
  return v;
}

RunConfig small_gmsrbf() {
  RunConfig cfg;
  cfg.problem = "branin";
  cfg.method = Method::gmsrbf;
  cfg.lhd_restarts = 5;
  cfg.n_max = 26;
  return cfg;
}

}  // namespace

TEST_CASE("summary of 1..5") {
  const ReplicationSummary s = summarize({1, 2, 3, 4, 5}, 5.0);
  CHECK(s.median == 3.0);
  CHECK(s.mean == 3.0);
  CHECK(s.hits == 1);
  CHECK(s.q1 == 2.0);
  CHECK(s.q3 == 4.0);
}

TEST_CASE("identical replications have zero spread") {
  const ReplicationSummary s = summarize({0.7, 0.7, 0.7}, std::nullopt);
  CHECK(s.std == 0.0);
  CHECK(s.hits == 0);
  CHECK_THROWS_AS(summarize({}, std::nullopt), std::invalid_argument);
}

TEST_CASE("quantiles of a fixed 60-vector match the scripted routine") {
  const ReplicationSummary s = summarize(vector60(), std::nullopt);
  CHECK(s.q05 == doctest::Approx(0.22152844476947664).epsilon(1e-12));
  CHECK(s.q1 == doctest::Approx(2.4590014070094623).epsilon(1e-12));
  CHECK(s.median == doctest::Approx(4.4456708719429656).epsilon(1e-12));
  CHECK(s.q3 == doctest::Approx(6.3694421628726108).epsilon(1e-12));
  CHECK(s.q95 == doctest::Approx(8.4349797516746534).epsilon(1e-12));
  CHECK(s.mean == doctest::Approx(4.3843850018700214).epsilon(1e-12));
  CHECK(s.std == doctest::Approx(2.5889653767945564).epsilon(1e-12));
}

TEST_CASE("hit tolerance") {
  const ReplicationSummary s = summarize({1.0, 1.0 - 5e-5, 1.0 - 2e-4}, 1.0);
  CHECK(s.hits == 2);
}

TEST_CASE("quantile curves") {
  const QuantileCurves c = quantile_curves({{1, 2, 3}, {2, 2, 4}, {0, 3, 3}});
  REQUIRE(c.size() == 3);
  CHECK(c.mean[0] == 1.0);
  CHECK(c.mean[2] == doctest::Approx(10.0 / 3.0));
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(c.q05[t] <= c.mean[t]);
    CHECK(c.mean[t] <= c.q95[t]);
  }
  CHECK(quantile_curves({}).size() == 0);
  CHECK_THROWS_AS(quantile_curves({{1, 2}, {1}}), std::invalid_argument);
  std::ostringstream out;
  write_curves_csv(out, QuantileCurves{});
  CHECK(out.str() == "iteration,mean,q05,q95\n");
}

TEST_CASE("replication seeds differ per index") {
  CHECK(replication_seed(1, 0) != replication_seed(1, 1));
  CHECK(replication_seed(1, 0) != replication_seed(2, 0));
  CHECK(replication_seed(7, 3) == replication_seed(7, 3));
}

TEST_CASE("replicate is deterministic and independent of the worker count") {
  const RunConfig cfg = small_gmsrbf();
  const ReplicationResult a = replicate(cfg, 4, 123, 1);
  const ReplicationResult b = replicate(cfg, 4, 123, 3);
  CHECK(a.summary == b.summary);
  CHECK(a.curves.mean == b.curves.mean);
  CHECK(a.summary.best_values.size() == 4);
  CHECK(a.curves.size() == 10);
  CHECK(a.curves.mean.back() == doctest::Approx(a.summary.mean).epsilon(1e-15));
  REQUIRE(a.summary.optimum.has_value());
  CHECK(*a.summary.optimum == doctest::Approx(1.0472806521477387));
  CHECK(a.summary.q05 <= a.summary.q1);
  CHECK(a.summary.q1 <= a.summary.median);
  CHECK(a.summary.median <= a.summary.q3);
  CHECK(a.summary.q3 <= a.summary.q95);
  CHECK(a.summary.hits <= 4);
}

TEST_CASE("failed replications are reported and excluded") {
  TestProblem pb = make_problem("branin");
  auto calls = std::make_shared<int>(0);
  pb.objective = [calls](const Point& x) {
    ++*calls;
    if (*calls == 30) throw std::runtime_error("simulated failure");
    return eval_branin(x);
  };
  RunConfig cfg = small_gmsrbf();
  const ReplicationResult r = replicate(cfg, 6, 5, 1);
  const ReplicationResult f = replicate(cfg, pb, 6, 5, 1);
  REQUIRE(f.summary.failed == std::vector<int>{1});
  CHECK(f.summary.failures.front().find("simulated failure") != std::string::npos);
  CHECK(f.summary.best_values.size() == 5);
  CHECK(f.traces.size() == 5);
  CHECK(r.summary.failed.empty());
  CHECK(f.summary.best_values.front() == r.summary.best_values.front());
  CHECK(f.summary.best_values.back() == r.summary.best_values.back());
}

TEST_CASE("summary JSON round-trip and export") {
  ReplicationSummary s = summarize(vector60(), 0.5);
  s.problem = "branin";
  s.method = "barbf";
  s.reps = 61;
  s.base_seed = 18446744073709551615ULL;
  s.failed = {3};
  s.failures = {"boom"};
  std::stringstream io;
  write_summary_json(io, s);
  CHECK(parse_summary_json(io) == s);

  const auto dir = std::filesystem::temp_directory_path() / "barbf_harness_test";
  std::filesystem::remove_all(dir);
  const ReplicationResult r = replicate(small_gmsrbf(), 2, 9, 1);
  export_results(r.summary, r.curves, dir);
  std::ifstream curves(dir / "curves.csv");
  std::string line;
  int rows = -1;
  while (std::getline(curves, line)) ++rows;
  CHECK(rows == 10);
  std::ifstream js(dir / "summary.json");
  CHECK(parse_summary_json(js) == r.summary);

  std::stringstream first, second;
  write_summary_json(first, r.summary);
  write_summary_json(second, replicate(small_gmsrbf(), 2, 9, 1).summary);
  CHECK(first.str() == second.str());
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(export_results(r.summary, r.curves, "/proc/no/such/dir"), std::runtime_error);
}

TEST_CASE("config text overrides defaults") {
  ExperimentConfig cfg;
  apply_config_text(cfg, R"({"problem": "ronkkonen2", "method": "m-barbf", "reps": 7, "seed": 11,
                             "mcmc_iters": 3000, "c_slab": 12.5, "jobs": 2, "strict": true,
                             "grid_step": 0.08, "scale_mode": "per-basis", "n_max": 30})");
  CHECK(cfg.run.problem == "ronkkonen2");
  CHECK(cfg.run.method == Method::m_barbf);
  CHECK(cfg.reps == 7);
  CHECK(cfg.run.seed == 11);
  CHECK(cfg.run.chain.iterations == 3000);
  CHECK(cfg.run.hyper.c_slab == 12.5);
  CHECK(cfg.jobs == 2);
  CHECK(cfg.strict);
  CHECK(cfg.run.grid_step == 0.08);
  CHECK(cfg.run.chain.scale_mode == ScaleMode::per_basis);
  CHECK(cfg.run.n_max == 30);
  CHECK_THROWS_AS(apply_config_text(cfg, R"({"bogus": 1})"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_text(cfg, R"({"method": "sgd"})"), std::invalid_argument);
  CHECK_THROWS_AS(load_experiment_config("/no/such/config.json"), std::runtime_error);
}
