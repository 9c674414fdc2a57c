#include "barbf/optimizer.hpp"

#include <doctest.h>

#include <memory>
#include <set>
#include <sstream>

using namespace barbf;

namespace {

RunConfig quick(Method m, std::uint64_t seed = 1) {
  RunConfig cfg;
  cfg.problem = "branin";
  cfg.method = m;
  cfg.chain.iterations = 400;
  cfg.lhd_restarts = 10;
  cfg.seed = seed;
  return cfg;
}

void check_invariants(const RunTrace& t) {
  REQUIRE(t.size() == static_cast<std::size_t>(t.n_max));
  std::set<std::vector<double>> seen;
  double best = -1e300;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const TraceRecord& r = t.records[k];
    best = std::max(best, r.y);
    CHECK(r.best == best);
    if (k > 0) CHECK(r.best >= t.records[k - 1].best);
    CHECK(seen.insert(std::vector<double>(r.x.data(), r.x.data() + r.x.size())).second);
    CHECK((k < static_cast<std::size_t>(t.n_min)) == (r.phase == "initial"));
  }
}

bool same_trace(const RunTrace& a, const RunTrace& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.records[k].x != b.records[k].x || a.records[k].y != b.records[k].y) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("method names round-trip") {
  for (Method m : {Method::barbf, Method::m_barbf, Method::barbf_gridfree, Method::gmsrbf, Method::ego}) {
    CHECK(parse_method(method_name(m)) == m);
  }
  CHECK_THROWS_AS(parse_method("random"), std::invalid_argument);
}

TEST_CASE("BaRBF on Branin uses exactly the budget") {
  const RunTrace t = run_optimization(quick(Method::barbf));
  CHECK(t.size() == 46);
  CHECK(t.n_min == 16);
  check_invariants(t);
  CHECK(t.best_curve().size() == 30);
  for (std::size_t k = 16; k < t.size(); ++k) CHECK(t.records[k].s_acceptance >= 0.0);
}

TEST_CASE("every method satisfies the run invariants") {
  for (Method m : {Method::m_barbf, Method::gmsrbf, Method::ego}) {
    CAPTURE(method_name(m));
    RunConfig cfg = quick(m, 4);
    cfg.n_max = 26;
    check_invariants(run_optimization(cfg));
  }
  RunConfig gf = quick(Method::barbf_gridfree, 4);
  gf.problem = "rastrigin:2";
  gf.n_min = 10;
  gf.n_max = 16;
  gf.candidates = 500;
  const RunTrace t = run_optimization(gf);
  check_invariants(t);
}

TEST_CASE("runs are deterministic under a fixed seed") {
  RunConfig cfg = quick(Method::barbf, 9);
  cfg.n_max = 22;
  const RunTrace a = run_optimization(cfg);
  const RunTrace b = run_optimization(cfg);
  CHECK(same_trace(a, b));
  std::ostringstream sa, sb;
  write_trace(sa, a);
  write_trace(sb, b);
  CHECK(sa.str() == sb.str());
  cfg.seed = 10;
  CHECK_FALSE(same_trace(a, run_optimization(cfg)));
}

TEST_CASE("all methods share the initial design") {
  std::vector<RunTrace> traces;
  for (Method m : {Method::barbf, Method::gmsrbf, Method::ego}) {
    RunConfig cfg = quick(m, 21);
    cfg.n_max = 17;
    traces.push_back(run_optimization(cfg));
  }
  for (std::size_t k = 0; k < 16; ++k) {
    CHECK(traces[0].records[k].x == traces[1].records[k].x);
    CHECK(traces[0].records[k].x == traces[2].records[k].x);
  }
}

TEST_CASE("initial design points are distinct grid nodes") {
  const TestProblem pb = make_problem("branin");
  const CandidateGrid grid = make_grid(pb.region, 0.04);
  const PointSet d = initial_design(pb, 16, 3, 10, &grid);
  std::set<Index> nodes;
  for (Index i = 0; i < d.rows(); ++i) {
    const auto idx = grid.index_of(d.row(i).transpose());
    REQUIRE(idx.has_value());
    nodes.insert(*idx);
  }
  CHECK(nodes.size() == 16);
}

TEST_CASE("G-MSRBF cycles its weights") {
  RunConfig cfg = quick(Method::gmsrbf);
  cfg.n_max = 23;
  const RunTrace t = run_optimization(cfg);
  const double expected[] = {1.0, 0.8, 0.6, 0.4, 0.2, 1.0, 0.8};
  for (int k = 0; k < 7; ++k) CHECK(t.records[16 + static_cast<std::size_t>(k)].weight == expected[k]);
}

TEST_CASE("escape step on a flat objective") {
  TestProblem flat = make_problem("branin");
  flat.name = "flat";
  flat.objective = [](const Point&) { return 0.0; };
  RunConfig cfg = quick(Method::m_barbf);
  cfg.chain.iterations = 100;
  cfg.n_max = 16 + 12;
  const RunTrace t = run_optimization(cfg, flat);
  std::string phases;
  for (std::size_t k = 16; k < t.size(); ++k) phases += t.records[k].phase == "escape" ? 'E' : 'S';
  CHECK(phases == "SSSEEESSSEEE");
  CHECK_FALSE(t.warnings.empty());
}

TEST_CASE("improvement ends an escape episode early") {
  TestProblem pb = make_problem("branin");
  auto calls = std::make_shared<int>(0);
  pb.objective = [calls](const Point&) { return ++*calls == 21 ? 1.0 : 0.0; };
  RunConfig cfg = quick(Method::m_barbf);
  cfg.chain.iterations = 100;
  cfg.n_max = 16 + 10;
  const RunTrace t = run_optimization(cfg, pb);
  std::string phases;
  for (std::size_t k = 16; k < t.size(); ++k) phases += t.records[k].phase == "escape" ? 'E' : 'S';
  CHECK(phases == "SSSEESSSEE");
}

TEST_CASE("objective failure aborts with the partial trace") {
  TestProblem pb = make_problem("branin");
  auto calls = std::make_shared<int>(0);
  pb.objective = [calls](const Point& x) {
    if (++*calls == 20) throw std::runtime_error("simulator crashed");
    return eval_branin(x);
  };
  RunConfig cfg = quick(Method::gmsrbf);
  try {
    run_optimization(cfg, pb);
    FAIL("expected RunAborted");
  } catch (const RunAborted& e) {
    CHECK(e.partial().size() == 19);
    CHECK(std::string(e.what()).find("simulator crashed") != std::string::npos);
  }
}

TEST_CASE("configuration errors") {
  RunConfig cfg = quick(Method::barbf);
  cfg.n_max = 16;
  CHECK_THROWS_AS(run_optimization(cfg), std::invalid_argument);
  cfg = quick(Method::barbf);
  cfg.problem = "rastrigin:2";
  CHECK_THROWS_AS(run_optimization(cfg), std::invalid_argument);
  cfg = quick(Method::barbf);
  cfg.chain.thin = 0;
  CHECK_THROWS_AS(run_optimization(cfg), std::invalid_argument);
}

TEST_CASE("incumbent") {
  RunTrace t;
  t.records.push_back({Eigen::VectorXd::Constant(1, 0.1), 1.0, 1.0, "initial", 0, 0, 0, 0});
  CHECK(incumbent(t).second == 1.0);
  t.records.push_back({Eigen::VectorXd::Constant(1, 0.2), 3.0, 3.0, "select", 0, 0, 0, 0});
  t.records.push_back({Eigen::VectorXd::Constant(1, 0.3), 2.0, 3.0, "select", 0, 0, 0, 0});
  t.records.push_back({Eigen::VectorXd::Constant(1, 0.4), 3.0, 3.0, "select", 0, 0, 0, 0});
  const auto [x, v] = incumbent(t);
  CHECK(v == 3.0);
  CHECK(x[0] == 0.2);
  CHECK(v == t.records.back().best);
  CHECK_THROWS_AS(incumbent(RunTrace{}), std::invalid_argument);
}

TEST_CASE("trace export has one line per evaluation") {
  RunConfig cfg = quick(Method::gmsrbf);
  cfg.n_max = 20;
  const RunTrace t = run_optimization(cfg);
  std::ostringstream out;
  write_trace(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "index,x1,x2,y,best,phase,score,weight,scale,s_acceptance");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 20);
}
