#include "barbf/ego.hpp"
#include "barbf/gmsrbf.hpp"
#include "barbf/testbed.hpp"

#include <doctest.h>

#include <cmath>

using namespace barbf;

namespace {

PointSet five_points() {
  PointSet x(5, 2);
  x << 0.12, 0.85, 0.47, 0.33, 0.91, 0.64, 0.28, 0.08, 0.66, 0.97;
  return x;
}

Eigen::VectorXd five_values() {
  Eigen::VectorXd y(5);
  y << 0.8, -1.3, 2.1, 0.4, -0.6;
  return y;
}

}  // namespace

TEST_CASE("interpolation weights match the scripted solve") {
  const GmsrbfModel m = gmsrbf_fit(five_points(), five_values(), 2.0);
  const double expected[] = {2.0693797842929218, -5.0601036079873287, 4.7794747533756059, 3.4251175964047214,
                             -2.8462792036144817};
  for (Index i = 0; i < 5; ++i) CHECK(m.lambdas[i] == doctest::Approx(expected[i]).epsilon(1e-10));
  for (Index i = 0; i < 5; ++i) {
    CHECK(m.predict(Point(five_points().row(i).transpose())) == doctest::Approx(five_values()[i]).epsilon(1e-6));
  }
}

TEST_CASE("single-point fit") {
  const GmsrbfModel m = gmsrbf_fit(PointSet::Constant(1, 2, 0.4), Eigen::VectorXd::Constant(1, 3.5), 1.0);
  CHECK(m.lambdas[0] == 3.5);
}

TEST_CASE("duplicate points are rejected") {
  PointSet x(2, 1);
  x << 0.3, 0.3;
  CHECK_THROWS_AS(gmsrbf_fit(x, Eigen::Vector2d(1, 2), 1.0), std::invalid_argument);
}

TEST_CASE("scale grid") {
  const auto g = default_scale_grid();
  REQUIRE(g.size() == 20);
  CHECK(g.front() == 0.1);
  CHECK(g.back() == 50.0);
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] / g[k - 1] == doctest::Approx(std::pow(500.0, 1.0 / 19)));
}

TEST_CASE("leave-one-out scale choice matches brute-force refits") {
  PointSet x(6, 1);
  x << 0.0, 0.15, 0.4, 0.55, 0.8, 1.0;
  Eigen::VectorXd y(6);
  for (Index i = 0; i < 6; ++i) y[i] = std::sin(6 * x(i, 0)) + x(i, 0);
  CHECK(*loo_cost(x, y, 3.0) == doctest::Approx(1.365396287595892).epsilon(1e-8));
  const auto grid = default_scale_grid();
  for (double s : grid) {
    const auto c = loo_cost(x, y, s);
    if (c) CHECK(*c >= 0.0);
  }
  CHECK(choose_scale_loo(x, y, grid) == doctest::Approx(1.3690156816728802).epsilon(1e-14));
  const std::vector<double> one{4.2};
  CHECK(choose_scale_loo(x, y, one) == 4.2);
  const std::vector<double> tiny{1e-4};
  CHECK_THROWS_AS(choose_scale_loo(x, y, tiny), std::runtime_error);
}

TEST_CASE("weight cycle") {
  WeightCycle c;
  const double expected[] = {1.0, 0.8, 0.6, 0.4, 0.2, 1.0, 0.8, 0.6};
  for (double w : expected) CHECK(c.next() == w);
  CHECK(c.peek() == 0.4);
}

TEST_CASE("weight one picks the farthest candidate") {
  const GmsrbfModel m = gmsrbf_fit(five_points(), five_values(), 2.0);
  const CandidateGrid grid = make_grid(Box::unit(2), 0.04);
  WeightCycle c;
  const GmsrbfSelection s = gmsrbf_select(grid.points, m, five_points(), c);
  CHECK(s.weight == 1.0);
  const Eigen::VectorXd d = squared_distances(grid.points, five_points()).rowwise().minCoeff();
  Index far = 0;
  for (Index r = 1; r < d.size(); ++r) {
    if (d[r] > d[far]) far = r;
  }
  CHECK(s.index == far);
}

TEST_CASE("constant surrogate gives a flat response score") {
  GmsrbfModel flat;
  flat.lambdas = Eigen::VectorXd::Zero(1);
  flat.centers = PointSet::Constant(1, 1, 0.5);
  flat.scale = 1.0;
  PointSet cand(3, 1);
  cand << 0.0, 0.4, 0.9;
  WeightCycle c;
  c.next();
  c.next();
  c.next();
  c.next();
  const GmsrbfSelection s = gmsrbf_select(cand, flat, flat.centers, c);
  CHECK(s.weight == 0.2);
  CHECK(s.index == 0);
  CHECK(s.score == doctest::Approx(0.8 * 1.0 + 0.2 * 1.0));
}

TEST_CASE("kriging formulas on a two-point instance") {
  PointSet x(2, 1);
  x << 0.2, 0.7;
  const Eigen::Vector2d y(1.0, -0.5);
  const GpModel gp = gp_build(x, y, Eigen::VectorXd::Constant(1, 4.0));
  CHECK(gp.mean == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(gp.process_variance == doctest::Approx(0.88986188353658857).epsilon(1e-8));
  CHECK(gp.log_likelihood == doctest::Approx(0.18939573270550003).epsilon(1e-8));
  const auto mid = gp.predict(Eigen::VectorXd::Constant(1, 0.45));
  CHECK(mid.mean == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(mid.variance == doctest::Approx(0.11242351252441489).epsilon(1e-7));
  const auto edge = gp.predict(Eigen::VectorXd::Constant(1, 1.0));
  CHECK(edge.mean == doctest::Approx(-0.48606003690569732).epsilon(1e-8));
  CHECK(edge.variance == doctest::Approx(0.5379554754533511).epsilon(1e-7));
  CHECK(gp_profile_loglik(x, y, Eigen::VectorXd::Constant(1, std::log10(4.0))) ==
        doctest::Approx(gp.log_likelihood).epsilon(1e-12));
}

TEST_CASE("fitted GP interpolates and is least certain far from data") {
  const GpModel gp = ego_fit(five_points(), five_values());
  for (Index i = 0; i < 5; ++i) {
    const auto p = gp.predict(five_points().row(i).transpose());
    CHECK(std::abs(p.mean - five_values()[i]) < 1e-4);
  }
  const CandidateGrid grid = make_grid(Box::unit(2), 0.04);
  const Eigen::VectorXd d = squared_distances(grid.points, five_points()).rowwise().minCoeff();
  Index far = 0;
  for (Index r = 1; r < d.size(); ++r) {
    if (d[r] > d[far]) far = r;
  }
  CHECK(gp.predict(five_points().row(0).transpose()).variance <= gp.predict(grid.points.row(far).transpose()).variance);
}

TEST_CASE("MLE is at least as likely as every start") {
  EgoOptions opt;
  opt.seed = 3;
  const GpModel gp = ego_fit(five_points(), five_values(), opt);
  Rng rng(opt.seed);
  std::uniform_real_distribution<double> unif(opt.log10_theta_lo, opt.log10_theta_hi);
  Eigen::VectorXd start = Eigen::VectorXd::Constant(2, 0.5 * (opt.log10_theta_lo + opt.log10_theta_hi));
  CHECK(gp.log_likelihood >= gp_profile_loglik(five_points(), five_values(), start, opt));
  for (int s = 1; s < opt.starts; ++s) {
    for (Index j = 0; j < 2; ++j) start[j] = unif(rng);
    CHECK(gp.log_likelihood >= gp_profile_loglik(five_points(), five_values(), start, opt));
  }
}

TEST_CASE("EGO selection") {
  PointSet x(2, 1);
  x << 0.2, 0.7;
  const Eigen::Vector2d y(1.0, -0.5);
  const GpModel gp = gp_build(x, y, Eigen::VectorXd::Constant(1, 4.0));
  const auto at_data = gp.predict(x.row(0).transpose());
  CHECK(ei_gaussian(at_data.mean, std::sqrt(at_data.variance), 1.0) < 1e-3);

  PointSet single(1, 1);
  single << 0.9;
  CHECK(ego_select(single, gp, x, 1.0).index == 0);
  CHECK_THROWS_AS(ego_select(x, gp, x, 1.0), std::runtime_error);

  // High mean with small spread loses to moderate mean with large spread.
  CHECK(ei_gaussian(0.9, 0.05, 1.0) == doctest::Approx(0.00042453513084148194).epsilon(1e-9));
  CHECK(ei_gaussian(0.5, 0.6, 1.0) == doctest::Approx(0.067982934764360015).epsilon(1e-9));
  CHECK(ei_gaussian(0.5, 0.6, 1.0) > ei_gaussian(0.9, 0.05, 1.0));
}
