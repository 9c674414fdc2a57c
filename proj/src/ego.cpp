#include "barbf/ego.hpp"

#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>

namespace barbf {

namespace {

constexpr double kSimplexStep = 0.5;
constexpr double kSimplexTol = 1e-4;
constexpr double kVarianceFloor = 1e-300;

Eigen::MatrixXd correlation(const PointSet& a, const PointSet& b, const Eigen::VectorXd& theta) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(a.rows(), b.rows());
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index k = 0; k < b.rows(); ++k) {
      r.col(k).array() -= theta[j] * (a.col(j).array() - b(k, j)).square();
    }
  }
  return r.array().exp();
}

// Factorizes R + nugget·I, escalating the nugget; returns the nugget used or nullopt.
std::optional<double> factorize(const Eigen::MatrixXd& r, const EgoOptions& options, Eigen::LLT<Eigen::MatrixXd>& llt) {
  for (double nugget = options.nugget; nugget <= options.max_nugget * (1.0 + 1e-9); nugget *= 10.0) {
    Eigen::MatrixXd m = r;
    m.diagonal().array() += nugget;
    llt.compute(m);
    if (llt.info() == Eigen::Success) return nugget;
  }
  return std::nullopt;
}

struct Fit {
  double mean = 0.0;
  double variance = 0.0;
  double loglik = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd alpha;
  Eigen::VectorXd rinv_one;
};

Fit concentrate(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::VectorXd& y) {
  const Index n = y.size();
  Fit f;
  f.rinv_one = llt.solve(Eigen::VectorXd::Ones(n));
  f.mean = f.rinv_one.dot(y) / f.rinv_one.sum();
  f.alpha = llt.solve((y.array() - f.mean).matrix());
  f.variance = std::max((y.array() - f.mean).matrix().dot(f.alpha) / static_cast<double>(n), kVarianceFloor);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  f.loglik = -0.5 * static_cast<double>(n) * std::log(f.variance) - 0.5 * logdet;
  return f;
}

void require_inputs(const PointSet& points, const Eigen::VectorXd& y) {
  if (points.rows() < 2) throw std::invalid_argument("ego: need at least two points");
  if (points.rows() != y.size()) throw std::invalid_argument("ego: response length mismatch");
}

struct Objective {
  const PointSet* points;
  const Eigen::VectorXd* y;
  const EgoOptions* options;
};

Eigen::VectorXd clamp_log(const Eigen::VectorXd& v, const EgoOptions& options) {
  return v.cwiseMax(options.log10_theta_lo).cwiseMin(options.log10_theta_hi);
}

double negative_loglik(const gsl_vector* v, void* params) {
  const auto* obj = static_cast<const Objective*>(params);
  Eigen::VectorXd x(static_cast<Index>(v->size));
  for (Index j = 0; j < x.size(); ++j) x[j] = gsl_vector_get(v, static_cast<std::size_t>(j));
  const double ll = gp_profile_loglik(*obj->points, *obj->y, clamp_log(x, *obj->options), *obj->options);
  return std::isfinite(ll) ? -ll : std::numeric_limits<double>::max();
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

Eigen::VectorXd nelder_mead(Objective& obj, const Eigen::VectorXd& start, double& value) {
  const auto p = static_cast<std::size_t>(start.size());
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(p));
  std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(p));
  for (std::size_t j = 0; j < p; ++j) gsl_vector_set(x.get(), j, start[static_cast<Index>(j)]);
  gsl_vector_set_all(step.get(), kSimplexStep);

  gsl_multimin_function fn{&negative_loglik, p, &obj};
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> solver(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, p));
  gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), step.get());
  for (int it = 0; it < obj.options->max_iterations; ++it) {
    if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver.get()), kSimplexTol) == GSL_SUCCESS) break;
  }
  Eigen::VectorXd best(start.size());
  for (std::size_t j = 0; j < p; ++j) best[static_cast<Index>(j)] = gsl_vector_get(solver->x, j);
  value = solver->fval;
  return clamp_log(best, *obj.options);
}

}  // namespace

GpModel::Prediction GpModel::predict(const Point& x) const {
  const Eigen::VectorXd r = correlation(x.transpose(), points, theta).transpose();
  Prediction out;
  out.mean = mean + r.dot(alpha);
  const double one_r = rinv_one.dot(r);
  const double quad = r.dot(chol.solve(r));
  const double u = 1.0 - one_r;
  out.variance = std::max(process_variance * (1.0 - quad + u * u / rinv_one.sum()), 0.0);
  return out;
}

double gp_profile_loglik(const PointSet& points, const Eigen::VectorXd& y, const Eigen::VectorXd& log10_theta,
                         const EgoOptions& options) {
  require_inputs(points, y);
  if (log10_theta.size() != points.cols()) throw std::invalid_argument("gp_profile_loglik: theta dimension mismatch");
  const Eigen::VectorXd theta = Eigen::pow(10.0, log10_theta.array()).matrix();
  Eigen::LLT<Eigen::MatrixXd> llt;
  if (!factorize(correlation(points, points, theta), options, llt)) return -std::numeric_limits<double>::infinity();
  return concentrate(llt, y).loglik;
}

GpModel gp_build(const PointSet& points, const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
                 const EgoOptions& options) {
  require_inputs(points, y);
  GpModel gp;
  const auto nugget = factorize(correlation(points, points, theta), options, gp.chol);
  if (!nugget) throw std::runtime_error("ego: correlation matrix not positive definite at the largest nugget");
  const Fit f = concentrate(gp.chol, y);
  gp.theta = theta;
  gp.nugget = *nugget;
  gp.mean = f.mean;
  gp.process_variance = f.variance;
  gp.log_likelihood = f.loglik;
  gp.points = points;
  gp.y = y;
  gp.alpha = f.alpha;
  gp.rinv_one = f.rinv_one;
  return gp;
}

GpModel ego_fit(const PointSet& points, const Eigen::VectorXd& y, const EgoOptions& options) {
  require_inputs(points, y);
  if (options.starts < 1) throw std::invalid_argument("ego_fit: need at least one start");
  const Index p = points.cols();
  Rng rng(options.seed);
  std::uniform_real_distribution<double> unif(options.log10_theta_lo, options.log10_theta_hi);
  Objective obj{&points, &y, &options};

  Eigen::VectorXd best_log;
  double best_value = std::numeric_limits<double>::infinity();
  for (int s = 0; s < options.starts; ++s) {
    Eigen::VectorXd start(p);
    if (s == 0) {
      start.setConstant(0.5 * (options.log10_theta_lo + options.log10_theta_hi));
    } else {
      for (Index j = 0; j < p; ++j) start[j] = unif(rng);
    }
    double value = 0.0;
    Eigen::VectorXd found = nelder_mead(obj, start, value);
    if (best_log.size() == 0 || value < best_value) {
      best_value = value;
      best_log = std::move(found);
    }
  }
  return gp_build(points, y, Eigen::pow(10.0, best_log.array()).matrix(), options);
}

Selection ego_select(const PointSet& candidates, const GpModel& gp, const PointSet& explored, double f_max) {
  const std::vector<Index> rows = feasible_indices(candidates, explored);
  if (rows.empty()) throw std::runtime_error("ego_select: every candidate has already been explored");
  Selection best;
  best.score = -1.0;
  for (Index row : rows) {
    const auto pred = gp.predict(candidates.row(row).transpose());
    const double ei = ei_gaussian(pred.mean, std::sqrt(pred.variance), f_max);
    if (ei > best.score) {
      best.score = ei;
      best.index = row;
    }
  }
  best.point = candidates.row(best.index).transpose();
  return best;
}

}  // namespace barbf
