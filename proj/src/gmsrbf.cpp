#include "barbf/gmsrbf.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace barbf {

namespace {

constexpr int kRefineSteps = 3;
constexpr double kJitter = 1e-10;
constexpr double kMinRcond = 1e-11;

Eigen::MatrixXd kernel_matrix(const PointSet& a, const PointSet& b, double scale) {
  return (-(scale * scale) * squared_distances(a, b).array()).exp();
}

void require_fit_inputs(const PointSet& points, const Eigen::VectorXd& y, double scale) {
  if (points.rows() == 0) throw std::invalid_argument("gmsrbf: no points");
  if (points.rows() != y.size()) throw std::invalid_argument("gmsrbf: response length mismatch");
  if (!(scale > 0.0)) throw std::invalid_argument("gmsrbf: scale must be positive");
}

Eigen::VectorXd min_max_scale(const Eigen::VectorXd& v) {
  const double lo = v.minCoeff();
  const double hi = v.maxCoeff();
  if (hi == lo) return Eigen::VectorXd::Ones(v.size());
  return (v.array() - lo) / (hi - lo);
}

}  // namespace

double GmsrbfModel::predict(const Point& x) const {
  const Eigen::VectorXd w = (-(scale * scale) * (centers.rowwise() - x.transpose()).rowwise().squaredNorm().array()).exp();
  return w.dot(lambdas);
}

Eigen::VectorXd GmsrbfModel::predict(const PointSet& points) const {
  return kernel_matrix(points, centers, scale) * lambdas;
}

GmsrbfModel gmsrbf_fit(const PointSet& points, const Eigen::VectorXd& y, double scale) {
  require_fit_inputs(points, y, scale);
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = i + 1; j < points.rows(); ++j) {
      if (points.row(i) == points.row(j)) throw std::invalid_argument("gmsrbf_fit: duplicate explored points");
    }
  }
  const Eigen::MatrixXd phi = kernel_matrix(points, points, scale);
  Eigen::LLT<Eigen::MatrixXd> llt(phi);
  if (llt.info() != Eigen::Success) {
    Eigen::MatrixXd jittered = phi;
    jittered.diagonal().array() += kJitter;
    llt.compute(jittered);
  }
  GmsrbfModel model;
  model.scale = scale;
  model.centers = points;
  if (llt.info() != Eigen::Success) throw std::runtime_error("gmsrbf_fit: interpolation matrix is singular");
  model.lambdas = llt.solve(y);
  // Iterative refinement against the unjittered matrix.
  for (int step = 0; step < kRefineSteps; ++step) {
    const Eigen::VectorXd residual = y - phi * model.lambdas;
    if (residual.lpNorm<Eigen::Infinity>() <= 1e-14 * std::max(1.0, y.lpNorm<Eigen::Infinity>())) break;
    model.lambdas += llt.solve(residual);
  }
  return model;
}

std::optional<double> loo_cost(const PointSet& points, const Eigen::VectorXd& y, double scale) {
  require_fit_inputs(points, y, scale);
  const Eigen::MatrixXd phi = kernel_matrix(points, points, scale);
  const Eigen::LLT<Eigen::MatrixXd> llt(phi);
  if (llt.info() != Eigen::Success || llt.rcond() < kMinRcond) return std::nullopt;
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(phi.rows(), phi.cols()));
  const Eigen::VectorXd lambdas = llt.solve(y);
  const Eigen::VectorXd errors = lambdas.array() / inv.diagonal().array();
  if (!errors.allFinite()) return std::nullopt;
  return errors.squaredNorm();
}

std::vector<double> default_scale_grid() {
  constexpr int kCount = 20;
  const double lo = std::log(0.1);
  const double hi = std::log(50.0);
  std::vector<double> grid;
  for (int k = 0; k < kCount; ++k) grid.push_back(std::exp(lo + (hi - lo) * k / (kCount - 1)));
  grid.front() = 0.1;
  grid.back() = 50.0;
  return grid;
}

double choose_scale_loo(const PointSet& points, const Eigen::VectorXd& y, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("choose_scale_loo: empty scale grid");
  std::optional<double> best_scale;
  double best_cost = std::numeric_limits<double>::infinity();
  for (double s : grid) {
    const auto cost = loo_cost(points, y, s);
    if (!cost) continue;
    if (!best_scale || *cost < best_cost || (*cost == best_cost && s < *best_scale)) {
      best_cost = *cost;
      best_scale = s;
    }
  }
  if (!best_scale) throw std::runtime_error("choose_scale_loo: interpolation matrix singular for every scale");
  return *best_scale;
}

double WeightCycle::next() {
  const double w = kWeights[cursor_];
  cursor_ = (cursor_ + 1) % kWeights.size();
  return w;
}

GmsrbfSelection gmsrbf_select(const PointSet& candidates, const GmsrbfModel& model, const PointSet& explored,
                              WeightCycle& cycle) {
  const std::vector<Index> rows = feasible_indices(candidates, explored);
  if (rows.empty()) throw std::runtime_error("gmsrbf_select: every candidate has already been explored");
  PointSet feasible(static_cast<Index>(rows.size()), candidates.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) feasible.row(static_cast<Index>(k)) = candidates.row(rows[k]);

  const Eigen::VectorXd v_r = min_max_scale(model.predict(feasible));
  const Eigen::VectorXd v_d = min_max_scale(squared_distances(feasible, explored).rowwise().minCoeff());
  const double w = cycle.next();
  const Eigen::VectorXd score = (1.0 - w) * v_r + w * v_d;

  Index best = 0;
  for (Index k = 1; k < score.size(); ++k) {
    if (score[k] > score[best]) best = k;
  }
  GmsrbfSelection out;
  out.index = rows[static_cast<std::size_t>(best)];
  out.point = candidates.row(out.index).transpose();
  out.score = score[best];
  out.weight = w;
  return out;
}

}  // namespace barbf
