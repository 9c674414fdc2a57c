#include "barbf/rbf_model.hpp"

#include "barbf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace barbf {

double rbf_eval(const Point& x, const RbfBasis& basis) {
  return std::exp(-basis.scale * basis.scale * (x - basis.center).squaredNorm());
}

void SurrogateState::validate() const {
  const Index n = beta.size();
  if (gamma.size() != n || centers.rows() != n || scales.size() != n) {
    throw std::invalid_argument("SurrogateState: beta, gamma and bases must have equal length");
  }
  if (!(sigma2 > 0.0)) throw std::invalid_argument("SurrogateState: sigma2 must be positive");
  if (n > 0 && !(scales.minCoeff() > 0.0)) throw std::invalid_argument("SurrogateState: scales must be positive");
}

Eigen::MatrixXd design_matrix(const PointSet& points, const PointSet& centers, const Eigen::VectorXd& scales) {
  if (centers.rows() != scales.size()) throw std::invalid_argument("design_matrix: centers/scales length mismatch");
  if (points.cols() != centers.cols()) throw std::invalid_argument("design_matrix: dimension mismatch");
  Eigen::MatrixXd d = squared_distances(points, centers);
  for (Index j = 0; j < d.cols(); ++j) {
    d.col(j) = (-(scales[j] * scales[j]) * d.col(j).array()).exp();
  }
  return d;
}

Eigen::MatrixXd design_matrix(const PointSet& points, std::span<const RbfBasis> bases) {
  const Index n = static_cast<Index>(bases.size());
  PointSet centers(n, points.cols());
  Eigen::VectorXd scales(n);
  for (Index j = 0; j < n; ++j) {
    centers.row(j) = bases[static_cast<std::size_t>(j)].center.transpose();
    scales[j] = bases[static_cast<std::size_t>(j)].scale;
  }
  return design_matrix(points, centers, scales);
}

double predict_sample(const Point& x, const SurrogateState& state) {
  double total = 0.0;
  for (Index i = 0; i < state.size(); ++i) {
    const double s = state.scales[i];
    total += state.beta[i] * std::exp(-s * s * (x.transpose() - state.centers.row(i)).squaredNorm());
  }
  return total;
}

Eigen::MatrixXd predict_samples(const PointSet& points, const PosteriorEnsemble& ensemble) {
  Eigen::MatrixXd out(points.rows(), ensemble.size());
  if (ensemble.states.empty()) return out;

  const PointSet* dist_centers = nullptr;
  Eigen::MatrixXd dist;
  const Eigen::VectorXd* basis_scales = nullptr;
  Eigen::MatrixXd basis;
  for (Index m = 0; m < ensemble.size(); ++m) {
    const SurrogateState& st = ensemble.states[static_cast<std::size_t>(m)];
    bool fresh = false;
    if (dist_centers == nullptr || dist_centers->rows() != st.centers.rows() || *dist_centers != st.centers) {
      dist = squared_distances(points, st.centers);
      dist_centers = &st.centers;
      fresh = true;
    }
    if (fresh || basis_scales == nullptr || *basis_scales != st.scales) {
      basis.resize(dist.rows(), dist.cols());
      for (Index j = 0; j < dist.cols(); ++j) {
        basis.col(j) = (-(st.scales[j] * st.scales[j]) * dist.col(j).array()).exp();
      }
      basis_scales = &st.scales;
    }
    out.col(m).noalias() = basis * st.beta;
  }
  return out;
}

PredictionSummary predict_summary(const Point& x, const PosteriorEnsemble& ensemble) {
  if (ensemble.states.empty()) throw std::invalid_argument("predict_summary: empty ensemble");
  std::vector<double> draws;
  draws.reserve(ensemble.states.size());
  for (const auto& st : ensemble.states) draws.push_back(predict_sample(x, st));

  PredictionSummary out;
  out.mean = stats::mean(draws) + ensemble.y_mean;
  if (draws.size() >= 2) {
    out.variance = stats::variance(draws);
    std::sort(draws.begin(), draws.end());
    out.cib = stats::quantile_sorted(draws, 0.975) - stats::quantile_sorted(draws, 0.025);
  }
  return out;
}

}  // namespace barbf
