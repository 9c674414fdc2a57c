#ifndef BARBF_RBF_MODEL_HPP
#define BARBF_RBF_MODEL_HPP

#include "barbf/common.hpp"

#include <optional>
#include <span>
#include <vector>

namespace barbf {

/// Gaussian radial basis r(x; μ, s) = exp(-s² ‖x - μ‖²).
struct RbfBasis {
  Point center;
  double scale = 1.0;
};

double rbf_eval(const Point& x, const RbfBasis& basis);

/// One joint draw of the surrogate parameters. Bases are stored column-wise:
/// row i of `centers` and entry i of `scales` describe basis i.
struct SurrogateState {
  Eigen::VectorXd beta;
  Eigen::VectorXi gamma;
  double sigma2 = 1.0;
  PointSet centers;
  Eigen::VectorXd scales;

  Index size() const { return beta.size(); }
  RbfBasis basis(Index i) const { return {centers.row(i).transpose(), scales[i]}; }
  /// Throws std::invalid_argument if lengths disagree, σ² <= 0 or any scale <= 0.
  void validate() const;
};

/// Retained posterior draws plus the centering constant ȳ.
struct PosteriorEnsemble {
  std::vector<SurrogateState> states;
  double y_mean = 0.0;

  Index size() const { return static_cast<Index>(states.size()); }
};

/// D(i, j) = r(x_i; μ_j, s_j).
Eigen::MatrixXd design_matrix(const PointSet& points, const PointSet& centers, const Eigen::VectorXd& scales);
Eigen::MatrixXd design_matrix(const PointSet& points, std::span<const RbfBasis> bases);

/// Σ_i β_i r(x; μ_i, s_i), without ȳ.
double predict_sample(const Point& x, const SurrogateState& state);

/// Centered predictions of every state at every point: rows are points,
/// columns are ensemble states. Reuses basis evaluations across states that
/// share centers and scales.
Eigen::MatrixXd predict_samples(const PointSet& points, const PosteriorEnsemble& ensemble);

struct PredictionSummary {
  double mean = 0.0;
  /// Sample variance; empty when the ensemble holds a single state.
  std::optional<double> variance;
  /// 97.5% minus 2.5% empirical quantile; empty for a single state.
  std::optional<double> cib;
};

/// Mean (with ȳ added), variance and credible-interval bandwidth of the
/// posterior predictive at x.
PredictionSummary predict_summary(const Point& x, const PosteriorEnsemble& ensemble);

}  // namespace barbf

#endif  // BARBF_RBF_MODEL_HPP
