#ifndef BARBF_EGO_HPP
#define BARBF_EGO_HPP

#include "barbf/acquisition.hpp"
#include "barbf/common.hpp"

#include <Eigen/Cholesky>

#include <cstdint>

namespace barbf {

/// Ordinary kriging model: constant mean μ, process variance σ² and
/// correlation exp(-Σ_j θ_j (x_j - x'_j)²) plus a diagonal nugget.
struct GpModel {
  Eigen::VectorXd theta;
  double mean = 0.0;
  double process_variance = 1.0;
  double nugget = 1e-8;
  double log_likelihood = 0.0;
  PointSet points;
  Eigen::VectorXd y;
  Eigen::LLT<Eigen::MatrixXd> chol;
  /// R⁻¹(y - 1μ).
  Eigen::VectorXd alpha;
  /// R⁻¹1.
  Eigen::VectorXd rinv_one;

  struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
  };

  /// Kriging mean and variance, including the term for estimating μ.
  Prediction predict(const Point& x) const;
};

struct EgoOptions {
  int starts = 10;
  double nugget = 1e-8;
  double max_nugget = 1e-4;
  double log10_theta_lo = -3.0;
  double log10_theta_hi = 4.0;
  int max_iterations = 400;
  std::uint64_t seed = 0;
};

/// Concentrated log-likelihood -N/2 log σ̂² - 1/2 log|R| at θ = 10^log10_theta.
/// Returns -infinity when R stays indefinite up to the largest nugget.
double gp_profile_loglik(const PointSet& points, const Eigen::VectorXd& y, const Eigen::VectorXd& log10_theta,
                         const EgoOptions& options = {});

/// Builds the model at fixed θ, escalating the nugget ×10 up to options.max_nugget.
/// Throws std::runtime_error if R never becomes positive definite.
GpModel gp_build(const PointSet& points, const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
                 const EgoOptions& options = {});

/// Multistart Nelder–Mead over log10 θ within the bounds; the first start is the
/// box center, the rest are uniform draws seeded by options.seed.
GpModel ego_fit(const PointSet& points, const Eigen::VectorXd& y, const EgoOptions& options = {});

/// Feasible candidate with the largest closed-form EI; ties go to the earliest.
Selection ego_select(const PointSet& candidates, const GpModel& gp, const PointSet& explored, double f_max);

}  // namespace barbf

#endif  // BARBF_EGO_HPP
