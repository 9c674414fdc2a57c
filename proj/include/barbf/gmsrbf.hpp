#ifndef BARBF_GMSRBF_HPP
#define BARBF_GMSRBF_HPP

#include "barbf/acquisition.hpp"
#include "barbf/common.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace barbf {

/// Interpolating Gaussian RBF surrogate s_N(x) = Σ λ_i r(x; x_i, s).
struct GmsrbfModel {
  Eigen::VectorXd lambdas;
  double scale = 1.0;
  PointSet centers;

  double predict(const Point& x) const;
  Eigen::VectorXd predict(const PointSet& points) const;
};

/// Solves Φλ = F with Φ_ij = exp(-s²‖x_i - x_j‖²). Throws std::invalid_argument
/// on duplicate points; adds 1e-10·I if the factorization fails.
GmsrbfModel gmsrbf_fit(const PointSet& points, const Eigen::VectorXd& y, double scale);

/// Sum of squared leave-one-out errors via e_i = λ_i / (Φ⁻¹)_ii. Returns
/// nullopt when Φ is numerically singular for this scale.
std::optional<double> loo_cost(const PointSet& points, const Eigen::VectorXd& y, double scale);

/// 20 log-spaced scales from 0.1 to 50.
std::vector<double> default_scale_grid();

/// Scale with the smallest leave-one-out cost (ties: smallest scale).
/// Singular candidates are skipped; throws std::runtime_error if all are.
double choose_scale_loo(const PointSet& points, const Eigen::VectorXd& y, std::span<const double> grid);

/// Cyclic weights 1, 0.8, 0.6, 0.4, 0.2 for the distance criterion.
class WeightCycle {
 public:
  static constexpr std::array<double, 5> kWeights{1.0, 0.8, 0.6, 0.4, 0.2};

  double next();
  double peek() const { return kWeights[cursor_]; }
  std::size_t cursor() const { return cursor_; }

 private:
  std::size_t cursor_ = 0;
};

struct GmsrbfSelection : Selection {
  double weight = 0.0;
};

/// Advances the cycle and maximizes (1-ω)V^R + ωV^D over the feasible
/// candidates. V^R is the min-max scaled prediction (1 if constant); V^D is the
/// min-max scaled squared distance to the nearest explored point (1 if
/// constant). Ties go to the earliest feasible candidate.
GmsrbfSelection gmsrbf_select(const PointSet& candidates, const GmsrbfModel& model, const PointSet& explored,
                              WeightCycle& cycle);

}  // namespace barbf

#endif  // BARBF_GMSRBF_HPP
