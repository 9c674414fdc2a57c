#ifndef BARBF_TESTBED_HPP
#define BARBF_TESTBED_HPP

#include "barbf/common.hpp"

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace barbf {

// Benchmark objectives. All are maximized and defined on the unit cube;
// points outside it raise DomainError.

/// Scaled Branin on [0,1]^2 (x̄1 = 15 x1 - 5, x̄2 = 15 x2).
double eval_branin(const Point& x);

/// Ronkkonen cosine family with the Bernstein-polynomial warp, d = 2 or 3.
double eval_ronkkonen(const Point& x);

/// Ronkkonen with caller-supplied degree-4 Bernstein control values, one
/// row per coordinate, and an explicit output scale: -scale * Σ_i [cos(4πw_i) + 0.8 cos(8πw_i)].
double eval_ronkkonen(const Point& x, std::span<const std::array<double, 5>> control, double scale);

/// Four-dimensional Hartmann, negated and normalized so larger is better.
double eval_hartmann4(const Point& x);

/// Rastrigin variant maximized at (0.5, ..., 0.5) with value 0, any dimension.
double eval_rastrigin(const Point& x);

struct CandidateGrid {
  PointSet points;
  double step = 0.0;
  /// Number of lattice values along each dimension.
  Eigen::VectorXi counts;
  Box region;

  Index size() const { return points.rows(); }
  /// Index of `x` in `points` when it coincides with a lattice node (within 1e-9 of a node).
  std::optional<Index> index_of(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Lattice node nearest to `x`, with coordinates clamped to the region.
  Index nearest(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

/// Evenly spaced lattice lo, lo+step, ..., hi per dimension in lexicographic
/// order (last dimension varies fastest). Nodes are lo + k·step.
CandidateGrid make_grid(const Box& region, double step);

struct TestProblem {
  std::string name;
  Box region;
  std::function<double(const Point&)> objective;
  /// Default candidate grid spacing; empty for problems run grid-free.
  std::optional<double> grid_step;
  /// Known optimum value when the problem is run grid-free.
  std::optional<double> known_optimum;
  int default_n_min = 16;
  int default_n_max = 46;
  double default_c_slab = 25.0;

  int dim() const { return region.dim(); }
  double operator()(const Point& x) const { return objective(x); }
};

/// Looks up a problem by name: branin, ronkkonen2, ronkkonen3, hartmann4, rastrigin:<d>.
TestProblem make_problem(std::string_view name);

/// Names accepted by make_problem (rastrigin listed with its 8-dimensional default).
std::vector<std::string> problem_names();

struct GridScan {
  double max_value = 0.0;
  Index argmax = 0;
  /// Nodes whose value rounds (4 decimals) to the rounded maximum, in grid order.
  std::vector<Index> maximizers;
  Index evaluated = 0;
};

/// Exhaustive evaluation of the objective over every grid node.
GridScan scan_grid(const TestProblem& problem, const CandidateGrid& grid);

}  // namespace barbf

#endif  // BARBF_TESTBED_HPP
