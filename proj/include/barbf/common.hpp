#ifndef BARBF_COMMON_HPP
#define BARBF_COMMON_HPP

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace barbf {

using Index = Eigen::Index;
using Point = Eigen::VectorXd;
/// One point per row.
using PointSet = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Tolerance for closed-bound domain checks.
inline constexpr double kDomainTol = 1e-12;

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Box() = default;
  Box(Eigen::VectorXd lo_, Eigen::VectorXd hi_);

  static Box unit(int dim);

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x, double tol = kDomainTol) const;
  double volume() const;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Throws DomainError naming `what` when x lies outside the box.
void require_in_box(const Box& box, const Eigen::Ref<const Eigen::VectorXd>& x, const std::string& what);

/// Derives an independent stream seed from (base, stream, index) with splitmix64 finalizers.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0);

/// Row-wise squared Euclidean distances between two point sets (rows of a × rows of b).
Eigen::MatrixXd squared_distances(const PointSet& a, const PointSet& b);

}  // namespace barbf

#endif  // BARBF_COMMON_HPP
