#include "barbf/common.hpp"

#include <utility>

namespace barbf {

Box::Box(Eigen::VectorXd lo_, Eigen::VectorXd hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size() || lo.size() == 0) {
    throw std::invalid_argument("Box: bound vectors must be non-empty and of equal length");
  }
  for (Index j = 0; j < lo.size(); ++j) {
    if (!(lo[j] < hi[j])) throw std::invalid_argument("Box: require lo < hi in every dimension");
  }
}

Box Box::unit(int dim) { return Box(Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)); }

bool Box::contains(const Eigen::Ref<const Eigen::VectorXd>& x, double tol) const {
  if (x.size() != lo.size()) return false;
  for (Index j = 0; j < x.size(); ++j) {
    if (!(x[j] >= lo[j] - tol && x[j] <= hi[j] + tol)) return false;
  }
  return true;
}

double Box::volume() const { return (hi - lo).prod(); }

void require_in_box(const Box& box, const Eigen::Ref<const Eigen::VectorXd>& x, const std::string& what) {
  if (x.size() != box.lo.size()) {
    throw DomainError(what + ": expected dimension " + std::to_string(box.dim()) + ", got " +
                      std::to_string(x.size()));
  }
  if (!box.contains(x)) throw DomainError(what + ": point outside the domain");
}

namespace {
std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(base) ^ stream) + index);
}

Eigen::MatrixXd squared_distances(const PointSet& a, const PointSet& b) {
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (Index j = 0; j < b.rows(); ++j) {
    out.col(j) = (a.rowwise() - b.row(j)).rowwise().squaredNorm();
  }
  return out;
}

}  // namespace barbf
