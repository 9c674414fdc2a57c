#include "barbf/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace barbf {

namespace {

constexpr std::uint64_t kLhdStream = 0x4c48445f53454544ULL;

using Levels = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

Levels random_levels(int n, int p, Rng& rng) {
  Levels levels(n, p);
  std::vector<std::int64_t> perm(static_cast<std::size_t>(n));
  for (int k = 0; k < p; ++k) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < n; ++i) levels(i, k) = perm[static_cast<std::size_t>(i)];
  }
  return levels;
}

PointSet levels_to_points(const Levels& levels) {
  const double n = static_cast<double>(levels.rows());
  return (levels.cast<double>().array() + 0.5) / n;
}

// Squared distances between design rows in integer level units, so that ties
// in the maximin criterion are exact.
class MaximinState {
 public:
  explicit MaximinState(Levels levels) : levels_(std::move(levels)), dist_(levels_.rows(), levels_.rows()) {
    const Index n = levels_.rows();
    for (Index i = 0; i < n; ++i) {
      dist_(i, i) = 0;
      for (Index j = i + 1; j < n; ++j) {
        const std::int64_t d = (levels_.row(i) - levels_.row(j)).squaredNorm();
        dist_(i, j) = d;
        dist_(j, i) = d;
      }
    }
    refresh();
  }

  std::int64_t min_distance() const { return dmin_; }
  Index min_count() const { return count_; }
  const Levels& levels() const { return levels_; }

  // One full first-improvement pass over swaps touching a critical row.
  bool improve_once() {
    const Index n = levels_.rows();
    const Index p = levels_.cols();
    std::vector<Index> critical;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (i != j && dist_(i, j) == dmin_) {
          critical.push_back(i);
          break;
        }
      }
    }
    for (Index a : critical) {
      for (Index b = 0; b < n; ++b) {
        if (b == a) continue;
        for (Index k = 0; k < p; ++k) {
          if (try_swap(a, b, k)) return true;
        }
      }
    }
    return false;
  }

 private:
  void refresh() {
    const Index n = levels_.rows();
    dmin_ = std::numeric_limits<std::int64_t>::max();
    count_ = 0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        if (dist_(i, j) < dmin_) {
          dmin_ = dist_(i, j);
          count_ = 1;
        } else if (dist_(i, j) == dmin_) {
          ++count_;
        }
      }
    }
  }

  bool try_swap(Index a, Index b, Index k) {
    const Index n = levels_.rows();
    const std::int64_t la = levels_(a, k);
    const std::int64_t lb = levels_(b, k);
    Index crit = 0;
    std::int64_t new_min = dist_(a, b);
    Index new_at_dmin = dist_(a, b) == dmin_ ? 1 : 0;
    crit += dist_(a, b) == dmin_ ? 1 : 0;
    new_a_.resize(n);
    new_b_.resize(n);
    for (Index i = 0; i < n; ++i) {
      if (i == a || i == b) continue;
      const std::int64_t li = levels_(i, k);
      const std::int64_t da = dist_(a, i) - (la - li) * (la - li) + (lb - li) * (lb - li);
      const std::int64_t db = dist_(b, i) - (lb - li) * (lb - li) + (la - li) * (la - li);
      if (da < dmin_ || db < dmin_) return false;
      crit += (dist_(a, i) == dmin_) + (dist_(b, i) == dmin_);
      new_at_dmin += (da == dmin_) + (db == dmin_);
      new_min = std::min({new_min, da, db});
      new_a_[i] = da;
      new_b_[i] = db;
    }
    const Index rest = count_ - crit;
    const bool better = (rest == 0 && new_min > dmin_) || (rest + new_at_dmin < count_);
    if (!better) return false;

    levels_(a, k) = lb;
    levels_(b, k) = la;
    for (Index i = 0; i < n; ++i) {
      if (i == a || i == b) continue;
      dist_(a, i) = dist_(i, a) = new_a_[i];
      dist_(b, i) = dist_(i, b) = new_b_[i];
    }
    refresh();
    return true;
  }

  Levels levels_;
  Levels dist_;
  std::int64_t dmin_ = 0;
  Index count_ = 0;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> new_a_, new_b_;
};

void require_size(int n, int p) {
  if (n < 1 || p < 1) throw std::invalid_argument("LHD: require n >= 1 and p >= 1");
}

}  // namespace

Design random_lhd(int n, int p, Rng& rng) {
  require_size(n, p);
  return Design{levels_to_points(random_levels(n, p, rng))};
}

Design maximin_lhd(int n, int p, std::uint64_t seed, const LhdOptions& options) {
  require_size(n, p);
  if (options.restarts < 1) throw std::invalid_argument("LHD: restarts must be positive");
  if (n == 1) return Design{PointSet::Constant(1, p, 0.5)};

  std::optional<MaximinState> best;
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(derive_seed(seed, kLhdStream, static_cast<std::uint64_t>(r)));
    MaximinState state(random_levels(n, p, rng));
    while (state.improve_once()) {
    }
    if (!best || state.min_distance() > best->min_distance() ||
        (state.min_distance() == best->min_distance() && state.min_count() < best->min_count())) {
      best = std::move(state);
    }
  }
  return Design{levels_to_points(best->levels())};
}

double min_pairwise_distance(const PointSet& points) {
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = i + 1; j < points.rows(); ++j) {
      best = std::min(best, (points.row(i) - points.row(j)).squaredNorm());
    }
  }
  return std::sqrt(best);
}

bool has_latin_property(const PointSet& points) {
  const Index n = points.rows();
  for (Index k = 0; k < points.cols(); ++k) {
    std::vector<bool> hit(static_cast<std::size_t>(n), false);
    for (Index i = 0; i < n; ++i) {
      const double u = points(i, k);
      if (u < 0.0 || u > 1.0) return false;
      const auto bin = std::min<Index>(static_cast<Index>(std::floor(u * static_cast<double>(n))), n - 1);
      if (hit[static_cast<std::size_t>(bin)]) return false;
      hit[static_cast<std::size_t>(bin)] = true;
    }
  }
  return true;
}

PointSet scale_to_region(const PointSet& unit_points, const Box& region) {
  if (unit_points.cols() != region.dim()) throw std::invalid_argument("scale_to_region: dimension mismatch");
  const Eigen::RowVectorXd width = (region.hi - region.lo).transpose();
  PointSet out = unit_points.array().rowwise() * width.array();
  out.rowwise() += region.lo.transpose();
  return out;
}

std::vector<Index> snap_to_grid(const PointSet& points, const CandidateGrid& grid) {
  if (points.cols() != grid.points.cols()) throw std::invalid_argument("snap_to_grid: dimension mismatch");
  if (points.rows() > grid.size()) throw std::invalid_argument("snap_to_grid: more points than grid nodes");
  std::vector<bool> taken(static_cast<std::size_t>(grid.size()), false);
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) {
    Index node = grid.nearest(points.row(i).transpose());
    if (taken[static_cast<std::size_t>(node)]) {
      const Eigen::VectorXd d2 = (grid.points.rowwise() - points.row(i)).rowwise().squaredNorm();
      double best = std::numeric_limits<double>::infinity();
      for (Index r = 0; r < grid.size(); ++r) {
        if (!taken[static_cast<std::size_t>(r)] && d2[r] < best) {
          best = d2[r];
          node = r;
        }
      }
    }
    taken[static_cast<std::size_t>(node)] = true;
    out.push_back(node);
  }
  return out;
}

void write_design_csv(std::ostream& out, const PointSet& points) {
  const auto old_prec = out.precision(17);
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = 0; j < points.cols(); ++j) {
      if (j) out << ',';
      out << points(i, j);
    }
    out << '\n';
  }
  out.precision(old_prec);
}

}  // namespace barbf
