#ifndef BARBF_DESIGN_HPP
#define BARBF_DESIGN_HPP

#include "barbf/common.hpp"
#include "barbf/testbed.hpp"

#include <cstdint>
#include <iosfwd>

namespace barbf {

/// An n-run design in [0,1]^p, one point per row.
struct Design {
  PointSet points;

  Index runs() const { return points.rows(); }
  Index dim() const { return points.cols(); }
};

struct LhdOptions {
  int restarts = 50;
};

/// Random Latin hypercube: an independent permutation per column, points at
/// bin midpoints (k + 0.5) / n.
Design random_lhd(int n, int p, Rng& rng);

/// Maximin Latin hypercube. Each restart draws a random LHD and hill-climbs
/// with within-column swaps; a swap is kept when it raises the minimum
/// pairwise distance, or keeps it and reduces the number of pairs attaining
/// it. The best design over all restarts is returned. Deterministic in `seed`.
Design maximin_lhd(int n, int p, std::uint64_t seed, const LhdOptions& options = {});

double min_pairwise_distance(const PointSet& points);

/// True when every column places exactly one point in each of the n bins of [0,1].
bool has_latin_property(const PointSet& points);

/// Maps unit-cube design points affinely into `region`.
PointSet scale_to_region(const PointSet& unit_points, const Box& region);

/// Snaps each point to its nearest grid node. A point whose node is already
/// taken moves to the nearest unoccupied node (lexicographic tie-break).
/// Returns grid indices, one per input row.
std::vector<Index> snap_to_grid(const PointSet& points, const CandidateGrid& grid);

/// Comma-separated values, one point per row, no header.
void write_design_csv(std::ostream& out, const PointSet& points);

}  // namespace barbf

#endif  // BARBF_DESIGN_HPP
