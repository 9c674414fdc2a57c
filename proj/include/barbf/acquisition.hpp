#ifndef BARBF_ACQUISITION_HPP
#define BARBF_ACQUISITION_HPP

#include "barbf/common.hpp"
#include "barbf/rbf_model.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace barbf {

/// Sampled expected improvement: mean over draws of max(y_m - f_max, 0).
double sei(std::span<const double> samples, double f_max);

/// Closed-form expected improvement of a N(mu, s0²) prediction over f_max.
double ei_gaussian(double mu, double s0, double f_max);

/// Candidate set together with the explored points and their responses.
struct AcquisitionContext {
  PointSet candidates;
  PointSet explored;
  Eigen::VectorXd responses;
  double f_max = 0.0;

  /// Builds a context with f_max = max(responses).
  static AcquisitionContext make(PointSet candidates, PointSet explored, Eigen::VectorXd responses);
  /// Indices of candidates that do not coincide exactly with an explored point.
  std::vector<Index> feasible() const;
};

/// Indices of rows in `candidates` that match no row of `explored` exactly.
std::vector<Index> feasible_indices(const PointSet& candidates, const PointSet& explored);

struct Selection {
  /// Row of the chosen point in the candidate set.
  Index index = 0;
  Point point;
  double score = 0.0;
};

/// SEI at each listed candidate row. Predictions stay centered; f_max is
/// shifted by the ensemble's ȳ instead.
Eigen::VectorXd sei_scores(const PointSet& candidates, std::span<const Index> rows, const PosteriorEnsemble& ensemble,
                           double f_max);

/// Maximizes SEI over the feasible candidates; exact ties are broken
/// uniformly at random with `rng`. Throws std::runtime_error if nothing is feasible.
Selection select_next(const AcquisitionContext& ctx, const PosteriorEnsemble& ensemble, Rng& rng);

/// Consecutive-non-improvement counter that drives the escape step.
struct EscapeState {
  int c_non = 0;
  int m_i = 3;
  int m_t = 3;
  bool in_escape = false;
  int added_this_episode = 0;
};

/// Improvement resets the state. Otherwise c_non grows; escape mode starts
/// when c_non reaches m_i, and ends (with c_non reset) once m_t points were added.
EscapeState update_escape(EscapeState es, bool improved);

/// Counts one escape point in the current episode.
EscapeState record_escape_point(EscapeState es);

/// Candidate maximizing the minimum distance to `explored`; ties go to the
/// lexicographically smallest candidate.
Selection maximin_distance_point(const PointSet& candidates, const PointSet& explored);

/// `count` independent uniform draws over `region`.
PointSet sample_candidates_uniform(const Box& region, Index count, Rng& rng);

/// One line per candidate: coordinates followed by the score, with a header.
void write_scores_csv(std::ostream& out, const PointSet& candidates, std::span<const Index> rows,
                      const Eigen::VectorXd& scores);

}  // namespace barbf

#endif  // BARBF_ACQUISITION_HPP
