#include "barbf/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace barbf {

namespace {

constexpr Index kChunkRows = 1024;

bool lex_less(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

double sei(std::span<const double> samples, double f_max) {
  if (samples.empty()) throw std::invalid_argument("sei: no posterior samples");
  double total = 0.0;
  for (double v : samples) total += std::max(v - f_max, 0.0);
  return total / static_cast<double>(samples.size());
}

double ei_gaussian(double mu, double s0, double f_max) {
  const double diff = mu - f_max;
  if (!(s0 > 0.0)) return std::max(diff, 0.0);
  const double z = diff / s0;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(diff * cdf + s0 * pdf, 0.0);
}

AcquisitionContext AcquisitionContext::make(PointSet candidates, PointSet explored, Eigen::VectorXd responses) {
  if (explored.rows() != responses.size()) throw std::invalid_argument("AcquisitionContext: responses length mismatch");
  if (responses.size() == 0) throw std::invalid_argument("AcquisitionContext: no explored points");
  if (candidates.cols() != explored.cols()) throw std::invalid_argument("AcquisitionContext: dimension mismatch");
  AcquisitionContext ctx;
  ctx.f_max = responses.maxCoeff();
  ctx.candidates = std::move(candidates);
  ctx.explored = std::move(explored);
  ctx.responses = std::move(responses);
  return ctx;
}

std::vector<Index> AcquisitionContext::feasible() const { return feasible_indices(candidates, explored); }

std::vector<Index> feasible_indices(const PointSet& candidates, const PointSet& explored) {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(candidates.rows()));
  for (Index r = 0; r < candidates.rows(); ++r) {
    bool hit = false;
    for (Index e = 0; e < explored.rows() && !hit; ++e) hit = candidates.row(r) == explored.row(e);
    if (!hit) out.push_back(r);
  }
  return out;
}

Eigen::VectorXd sei_scores(const PointSet& candidates, std::span<const Index> rows, const PosteriorEnsemble& ensemble,
                           double f_max) {
  if (ensemble.states.empty()) throw std::invalid_argument("sei_scores: empty ensemble");
  const Index n = static_cast<Index>(rows.size());
  const double shifted = f_max - ensemble.y_mean;
  const double inv_m = 1.0 / static_cast<double>(ensemble.size());
  Eigen::VectorXd scores(n);
  for (Index start = 0; start < n; start += kChunkRows) {
    const Index len = std::min(kChunkRows, n - start);
    PointSet chunk(len, candidates.cols());
    for (Index k = 0; k < len; ++k) chunk.row(k) = candidates.row(rows[static_cast<std::size_t>(start + k)]);
    const Eigen::MatrixXd draws = predict_samples(chunk, ensemble);
    scores.segment(start, len) = (draws.array() - shifted).cwiseMax(0.0).rowwise().sum() * inv_m;
  }
  return scores;
}

Selection select_next(const AcquisitionContext& ctx, const PosteriorEnsemble& ensemble, Rng& rng) {
  const std::vector<Index> rows = ctx.feasible();
  if (rows.empty()) throw std::runtime_error("select_next: every candidate has already been explored");
  const Eigen::VectorXd scores = sei_scores(ctx.candidates, rows, ensemble, ctx.f_max);
  const double best = scores.maxCoeff();
  std::vector<Index> ties;
  for (Index k = 0; k < scores.size(); ++k) {
    if (scores[k] == best) ties.push_back(k);
  }
  std::size_t pick = 0;
  if (ties.size() > 1) {
    std::uniform_int_distribution<std::size_t> uniform(0, ties.size() - 1);
    pick = uniform(rng);
  }
  const Index row = rows[static_cast<std::size_t>(ties[pick])];
  return {row, ctx.candidates.row(row).transpose(), best};
}

EscapeState update_escape(EscapeState es, bool improved) {
  if (improved) {
    es.c_non = 0;
    es.in_escape = false;
    es.added_this_episode = 0;
    return es;
  }
  ++es.c_non;
  if (es.in_escape) {
    if (es.added_this_episode >= es.m_t) {
      es.in_escape = false;
      es.added_this_episode = 0;
      es.c_non = 0;
    }
  } else if (es.c_non >= es.m_i) {
    es.in_escape = true;
    es.added_this_episode = 0;
  }
  return es;
}

EscapeState record_escape_point(EscapeState es) {
  if (!es.in_escape) throw std::logic_error("record_escape_point: not in escape mode");
  if (es.added_this_episode >= es.m_t) throw std::logic_error("record_escape_point: episode already complete");
  ++es.added_this_episode;
  return es;
}

Selection maximin_distance_point(const PointSet& candidates, const PointSet& explored) {
  if (candidates.cols() != explored.cols() && explored.rows() > 0) {
    throw std::invalid_argument("maximin_distance_point: dimension mismatch");
  }
  const Index n = candidates.rows();
  Eigen::VectorXd score = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  if (explored.rows() > 0) score = squared_distances(candidates, explored).rowwise().minCoeff();

  Index best = -1;
  for (Index r = 0; r < n; ++r) {
    if (score[r] <= 0.0) continue;
    if (best < 0 || score[r] > score[best] || (score[r] == score[best] && lex_less(candidates.row(r), candidates.row(best)))) {
      best = r;
    }
  }
  if (best < 0) throw std::runtime_error("maximin_distance_point: every candidate has already been explored");
  return {best, candidates.row(best).transpose(), std::sqrt(score[best])};
}

PointSet sample_candidates_uniform(const Box& region, Index count, Rng& rng) {
  if (count < 0) throw std::invalid_argument("sample_candidates_uniform: negative count");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PointSet out(count, region.dim());
  for (Index r = 0; r < count; ++r) {
    for (Index j = 0; j < out.cols(); ++j) out(r, j) = region.lo[j] + unif(rng) * (region.hi[j] - region.lo[j]);
  }
  return out;
}

void write_scores_csv(std::ostream& out, const PointSet& candidates, std::span<const Index> rows,
                      const Eigen::VectorXd& scores) {
  if (static_cast<Index>(rows.size()) != scores.size()) throw std::invalid_argument("write_scores_csv: length mismatch");
  const auto old_prec = out.precision(17);
  for (Index j = 0; j < candidates.cols(); ++j) out << 'x' << j + 1 << ',';
  out << "score\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (Index j = 0; j < candidates.cols(); ++j) out << candidates(rows[k], j) << ',';
    out << scores[static_cast<Index>(k)] << '\n';
  }
  out.precision(old_prec);
}

}  // namespace barbf
