#ifndef BARBF_OPTIMIZER_HPP
#define BARBF_OPTIMIZER_HPP

#include "barbf/common.hpp"
#include "barbf/ego.hpp"
#include "barbf/mcmc.hpp"
#include "barbf/testbed.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace barbf {

enum class Method { barbf, m_barbf, barbf_gridfree, gmsrbf, ego };

/// Command-line spelling: barbf, m-barbf, barbf-gridfree, gmsrbf, ego.
std::string_view method_name(Method m);
Method parse_method(std::string_view name);
bool is_bayesian(Method m);

/// Optional replacements for the data-driven prior defaults.
struct HyperOverrides {
  std::optional<double> c_slab;
  std::optional<double> p_spike;
  std::optional<double> a_s;
  std::optional<double> b_s;
  std::optional<double> nu0;
  std::optional<double> sigma2_mu;
  std::optional<double> sigma2_s;
  std::optional<double> omega_mix;

  void apply(HyperParams& hp) const;
};

struct RunConfig {
  std::string problem = "branin";
  Method method = Method::barbf;
  /// Problem defaults apply when unset.
  std::optional<int> n_min;
  std::optional<int> n_max;
  std::optional<double> grid_step;
  /// Uniform candidates drawn per iteration when no grid is used.
  Index candidates = 8000;
  /// Chain settings; the per-iteration seed is derived from `seed`.
  ChainConfig chain;
  HyperOverrides hyper;
  int escape_m_i = 3;
  int escape_m_t = 3;
  int lhd_restarts = 50;
  int ego_starts = 10;
  /// Start each chain's scale at the previous iteration's final value.
  bool warm_start = false;
  std::uint64_t seed = 0;
};

struct TraceRecord {
  Point x;
  double y = 0.0;
  double best = 0.0;
  /// "initial", "select" or "escape".
  std::string phase;
  /// Acquisition value of the chosen point; NaN for initial points.
  double score = 0.0;
  /// Distance weight of G-MSRBF; NaN otherwise.
  double weight = 0.0;
  /// Mean RBF scale of the fitted surrogate; NaN when not applicable.
  double scale = 0.0;
  /// Scale acceptance rate of the chain; NaN when no chain ran.
  double s_acceptance = 0.0;
};

struct RunTrace {
  std::string problem;
  Method method = Method::barbf;
  std::uint64_t seed = 0;
  int n_min = 0;
  int n_max = 0;
  std::vector<TraceRecord> records;
  std::vector<std::string> warnings;

  std::size_t size() const { return records.size(); }
  /// Best value after the initial design.
  double initial_best() const;
  /// Best-so-far value after each of the n_max - n_min sequential evaluations.
  std::vector<double> best_curve() const;
};

/// Thrown when the objective fails; carries every evaluation made so far.
class RunAborted : public std::runtime_error {
 public:
  RunAborted(const std::string& what, RunTrace partial) : std::runtime_error(what), partial_(std::move(partial)) {}
  const RunTrace& partial() const { return partial_; }

 private:
  RunTrace partial_;
};

/// Throws std::invalid_argument for inconsistent budgets or settings.
void validate(const RunConfig& cfg, const TestProblem& problem);

/// Initial maximin LHD for a run, scaled into the region and, when a grid is
/// given, snapped onto distinct grid nodes. Depends only on the seed, so
/// every method starts from the same design.
PointSet initial_design(const TestProblem& problem, int n_min, std::uint64_t seed, int restarts,
                        const CandidateGrid* grid);

RunTrace run_optimization(const RunConfig& cfg);
RunTrace run_optimization(const RunConfig& cfg, const TestProblem& problem);

/// Explored point with the largest response; ties go to the earliest.
std::pair<Point, double> incumbent(const RunTrace& trace);

/// One evaluation per line: index, coordinates, response, best so far, phase and metadata.
void write_trace(std::ostream& out, const RunTrace& trace);

}  // namespace barbf

#endif  // BARBF_OPTIMIZER_HPP
