#ifndef BARBF_HARNESS_HPP
#define BARBF_HARNESS_HPP

#include "barbf/optimizer.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace barbf {

struct ReplicationSummary {
  std::string problem;
  std::string method;
  int reps = 0;
  std::uint64_t base_seed = 0;
  /// Final best value of each successful replication, in replication order.
  std::vector<double> best_values;
  /// Replication indices that failed, with their error messages.
  std::vector<int> failed;
  std::vector<std::string> failures;
  double q05 = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double q95 = 0.0;
  double mean = 0.0;
  double std = 0.0;
  int hits = 0;
  std::optional<double> optimum;
  double tolerance = 1e-4;

  bool operator==(const ReplicationSummary&) const = default;
};

/// Per-iteration mean and 5%/95% quantiles of best-so-far across replications.
struct QuantileCurves {
  std::vector<double> mean;
  std::vector<double> q05;
  std::vector<double> q95;

  std::size_t size() const { return mean.size(); }
};

struct ReplicationResult {
  ReplicationSummary summary;
  QuantileCurves curves;
  /// Successful traces in replication order.
  std::vector<RunTrace> traces;
};

/// Grid maximum for grid runs, the known optimum for grid-free problems.
std::optional<double> reference_optimum(const TestProblem& problem, const RunConfig& cfg);

/// Order statistics (type-7 quantiles), mean, sample standard deviation and
/// hit count |best - optimum| <= tolerance. Throws on an empty input.
ReplicationSummary summarize(const std::vector<double>& best_values, std::optional<double> optimum,
                             double tolerance = 1e-4);

/// Column-wise statistics of equally long best-so-far curves.
QuantileCurves quantile_curves(const std::vector<std::vector<double>>& curves);

/// Seed of replication `index` under `base_seed`.
std::uint64_t replication_seed(std::uint64_t base_seed, int index);

/// Runs `reps` independent optimizations on `jobs` worker threads. Failed
/// replications are recorded and left out of the aggregates. Output does not
/// depend on `jobs`.
ReplicationResult replicate(const RunConfig& cfg, int reps, std::uint64_t base_seed, int jobs = 1);
/// Same, with an explicit problem instead of looking up cfg.problem.
ReplicationResult replicate(const RunConfig& cfg, const TestProblem& problem, int reps, std::uint64_t base_seed,
                            int jobs = 1);

void write_summary_json(std::ostream& out, const ReplicationSummary& summary);
ReplicationSummary parse_summary_json(std::istream& in);
/// Header `iteration,mean,q05,q95` followed by one row per iteration.
void write_curves_csv(std::ostream& out, const QuantileCurves& curves);

/// Writes summary.json and curves.csv into `dir`, creating it if needed.
/// I/O failures throw std::runtime_error naming the path.
void export_results(const ReplicationSummary& summary, const QuantileCurves& curves, const std::filesystem::path& dir);

/// Settings shared by the command-line subcommands.
struct ExperimentConfig {
  RunConfig run;
  int reps = 20;
  int jobs = 1;
  bool strict = false;
  std::string out;
};

/// Reads a JSON object of settings (keys match the long flag names with
/// underscores, e.g. "mcmc_iters"); unknown keys are an error.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
void apply_config_text(ExperimentConfig& cfg, const std::string& json_text);

}  // namespace barbf

#endif  // BARBF_HARNESS_HPP
