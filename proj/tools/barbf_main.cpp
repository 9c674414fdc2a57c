#include "barbf/harness.hpp"
#include "barbf/optimizer.hpp"
#include "barbf/testbed.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace {

using namespace barbf;

struct Flags {
  std::string config;
  std::string problem;
  std::string method;
  int reps = 0;
  std::uint64_t seed = 0;
  double grid_step = 0.0;
  Index candidates = 0;
  int mcmc_iters = 0;
  double c_slab = 0.0;
  int n_min = 0;
  int n_max = 0;
  std::string out;
  int jobs = 1;
  bool strict = false;
};

struct Options {
  CLI::Option* problem = nullptr;
  CLI::Option* method = nullptr;
  CLI::Option* reps = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* grid_step = nullptr;
  CLI::Option* candidates = nullptr;
  CLI::Option* mcmc_iters = nullptr;
  CLI::Option* c_slab = nullptr;
  CLI::Option* n_min = nullptr;
  CLI::Option* n_max = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* jobs = nullptr;
  CLI::Option* strict = nullptr;
};

void add_run_flags(CLI::App& app, Flags& f, Options& o) {
  app.add_option("--config", f.config, "JSON settings file; flags take precedence")->check(CLI::ExistingFile);
  o.problem = app.add_option("--problem", f.problem, "branin, ronkkonen2, ronkkonen3, hartmann4, rastrigin[:d]");
  o.method = app.add_option("--method", f.method, "barbf, m-barbf, barbf-gridfree, gmsrbf, ego");
  o.seed = app.add_option("--seed", f.seed, "Master seed");
  o.grid_step = app.add_option("--grid-step", f.grid_step, "Candidate grid spacing")->check(CLI::PositiveNumber);
  o.candidates = app.add_option("--candidates", f.candidates, "Uniform candidates per iteration (grid-free)")
                     ->check(CLI::PositiveNumber);
  o.mcmc_iters = app.add_option("--mcmc-iters", f.mcmc_iters, "MCMC sweeps per fit")->check(CLI::PositiveNumber);
  o.c_slab = app.add_option("--c-slab", f.c_slab, "Slab multiplier C")->check(CLI::PositiveNumber);
  o.n_min = app.add_option("--n-min", f.n_min, "Initial design size");
  o.n_max = app.add_option("--n-max", f.n_max, "Total evaluation budget");
}

ExperimentConfig resolve(const Flags& f, const Options& o) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_experiment_config(f.config);
  RunConfig& run = cfg.run;
  auto given = [](const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; };
  if (given(o.problem)) run.problem = f.problem;
  if (given(o.method)) run.method = parse_method(f.method);
  if (given(o.reps)) cfg.reps = f.reps;
  if (given(o.seed)) run.seed = f.seed;
  if (given(o.grid_step)) run.grid_step = f.grid_step;
  if (given(o.candidates)) run.candidates = f.candidates;
  if (given(o.mcmc_iters)) run.chain.iterations = f.mcmc_iters;
  if (given(o.c_slab)) run.hyper.c_slab = f.c_slab;
  if (given(o.n_min)) run.n_min = f.n_min;
  if (given(o.n_max)) run.n_max = f.n_max;
  if (given(o.out)) cfg.out = f.out;
  if (given(o.jobs)) cfg.jobs = f.jobs;
  if (given(o.strict)) cfg.strict = f.strict;
  return cfg;
}

int cmd_run(const ExperimentConfig& cfg) {
  const RunTrace trace = run_optimization(cfg.run);
  if (cfg.out.empty()) {
    write_trace(std::cout, trace);
  } else {
    std::ofstream out(cfg.out);
    if (!out) throw std::runtime_error("cannot open " + cfg.out + " for writing");
    write_trace(out, trace);
  }
  for (const auto& w : trace.warnings) std::cerr << "warning: " << w << '\n';
  const auto [x, value] = incumbent(trace);
  std::cerr << std::setprecision(6) << "best " << value << " at (";
  for (Index j = 0; j < x.size(); ++j) std::cerr << (j ? ", " : "") << x[j];
  std::cerr << ") after " << trace.size() << " evaluations\n";
  return 0;
}

int cmd_replicate(const ExperimentConfig& cfg) {
  const ReplicationResult res = replicate(cfg.run, cfg.reps, cfg.run.seed, cfg.jobs);
  const ReplicationSummary& s = res.summary;
  if (!cfg.out.empty()) export_results(s, res.curves, cfg.out);
  std::cout << std::setprecision(6) << std::fixed;
  std::cout << s.problem << ' ' << s.method << ": " << s.best_values.size() << '/' << s.reps << " replications\n";
  if (!s.best_values.empty()) {
    std::cout << "  5%=" << s.q05 << " Q1=" << s.q1 << " median=" << s.median << " Q3=" << s.q3 << " 95%=" << s.q95
              << '\n';
    std::cout << "  mean=" << s.mean << " std=" << s.std;
    if (s.optimum) std::cout << " hits=" << s.hits << '/' << s.best_values.size() << " (optimum " << *s.optimum << ')';
    std::cout << '\n';
  }
  for (std::size_t k = 0; k < s.failed.size(); ++k) {
    std::cerr << "replication " << s.failed[k] << " failed: " << s.failures[k] << '\n';
  }
  if (s.best_values.empty()) return 1;
  return cfg.strict && !s.failed.empty() ? 1 : 0;
}

int cmd_scan(const ExperimentConfig& cfg) {
  const TestProblem problem = make_problem(cfg.run.problem);
  std::cout << std::setprecision(6) << std::fixed;
  const std::optional<double> step = cfg.run.grid_step ? cfg.run.grid_step : problem.grid_step;
  if (problem.known_optimum) {
    const Point center = 0.5 * (problem.region.lo + problem.region.hi);
    std::cout << problem.name << ": f(center) = " << problem(center) << " (known optimum " << *problem.known_optimum
              << ")\n";
  }
  const double scan_step = step.value_or(0.25);
  const CandidateGrid grid = make_grid(problem.region, scan_step);
  const GridScan scan = scan_grid(problem, grid);
  std::cout << problem.name << ": grid step " << scan_step << ", " << scan.evaluated << " nodes\n";
  std::cout << "  max " << scan.max_value << " at (";
  for (Index j = 0; j < grid.points.cols(); ++j) std::cout << (j ? ", " : "") << grid.points(scan.argmax, j);
  std::cout << ")\n  maximizers at 4 decimals: " << scan.maximizers.size() << '\n';
  for (Index node : scan.maximizers) {
    std::cout << "    (";
    for (Index j = 0; j < grid.points.cols(); ++j) std::cout << (j ? ", " : "") << grid.points(node, j);
    std::cout << ")\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian adaptive RBF optimization and baselines"};
  app.require_subcommand(1);

  Flags run_flags, rep_flags, scan_flags;
  Options run_opts, rep_opts, scan_opts;

  CLI::App* run = app.add_subcommand("run", "Single optimization trace");
  add_run_flags(*run, run_flags, run_opts);
  run_opts.out = run->add_option("--out", run_flags.out, "Trace file (default: stdout)");

  CLI::App* rep = app.add_subcommand("replicate", "Independent replications with summary statistics");
  add_run_flags(*rep, rep_flags, rep_opts);
  rep_opts.reps = rep->add_option("--reps", rep_flags.reps, "Number of replications")->check(CLI::PositiveNumber);
  rep_opts.out = rep->add_option("--out", rep_flags.out, "Directory for summary.json and curves.csv");
  rep_opts.jobs = rep->add_option("--jobs", rep_flags.jobs, "Worker threads")->check(CLI::PositiveNumber);
  rep_opts.strict = rep->add_flag("--strict", rep_flags.strict, "Nonzero exit if any replication fails");

  CLI::App* scan = app.add_subcommand("scan", "Brute-force grid optimum");
  scan->add_option("--config", scan_flags.config, "JSON settings file")->check(CLI::ExistingFile);
  scan_opts.problem = scan->add_option("--problem", scan_flags.problem, "Problem name");
  scan_opts.grid_step = scan->add_option("--grid-step", scan_flags.grid_step, "Grid spacing")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(resolve(run_flags, run_opts));
    if (rep->parsed()) return cmd_replicate(resolve(rep_flags, rep_opts));
    if (scan->parsed()) return cmd_scan(resolve(scan_flags, scan_opts));
  } catch (const RunAborted& e) {
    std::cerr << "error: " << e.what() << '\n';
    write_trace(std::cerr, e.partial());
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
