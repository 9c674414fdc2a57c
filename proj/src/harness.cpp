#include "barbf/harness.hpp"

#include "barbf/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace barbf {

namespace {

using nlohmann::json;

constexpr std::uint64_t kReplicationStream = 0x5245504c;

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

ScaleMode parse_scale_mode(const std::string& s) {
  if (s == "shared") return ScaleMode::shared;
  if (s == "per-basis") return ScaleMode::per_basis;
  throw std::invalid_argument("unknown scale_mode '" + s + "'");
}

}  // namespace

std::optional<double> reference_optimum(const TestProblem& problem, const RunConfig& cfg) {
  if (cfg.method == Method::barbf_gridfree) return problem.known_optimum;
  const std::optional<double> step = cfg.grid_step ? cfg.grid_step : problem.grid_step;
  if (!step) return problem.known_optimum;
  return scan_grid(problem, make_grid(problem.region, *step)).max_value;
}

ReplicationSummary summarize(const std::vector<double>& best_values, std::optional<double> optimum, double tolerance) {
  if (best_values.empty()) throw std::invalid_argument("summarize: no successful replications");
  ReplicationSummary s;
  s.best_values = best_values;
  std::vector<double> sorted = best_values;
  std::sort(sorted.begin(), sorted.end());
  s.q05 = stats::quantile_sorted(sorted, 0.05);
  s.q1 = stats::quantile_sorted(sorted, 0.25);
  s.median = stats::quantile_sorted(sorted, 0.5);
  s.q3 = stats::quantile_sorted(sorted, 0.75);
  s.q95 = stats::quantile_sorted(sorted, 0.95);
  s.mean = stats::mean(best_values);
  s.std = std::sqrt(stats::variance(best_values));
  s.optimum = optimum;
  s.tolerance = tolerance;
  if (optimum) {
    s.hits = static_cast<int>(std::count_if(best_values.begin(), best_values.end(),
                                            [&](double v) { return std::abs(v - *optimum) <= tolerance; }));
  }
  return s;
}

QuantileCurves quantile_curves(const std::vector<std::vector<double>>& curves) {
  QuantileCurves out;
  if (curves.empty()) return out;
  const std::size_t len = curves.front().size();
  for (const auto& c : curves) {
    if (c.size() != len) throw std::invalid_argument("quantile_curves: curves differ in length");
  }
  std::vector<double> column(curves.size());
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t r = 0; r < curves.size(); ++r) column[r] = curves[r][t];
    out.mean.push_back(stats::mean(column));
    std::vector<double> sorted = column;
    std::sort(sorted.begin(), sorted.end());
    out.q05.push_back(stats::quantile_sorted(sorted, 0.05));
    out.q95.push_back(stats::quantile_sorted(sorted, 0.95));
  }
  return out;
}

std::uint64_t replication_seed(std::uint64_t base_seed, int index) {
  return derive_seed(base_seed, kReplicationStream, static_cast<std::uint64_t>(index));
}

ReplicationResult replicate(const RunConfig& cfg, int reps, std::uint64_t base_seed, int jobs) {
  return replicate(cfg, make_problem(cfg.problem), reps, base_seed, jobs);
}

ReplicationResult replicate(const RunConfig& cfg, const TestProblem& problem, int reps, std::uint64_t base_seed,
                            int jobs) {
  if (reps < 1) throw std::invalid_argument("replicate: reps must be at least 1");
  validate(cfg, problem);

  std::vector<std::optional<RunTrace>> traces(static_cast<std::size_t>(reps));
  std::vector<std::string> errors(static_cast<std::size_t>(reps));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < reps; i = next++) {
      RunConfig rc = cfg;
      rc.seed = replication_seed(base_seed, i);
      try {
        traces[static_cast<std::size_t>(i)] = run_optimization(rc, problem);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(i)] = e.what();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, reps);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ReplicationResult result;
  std::vector<double> best;
  std::vector<std::vector<double>> curves;
  std::vector<int> failed;
  std::vector<std::string> failures;
  for (int i = 0; i < reps; ++i) {
    auto& t = traces[static_cast<std::size_t>(i)];
    if (!t) {
      failed.push_back(i);
      failures.push_back(errors[static_cast<std::size_t>(i)]);
      continue;
    }
    best.push_back(t->records.back().best);
    curves.push_back(t->best_curve());
    result.traces.push_back(std::move(*t));
  }
  if (!best.empty()) {
    result.summary = summarize(best, reference_optimum(problem, cfg));
    result.curves = quantile_curves(curves);
  }
  result.summary.problem = problem.name;
  result.summary.method = std::string(method_name(cfg.method));
  result.summary.reps = reps;
  result.summary.base_seed = base_seed;
  result.summary.failed = std::move(failed);
  result.summary.failures = std::move(failures);
  return result;
}

void write_summary_json(std::ostream& out, const ReplicationSummary& s) {
  json j;
  j["problem"] = s.problem;
  j["method"] = s.method;
  j["reps"] = s.reps;
  j["base_seed"] = s.base_seed;
  j["best_values"] = s.best_values;
  j["failed"] = s.failed;
  j["failures"] = s.failures;
  j["q05"] = s.q05;
  j["q1"] = s.q1;
  j["median"] = s.median;
  j["q3"] = s.q3;
  j["q95"] = s.q95;
  j["mean"] = s.mean;
  j["std"] = s.std;
  j["hits"] = s.hits;
  j["optimum"] = s.optimum ? json(*s.optimum) : json(nullptr);
  j["tolerance"] = s.tolerance;
  out << j.dump(2) << '\n';
}

ReplicationSummary parse_summary_json(std::istream& in) {
  const json j = json::parse(in);
  ReplicationSummary s;
  s.problem = j.at("problem").get<std::string>();
  s.method = j.at("method").get<std::string>();
  s.reps = j.at("reps").get<int>();
  s.base_seed = j.at("base_seed").get<std::uint64_t>();
  s.best_values = j.at("best_values").get<std::vector<double>>();
  s.failed = j.at("failed").get<std::vector<int>>();
  s.failures = j.at("failures").get<std::vector<std::string>>();
  s.q05 = j.at("q05").get<double>();
  s.q1 = j.at("q1").get<double>();
  s.median = j.at("median").get<double>();
  s.q3 = j.at("q3").get<double>();
  s.q95 = j.at("q95").get<double>();
  s.mean = j.at("mean").get<double>();
  s.std = j.at("std").get<double>();
  s.hits = j.at("hits").get<int>();
  if (!j.at("optimum").is_null()) s.optimum = j.at("optimum").get<double>();
  s.tolerance = j.at("tolerance").get<double>();
  return s;
}

void write_curves_csv(std::ostream& out, const QuantileCurves& curves) {
  const auto old_prec = out.precision(17);
  out << "iteration,mean,q05,q95\n";
  for (std::size_t t = 0; t < curves.size(); ++t) {
    out << t + 1 << ',' << curves.mean[t] << ',' << curves.q05[t] << ',' << curves.q95[t] << '\n';
  }
  out.precision(old_prec);
}

void export_results(const ReplicationSummary& summary, const QuantileCurves& curves, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
  auto write = [](const std::filesystem::path& path, auto&& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    body(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
  };
  write(dir / "summary.json", [&](std::ostream& o) { write_summary_json(o, summary); });
  write(dir / "curves.csv", [&](std::ostream& o) { write_curves_csv(o, curves); });
}

void apply_config_text(ExperimentConfig& cfg, const std::string& json_text) {
  static const std::vector<std::string> known{
      "problem", "method",    "reps",       "seed",      "grid_step",  "candidates", "mcmc_iters",
      "c_slab",  "out",       "jobs",       "strict",    "n_min",      "n_max",      "burn_frac",
      "thin",    "update_mu", "scale_mode", "escape_mi", "escape_mt",  "warm_start", "ego_starts",
      "lhd_restarts", "sigma2_s", "sigma2_mu", "p_spike", "omega_mix"};
  const json j = json::parse(json_text);
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  RunConfig& run = cfg.run;
  if (j.contains("problem")) run.problem = j.at("problem").get<std::string>();
  if (j.contains("method")) run.method = parse_method(j.at("method").get<std::string>());
  if (j.contains("reps")) cfg.reps = j.at("reps").get<int>();
  if (j.contains("seed")) run.seed = j.at("seed").get<std::uint64_t>();
  read_optional(j, "grid_step", run.grid_step);
  if (j.contains("candidates")) run.candidates = j.at("candidates").get<Index>();
  if (j.contains("mcmc_iters")) run.chain.iterations = j.at("mcmc_iters").get<int>();
  read_optional(j, "c_slab", run.hyper.c_slab);
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
  if (j.contains("strict")) cfg.strict = j.at("strict").get<bool>();
  read_optional(j, "n_min", run.n_min);
  read_optional(j, "n_max", run.n_max);
  if (j.contains("burn_frac")) run.chain.burn_frac = j.at("burn_frac").get<double>();
  if (j.contains("thin")) run.chain.thin = j.at("thin").get<int>();
  if (j.contains("update_mu")) run.chain.update_mu = j.at("update_mu").get<bool>();
  if (j.contains("scale_mode")) run.chain.scale_mode = parse_scale_mode(j.at("scale_mode").get<std::string>());
  if (j.contains("escape_mi")) run.escape_m_i = j.at("escape_mi").get<int>();
  if (j.contains("escape_mt")) run.escape_m_t = j.at("escape_mt").get<int>();
  if (j.contains("warm_start")) run.warm_start = j.at("warm_start").get<bool>();
  if (j.contains("ego_starts")) run.ego_starts = j.at("ego_starts").get<int>();
  if (j.contains("lhd_restarts")) run.lhd_restarts = j.at("lhd_restarts").get<int>();
  read_optional(j, "sigma2_s", run.hyper.sigma2_s);
  read_optional(j, "sigma2_mu", run.hyper.sigma2_mu);
  read_optional(j, "p_spike", run.hyper.p_spike);
  read_optional(j, "omega_mix", run.hyper.omega_mix);
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  ExperimentConfig cfg;
  try {
    apply_config_text(cfg, text.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return cfg;
}

}  // namespace barbf
