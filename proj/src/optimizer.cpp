#include "barbf/optimizer.hpp"

#include "barbf/acquisition.hpp"
#include "barbf/design.hpp"
#include "barbf/gmsrbf.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace barbf {

namespace {

constexpr std::uint64_t kDesignStream = 0x44455349474e;
constexpr std::uint64_t kChainStream = 0x434841494e;
constexpr std::uint64_t kCandidateStream = 0x43414e44;
constexpr std::uint64_t kSelectStream = 0x53454c;
constexpr std::uint64_t kEgoStream = 0x45474f;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Explored {
  PointSet points;
  Eigen::VectorXd y;

  void append(const Point& x, double v) {
    const Index n = points.rows();
    points.conservativeResize(n + 1, x.size());
    points.row(n) = x.transpose();
    y.conservativeResize(n + 1);
    y[n] = v;
  }
};

class Evaluator {
 public:
  Evaluator(const TestProblem& problem, RunTrace& trace) : problem_(problem), trace_(trace) {}

  double operator()(const Point& x) {
    try {
      return problem_(x);
    } catch (const std::exception& e) {
      throw RunAborted("objective evaluation failed at evaluation " + std::to_string(trace_.size() + 1) + ": " +
                           e.what(),
                       trace_);
    }
  }

 private:
  const TestProblem& problem_;
  RunTrace& trace_;
};

TraceRecord make_record(const Point& x, double y, double best, std::string phase) {
  return TraceRecord{x, y, best, std::move(phase), kNaN, kNaN, kNaN, kNaN};
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::barbf:
      return "barbf";
    case Method::m_barbf:
      return "m-barbf";
    case Method::barbf_gridfree:
      return "barbf-gridfree";
    case Method::gmsrbf:
      return "gmsrbf";
    case Method::ego:
      return "ego";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::barbf, Method::m_barbf, Method::barbf_gridfree, Method::gmsrbf, Method::ego}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

bool is_bayesian(Method m) { return m == Method::barbf || m == Method::m_barbf || m == Method::barbf_gridfree; }

void HyperOverrides::apply(HyperParams& hp) const {
  if (c_slab) hp.c_slab = *c_slab;
  if (p_spike) hp.p_spike = *p_spike;
  if (a_s) hp.a_s = *a_s;
  if (b_s) hp.b_s = *b_s;
  if (nu0) hp.nu0 = *nu0;
  if (sigma2_mu) hp.sigma2_mu = *sigma2_mu;
  if (sigma2_s) hp.sigma2_s = *sigma2_s;
  if (omega_mix) hp.omega_mix = *omega_mix;
}

double RunTrace::initial_best() const {
  if (records.empty()) throw std::logic_error("RunTrace: empty trace");
  const auto k = static_cast<std::size_t>(std::max(n_min, 1)) - 1;
  return records[std::min(k, records.size() - 1)].best;
}

std::vector<double> RunTrace::best_curve() const {
  std::vector<double> out;
  for (std::size_t k = static_cast<std::size_t>(n_min); k < records.size(); ++k) out.push_back(records[k].best);
  return out;
}

void validate(const RunConfig& cfg, const TestProblem& problem) {
  const int n_min = cfg.n_min.value_or(problem.default_n_min);
  const int n_max = cfg.n_max.value_or(problem.default_n_max);
  if (n_min < 2) throw std::invalid_argument("RunConfig: N_min must be at least 2");
  if (n_max <= n_min) throw std::invalid_argument("RunConfig: N_max must exceed N_min");
  if (cfg.candidates < 1) throw std::invalid_argument("RunConfig: candidate count must be positive");
  if (cfg.escape_m_i < 1 || cfg.escape_m_t < 1) throw std::invalid_argument("RunConfig: escape limits must be positive");
  if (cfg.grid_step && !(*cfg.grid_step > 0.0)) throw std::invalid_argument("RunConfig: grid step must be positive");
  if (cfg.method != Method::barbf_gridfree && !cfg.grid_step && !problem.grid_step) {
    throw std::invalid_argument("RunConfig: problem '" + problem.name + "' has no grid; use barbf-gridfree or --grid-step");
  }
  if (is_bayesian(cfg.method)) cfg.chain.validate();
}

PointSet initial_design(const TestProblem& problem, int n_min, std::uint64_t seed, int restarts,
                        const CandidateGrid* grid) {
  const Design lhd = maximin_lhd(n_min, problem.dim(), derive_seed(seed, kDesignStream), LhdOptions{restarts});
  PointSet points = scale_to_region(lhd.points, problem.region);
  if (grid) {
    const std::vector<Index> nodes = snap_to_grid(points, *grid);
    for (std::size_t k = 0; k < nodes.size(); ++k) points.row(static_cast<Index>(k)) = grid->points.row(nodes[k]);
  }
  return points;
}

RunTrace run_optimization(const RunConfig& cfg) { return run_optimization(cfg, make_problem(cfg.problem)); }

RunTrace run_optimization(const RunConfig& cfg, const TestProblem& problem) {
  validate(cfg, problem);
  const int n_min = cfg.n_min.value_or(problem.default_n_min);
  const int n_max = cfg.n_max.value_or(problem.default_n_max);
  const bool gridfree = cfg.method == Method::barbf_gridfree;

  std::optional<CandidateGrid> grid;
  if (!gridfree) grid = make_grid(problem.region, cfg.grid_step ? *cfg.grid_step : *problem.grid_step);
  if (grid && grid->size() < n_max) throw std::invalid_argument("RunConfig: grid has fewer nodes than N_max");

  RunTrace trace;
  trace.problem = problem.name;
  trace.method = cfg.method;
  trace.seed = cfg.seed;
  trace.n_min = n_min;
  trace.n_max = n_max;
  trace.records.reserve(static_cast<std::size_t>(n_max));

  Evaluator evaluate(problem, trace);
  Explored data;
  double f_max = -std::numeric_limits<double>::infinity();

  const PointSet design = initial_design(problem, n_min, cfg.seed, cfg.lhd_restarts, grid ? &*grid : nullptr);
  for (Index i = 0; i < design.rows(); ++i) {
    const Point x = design.row(i).transpose();
    const double v = evaluate(x);
    data.append(x, v);
    f_max = std::max(f_max, v);
    trace.records.push_back(make_record(x, v, f_max, "initial"));
  }

  double scale = 1.0;
  if (is_bayesian(cfg.method) || cfg.method == Method::gmsrbf) {
    const std::vector<double> scales = default_scale_grid();
    scale = choose_scale_loo(data.points, data.y, scales);
  }

  Rng select_rng(derive_seed(cfg.seed, kSelectStream));
  EscapeState escape{0, cfg.escape_m_i, cfg.escape_m_t, false, 0};
  WeightCycle cycle;
  const double c_slab = cfg.hyper.c_slab.value_or(problem.default_c_slab);
  double chain_scale = scale;

  while (static_cast<int>(data.points.rows()) < n_max) {
    const auto iteration = static_cast<std::uint64_t>(data.points.rows());
    PointSet sampled;
    if (gridfree) {
      Rng cand_rng(derive_seed(cfg.seed, kCandidateStream, iteration));
      sampled = sample_candidates_uniform(problem.region, cfg.candidates, cand_rng);
    }
    const PointSet& candidates = gridfree ? sampled : grid->points;

    TraceRecord rec = make_record(Point(), 0.0, 0.0, "select");
    Selection sel;
    if (cfg.method == Method::m_barbf && escape.in_escape) {
      sel = maximin_distance_point(candidates, data.points);
      escape = record_escape_point(escape);
      rec.phase = "escape";
    } else if (is_bayesian(cfg.method)) {
      DefaultedHyperParams defaults = default_hyperparams(data.points, data.y, c_slab);
      cfg.hyper.apply(defaults.params);
      if (defaults.warning) trace.warnings.push_back("evaluation " + std::to_string(iteration + 1) + ": " + *defaults.warning);
      ChainConfig chain = cfg.chain;
      chain.seed = derive_seed(cfg.seed, kChainStream, iteration);
      chain.initial_scale = chain_scale;
      ChainDiagnostics diag;
      const PosteriorEnsemble ensemble = run_chain(data.points, data.y, defaults.params, chain, &diag);
      const AcquisitionContext ctx{candidates, data.points, data.y, f_max};
      sel = select_next(ctx, ensemble, select_rng);
      double mean_scale = 0.0;
      for (const auto& st : ensemble.states) mean_scale += st.scales.mean();
      rec.scale = mean_scale / static_cast<double>(ensemble.size());
      rec.s_acceptance = diag.s_acceptance_rate();
      if (cfg.warm_start) chain_scale = ensemble.states.back().scales.mean();
    } else if (cfg.method == Method::gmsrbf) {
      const GmsrbfModel model = gmsrbf_fit(data.points, data.y, scale);
      const GmsrbfSelection g = gmsrbf_select(candidates, model, data.points, cycle);
      sel = g;
      rec.weight = g.weight;
      rec.scale = scale;
    } else {
      EgoOptions options;
      options.starts = cfg.ego_starts;
      options.seed = derive_seed(cfg.seed, kEgoStream, iteration);
      const GpModel gp = ego_fit(data.points, data.y, options);
      sel = ego_select(candidates, gp, data.points, f_max);
    }

    const double v = evaluate(sel.point);
    const bool improved = v > f_max;
    f_max = std::max(f_max, v);
    data.append(sel.point, v);
    if (cfg.method == Method::m_barbf) escape = update_escape(escape, improved);

    rec.x = sel.point;
    rec.y = v;
    rec.best = f_max;
    rec.score = sel.score;
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

std::pair<Point, double> incumbent(const RunTrace& trace) {
  if (trace.records.empty()) throw std::invalid_argument("incumbent: empty trace");
  std::size_t best = 0;
  for (std::size_t k = 1; k < trace.records.size(); ++k) {
    if (trace.records[k].y > trace.records[best].y) best = k;
  }
  return {trace.records[best].x, trace.records[best].y};
}

void write_trace(std::ostream& out, const RunTrace& trace) {
  const auto old_prec = out.precision(17);
  const Index dim = trace.records.empty() ? 0 : trace.records.front().x.size();
  out << "index";
  for (Index j = 0; j < dim; ++j) out << ",x" << j + 1;
  out << ",y,best,phase,score,weight,scale,s_acceptance\n";
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const TraceRecord& r = trace.records[k];
    out << k + 1;
    for (Index j = 0; j < r.x.size(); ++j) out << ',' << r.x[j];
    out << ',' << r.y << ',' << r.best << ',' << r.phase << ',' << r.score << ',' << r.weight << ',' << r.scale << ','
        << r.s_acceptance << '\n';
  }
  out.precision(old_prec);
}

}  // namespace barbf
