#include "barbf/mcmc.hpp"

#include "barbf/stats.hpp"

#include <Eigen/Cholesky>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace barbf {

namespace {

constexpr double kJitter = 1e-10;
constexpr double kTauFloor = 1e-6;

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

void HyperParams::validate(Index n) const {
  if (!(c_slab > 0.0)) throw std::invalid_argument("HyperParams: C must be positive");
  if (tau.size() != n) throw std::invalid_argument("HyperParams: tau length must equal the number of bases");
  if (n > 0 && !(tau.minCoeff() > 0.0)) throw std::invalid_argument("HyperParams: tau must be positive");
  if (!(p_spike >= 0.0 && p_spike <= 1.0)) throw std::invalid_argument("HyperParams: p_spike outside [0,1]");
  if (!(a_s > 0.0) || !(b_s >= 0.0)) throw std::invalid_argument("HyperParams: need a_s > 0, b_s >= 0");
  if (!(nu0 > 0.0) || !(zeta0 > 0.0)) throw std::invalid_argument("HyperParams: need nu0, zeta0 > 0");
  if (!(sigma2_mu > 0.0) || !(sigma2_s > 0.0)) throw std::invalid_argument("HyperParams: proposal variances must be positive");
  if (!(omega_mix >= 0.0 && omega_mix <= 1.0)) throw std::invalid_argument("HyperParams: omega_mix outside [0,1]");
}

double default_c_slab(Index dim) {
  if (dim <= 2) return 25.0;
  if (dim == 3) return 15.0;
  return 10.0;
}

double inverse_gamma_cdf(double x, double shape, double scale) {
  if (x <= 0.0) return 0.0;
  gsl_sf_result r;
  const int status = gsl_sf_gamma_inc_Q_e(shape, scale / x, &r);
  if (status != GSL_SUCCESS && status != GSL_EUNDRFLW) {
    throw std::runtime_error("inverse_gamma_cdf: incomplete gamma evaluation failed");
  }
  return status == GSL_EUNDRFLW ? 0.0 : r.val;
}

double solve_zeta0(double nu0, double target, double prob) {
  if (!(nu0 > 0.0)) throw std::invalid_argument("solve_zeta0: nu0 must be positive");
  double lo = 1e-8;
  double hi = 1e8;
  if (!(target > 0.0)) return lo;
  // The prob-quantile of IG(ν₀/2, ζ₀/2) increases with ζ₀; the CDF at target decreases.
  auto excess = [&](double zeta) { return inverse_gamma_cdf(target, 0.5 * nu0, 0.5 * zeta) - prob; };
  if (excess(lo) <= 0.0) return lo;
  if (excess(hi) >= 0.0) return hi;
  while ((hi - lo) > 1e-6 * lo) {
    const double mid = std::sqrt(lo * hi);
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

DefaultedHyperParams default_hyperparams(const PointSet& points, const Eigen::VectorXd& y,
                                         std::optional<double> c_slab) {
  const Index n = points.rows();
  if (n < 2) throw std::invalid_argument("default_hyperparams: need at least two explored points");
  if (y.size() != n) throw std::invalid_argument("default_hyperparams: response length mismatch");

  DefaultedHyperParams out;
  HyperParams& hp = out.params;
  hp.c_slab = c_slab.value_or(default_c_slab(points.cols()));

  const double sd = std::sqrt(stats::variance(to_vector(y)));
  double dx = (points.colwise().maxCoeff() - points.colwise().minCoeff()).maxCoeff();
  if (!(dx > 0.0)) dx = 1.0;
  double tau = (sd / 5.0) / (3.0 * dx);
  if (!(tau > 0.0)) {
    tau = kTauFloor;
    out.warning = "degenerate data: Var(y) = 0, tau floored at 1e-6";
  }
  hp.tau = Eigen::VectorXd::Constant(n, tau);
  hp.zeta0 = solve_zeta0(hp.nu0, sd);
  return out;
}

OmegaBox OmegaBox::cover(const PointSet& points) {
  if (points.rows() == 0) throw std::invalid_argument("OmegaBox: no points");
  return {points.colwise().minCoeff().transpose(), points.colwise().maxCoeff().transpose()};
}

void OmegaBox::extend(const Point& x) {
  lo = lo.cwiseMin(x);
  hi = hi.cwiseMax(x);
}

bool OmegaBox::contains(const Point& x, double tol) const {
  return ((x - lo).array() >= -tol).all() && ((hi - x).array() >= -tol).all();
}

bool OmegaBox::contains(const OmegaBox& other) const {
  return (other.lo.array() >= lo.array()).all() && (other.hi.array() <= hi.array()).all();
}

double OmegaBox::volume() const { return (hi - lo).prod(); }

Point OmegaBox::sample_uniform(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Point x(lo.size());
  for (Index j = 0; j < x.size(); ++j) x[j] = lo[j] + unif(rng) * (hi[j] - lo[j]);
  return x;
}

int ChainConfig::burn_in() const { return static_cast<int>(std::lround(iterations * burn_frac)); }

int ChainConfig::retained_count() const { return thin > 0 ? (iterations - burn_in()) / thin : 0; }

void ChainConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("ChainConfig: iterations must be positive");
  if (!(burn_frac >= 0.0 && burn_frac < 1.0)) throw std::invalid_argument("ChainConfig: burn_frac outside [0,1)");
  if (thin < 1) throw std::invalid_argument("ChainConfig: thin must be >= 1");
  if (retained_count() < 1) throw std::invalid_argument("ChainConfig: no sweeps would be retained");
  if (!(initial_scale > 0.0)) throw std::invalid_argument("ChainConfig: initial_scale must be positive");
}

Eigen::VectorXd prior_scales(const Eigen::VectorXi& gamma, const HyperParams& hp) {
  Eigen::VectorXd out(gamma.size());
  for (Index i = 0; i < gamma.size(); ++i) out[i] = (gamma[i] ? hp.c_slab : 1.0) * hp.tau[i];
  return out;
}

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_precision(const Eigen::MatrixXd& gram, double sigma2,
                                             const Eigen::VectorXd& sigma_tau) {
  Eigen::MatrixXd precision = gram / sigma2;
  precision.diagonal().array() += sigma_tau.array().square().inverse();
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    precision.diagonal().array() += kJitter;
    llt.compute(precision);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("sample_beta: posterior precision is not positive definite after jitter");
    }
  }
  return llt;
}

void require_beta_inputs(Index rows, Index cols, Index y_len, Index tau_len, double sigma2) {
  if (rows != y_len || cols != tau_len) throw std::invalid_argument("sample_beta: dimension mismatch");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sample_beta: sigma2 must be positive");
}

}  // namespace

GibbsCache gibbs_cache(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, double sigma2,
                       const Eigen::VectorXd& sigma_tau) {
  require_beta_inputs(design.rows(), design.cols(), y.size(), sigma_tau.size(), sigma2);
  const Eigen::MatrixXd gram = design.transpose() * design;
  const auto llt = factor_precision(gram, sigma2, sigma_tau);
  GibbsCache cache;
  cache.covariance = llt.solve(Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
  cache.mean = llt.solve(design.transpose() * y / sigma2);
  cache.sigma_tau = sigma_tau;
  return cache;
}

Eigen::VectorXd sample_beta_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& dty, double sigma2,
                                 const Eigen::VectorXd& sigma_tau, Rng& rng) {
  require_beta_inputs(gram.rows(), gram.cols(), dty.size(), sigma_tau.size(), sigma2);
  const auto llt = factor_precision(gram, sigma2, sigma_tau);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(gram.rows());
  for (Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  // Precision = L Lᵀ, so Lᵀ⁻¹ z has covariance Precision⁻¹.
  Eigen::VectorXd beta = llt.solve(dty / sigma2);
  beta.noalias() += llt.matrixU().solve(z);
  return beta;
}

Eigen::VectorXd sample_beta(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, double sigma2,
                            const Eigen::VectorXd& sigma_tau, Rng& rng) {
  require_beta_inputs(design.rows(), design.cols(), y.size(), sigma_tau.size(), sigma2);
  return sample_beta_gram(design.transpose() * design, design.transpose() * y, sigma2, sigma_tau, rng);
}

double sample_sigma2(double residual_ss, Index n, double nu0, double zeta0, Rng& rng) {
  if (residual_ss < 0.0) throw std::invalid_argument("sample_sigma2: negative residual sum of squares");
  const double shape = 0.5 * (nu0 + static_cast<double>(n));
  const double scale = 0.5 * (zeta0 + residual_ss);
  std::gamma_distribution<double> gamma(shape, 1.0);
  double g = gamma(rng);
  while (!(g > 0.0)) g = gamma(rng);
  return scale / g;
}

double inclusion_probability(double beta_i, double tau_i, double c_slab, double p_spike) {
  const double b2 = beta_i * beta_i;
  const double log_slab = std::log1p(-p_spike) - std::log(c_slab * tau_i) - b2 / (2.0 * c_slab * c_slab * tau_i * tau_i);
  const double log_spike = std::log(p_spike) - std::log(tau_i) - b2 / (2.0 * tau_i * tau_i);
  if (log_slab == -std::numeric_limits<double>::infinity()) return 0.0;
  return 1.0 / (1.0 + std::exp(log_spike - log_slab));
}

int sample_gamma_indicator(Index i, const Eigen::VectorXd& beta, const HyperParams& hp, Rng& rng) {
  const double prob = inclusion_probability(beta[i], hp.tau[i], hp.c_slab, hp.p_spike);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return unif(rng) < prob ? 1 : 0;
}

ChainWorkspace::ChainWorkspace(PointSet points_, Eigen::VectorXd y_centered, SurrogateState init)
    : points(std::move(points_)), y(std::move(y_centered)), state(std::move(init)) {
  state.validate();
  if (points.rows() != y.size() || state.size() != y.size()) {
    throw std::invalid_argument("ChainWorkspace: data and state sizes disagree");
  }
  dist2 = squared_distances(points, state.centers);
  design.resize(dist2.rows(), dist2.cols());
  for (Index j = 0; j < design.cols(); ++j) {
    design.col(j) = (-(state.scales[j] * state.scales[j]) * dist2.col(j).array()).exp();
  }
  residual = y - design * state.beta;
}

void ChainWorkspace::set_beta(Eigen::VectorXd beta) {
  state.beta = std::move(beta);
  residual = y;
  residual.noalias() -= design * state.beta;
}

const Eigen::MatrixXd& ChainWorkspace::gram() {
  if (!gram_valid_) {
    gram_.resize(design.cols(), design.cols());
    gram_.setZero();
    gram_.selfadjointView<Eigen::Lower>().rankUpdate(design.transpose());
    gram_.triangularView<Eigen::StrictlyUpper>() = gram_.transpose();
    dty_.noalias() = design.transpose() * y;
    gram_valid_ = true;
  }
  return gram_;
}

const Eigen::VectorXd& ChainWorkspace::dty() {
  gram();
  return dty_;
}

void ChainWorkspace::set_center(Index i, const Point& center) {
  state.centers.row(i) = center.transpose();
  dist2.col(i) = (points.rowwise() - center.transpose()).rowwise().squaredNorm();
  const Eigen::VectorXd old = design.col(i);
  design.col(i) = (-(state.scales[i] * state.scales[i]) * dist2.col(i).array()).exp();
  residual.noalias() -= state.beta[i] * (design.col(i) - old);
  invalidate_gram();
}

void ChainWorkspace::set_scale(std::optional<Index> i, double scale) {
  if (i) {
    state.scales[*i] = scale;
    const Eigen::VectorXd old = design.col(*i);
    design.col(*i) = (-(scale * scale) * dist2.col(*i).array()).exp();
    residual.noalias() -= state.beta[*i] * (design.col(*i) - old);
  } else {
    state.scales.setConstant(scale);
    design = (-(scale * scale) * dist2.array()).exp();
    residual = y;
    residual.noalias() -= design * state.beta;
  }
  invalidate_gram();
}

namespace {

double accept_from_log(double log_ratio) { return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio); }

}  // namespace

double mu_acceptance_probability(const ChainWorkspace& ws, Index i, const Point& proposal, const OmegaBox& omega) {
  if (!omega.contains(proposal)) return 0.0;
  const double s = ws.state.scales[i];
  const Eigen::VectorXd col = (-(s * s) * (ws.points.rowwise() - proposal.transpose()).rowwise().squaredNorm().array()).exp();
  const Eigen::VectorXd r = ws.residual - ws.state.beta[i] * (col - ws.design.col(i));
  return accept_from_log(-(r.squaredNorm() - ws.rss()) / (2.0 * ws.state.sigma2));
}

double scale_acceptance_probability(const ChainWorkspace& ws, std::optional<Index> i, double proposal,
                                    const HyperParams& hp) {
  if (!(proposal > 0.0)) return 0.0;
  double current = 0.0;
  double new_rss = 0.0;
  if (i) {
    current = ws.state.scales[*i];
    const Eigen::VectorXd col = (-(proposal * proposal) * ws.dist2.col(*i).array()).exp();
    new_rss = (ws.residual - ws.state.beta[*i] * (col - ws.design.col(*i))).squaredNorm();
  } else {
    current = ws.state.scales[0];
    const Eigen::MatrixXd d = (-(proposal * proposal) * ws.dist2.array()).exp();
    new_rss = (ws.y - d * ws.state.beta).squaredNorm();
  }
  const double log_lik = -(new_rss - ws.rss()) / (2.0 * ws.state.sigma2);
  const double log_prior = (hp.a_s - 1.0) * (std::log(proposal) - std::log(current)) - hp.b_s * (proposal - current);
  return accept_from_log(log_lik + log_prior);
}

bool mh_update_mu(ChainWorkspace& ws, Index i, const OmegaBox& omega, const HyperParams& hp, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Point proposal;
  if (unif(rng) < hp.omega_mix) {
    proposal = omega.sample_uniform(rng);
  } else {
    std::normal_distribution<double> normal(0.0, std::sqrt(hp.sigma2_mu));
    proposal = ws.state.centers.row(i).transpose();
    for (Index j = 0; j < proposal.size(); ++j) proposal[j] += normal(rng);
  }
  const double alpha = mu_acceptance_probability(ws, i, proposal, omega);
  if (unif(rng) < alpha) {
    ws.set_center(i, proposal);
    return true;
  }
  return false;
}

bool mh_update_s(ChainWorkspace& ws, std::optional<Index> i, const HyperParams& hp, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(hp.sigma2_s));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double current = ws.state.scales[i.value_or(0)];
  const double proposal = current + normal(rng);
  const double alpha = scale_acceptance_probability(ws, i, proposal, hp);
  if (unif(rng) < alpha) {
    ws.set_scale(i, proposal);
    return true;
  }
  return false;
}

double ChainDiagnostics::mu_acceptance_rate() const {
  return mu_proposals ? static_cast<double>(mu_accepted) / static_cast<double>(mu_proposals) : 0.0;
}

double ChainDiagnostics::s_acceptance_rate() const {
  return s_proposals ? static_cast<double>(s_accepted) / static_cast<double>(s_proposals) : 0.0;
}

PosteriorEnsemble run_chain(const PointSet& points, const Eigen::VectorXd& y, const HyperParams& hp,
                            const ChainConfig& cfg, ChainDiagnostics* diagnostics) {
  const Index n = points.rows();
  if (n < 2) throw std::invalid_argument("run_chain: need at least two explored points");
  if (y.size() != n) throw std::invalid_argument("run_chain: response length mismatch");
  hp.validate(n);
  cfg.validate();

  PosteriorEnsemble ensemble;
  ensemble.y_mean = y.mean();
  const std::vector<double> yv = to_vector(y);

  SurrogateState init;
  init.beta = Eigen::VectorXd::Zero(n);
  init.gamma = Eigen::VectorXi::Ones(n);
  init.sigma2 = std::max(stats::variance(yv), 1e-12);
  init.centers = points;
  init.scales = Eigen::VectorXd::Constant(n, cfg.initial_scale);

  ChainWorkspace ws(points, y.array() - ensemble.y_mean, std::move(init));
  const OmegaBox omega = OmegaBox::cover(points);
  Rng rng(cfg.seed);

  const int burn = cfg.burn_in();
  ensemble.states.reserve(static_cast<std::size_t>(cfg.retained_count()));
  if (diagnostics) {
    *diagnostics = ChainDiagnostics{};
    diagnostics->rss.reserve(static_cast<std::size_t>(cfg.iterations));
  }

  for (int sweep = 1; sweep <= cfg.iterations; ++sweep) {
    const Eigen::VectorXd sigma_tau = prior_scales(ws.state.gamma, hp);
    ws.set_beta(sample_beta_gram(ws.gram(), ws.dty(), ws.state.sigma2, sigma_tau, rng));
    ws.state.sigma2 = sample_sigma2(ws.rss(), n, hp.nu0, hp.zeta0, rng);
    for (Index i = 0; i < n; ++i) ws.state.gamma[i] = sample_gamma_indicator(i, ws.state.beta, hp, rng);

    if (cfg.update_mu) {
      for (Index i = 0; i < n; ++i) {
        const bool ok = mh_update_mu(ws, i, omega, hp, rng);
        if (diagnostics) {
          ++diagnostics->mu_proposals;
          diagnostics->mu_accepted += ok;
        }
      }
    }
    if (cfg.scale_mode == ScaleMode::shared) {
      const bool ok = mh_update_s(ws, std::nullopt, hp, rng);
      if (diagnostics) {
        ++diagnostics->s_proposals;
        diagnostics->s_accepted += ok;
      }
    } else {
      for (Index i = 0; i < n; ++i) {
        const bool ok = mh_update_s(ws, i, hp, rng);
        if (diagnostics) {
          ++diagnostics->s_proposals;
          diagnostics->s_accepted += ok;
        }
      }
    }

    if (diagnostics) {
      diagnostics->rss.push_back(ws.rss());
      diagnostics->sigma2.push_back(ws.state.sigma2);
      diagnostics->scale0.push_back(ws.state.scales[0]);
    }
    if (sweep > burn && (sweep - burn) % cfg.thin == 0) ensemble.states.push_back(ws.state);
  }
  return ensemble;
}

void write_chain_diagnostics(std::ostream& out, const ChainDiagnostics& diagnostics) {
  const auto old_prec = out.precision(17);
  out << "sweep,rss,sigma2,scale0\n";
  for (std::size_t k = 0; k < diagnostics.rss.size(); ++k) {
    out << k + 1 << ',' << diagnostics.rss[k] << ',' << diagnostics.sigma2[k] << ',' << diagnostics.scale0[k] << '\n';
  }
  out << "# mu_acceptance," << diagnostics.mu_acceptance_rate() << '\n';
  out << "# s_acceptance," << diagnostics.s_acceptance_rate() << '\n';
  out.precision(old_prec);
}

}  // namespace barbf
