#ifndef BARBF_MCMC_HPP
#define BARBF_MCMC_HPP

#include "barbf/common.hpp"
#include "barbf/rbf_model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace barbf {

/// Prior and proposal settings of the Bayesian RBF surrogate.
///
/// Coefficients follow a spike-and-slab prior β_i ~ N(0, (a_i τ_i)²) with
/// a_i = 1 when γ_i = 0 (spike) and a_i = C when γ_i = 1 (slab);
/// P(γ_i = 0) = p_spike. Scales have Gamma(a_s, b_s) kernel s^(a_s-1) e^(-b_s s),
/// the residual variance has an IG(ν₀/2, ζ₀/2) prior.
struct HyperParams {
  double c_slab = 25.0;
  Eigen::VectorXd tau;
  double p_spike = 0.5;
  double a_s = 2.0;
  double b_s = 0.0;
  double nu0 = 2.0;
  double zeta0 = 1.0;
  double sigma2_mu = 0.001;
  double sigma2_s = 0.5;
  /// Probability of drawing a center proposal uniformly over Ω instead of a local perturbation.
  double omega_mix = 0.2;

  /// Checks the positivity and box constraints; `n` is the expected length of tau.
  void validate(Index n) const;
};

struct DefaultedHyperParams {
  HyperParams params;
  /// Set when Var(y) = 0 and τ had to be floored.
  std::optional<std::string> warning;
};

/// Slab multiplier used when none is configured: 25 (p ≤ 2), 15 (p = 3), 10 (p ≥ 4).
double default_c_slab(Index dim);

/// Data-driven defaults: τ_i = Δy / (3Δx) with Δy = sd(y)/5 and Δx the largest
/// coordinate range of X; ζ₀ such that the 99% quantile of IG(ν₀/2, ζ₀/2)
/// equals sd(y). Requires at least two points.
DefaultedHyperParams default_hyperparams(const PointSet& points, const Eigen::VectorXd& y,
                                         std::optional<double> c_slab = std::nullopt);

/// Bisection on [1e-8, 1e8] (relative tolerance 1e-6) for the ζ₀ whose
/// IG(ν₀/2, ζ₀/2) distribution has its `prob` quantile at `target`.
double solve_zeta0(double nu0, double target, double prob = 0.99);

/// CDF of the inverse-gamma distribution with shape `shape` and scale `scale` at x.
double inverse_gamma_cdf(double x, double shape, double scale);

/// Smallest axis-aligned box covering the explored points; the support of the center prior.
struct OmegaBox {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static OmegaBox cover(const PointSet& points);
  /// Grows the box to include x; never shrinks.
  void extend(const Point& x);
  bool contains(const Point& x, double tol = kDomainTol) const;
  bool contains(const OmegaBox& other) const;
  double volume() const;
  Point sample_uniform(Rng& rng) const;
};

enum class ScaleMode { shared, per_basis };

struct ChainConfig {
  int iterations = 10000;
  double burn_frac = 0.40;
  int thin = 5;
  bool update_mu = false;
  ScaleMode scale_mode = ScaleMode::shared;
  std::uint64_t seed = 0;
  /// Starting value of every RBF scale.
  double initial_scale = 1.0;

  int burn_in() const;
  /// floor((K - burn) / thin): number of sweeps kept.
  int retained_count() const;
  void validate() const;
};

/// Conditional posterior of β given everything else: N(h, M) with
/// M = (D'D/σ² + Σ_τ⁻²)⁻¹ and h = M D'y / σ².
struct GibbsCache {
  Eigen::MatrixXd covariance;
  Eigen::VectorXd mean;
  /// Diagonal of Σ_τ, i.e. a_i τ_i.
  Eigen::VectorXd sigma_tau;
};

GibbsCache gibbs_cache(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, double sigma2,
                       const Eigen::VectorXd& sigma_tau);

/// One draw of β from N(h, M). The posterior precision is Cholesky-factored;
/// on failure 1e-10·I is added and the factorization retried once.
Eigen::VectorXd sample_beta(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, double sigma2,
                            const Eigen::VectorXd& sigma_tau, Rng& rng);

/// Same draw given precomputed D'D and D'y.
Eigen::VectorXd sample_beta_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& dty, double sigma2,
                                 const Eigen::VectorXd& sigma_tau, Rng& rng);

/// One draw from IG((ν₀ + N)/2, (ζ₀ + rss)/2).
double sample_sigma2(double residual_ss, Index n, double nu0, double zeta0, Rng& rng);

/// P(γ_i = 1 | β_i): slab vs spike normal densities weighted by (1 - p) and p.
double inclusion_probability(double beta_i, double tau_i, double c_slab, double p_spike);

int sample_gamma_indicator(Index i, const Eigen::VectorXd& beta, const HyperParams& hp, Rng& rng);

/// Σ_τ diagonal for the given indicators: τ_i when γ_i = 0, C·τ_i when γ_i = 1.
Eigen::VectorXd prior_scales(const Eigen::VectorXi& gamma, const HyperParams& hp);

/// Mutable sampler state: data, current parameters, the design matrix
/// D(μ, s) and the residual y - Dβ. The D'D cache is rebuilt lazily after
/// a basis changes.
struct ChainWorkspace {
  PointSet points;
  Eigen::VectorXd y;  // centered responses
  SurrogateState state;
  Eigen::MatrixXd dist2;  // ‖x_k - μ_i‖²
  Eigen::MatrixXd design;
  Eigen::VectorXd residual;

  ChainWorkspace(PointSet points_, Eigen::VectorXd y_centered, SurrogateState init);

  double rss() const { return residual.squaredNorm(); }
  void set_beta(Eigen::VectorXd beta);
  const Eigen::MatrixXd& gram();
  const Eigen::VectorXd& dty();
  /// Replaces center i and updates the affected column.
  void set_center(Index i, const Point& center);
  /// Replaces scale i (or every scale when i is empty) and updates the affected columns.
  void set_scale(std::optional<Index> i, double scale);

 private:
  void invalidate_gram() { gram_valid_ = false; }
  Eigen::MatrixXd gram_;
  Eigen::VectorXd dty_;
  bool gram_valid_ = false;
};

/// Metropolis–Hastings acceptance probability for moving center i to `proposal`:
/// min{1, exp(-(RSS* - RSS)/(2σ²))·1_Ω(μ*)}.
double mu_acceptance_probability(const ChainWorkspace& ws, Index i, const Point& proposal, const OmegaBox& omega);

/// Acceptance probability for scale i (all scales when i is empty) moving to
/// `proposal`: likelihood ratio times the Gamma kernel ratio; zero for proposal <= 0.
double scale_acceptance_probability(const ChainWorkspace& ws, std::optional<Index> i, double proposal,
                                    const HyperParams& hp);

/// Draws a center proposal from the uniform/local mixture and applies the MH rule.
bool mh_update_mu(ChainWorkspace& ws, Index i, const OmegaBox& omega, const HyperParams& hp, Rng& rng);

/// Random-walk proposal s* ~ N(s, σ_s²) with the MH rule; empty `i` updates the shared scale.
bool mh_update_s(ChainWorkspace& ws, std::optional<Index> i, const HyperParams& hp, Rng& rng);

struct ChainDiagnostics {
  std::vector<double> rss;
  std::vector<double> sigma2;
  std::vector<double> scale0;
  Index mu_proposals = 0;
  Index mu_accepted = 0;
  Index s_proposals = 0;
  Index s_accepted = 0;

  double mu_acceptance_rate() const;
  double s_acceptance_rate() const;
};

/// Runs K sweeps of β → σ² → γ → μ → s on centered responses and keeps
/// every `thin`-th sweep after burn-in. Initial state: β = 0, γ = 1,
/// σ² = Var(y), μ = explored points, every s = cfg.initial_scale.
PosteriorEnsemble run_chain(const PointSet& points, const Eigen::VectorXd& y, const HyperParams& hp,
                            const ChainConfig& cfg, ChainDiagnostics* diagnostics = nullptr);

/// Per-sweep trace as comma-separated values with a header row.
void write_chain_diagnostics(std::ostream& out, const ChainDiagnostics& diagnostics);

}  // namespace barbf

#endif  // BARBF_MCMC_HPP
