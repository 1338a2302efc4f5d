#ifndef ROUGHCURVE_INFERENCE_HPP
#define ROUGHCURVE_INFERENCE_HPP

// Hierarchical posterior over (u, s):
//
//   pi(u, s | y)  propto  pi(y | F_s(u)) N(u; 0, I) U(s; s_lo, s_hi)
//
// sampled by Gibbs sweeps that alternate a move on u | (y, s) and
// random-walk Metropolis moves on s. The u move is pCN, an exact Gaussian
// draw (identity forward model, Gaussian noise), or pCN around a Gaussian
// reference from a linearization of G. The s update holds u fixed; an
// optional second s update holds v = F_s(u) fixed instead, rescaling u.

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "roughcurve/forward.hpp"
#include "roughcurve/klmap.hpp"
#include "roughcurve/spectrum.hpp"

namespace roughcurve {

// G: boundary field v -> predicted data.
using ForwardOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using LogDensity = std::function<double(const Eigen::VectorXd&)>;
using ScalarLogDensity = std::function<double(double)>;

struct Interval {
  double lo = 0.0;
  double hi = 10.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
  double width() const { return hi - lo; }
};

class HierarchicalModel {
 public:
  HierarchicalModel(KLConfig cfg, NoiseModel noise, ForwardOperator forward, double length_scale = 100.0,
                    Interval s_support = {}, int d = 1);

  // y = v + noise; enables the exact conditional draw for u when the noise is Gaussian.
  static HierarchicalModel data_fitting(KLConfig cfg, NoiseModel noise, double length_scale = 100.0,
                                        Interval s_support = {});

  bool is_linear_gaussian() const { return identity_ && noise_.kind == NoiseKind::gaussian; }

  const KLConfig& config() const { return cfg_; }
  const NoiseModel& noise() const { return noise_; }
  const Interval& support() const { return support_; }
  double length_scale() const { return sigma_; }

  // Spectrum at s, clamped from below to the roughness floor.
  Spectrum<double> spectrum(double s) const;
  Eigen::VectorXd field(const Eigen::VectorXd& u, const Spectrum<double>& spec) const;
  Eigen::VectorXd field(const Eigen::VectorXd& u, double s) const { return field(u, spectrum(s)); }
  Eigen::VectorXd predict(const Eigen::VectorXd& u, const Spectrum<double>& spec) const;
  Eigen::VectorXd predict_field(const Eigen::VectorXd& v) const { return forward_(v); }
  double log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& u, const Spectrum<double>& spec) const;

 private:
  KLConfig cfg_;
  NoiseModel noise_;
  ForwardOperator forward_;
  double sigma_;
  Interval support_;
  int d_;
  bool identity_ = false;
};

// linearized: proposals u' = m + sqrt(1 - beta^2)(u - m) + beta C^{1/2} xi
// with N(m, C) a Gauss-Newton fit of u | (y, s), refitted during burn-in.
enum class UKernel { pcn, exact, linearized };

struct GibbsConfig {
  int n_samples = 10000;  // total iterations, burn-in included
  int burn_in = 2000;
  double pcn_beta = 0.1;
  double mh_step = 0.2;
  std::uint64_t seed = 0;
  bool adapt = true;
  UKernel u_kernel = UKernel::pcn;
  int pcn_steps = 1;          // pCN moves per sweep
  int reference_interval = 200;  // linearized kernel: burn-in sweeps between refits
  double fd_step = 1e-3;          // linearized kernel: finite-difference step in v
  bool centered_s = true;     // add the v-preserving s update
  double centered_step = 0.05;

  void validate() const;
};

struct Chain {
  Eigen::VectorXd s_draws;                // n_kept
  Eigen::MatrixXd u_draws;                // n_kept x 2k
  Eigen::VectorXd log_likelihood;         // n_kept
  std::vector<std::uint8_t> pcn_accepted;  // n_kept
  std::vector<std::uint8_t> mh_accepted;   // n_kept
  std::vector<std::uint8_t> centered_accepted;  // n_kept, all zero when disabled
  double pcn_acceptance = 0.0;
  double mh_acceptance = 0.0;
  double centered_acceptance = 0.0;
  double final_beta = 0.0;
  double final_mh_step = 0.0;
  double final_centered_step = 0.0;
  int burn_in = 0;

  Eigen::Index size() const { return s_draws.size(); }
};

struct PosteriorSummary {
  Eigen::VectorXd mean_v;
  Eigen::VectorXd hdi_lo;
  Eigen::VectorXd hdi_hi;
  double gamma = 0.95;
  double s_mean = 0.0;
  Interval s_hdi;
  double ess_s = 0.0;
};

struct PcnResult {
  Eigen::VectorXd u;
  double log_like;
  bool accepted;
};

struct MhResult {
  double s;
  double log_target;
  bool accepted;
};

// u' = sqrt(1 - beta^2) u + beta xi, accepted with min(1, exp(L(u') - L(u))).
PcnResult pcn_step(const Eigen::VectorXd& u, double current_log_like, const LogDensity& log_like, double beta,
                   Rng& rng);
PcnResult pcn_step(const Eigen::VectorXd& u, const LogDensity& log_like, double beta, Rng& rng);
// Gaussian random walk on s; proposals outside the support are rejected.
MhResult mh_step_s(double s, double current_log_target, const ScalarLogDensity& log_target, double step,
                   const Interval& support, Rng& rng);
MhResult mh_step_s(double s, const ScalarLogDensity& log_target, double step, const Interval& support, Rng& rng);

// Moves s to s' and u to u'_i = u_i sqrt(lambda_i(s) / lambda_i(s')), so that
// F_{s'}(u') = F_s(u). The acceptance ratio carries the prior of u and the
// Jacobian of the rescaling; the likelihood is unchanged.
struct CenteredResult {
  double s;
  Eigen::VectorXd u;
  bool accepted;
};
CenteredResult centered_s_step(double s, const Eigen::VectorXd& u, const HierarchicalModel& model, double step,
                               Rng& rng);

// Columns (G(v + h b_i) - G(v)) / h over the unit-spectrum synthesis
// columns b_i, with h scaled so that max |h b_i| = step.
Eigen::MatrixXd synthesis_jacobian(const HierarchicalModel& model, const Eigen::VectorXd& v, double step);

// Exact draw from u | (y, s) for the linear-Gaussian identity model.
Eigen::VectorXd sample_linear_conditional(const Eigen::VectorXd& y, const Spectrum<double>& spec,
                                          const KLConfig& cfg, double sigma_noise, Rng& rng);

Chain gibbs_run(const HierarchicalModel& model, const Eigen::VectorXd& y, const GibbsConfig& cfg);

// Independent chains on separate threads; chain i uses seed cfg.seed + i.
std::vector<Chain> gibbs_run_chains(const HierarchicalModel& model, const Eigen::VectorXd& y, const GibbsConfig& cfg,
                                    int n_chains);

// Draws of all chains stacked in order; rates averaged, per-chain tuning of the first chain.
Chain pool_chains(const std::vector<Chain>& chains);

// Shortest interval holding ceil(gamma N) sorted draws, lowest start on ties.
Interval hdi(std::span<const double> draws, double gamma);

// Initial-positive-sequence estimate, capped at N; N for a constant chain.
double effective_sample_size(std::span<const double> draws);

struct NodeSummary {
  Eigen::VectorXd mean;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

// Per-column mean and gamma-HDI of an N x m draw matrix.
NodeSummary summarize_columns(const Eigen::MatrixXd& draws, double gamma);

// N x m matrix of fields F_{s_i}(u_i).
Eigen::MatrixXd field_draws(const Chain& chain, const HierarchicalModel& model);

PosteriorSummary posterior_summary(const Chain& chain, double gamma, const HierarchicalModel& model);

// Posterior mode of u for y = F(u) + N(0, sigma^2 I), u ~ N(0, I).
Eigen::VectorXd map_estimate_linear(const Eigen::VectorXd& y, const Spectrum<double>& spec, const KLConfig& cfg,
                                    double sigma_noise);

using SpectrumBuilder = std::function<Spectrum<double>(double)>;

// Laplace-approximation log evidence of each candidate s for the identity
// forward model. Exact for this linear-Gaussian case.
Eigen::VectorXd laplace_evidence(const Eigen::VectorXd& y, const Eigen::VectorXd& s_candidates,
                                 const SpectrumBuilder& build, const KLConfig& cfg, double sigma_noise);

}  // namespace roughcurve

#endif  // ROUGHCURVE_INFERENCE_HPP
