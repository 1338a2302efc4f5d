#include "roughcurve/inference.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <Eigen/Cholesky>
#include <unsupported/Eigen/FFT>

#include "roughcurve/errors.hpp"

namespace roughcurve {

HierarchicalModel::HierarchicalModel(KLConfig cfg, NoiseModel noise, ForwardOperator forward, double length_scale,
                                     Interval s_support, int d)
    : cfg_(cfg), noise_(noise), forward_(std::move(forward)), sigma_(length_scale), support_(s_support), d_(d) {
  cfg_.validate();
  noise_.validate();
  if (!forward_) throw ParameterError("forward operator is empty");
  if (!(length_scale > 0)) throw ParameterError("length scale must be positive");
  if (!(support_.lo < support_.hi) || support_.lo < 0) throw ParameterError("roughness support must satisfy 0 <= lo < hi");
}

Spectrum<double> HierarchicalModel::spectrum(double s) const {
  RoughnessParams params{std::max(s, kDefaultRoughnessFloor), sigma_, d_, cfg_.k};
  return build_spectrum<double>(params);
}

Eigen::VectorXd HierarchicalModel::field(const Eigen::VectorXd& u, const Spectrum<double>& spec) const {
  return forward_map(u, spec, cfg_);
}

Eigen::VectorXd HierarchicalModel::predict(const Eigen::VectorXd& u, const Spectrum<double>& spec) const {
  return forward_(field(u, spec));
}

double HierarchicalModel::log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& u,
                                         const Spectrum<double>& spec) const {
  return roughcurve::log_likelihood(y, predict(u, spec), noise_);
}

HierarchicalModel HierarchicalModel::data_fitting(KLConfig cfg, NoiseModel noise, double length_scale,
                                                  Interval s_support) {
  HierarchicalModel model(cfg, noise, identity_forward, length_scale, s_support);
  model.identity_ = true;
  return model;
}

void GibbsConfig::validate() const {
  if (n_samples < 1) throw ParameterError("n_samples must be positive");
  if (burn_in < 0 || burn_in >= n_samples) throw ParameterError("burn_in must satisfy 0 <= burn_in < n_samples");
  if (!(pcn_beta > 0 && pcn_beta <= 1)) throw ParameterError("pcn_beta must lie in (0, 1]");
  if (!(mh_step > 0)) throw ParameterError("mh_step must be positive");
  if (pcn_steps < 1) throw ParameterError("pcn_steps must be positive");
  if (u_kernel == UKernel::linearized && reference_interval < 1)
    throw ParameterError("reference_interval must be positive");
  if (!(fd_step > 0)) throw ParameterError("fd_step must be positive");
  if (centered_s && !(centered_step > 0)) throw ParameterError("centered_step must be positive");
}

PcnResult pcn_step(const Eigen::VectorXd& u, double current_log_like, const LogDensity& log_like, double beta,
                   Rng& rng) {
  if (!(beta > 0 && beta <= 1)) throw ParameterError("pCN beta must lie in (0, 1]");
  if (!std::isfinite(current_log_like)) throw NumericalError("log-likelihood at the current state is not finite");
  const Eigen::VectorXd xi = standard_normal<double>(rng, u.size());
  Eigen::VectorXd proposal = std::sqrt(1.0 - beta * beta) * u + beta * xi;
  const double proposed = log_like(proposal);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double log_u = std::log(unif(rng));
  if (std::isfinite(proposed) && log_u < proposed - current_log_like) return {std::move(proposal), proposed, true};
  return {u, current_log_like, false};
}

PcnResult pcn_step(const Eigen::VectorXd& u, const LogDensity& log_like, double beta, Rng& rng) {
  return pcn_step(u, log_like(u), log_like, beta, rng);
}

MhResult mh_step_s(double s, double current_log_target, const ScalarLogDensity& log_target, double step,
                   const Interval& support, Rng& rng) {
  if (!(step > 0)) throw ParameterError("Metropolis step must be positive");
  if (!support.contains(s)) throw DomainError("current roughness lies outside its support");
  if (!std::isfinite(current_log_target)) throw NumericalError("log-target at the current state is not finite");
  std::normal_distribution<double> normal(0.0, 1.0);
  const double proposal = s + step * normal(rng);
  if (!support.contains(proposal)) return {s, current_log_target, false};
  const double proposed = log_target(proposal);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double log_u = std::log(unif(rng));
  if (std::isfinite(proposed) && log_u < proposed - current_log_target) return {proposal, proposed, true};
  return {s, current_log_target, false};
}

MhResult mh_step_s(double s, const ScalarLogDensity& log_target, double step, const Interval& support, Rng& rng) {
  return mh_step_s(s, log_target(s), log_target, step, support, rng);
}

namespace {

constexpr int kAdaptBatch = 50;
constexpr double kAcceptLow = 0.2;
constexpr double kAcceptHigh = 0.5;

double adapt_scale(double value, double rate) {
  if (rate < kAcceptLow) return value * (0.5 + rate);
  if (rate > kAcceptHigh) return value * (1.0 + rate);
  return value;
}

}  // namespace

namespace {

struct CenteredMove {
  double s;
  bool accepted;
};

// Shared body of the centered update; rescales u in place on acceptance.
CenteredMove centered_move(double s, Eigen::VectorXd& u, const Spectrum<double>& spec, Spectrum<double>& proposed_spec,
                           const HierarchicalModel& model, double step, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double proposal = s + step * normal(rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double log_u = std::log(unif(rng));
  if (!model.support().contains(proposal)) return {s, false};
  proposed_spec = model.spectrum(proposal);
  const int k = model.config().k;
  Eigen::VectorXd ratio(k);
  for (int j = 1; j <= k; ++j) {
    const double next = proposed_spec.pair_value(j);
    if (!(next > kSpectrumFloor)) return {s, false};
    ratio(j - 1) = std::sqrt(spec.pair_value(j) / next);
  }
  double log_alpha = 0.0;
  double new_norm2 = 0.0;
  for (int j = 1; j <= k; ++j) {
    const double r = ratio(j - 1);
    const double a = u(2 * j - 2) * r, b = u(2 * j - 1) * r;
    new_norm2 += a * a + b * b;
    log_alpha += 2.0 * std::log(r);
  }
  log_alpha -= 0.5 * (new_norm2 - u.squaredNorm());
  if (!(log_u < log_alpha)) return {s, false};
  for (int j = 1; j <= k; ++j) {
    u(2 * j - 2) *= ratio(j - 1);
    u(2 * j - 1) *= ratio(j - 1);
  }
  return {proposal, true};
}

}  // namespace

CenteredResult centered_s_step(double s, const Eigen::VectorXd& u, const HierarchicalModel& model, double step,
                               Rng& rng) {
  if (!(step > 0)) throw ParameterError("Metropolis step must be positive");
  if (!model.support().contains(s)) throw DomainError("current roughness lies outside its support");
  if (u.size() != model.config().n_coeffs()) throw StructuralError("coefficient vector has the wrong length");
  Eigen::VectorXd out = u;
  Spectrum<double> proposed;
  const CenteredMove mv = centered_move(s, out, model.spectrum(s), proposed, model, step, rng);
  return {mv.s, std::move(out), mv.accepted};
}

Eigen::VectorXd sample_linear_conditional(const Eigen::VectorXd& y, const Spectrum<double>& spec,
                                          const KLConfig& cfg, double sigma_noise, Rng& rng) {
  Eigen::VectorXd u = map_estimate_linear(y, spec, cfg, sigma_noise);
  const Eigen::VectorXd xi = standard_normal<double>(rng, u.size());
  for (int j = 1; j <= cfg.k; ++j) {
    const double sd = 1.0 / std::sqrt(1.0 + cfg.m() * spec.pair_value(j) /
                                                (2.0 * std::numbers::pi * sigma_noise * sigma_noise));
    u(2 * j - 2) += sd * xi(2 * j - 2);
    u(2 * j - 1) += sd * xi(2 * j - 1);
  }
  return u;
}

namespace {

// F with every eigenvalue set to one, as a dense m x 2k matrix.
Eigen::MatrixXd unit_synthesis(const KLConfig& cfg) {
  Spectrum<double> unit;
  unit.lambdas = Eigen::VectorXd::Ones(cfg.n_coeffs());
  unit.c_s = 1.0;
  unit.params.k = cfg.k;
  Eigen::MatrixXd B(cfg.m(), cfg.n_coeffs());
  Eigen::VectorXd e = Eigen::VectorXd::Zero(cfg.n_coeffs());
  for (int i = 0; i < cfg.n_coeffs(); ++i) {
    e(i) = 1.0;
    B.col(i) = forward_map(e, unit, cfg);
    e(i) = 0.0;
  }
  return B;
}

Eigen::MatrixXd jacobian_columns(const HierarchicalModel& model, const Eigen::MatrixXd& B, const Eigen::VectorXd& v,
                                 const Eigen::VectorXd& base, double step) {
  Eigen::MatrixXd J(base.size(), B.cols());
  for (Eigen::Index i = 0; i < B.cols(); ++i) {
    const double h = step / B.col(i).cwiseAbs().maxCoeff();
    J.col(i) = (model.predict_field(v + h * B.col(i)) - base) / h;
  }
  return J;
}

// Gaussian reference N(m, P^{-1}) for u | (y, s) from linearizing G at v_ref:
// P = I + D K D with D = diag(sqrt(lambda)), K = (J B)^T (J B) / sigma^2, and
// m = u_ref + P^{-1}(D g - u_ref) with g = (J B)^T (y - G(v_ref)) / sigma^2.
class LinearizedReference {
 public:
  LinearizedReference(const HierarchicalModel& model, double step)
      : model_(model), B_(unit_synthesis(model.config())), step_(step) {}

  void refit(const Eigen::VectorXd& v, const Eigen::VectorXd& y) {
    v_ref_ = v;
    const Eigen::VectorXd base = model_.predict_field(v);
    const Eigen::MatrixXd J = jacobian_columns(model_, B_, v, base, step_);
    const double s2 = model_.noise().sigma * model_.noise().sigma;
    K_ = (J.transpose() * J) / s2;
    g_ = J.transpose() * (y - base) / s2;
    ready_ = false;
  }

  void set_spectrum(const Spectrum<double>& spec) {
    const Eigen::VectorXd d = spec.lambdas.cwiseSqrt();
    Eigen::MatrixXd P = d.asDiagonal() * K_ * d.asDiagonal();
    P.diagonal().array() += 1.0;
    llt_.compute(P);
    if (llt_.info() != Eigen::Success) throw NumericalError("linearized precision is not positive definite");
    const Eigen::VectorXd u_ref = inverse_map(v_ref_, spec, model_.config());
    mean_ = u_ref + llt_.solve(d.cwiseProduct(g_) - u_ref);
    ready_ = true;
  }

  bool ready() const { return ready_; }

  Eigen::VectorXd propose(const Eigen::VectorXd& u, double beta, Rng& rng) const {
    const Eigen::VectorXd z = standard_normal<double>(rng, u.size());
    const Eigen::VectorXd noise = llt_.matrixU().solve(z);
    return mean_ + std::sqrt(1.0 - beta * beta) * (u - mean_) + beta * noise;
  }

  // log N(u; 0, I) - log N(u; m, P^{-1}) up to a constant.
  double log_weight(const Eigen::VectorXd& u) const {
    const Eigen::VectorXd r = llt_.matrixU() * (u - mean_);
    return -0.5 * u.squaredNorm() + 0.5 * r.squaredNorm();
  }

 private:
  const HierarchicalModel& model_;
  Eigen::MatrixXd B_;
  double step_;
  Eigen::VectorXd v_ref_;
  Eigen::MatrixXd K_;
  Eigen::VectorXd g_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd mean_;
  bool ready_ = false;
};

}  // namespace

Eigen::MatrixXd synthesis_jacobian(const HierarchicalModel& model, const Eigen::VectorXd& v, double step) {
  if (!(step > 0)) throw ParameterError("finite-difference step must be positive");
  if (v.size() != model.config().m()) throw StructuralError("field has the wrong length");
  return jacobian_columns(model, unit_synthesis(model.config()), v, model.predict_field(v), step);
}

Chain gibbs_run(const HierarchicalModel& model, const Eigen::VectorXd& y, const GibbsConfig& cfg) {
  cfg.validate();
  if (cfg.u_kernel == UKernel::exact && !model.is_linear_gaussian())
    throw ParameterError("the exact u update needs the identity forward model with Gaussian noise");
  Rng rng(cfg.seed);
  const Interval support = model.support();
  const int n_kept = cfg.n_samples - cfg.burn_in;

  Eigen::VectorXd u = Eigen::VectorXd::Zero(model.config().n_coeffs());
  double s = 0.5 * (support.lo + support.hi);
  Spectrum<double> spec = model.spectrum(s);
  double ll = model.log_likelihood(y, u, spec);
  if (!std::isfinite(ll)) throw NumericalError("log-likelihood at the initial state is not finite");

  Chain chain;
  chain.burn_in = cfg.burn_in;
  chain.s_draws.resize(n_kept);
  chain.u_draws.resize(n_kept, u.size());
  chain.log_likelihood.resize(n_kept);
  chain.pcn_accepted.reserve(n_kept);
  chain.mh_accepted.reserve(n_kept);
  chain.centered_accepted.reserve(n_kept);

  double beta = cfg.pcn_beta, step = cfg.mh_step, cstep = cfg.centered_step;
  int batch_pcn = 0, batch_mh = 0, batch_c = 0, batch_len = 0;
  long kept_pcn = 0, kept_mh = 0, kept_c = 0;

  const LogDensity like_u = [&](const Eigen::VectorXd& uu) { return model.log_likelihood(y, uu, spec); };
  std::optional<LinearizedReference> ref;
  if (cfg.u_kernel == UKernel::linearized) {
    ref.emplace(model, cfg.fd_step);
    ref->refit(model.field(u, spec), y);
  }
  Spectrum<double> proposed_spec;
  const ScalarLogDensity like_s = [&](double ss) {
    proposed_spec = model.spectrum(ss);
    return model.log_likelihood(y, u, proposed_spec);
  };

  for (int it = 0; it < cfg.n_samples; ++it) {
    // u | (y, s)
    int pcn_acc = 0;
    if (cfg.u_kernel == UKernel::exact) {
      u = sample_linear_conditional(y, spec, model.config(), model.noise().sigma, rng);
      ll = model.log_likelihood(y, u, spec);
      pcn_acc = cfg.pcn_steps;
    } else if (ref) {
      if (it > 0 && it <= cfg.burn_in && it % cfg.reference_interval == 0) ref->refit(model.field(u, spec), y);
      if (!ref->ready()) ref->set_spectrum(spec);
      double w = ref->log_weight(u);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (int i = 0; i < cfg.pcn_steps; ++i) {
        Eigen::VectorXd proposal = ref->propose(u, beta, rng);
        const double proposed = like_u(proposal);
        const double w_new = ref->log_weight(proposal);
        const double log_u = std::log(unif(rng));
        if (std::isfinite(proposed) && log_u < proposed + w_new - ll - w) {
          u = std::move(proposal);
          ll = proposed;
          w = w_new;
          ++pcn_acc;
        }
      }
    } else {
      for (int i = 0; i < cfg.pcn_steps; ++i) {
        PcnResult pr = pcn_step(u, ll, like_u, beta, rng);
        if (pr.accepted) {
          u = std::move(pr.u);
          ll = pr.log_like;
          ++pcn_acc;
        }
      }
    }
    // s | (y, u)
    const MhResult mr = mh_step_s(s, ll, like_s, step, support, rng);
    if (mr.accepted) {
      s = mr.s;
      ll = mr.log_target;
      spec = proposed_spec;
      if (ref) ref->set_spectrum(spec);
    }
    // s | (y, v), likelihood unchanged
    bool c_acc = false;
    if (cfg.centered_s) {
      const CenteredMove cm = centered_move(s, u, spec, proposed_spec, model, cstep, rng);
      if (cm.accepted) {
        s = cm.s;
        spec = proposed_spec;
        c_acc = true;
        if (ref) ref->set_spectrum(spec);
      }
    }

    if (it < cfg.burn_in) {
      if (cfg.adapt) {
        batch_pcn += pcn_acc;
        batch_mh += mr.accepted;
        batch_c += c_acc;
        if (++batch_len == kAdaptBatch) {
          if (cfg.u_kernel != UKernel::exact)
            beta = std::min(1.0, adapt_scale(beta, double(batch_pcn) / (batch_len * cfg.pcn_steps)));
          step = std::min(support.width(), adapt_scale(step, double(batch_mh) / batch_len));
          if (cfg.centered_s) cstep = std::min(support.width(), adapt_scale(cstep, double(batch_c) / batch_len));
          batch_pcn = batch_mh = batch_c = batch_len = 0;
        }
      }
      continue;
    }
    const int row = it - cfg.burn_in;
    chain.s_draws(row) = s;
    chain.u_draws.row(row) = u.transpose();
    chain.log_likelihood(row) = ll;
    chain.pcn_accepted.push_back(pcn_acc > 0);
    chain.mh_accepted.push_back(mr.accepted);
    chain.centered_accepted.push_back(c_acc);
    kept_pcn += pcn_acc;
    kept_mh += mr.accepted;
    kept_c += c_acc;
  }
  chain.pcn_acceptance = double(kept_pcn) / (double(n_kept) * cfg.pcn_steps);
  chain.mh_acceptance = double(kept_mh) / n_kept;
  chain.centered_acceptance = double(kept_c) / n_kept;
  chain.final_beta = beta;
  chain.final_mh_step = step;
  chain.final_centered_step = cstep;
  return chain;
}

std::vector<Chain> gibbs_run_chains(const HierarchicalModel& model, const Eigen::VectorXd& y, const GibbsConfig& cfg,
                                    int n_chains) {
  if (n_chains < 1) throw ParameterError("need at least one chain");
  cfg.validate();
  std::vector<Chain> chains(n_chains);
  std::vector<std::exception_ptr> errors(n_chains);
  std::vector<std::thread> workers;
  workers.reserve(n_chains);
  for (int i = 0; i < n_chains; ++i) {
    workers.emplace_back([&, i] {
      try {
        GibbsConfig local = cfg;
        local.seed = cfg.seed + static_cast<std::uint64_t>(i);
        chains[i] = gibbs_run(model, y, local);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return chains;
}

Chain pool_chains(const std::vector<Chain>& chains) {
  if (chains.empty()) throw StructuralError("no chains to pool");
  Eigen::Index n = 0;
  for (const Chain& c : chains) {
    if (c.u_draws.cols() != chains.front().u_draws.cols()) throw StructuralError("chains differ in dimension");
    n += c.size();
  }
  Chain out = chains.front();
  out.s_draws.resize(n);
  out.u_draws.resize(n, chains.front().u_draws.cols());
  out.log_likelihood.resize(n);
  out.pcn_accepted.clear();
  out.mh_accepted.clear();
  out.centered_accepted.clear();
  out.pcn_acceptance = out.mh_acceptance = out.centered_acceptance = 0.0;
  Eigen::Index row = 0;
  for (const Chain& c : chains) {
    out.s_draws.segment(row, c.size()) = c.s_draws;
    out.u_draws.middleRows(row, c.size()) = c.u_draws;
    out.log_likelihood.segment(row, c.size()) = c.log_likelihood;
    out.pcn_accepted.insert(out.pcn_accepted.end(), c.pcn_accepted.begin(), c.pcn_accepted.end());
    out.mh_accepted.insert(out.mh_accepted.end(), c.mh_accepted.begin(), c.mh_accepted.end());
    out.centered_accepted.insert(out.centered_accepted.end(), c.centered_accepted.begin(), c.centered_accepted.end());
    out.pcn_acceptance += c.pcn_acceptance / chains.size();
    out.mh_acceptance += c.mh_acceptance / chains.size();
    out.centered_acceptance += c.centered_acceptance / chains.size();
    row += c.size();
  }
  return out;
}

Interval hdi(std::span<const double> draws, double gamma) {
  if (draws.empty()) throw StructuralError("HDI of an empty sample");
  if (!(gamma > 0 && gamma < 1)) throw ParameterError("HDI level must lie in (0, 1)");
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  size_t inside = static_cast<size_t>(std::ceil(gamma * static_cast<double>(n) - 1e-9));
  inside = std::clamp<size_t>(inside, 1, n);
  size_t best = 0;
  double best_width = sorted[inside - 1] - sorted[0];
  for (size_t i = 1; i + inside <= n; ++i) {
    const double w = sorted[i + inside - 1] - sorted[i];
    if (w < best_width) {
      best_width = w;
      best = i;
    }
  }
  return {sorted[best], sorted[best + inside - 1]};
}

double effective_sample_size(std::span<const double> draws) {
  const size_t n = draws.size();
  if (n == 0) throw StructuralError("ESS of an empty chain");
  if (n < 4) return static_cast<double>(n);
  double mean = 0;
  for (double x : draws) mean += x;
  mean /= n;

  // Autocovariance through a zero-padded FFT.
  size_t len = 1;
  while (len < 2 * n) len <<= 1;
  std::vector<std::complex<double>> buf(len, {0.0, 0.0}), spec;
  for (size_t i = 0; i < n; ++i) buf[i] = draws[i] - mean;
  Eigen::FFT<double> fft;
  fft.fwd(spec, buf);
  for (auto& c : spec) c = std::norm(c);
  fft.inv(buf, spec);
  const double gamma0 = buf[0].real() / n;
  if (!(gamma0 > 1e-300 * (1.0 + mean * mean))) return static_cast<double>(n);

  auto rho = [&](size_t t) { return buf[t].real() / n / gamma0; };
  double sum = 0;
  for (size_t m = 0; 2 * m + 1 < n; ++m) {
    const double pair = rho(2 * m) + rho(2 * m + 1);
    if (pair <= 0) break;
    sum += pair;
  }
  const double tau = std::max(-1.0 + 2.0 * sum, 1.0 / n);
  return std::min(static_cast<double>(n), n / tau);
}

NodeSummary summarize_columns(const Eigen::MatrixXd& draws, double gamma) {
  if (draws.rows() == 0) throw StructuralError("no draws to summarize");
  NodeSummary out;
  out.mean = draws.colwise().mean().transpose();
  out.lo.resize(draws.cols());
  out.hi.resize(draws.cols());
  std::vector<double> col(draws.rows());
  for (Eigen::Index c = 0; c < draws.cols(); ++c) {
    for (Eigen::Index r = 0; r < draws.rows(); ++r) col[r] = draws(r, c);
    const Interval iv = hdi(col, gamma);
    out.lo(c) = iv.lo;
    out.hi(c) = iv.hi;
  }
  return out;
}

Eigen::MatrixXd field_draws(const Chain& chain, const HierarchicalModel& model) {
  const Eigen::Index n = chain.size();
  Eigen::MatrixXd out(n, model.config().m());
  double last_s = std::numeric_limits<double>::quiet_NaN();
  Spectrum<double> spec;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (chain.s_draws(i) != last_s) {
      last_s = chain.s_draws(i);
      spec = model.spectrum(last_s);
    }
    out.row(i) = model.field(chain.u_draws.row(i).transpose(), spec).transpose();
  }
  return out;
}

PosteriorSummary posterior_summary(const Chain& chain, double gamma, const HierarchicalModel& model) {
  if (chain.size() == 0) throw StructuralError("posterior summary of an empty chain");
  const NodeSummary nodes = summarize_columns(field_draws(chain, model), gamma);
  PosteriorSummary out;
  out.mean_v = nodes.mean;
  out.hdi_lo = nodes.lo;
  out.hdi_hi = nodes.hi;
  out.gamma = gamma;
  std::span<const double> s(chain.s_draws.data(), static_cast<size_t>(chain.size()));
  out.s_mean = chain.s_draws.mean();
  out.s_hdi = hdi(s, gamma);
  out.ess_s = effective_sample_size(s);
  return out;
}

namespace {

// Cosine and sine amplitudes of frequencies 1..k of a length-m signal.
std::pair<Eigen::VectorXd, Eigen::VectorXd> trig_amplitudes(const Eigen::VectorXd& y, const KLConfig& cfg) {
  const int m = cfg.m();
  std::vector<std::complex<double>> in(m), out;
  for (int t = 0; t < m; ++t) in[t] = {y(t), 0.0};
  Eigen::FFT<double> fft;
  fft.fwd(out, in);
  Eigen::VectorXd c(cfg.k), sn(cfg.k);
  for (int j = 1; j <= cfg.k; ++j) {
    c(j - 1) = 2.0 * out[j].real() / m;
    sn(j - 1) = -2.0 * out[j].imag() / m;
  }
  return {c, sn};
}

// Likelihood precision of one rotated coefficient of pair j: m mu_j / (2 pi sigma^2).
double data_precision(double mu, int m, double sigma_noise) {
  return m * mu / (2.0 * std::numbers::pi * sigma_noise * sigma_noise);
}

}  // namespace

Eigen::VectorXd map_estimate_linear(const Eigen::VectorXd& y, const Spectrum<double>& spec, const KLConfig& cfg,
                                    double sigma_noise) {
  cfg.validate();
  if (spec.k() != cfg.k) throw StructuralError("spectrum truncation does not match mesh configuration");
  if (y.size() != cfg.m()) throw StructuralError("data length does not match the mesh");
  if (!(sigma_noise > 0)) throw ParameterError("noise sigma must be positive");
  const auto [c, sn] = trig_amplitudes(y, cfg);
  const int m = cfg.m();
  const double s2 = sigma_noise * sigma_noise;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Eigen::VectorXd u(cfg.n_coeffs());
  for (int j = 1; j <= cfg.k; ++j) {
    const double mu = spec.pair_value(j);
    const double a = std::sqrt(mu / std::numbers::pi);
    const double rho = data_precision(mu, m, sigma_noise);
    // Rotated coordinates: p scales the cosine, q the sine.
    const double p = 0.5 * m * a * c(j - 1) / s2 / (rho + 1.0);
    const double q = 0.5 * m * a * sn(j - 1) / s2 / (rho + 1.0);
    u(2 * j - 1) = (p + q) * inv_sqrt2;  // g_j
    u(2 * j - 2) = (p - q) * inv_sqrt2;  // h_j
  }
  return u;
}

Eigen::VectorXd laplace_evidence(const Eigen::VectorXd& y, const Eigen::VectorXd& s_candidates,
                                 const SpectrumBuilder& build, const KLConfig& cfg, double sigma_noise) {
  cfg.validate();
  if (y.size() != cfg.m()) throw StructuralError("data length does not match the mesh");
  const NoiseModel noise{NoiseKind::gaussian, sigma_noise};
  noise.validate();
  const int m = cfg.m();
  Eigen::VectorXd out(s_candidates.size());
  for (Eigen::Index i = 0; i < s_candidates.size(); ++i) {
    const Spectrum<double> spec = build(s_candidates(i));
    const Eigen::VectorXd u = map_estimate_linear(y, spec, cfg, sigma_noise);
    const double log_like = log_likelihood(y, forward_map(u, spec, cfg), noise);
    // The (2 pi)^{k} factors of the prior density and of det(D / 2 pi) cancel.
    const double log_prior_kernel = -0.5 * u.squaredNorm();
    double log_det = 0;
    for (int j = 1; j <= cfg.k; ++j) log_det += 2.0 * std::log1p(data_precision(spec.pair_value(j), m, sigma_noise));
    out(i) = log_like + log_prior_kernel - 0.5 * log_det;
  }
  return out;
}

}  // namespace roughcurve
