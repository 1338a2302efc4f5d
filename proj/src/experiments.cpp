#include "roughcurve/experiments.hpp"

#include <cmath>
#include <numbers>

#include "roughcurve/errors.hpp"
#include "roughcurve/spectrum.hpp"

namespace roughcurve {

namespace {

double noise_sigma(const NoiseSpec& spec, const Eigen::VectorXd& clean, const Eigen::VectorXd& eps) {
  if (spec.relative > 0) return sigma_from_relative_level(spec.relative, clean, eps);
  if (!(spec.sigma > 0)) throw ParameterError("noise needs a positive relative level or sigma");
  return spec.sigma;
}

// Draws the unit-scale noise realization used both for the relative scale and the data.
Eigen::VectorXd unit_noise(NoiseKind kind, Eigen::Index n, Rng& rng) {
  return add_noise(Eigen::VectorXd::Zero(n), NoiseModel{kind, 1.0}, rng);
}

// Zero-mean true field for the phantom; the mean is folded into shape.b0.
Eigen::VectorXd phantom_field(const PhantomConfig& ph, const KLConfig& cfg, StarShape& shape, Rng& rng) {
  if (ph.kind == PhantomKind::blob) {
    const Spectrum<double> spec = build_spectrum<double>(RoughnessParams{ph.s_true, ph.length_scale, 1, cfg.k});
    return sample_prior_field(rng, spec, cfg).second;
  }
  if (!(ph.r_gear > shape.r0)) throw ParameterError("gear radius must exceed r0");
  const double r_gear = ph.r_gear;
  const int n = ph.n_teeth;
  Eigen::VectorXd v =
      boundary_to_radial([r_gear, n](double iota) { return gear_curve(iota, r_gear, n); }, shape, cfg.m());
  const double mean = v.mean();
  v.array() -= mean;
  shape.b0 *= std::exp(mean);
  return v;
}

void finish_problem(ImagingProblem& p, const NoiseSpec& noise, const Eigen::VectorXd& clean, Rng& rng) {
  const Eigen::VectorXd eps = unit_noise(noise.kind, clean.size(), rng);
  p.noise = NoiseModel{noise.kind, noise_sigma(noise, clean, eps)};
  p.y = clean + p.noise.sigma * eps;
}

}  // namespace

SignalProblem make_signal_problem(int k, double relative_noise, std::uint64_t seed) {
  SignalProblem p;
  p.cfg = KLConfig{k, 1.0};
  p.cfg.validate();
  const int m = p.cfg.m();
  p.truth.resize(m);
  for (int t = 0; t < m; ++t) p.truth(t) = std::pow(p.cfg.node(t), 0.75);
  p.offset = p.truth.mean();
  p.truth.array() -= p.offset;
  Rng rng(seed);
  const Eigen::VectorXd eps = standard_normal<double>(rng, m);
  p.sigma_noise = sigma_from_relative_level(relative_noise, p.truth, eps);
  p.y = p.truth + p.sigma_noise * eps;
  return p;
}

Image ImagingProblem::render(const Eigen::VectorXd& v) const {
  return rasterizer->render(radial_function(v, shape), smooth_width);
}

ImagingProblem make_ct_problem(const CtConfig& cfg, std::uint64_t seed) {
  ImagingProblem p;
  p.cfg = KLConfig{cfg.k, 1.0};
  p.cfg.validate();
  p.shape = cfg.shape;
  p.grid = cfg.grid;
  p.smooth_width = cfg.smooth_width;
  if (p.smooth_width < 0) p.smooth_width = 0.5 * p.grid.pixel_size();
  Rng rng(seed);
  p.v_true = phantom_field(cfg.phantom, p.cfg, p.shape, rng);
  p.T_true = radial_function(p.v_true, p.shape);
  p.rasterizer = std::make_shared<const StarRasterizer>(p.shape, p.grid, p.cfg.m());
  p.projector = std::make_shared<const ProjectionOperator>(p.grid, cfg.scan);
  p.truth = p.rasterizer->render(p.T_true, p.smooth_width);
  finish_problem(p, cfg.noise, p.projector->apply_flat(p.truth), rng);

  auto ras = p.rasterizer;
  auto proj = p.projector;
  const StarShape shape = p.shape;
  const double w = p.smooth_width;
  p.forward = [ras, proj, shape, w](const Eigen::VectorXd& v) {
    return proj->apply_flat(ras->render(radial_function(v, shape), w));
  };
  return p;
}

ImagingProblem make_inpaint_problem(const InpaintConfig& cfg, std::uint64_t seed) {
  return make_inpaint_problem(cfg, stripe_mask(cfg.grid.n, cfg.n_stripes, cfg.stripe_width), seed);
}

ImagingProblem make_inpaint_problem(const InpaintConfig& cfg, const Mask& mask, std::uint64_t seed) {
  ImagingProblem p;
  p.cfg = KLConfig{cfg.k, 1.0};
  p.cfg.validate();
  p.shape = cfg.shape;
  p.grid = cfg.grid;
  if (mask.rows() != p.grid.n || mask.cols() != p.grid.n) throw StructuralError("mask and image sizes differ");
  p.mask = mask;
  p.smooth_width = cfg.smooth_width < 0 ? 0.5 * p.grid.pixel_size() : cfg.smooth_width;
  Rng rng(seed);
  p.v_true = phantom_field(cfg.phantom, p.cfg, p.shape, rng);
  p.T_true = radial_function(p.v_true, p.shape);
  p.rasterizer = std::make_shared<const StarRasterizer>(p.shape, p.grid, p.cfg.m());
  p.truth = p.rasterizer->render(p.T_true, p.smooth_width);
  finish_problem(p, cfg.noise, inpaint_forward(p.truth, p.mask), rng);

  auto ras = p.rasterizer;
  const Mask kept = p.mask;
  const StarShape shape = p.shape;
  const double w = p.smooth_width;
  p.forward = [ras, kept, shape, w](const Eigen::VectorXd& v) {
    return inpaint_forward(ras->render(radial_function(v, shape), w), kept);
  };
  return p;
}

NodeSummary radial_summary(const Chain& chain, const HierarchicalModel& model, const StarShape& shape,
                           double gamma) {
  Eigen::MatrixXd T = field_draws(chain, model);
  T = (shape.r0 + shape.b0 * T.array().exp()).matrix();
  return summarize_columns(T, gamma);
}

Eigen::VectorXd gear_tooth_angles(int n_teeth) {
  if (n_teeth < 1) throw ParameterError("need at least one tooth");
  Eigen::VectorXd a(n_teeth);
  for (int i = 0; i < n_teeth; ++i) a(i) = (0.5 * std::numbers::pi + 2.0 * std::numbers::pi * i) / n_teeth;
  return a;
}

int count_tooth_peaks(const Eigen::VectorXd& T, int n_teeth, double tolerance) {
  const Eigen::Index m = T.size();
  if (m < 3) throw StructuralError("need at least three nodes");
  const Eigen::VectorXd nodes = angular_nodes(static_cast<int>(m));
  const Eigen::VectorXd teeth = gear_tooth_angles(n_teeth);
  int found = 0;
  for (Eigen::Index i = 0; i < teeth.size(); ++i) {
    for (Eigen::Index t = 0; t < m; ++t) {
      const double prev = T((t + m - 1) % m), next = T((t + 1) % m);
      if (!(T(t) > prev && T(t) >= next)) continue;
      double dist = std::abs(nodes(t) - teeth(i));
      dist = std::min(dist, 2.0 * std::numbers::pi - dist);
      if (dist <= tolerance) {
        ++found;
        break;
      }
    }
  }
  return found;
}

}  // namespace roughcurve
