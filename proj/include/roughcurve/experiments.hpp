#ifndef ROUGHCURVE_EXPERIMENTS_HPP
#define ROUGHCURVE_EXPERIMENTS_HPP

// Synthetic test problems: the 1-D data-fitting signal and star-shaped
// phantoms observed through CT projections or a masked, noisy image.

#include <Eigen/Core>
#include <cstdint>
#include <memory>

#include "roughcurve/forward.hpp"
#include "roughcurve/geometry.hpp"
#include "roughcurve/inference.hpp"
#include "roughcurve/klmap.hpp"

namespace roughcurve {

// V(x) = x^{3/4} on the mesh, split into its mean and a zero-mean part.
struct SignalProblem {
  KLConfig cfg;
  Eigen::VectorXd truth;  // zero mean
  double offset = 0.0;
  Eigen::VectorXd y;      // truth + noise
  double sigma_noise = 0.0;
};

SignalProblem make_signal_problem(int k, double relative_noise, std::uint64_t seed);

enum class PhantomKind { blob, gear };

struct PhantomConfig {
  PhantomKind kind = PhantomKind::blob;
  double s_true = 1.064;  // blob: roughness of the prior draw
  double length_scale = 100.0;
  double r_gear = 0.3;
  int n_teeth = 10;
};

// Noise given either as a relative level r or as an absolute sigma (r <= 0).
struct NoiseSpec {
  NoiseKind kind = NoiseKind::gaussian;
  double relative = 0.01;
  double sigma = 0.0;
};

struct ImagingProblem {
  KLConfig cfg;
  StarShape shape;  // b0 absorbs the constant part of the true field
  ImageGrid grid;
  double smooth_width = 0.0;
  Eigen::VectorXd v_true;  // zero mean
  Eigen::VectorXd T_true;
  Image truth;
  Eigen::VectorXd y;
  NoiseModel noise;
  ForwardOperator forward;
  std::shared_ptr<const StarRasterizer> rasterizer;
  std::shared_ptr<const ProjectionOperator> projector;  // CT only
  Mask mask;                                            // inpainting only

  // Attenuation image of a field v.
  Image render(const Eigen::VectorXd& v) const;
};

struct CtConfig {
  int k = 64;
  ImageGrid grid{64, 0.5};
  ScanGeometry scan;
  StarShape shape;
  double smooth_width = -1.0;  // negative: half a pixel
  PhantomConfig phantom;
  NoiseSpec noise;
};

struct InpaintConfig {
  int k = 128;
  ImageGrid grid{128, 0.5};
  StarShape shape{Eigen::Vector2d::Zero(), 0.2, 0.05, 1.0, 0.0};
  double smooth_width = -1.0;  // negative: half a pixel
  PhantomConfig phantom{PhantomKind::gear};
  NoiseSpec noise{NoiseKind::gaussian, 0.02, 0.0};
  int n_stripes = 4;
  int stripe_width = 3;
};

ImagingProblem make_ct_problem(const CtConfig& cfg, std::uint64_t seed);
ImagingProblem make_inpaint_problem(const InpaintConfig& cfg, std::uint64_t seed);
// Same, with an explicit observation mask.
ImagingProblem make_inpaint_problem(const InpaintConfig& cfg, const Mask& mask, std::uint64_t seed);

// Per-node mean and gamma-HDI of T = r0 + b0 exp(v) over the chain.
NodeSummary radial_summary(const Chain& chain, const HierarchicalModel& model, const StarShape& shape, double gamma);

// Angles of the n_teeth tooth centres of the gear curve.
Eigen::VectorXd gear_tooth_angles(int n_teeth);

// Number of teeth with a local maximum of the periodic nodal sequence T
// within tolerance of the tooth centre.
int count_tooth_peaks(const Eigen::VectorXd& T, int n_teeth, double tolerance);

}  // namespace roughcurve

#endif  // ROUGHCURVE_EXPERIMENTS_HPP
