#include "roughcurve/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "roughcurve/errors.hpp"

namespace roughcurve {

void ScanGeometry::validate() const {
  if (!(theta_max > 0 && theta_max <= std::numbers::pi + 1e-12))
    throw ParameterError("theta_max must lie in (0, pi]");
  if (n_angles < 1) throw ParameterError("need at least one projection angle");
  if (n_detectors < 1) throw ParameterError("need at least one detector");
  if (!(detector_span > 0)) throw ParameterError("detector span must be positive");
}

namespace {

// Appends the intersection lengths of one ray with the pixel grid (Siddon).
void trace_ray(const ImageGrid& grid, double theta, double offset, int row,
               std::vector<Eigen::Triplet<double>>& out, std::vector<double>& params) {
  const double E = grid.extent, h = grid.pixel_size();
  const int n = grid.n;
  const double nx = std::cos(theta), ny = std::sin(theta);
  const double dx = -ny, dy = nx;
  const double px = offset * nx, py = offset * ny;
  constexpr double kTiny = 1e-14;

  double lo = -1e300, hi = 1e300;
  auto clip = [&](double p, double d) {
    if (std::abs(d) < kTiny) return p > -E && p < E;
    double a = (-E - p) / d, b = (E - p) / d;
    if (a > b) std::swap(a, b);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    return true;
  };
  if (!clip(px, dx) || !clip(py, dy) || !(hi > lo)) return;

  params.clear();
  params.push_back(lo);
  params.push_back(hi);
  auto planes = [&](double p, double d) {
    if (std::abs(d) < kTiny) return;
    for (int i = 0; i <= n; ++i) {
      const double lam = (-E + i * h - p) / d;
      if (lam > lo && lam < hi) params.push_back(lam);
    }
  };
  planes(px, dx);
  planes(py, dy);
  std::sort(params.begin(), params.end());

  for (size_t i = 0; i + 1 < params.size(); ++i) {
    const double len = params[i + 1] - params[i];
    if (len <= 1e-15) continue;
    const double mid = 0.5 * (params[i] + params[i + 1]);
    const int c = std::clamp(static_cast<int>(std::floor((px + mid * dx + E) / h)), 0, n - 1);
    const int r = std::clamp(static_cast<int>(std::floor((py + mid * dy + E) / h)), 0, n - 1);
    out.emplace_back(row, r * n + c, len);
  }
}

}  // namespace

ProjectionOperator::ProjectionOperator(const ImageGrid& grid, const ScanGeometry& geom) : grid_(grid), geom_(geom) {
  grid.validate();
  geom.validate();
  const int rows = geom.n_angles * geom.n_detectors;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(rows) * 2 * grid.n);
  std::vector<double> params;
  for (int a = 0; a < geom.n_angles; ++a)
    for (int t = 0; t < geom.n_detectors; ++t)
      trace_ray(grid, geom.angle(a), geom.offset(t), a * geom.n_detectors + t, trips, params);
  A_.resize(rows, grid.n * grid.n);
  A_.setFromTriplets(trips.begin(), trips.end());
}

Eigen::VectorXd ProjectionOperator::apply_flat(const Image& image) const {
  if (image.rows() != grid_.n || image.cols() != grid_.n)
    throw StructuralError("image size does not match the projection grid");
  return A_ * Eigen::Map<const Eigen::VectorXd>(image.data(), image.size());
}

Sinogram ProjectionOperator::apply(const Image& image) const {
  const Eigen::VectorXd flat = apply_flat(image);
  using RowMajorMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajorMat>(flat.data(), geom_.n_angles, geom_.n_detectors);
}

Sinogram radon_forward(const Image& image, const ImageGrid& grid, const ScanGeometry& geom) {
  return ProjectionOperator(grid, geom).apply(image);
}

Eigen::VectorXd identity_forward(const Eigen::VectorXd& v) { return v; }

Eigen::VectorXd inpaint_forward(const Image& image, const Mask& mask) {
  if (image.rows() != mask.rows() || image.cols() != mask.cols())
    throw StructuralError("mask and image sizes differ");
  const Eigen::Index kept = mask.count();
  if (kept == 0) throw StructuralError("mask keeps no pixels");
  Eigen::VectorXd out(kept);
  Eigen::Index i = 0;
  for (Eigen::Index r = 0; r < image.rows(); ++r)
    for (Eigen::Index c = 0; c < image.cols(); ++c)
      if (mask(r, c)) out(i++) = image(r, c);
  return out;
}

Mask stripe_mask(int n, int n_stripes, int stripe_width) {
  if (n < 1 || n_stripes < 0 || stripe_width < 0 || n_stripes * stripe_width >= n)
    throw ParameterError("stripe layout does not fit the image");
  Mask mask = Mask::Constant(n, n, true);
  for (int s = 0; s < n_stripes; ++s) {
    const int centre = static_cast<int>((s + 0.5) * n / n_stripes);
    const int first = std::clamp(centre - stripe_width / 2, 0, n - stripe_width);
    mask.middleRows(first, stripe_width).setConstant(false);
  }
  return mask;
}

void NoiseModel::validate() const {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw ParameterError("noise sigma must be positive and finite");
}

double sigma_from_relative_level(double r, const Eigen::VectorXd& y_clean, const Eigen::VectorXd& eps) {
  if (!(r > 0)) throw DomainError("relative noise level must be positive");
  const double ny = y_clean.norm(), ne = eps.norm();
  if (!(ny > 0)) throw DomainError("clean signal is zero; relative noise scale is degenerate");
  if (!(ne > 0)) throw DomainError("noise realization is zero");
  return r * ny / ne;
}

Eigen::VectorXd add_noise(const Eigen::VectorXd& y_clean, const NoiseModel& noise, std::mt19937_64& rng) {
  noise.validate();
  Eigen::VectorXd y = y_clean;
  if (noise.kind == NoiseKind::gaussian) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += noise.sigma * normal(rng);
  } else {
    // Laplace(0, b) as the difference of two Exp(1/b) variables.
    std::exponential_distribution<double> expo(1.0);
    const double b = noise.laplace_scale();
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += b * (expo(rng) - expo(rng));
  }
  return y;
}

double log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& y_pred, const NoiseModel& noise) {
  if (y.size() != y_pred.size())
    throw StructuralError("data length " + std::to_string(y.size()) + " differs from prediction length " +
                          std::to_string(y_pred.size()));
  noise.validate();
  const double p = static_cast<double>(y.size());
  if (noise.kind == NoiseKind::gaussian) {
    const double s2 = noise.sigma * noise.sigma;
    return -0.5 * p * std::log(2.0 * std::numbers::pi * s2) - (y - y_pred).squaredNorm() / (2.0 * s2);
  }
  const double b = noise.laplace_scale();
  return -p * std::log(2.0 * b) - (y - y_pred).lpNorm<1>() / b;
}

Eigen::VectorXd log_likelihood_gradient(const Eigen::VectorXd& y, const Eigen::VectorXd& y_pred,
                                        const NoiseModel& noise) {
  if (y.size() != y_pred.size()) throw StructuralError("data and prediction lengths differ");
  noise.validate();
  if (noise.kind == NoiseKind::gaussian) return (y - y_pred) / (noise.sigma * noise.sigma);
  return (y - y_pred).array().sign().matrix() / noise.laplace_scale();
}

}  // namespace roughcurve
