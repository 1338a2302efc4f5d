#ifndef ROUGHCURVE_FORWARD_HPP
#define ROUGHCURVE_FORWARD_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <random>
#include <vector>

#include "roughcurve/geometry.hpp"

namespace roughcurve {

// Parallel-beam layout: angles a * theta_max / n_angles, detector cell centers
// uniformly covering [-detector_span/2, detector_span/2].
struct ScanGeometry {
  double theta_max = 0.5 * 3.141592653589793;
  int n_angles = 96;
  int n_detectors = 64;
  double detector_span = 1.4142135623730951;

  void validate() const;
  double angle(int a) const { return a * theta_max / n_angles; }
  double detector_pitch() const { return detector_span / n_detectors; }
  double offset(int t) const { return -0.5 * detector_span + (t + 0.5) * detector_pitch(); }
};

// n_angles x n_detectors line integrals.
using Sinogram = Eigen::MatrixXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Sparse system matrix of exact ray/pixel intersection lengths, rows ordered
// (angle, detector), columns in row-major pixel order.
class ProjectionOperator {
 public:
  ProjectionOperator(const ImageGrid& grid, const ScanGeometry& geom);

  Sinogram apply(const Image& image) const;
  // Same result as a flat row-major vector of length n_angles * n_detectors.
  Eigen::VectorXd apply_flat(const Image& image) const;

  const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const { return A_; }
  const ScanGeometry& geometry() const { return geom_; }
  const ImageGrid& grid() const { return grid_; }

 private:
  ImageGrid grid_;
  ScanGeometry geom_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> A_;
};

Sinogram radon_forward(const Image& image, const ImageGrid& grid, const ScanGeometry& geom);

Eigen::VectorXd identity_forward(const Eigen::VectorXd& v);

// Observed pixels in row-major order.
Eigen::VectorXd inpaint_forward(const Image& image, const Mask& mask);

// Horizontal stripes of missing rows, evenly spaced over the image.
Mask stripe_mask(int n, int n_stripes, int stripe_width);

enum class NoiseKind { gaussian, laplace };

struct NoiseModel {
  NoiseKind kind = NoiseKind::gaussian;
  double sigma = 1.0;  // per-component standard deviation

  void validate() const;
  // Laplace scale b with variance 2 b^2 = sigma^2.
  double laplace_scale() const { return sigma / 1.4142135623730951; }
};

// r ||y_clean|| / ||eps||.
double sigma_from_relative_level(double r, const Eigen::VectorXd& y_clean, const Eigen::VectorXd& eps);

Eigen::VectorXd add_noise(const Eigen::VectorXd& y_clean, const NoiseModel& noise, std::mt19937_64& rng);

double log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& y_pred, const NoiseModel& noise);

// d log_likelihood / d y_pred (a subgradient for Laplace at zero residual).
Eigen::VectorXd log_likelihood_gradient(const Eigen::VectorXd& y, const Eigen::VectorXd& y_pred,
                                        const NoiseModel& noise);

}  // namespace roughcurve

#endif  // ROUGHCURVE_FORWARD_HPP
