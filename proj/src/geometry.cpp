#include "roughcurve/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "roughcurve/errors.hpp"

namespace roughcurve {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxExponent = 700.0;

double wrap_angle(double iota) {
  double a = std::fmod(iota, kTwoPi);
  if (a < 0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void StarShape::validate() const {
  if (!(r0 > 0)) throw ParameterError("minimum radius r0 must be positive");
  if (!(b0 > 0)) throw ParameterError("radial scale b0 must be positive");
}

void ImageGrid::validate() const {
  if (n < 2) throw ParameterError("image grid needs n >= 2");
  if (!(extent > 0)) throw ParameterError("image extent must be positive");
}

Eigen::VectorXd radial_function(const Eigen::VectorXd& v, const StarShape& shape) {
  shape.validate();
  if (v.size() > 0 && !(v.maxCoeff() <= kMaxExponent))
    throw NumericalError("boundary field saturates exp (v > 700 or NaN)");
  return (shape.r0 + shape.b0 * v.array().exp()).matrix();
}

double gear_curve(double iota, double r_gear, int n_teeth) {
  return r_gear * (1.0 + 0.1 * std::tanh(10.0 * std::sin(n_teeth * iota)));
}

Eigen::VectorXd angular_nodes(int m) {
  Eigen::VectorXd out(m);
  for (int t = 0; t < m; ++t) out(t) = kTwoPi * t / m;
  return out;
}

Eigen::VectorXd boundary_to_radial(const std::function<double(double)>& curve, const StarShape& shape, int m) {
  shape.validate();
  if (m < 1) throw ParameterError("node count must be positive");
  Eigen::VectorXd v(m);
  for (int t = 0; t < m; ++t) {
    const double iota = kTwoPi * t / m;
    const double r = curve(iota);
    if (!(r > shape.r0))
      throw DomainError("curve radius " + std::to_string(r) + " at node " + std::to_string(t) + " is not above r0");
    v(t) = std::log((r - shape.r0) / shape.b0);
  }
  return v;
}

double interpolate_radius(const Eigen::VectorXd& T, double iota) {
  const int m = static_cast<int>(T.size());
  const double pos = wrap_angle(iota) * m / kTwoPi;
  int i0 = static_cast<int>(std::floor(pos));
  const double frac = pos - i0;
  i0 %= m;
  return (1.0 - frac) * T(i0) + frac * T((i0 + 1) % m);
}

StarRasterizer::StarRasterizer(const StarShape& shape, const ImageGrid& grid, int m)
    : shape_(shape), grid_(grid), m_(m) {
  shape.validate();
  grid.validate();
  if (m < 4) throw ParameterError("rasterization needs at least 4 angular nodes");
  const int n = grid.n;
  rho_.resize(static_cast<size_t>(n) * n);
  node_.resize(rho_.size());
  frac_.resize(rho_.size());
  for (int r = 0; r < n; ++r) {
    const double dy = grid.coord(r) - shape.center.y();
    for (int c = 0; c < n; ++c) {
      const double dx = grid.coord(c) - shape.center.x();
      const size_t p = static_cast<size_t>(r) * n + c;
      rho_[p] = std::hypot(dx, dy);
      const double pos = wrap_angle(std::atan2(dy, dx)) * m / kTwoPi;
      int i0 = static_cast<int>(std::floor(pos));
      frac_[p] = pos - i0;
      node_[p] = i0 % m;
    }
  }
}

Image StarRasterizer::render(const Eigen::VectorXd& T, double smooth_width) const {
  if (T.size() != m_)
    throw StructuralError("radial vector has " + std::to_string(T.size()) + " nodes, rasterizer expects " +
                          std::to_string(m_));
  if (smooth_width < 0) throw ParameterError("smoothing width must be nonnegative");
  const int n = grid_.n;
  const double lo = shape_.alpha_out, jump = shape_.alpha_in - shape_.alpha_out;
  Image img(n, n);
  double* out = img.data();
  for (size_t p = 0; p < rho_.size(); ++p) {
    const int i0 = node_[p];
    const double radius = (1.0 - frac_[p]) * T(i0) + frac_[p] * T((i0 + 1) % m_);
    if (smooth_width == 0.0)
      out[p] = rho_[p] < radius ? shape_.alpha_in : shape_.alpha_out;
    else
      out[p] = lo + jump * sigmoid((radius - rho_[p]) / smooth_width);
  }
  return img;
}

Image rasterize_star(const Eigen::VectorXd& T, const StarShape& shape, const ImageGrid& grid, double smooth_width) {
  return StarRasterizer(shape, grid, static_cast<int>(T.size())).render(T, smooth_width);
}

}  // namespace roughcurve
