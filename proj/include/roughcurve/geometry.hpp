#ifndef ROUGHCURVE_GEOMETRY_HPP
#define ROUGHCURVE_GEOMETRY_HPP

// Star-shaped objects: T(iota) = r0 + b0 exp(V(iota)) around a known center,
// rasterized to a piecewise-constant attenuation image.

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace roughcurve {

// Row r holds y = -extent + (r + 1/2) h, column c holds x = -extent + (c + 1/2) h.
using Image = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct StarShape {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double r0 = 0.2;
  double b0 = 0.05;
  double alpha_in = 2.0;
  double alpha_out = 1.0;

  void validate() const;
};

struct ImageGrid {
  int n = 64;
  double extent = 0.5;  // pixels tile [-extent, extent]^2

  void validate() const;
  double pixel_size() const { return 2.0 * extent / n; }
  double coord(int i) const { return -extent + (i + 0.5) * pixel_size(); }
};

// T_t = r0 + b0 exp(v_t). Throws NumericalError if any v_t > 700.
Eigen::VectorXd radial_function(const Eigen::VectorXd& v, const StarShape& shape);

double gear_curve(double iota, double r_gear, int n_teeth);

// Inverse of radial_function at the nodes iota_t = 2 pi t / m.
Eigen::VectorXd boundary_to_radial(const std::function<double(double)>& curve, const StarShape& shape, int m);

// Angular node positions 2 pi t / m.
Eigen::VectorXd angular_nodes(int m);

// Periodic linear interpolation of nodal radii at angle iota (any real).
double interpolate_radius(const Eigen::VectorXd& T, double iota);

// Rasterizes with a hard edge (smooth_width == 0) or a logistic edge profile
// of width smooth_width in physical units.
Image rasterize_star(const Eigen::VectorXd& T, const StarShape& shape, const ImageGrid& grid,
                     double smooth_width = 0.0);

// Caches the polar coordinates of every pixel center for repeated rendering
// with the same shape center, grid, and node count.
class StarRasterizer {
 public:
  StarRasterizer(const StarShape& shape, const ImageGrid& grid, int m);

  Image render(const Eigen::VectorXd& T, double smooth_width = 0.0) const;

  const ImageGrid& grid() const { return grid_; }
  int nodes() const { return m_; }

 private:
  StarShape shape_;
  ImageGrid grid_;
  int m_;
  std::vector<double> rho_;
  std::vector<int> node_;
  std::vector<double> frac_;
};

}  // namespace roughcurve

#endif  // ROUGHCURVE_GEOMETRY_HPP
