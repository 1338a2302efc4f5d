#include <doctest.h>

#include <cmath>
#include <numbers>

#include "roughcurve/errors.hpp"
#include "roughcurve/geometry.hpp"
#include "roughcurve/klmap.hpp"

using namespace roughcurve;

TEST_CASE("radial function") {
  const StarShape shape;
  const Eigen::VectorXd T0 = radial_function(Eigen::VectorXd::Zero(16), shape);
  CHECK((T0.array() - 0.25).abs().maxCoeff() < 1e-15);
  const Eigen::VectorXd T1 = radial_function(Eigen::VectorXd::Constant(16, std::log(2.0)), shape);
  CHECK((T1.array() - 0.30).abs().maxCoeff() < 1e-15);
  Rng rng(1);
  const Eigen::VectorXd v = 3.0 * standard_normal<double>(rng, 200);
  CHECK(radial_function(v, shape).minCoeff() > shape.r0);
  Eigen::VectorXd big = Eigen::VectorXd::Zero(4);
  big(2) = 701.0;
  CHECK_THROWS_AS(radial_function(big, shape), NumericalError);
  CHECK_THROWS_AS(radial_function(v, StarShape{Eigen::Vector2d::Zero(), 0.0, 0.05, 2, 1}), ParameterError);
}

TEST_CASE("gear curve") {
  CHECK(gear_curve(0.0, 0.3, 10) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(std::abs(gear_curve(std::numbers::pi / 20, 0.3, 10) - 0.3 * (1 + 0.1 * std::tanh(10.0))) < 1e-15);
  CHECK(std::abs(gear_curve(std::numbers::pi / 20, 0.3, 10) - 0.33) < 1e-8);
  double lo = 1, hi = 0;
  for (int i = 0; i < 100000; ++i) {
    const double g = gear_curve(2 * std::numbers::pi * i / 100000, 0.3, 10);
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  CHECK(lo >= 0.27 - 1e-12);
  CHECK(hi <= 0.33 + 1e-12);
}

TEST_CASE("boundary to radial") {
  const StarShape shape;
  const Eigen::VectorXd v0 = boundary_to_radial([&](double) { return shape.r0 + shape.b0; }, shape, 32);
  CHECK(v0.cwiseAbs().maxCoeff() < 1e-15);

  const int m = 512;
  auto gear = [](double iota) { return gear_curve(iota, 0.3, 10); };
  const Eigen::VectorXd T = radial_function(boundary_to_radial(gear, shape, m), shape);
  const Eigen::VectorXd nodes = angular_nodes(m);
  for (int t = 0; t < m; ++t) CHECK(std::abs(T(t) - gear(nodes(t))) < 1e-12);

  CHECK_THROWS_AS(boundary_to_radial([&](double) { return shape.r0; }, shape, 8), DomainError);

  Rng rng(4);
  const Eigen::VectorXd v = standard_normal<double>(rng, 64);
  const Eigen::VectorXd Tv = radial_function(v, shape);
  const Eigen::VectorXd back = boundary_to_radial([&](double iota) { return interpolate_radius(Tv, iota); }, shape, 64);
  CHECK((back - v).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("angular nodes and interpolation") {
  const Eigen::VectorXd nodes = angular_nodes(8);
  CHECK(nodes(0) == 0.0);
  CHECK(nodes(2) == doctest::Approx(std::numbers::pi / 2));
  Eigen::VectorXd T(4);
  T << 1, 2, 3, 4;
  CHECK(interpolate_radius(T, 0.0) == 1.0);
  CHECK(interpolate_radius(T, std::numbers::pi / 4) == doctest::Approx(1.5));
  CHECK(interpolate_radius(T, 7 * std::numbers::pi / 4) == doctest::Approx(2.5));
  CHECK(interpolate_radius(T, -std::numbers::pi / 4) == doctest::Approx(2.5));
  CHECK(interpolate_radius(T, 2 * std::numbers::pi + std::numbers::pi / 2) == doctest::Approx(2.0));
}

TEST_CASE("rasterize: center and exterior") {
  const StarShape shape;
  const ImageGrid grid{65, 0.5};
  const Eigen::VectorXd T = radial_function(Eigen::VectorXd::Zero(16), shape);
  const Image img = rasterize_star(T, shape, grid);
  CHECK(img(32, 32) == shape.alpha_in);
  CHECK(img(0, 0) == shape.alpha_out);
  CHECK(img(32, 64) == shape.alpha_out);
}

TEST_CASE("rasterize: disk area") {
  const StarShape shape{Eigen::Vector2d::Zero(), 0.2, 0.05, 1.0, 0.0};
  const ImageGrid grid{256, 0.5};
  const double R = 0.25;
  const Image img = rasterize_star(Eigen::VectorXd::Constant(64, R), shape, grid);
  const double fraction = img.sum() / img.size();
  const double expected = std::numbers::pi * R * R / (4 * grid.extent * grid.extent);
  CHECK(std::abs(fraction - expected) / expected <= 2.0 / grid.n);
}

TEST_CASE("rasterize: monotone in T") {
  const StarShape shape;
  const ImageGrid grid{96, 0.5};
  Rng rng(8);
  const Eigen::VectorXd v = 0.5 * standard_normal<double>(rng, 33);
  const Eigen::VectorXd T = radial_function(v, shape);
  const Image small = rasterize_star(T, shape, grid);
  const Image large = rasterize_star(Eigen::VectorXd(T.array() + 0.01), shape, grid);
  for (Eigen::Index i = 0; i < small.size(); ++i)
    if (small.data()[i] == shape.alpha_in) CHECK(large.data()[i] == shape.alpha_in);
  CHECK((large.array() == shape.alpha_in).count() > (small.array() == shape.alpha_in).count());
}

TEST_CASE("rasterize: rotating T by one node rotates the image") {
  const StarShape shape{Eigen::Vector2d::Zero(), 0.1, 0.05, 1.0, 0.0};
  const ImageGrid grid{101, 0.5};
  const int m = 4;
  Eigen::VectorXd T = Eigen::VectorXd::Constant(m, 0.15);
  T(0) = 0.4;  // spike along +x
  const Image a = rasterize_star(T, shape, grid);
  Eigen::VectorXd Tr(m);
  for (int t = 0; t < m; ++t) Tr((t + 1) % m) = T(t);
  const Image b = rasterize_star(Tr, shape, grid);
  // a quarter turn maps pixel (row r, col c) to (row c, col n-1-r)
  const int n = grid.n;
  int mismatches = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) mismatches += a(r, c) != b(c, n - 1 - r);
  CHECK(mismatches <= 2);
  CHECK(a(50, 85) == 1.0);
  CHECK(a(85, 50) == 0.0);
  CHECK(b(85, 50) == 1.0);
}

TEST_CASE("rasterize: smoothed edge") {
  const StarShape shape{Eigen::Vector2d::Zero(), 0.2, 0.05, 3.0, 1.0};
  const ImageGrid grid{64, 0.5};
  const Eigen::VectorXd T = Eigen::VectorXd::Constant(32, 0.3);
  const Image img = rasterize_star(T, shape, grid, 0.01);
  CHECK(img.minCoeff() >= 1.0);
  CHECK(img.maxCoeff() <= 3.0);
  const Image hard = rasterize_star(T, shape, grid, 0.0);
  CHECK((img - hard).cwiseAbs().maxCoeff() <= 2.0);
  const Image tiny = rasterize_star(T, shape, grid, 1e-9);
  CHECK((tiny - hard).cwiseAbs().maxCoeff() < 1e-6);
  CHECK_THROWS_AS(rasterize_star(T, shape, grid, -1.0), ParameterError);
}

TEST_CASE("rasterizer errors and reuse") {
  const StarShape shape;
  const ImageGrid grid{32, 0.5};
  CHECK_THROWS_AS(StarRasterizer(shape, grid, 3), ParameterError);
  CHECK_THROWS_AS(StarRasterizer(shape, ImageGrid{1, 0.5}, 8), ParameterError);
  const StarRasterizer raster(shape, grid, 16);
  CHECK_THROWS_AS(raster.render(Eigen::VectorXd::Ones(8)), StructuralError);
  Rng rng(2);
  const Eigen::VectorXd T = radial_function(standard_normal<double>(rng, 16), shape);
  CHECK(raster.render(T, 0.01) == rasterize_star(T, shape, grid, 0.01));
}
