#include <doctest.h>

#include <cmath>
#include <numbers>

#include "roughcurve/errors.hpp"
#include "roughcurve/experiments.hpp"

using namespace roughcurve;

TEST_CASE("signal problem") {
  const SignalProblem p = make_signal_problem(64, 0.01, 3);
  CHECK(p.cfg.m() == 129);
  CHECK(std::abs(p.truth.mean()) < 1e-14);
  for (int t = 0; t < p.cfg.m(); ++t) CHECK(std::abs(p.truth(t) + p.offset - std::pow(t / 129.0, 0.75)) < 1e-14);
  CHECK(p.sigma_noise > 0);
  // The realized noise has relative size r exactly.
  CHECK((p.y - p.truth).norm() == doctest::Approx(0.01 * p.truth.norm()).epsilon(1e-12));
  const SignalProblem q = make_signal_problem(64, 0.01, 3);
  CHECK(p.y == q.y);
  CHECK(make_signal_problem(64, 0.01, 4).y != p.y);
}

TEST_CASE("CT problem") {
  CtConfig cfg;
  cfg.k = 16;
  cfg.grid = ImageGrid{32, 0.5};
  cfg.scan = ScanGeometry{std::numbers::pi / 2, 12, 24, std::sqrt(2.0)};
  const ImagingProblem p = make_ct_problem(cfg, 5);
  CHECK(p.y.size() == 12 * 24);
  CHECK(p.v_true.size() == 33);
  CHECK(std::abs(p.v_true.mean()) < 1e-12);
  CHECK(p.smooth_width == doctest::Approx(0.5 / 32));
  CHECK((p.forward(p.v_true) - p.projector->apply_flat(p.truth)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((p.render(p.v_true) - p.truth).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXd clean = p.forward(p.v_true);
  CHECK((p.y - clean).norm() == doctest::Approx(0.01 * clean.norm()).epsilon(1e-12));
  CHECK(p.noise.sigma > 0);
}

TEST_CASE("inpaint problem with a gear") {
  InpaintConfig cfg;
  cfg.k = 64;
  cfg.grid = ImageGrid{64, 0.5};
  cfg.n_stripes = 2;
  cfg.stripe_width = 2;
  const ImagingProblem p = make_inpaint_problem(cfg, 7);
  CHECK(p.mask.count() == 64 * 60);
  CHECK(p.y.size() == 64 * 60);
  CHECK(std::abs(p.v_true.mean()) < 1e-12);
  // b0 absorbs the mean, so the radii still trace the gear.
  const Eigen::VectorXd nodes = angular_nodes(p.cfg.m());
  for (int t = 0; t < p.cfg.m(); ++t) CHECK(std::abs(p.T_true(t) - gear_curve(nodes(t), 0.3, 10)) < 1e-12);
  CHECK(p.shape.b0 != cfg.shape.b0);

  cfg.noise = NoiseSpec{NoiseKind::laplace, 0.0, 0.05};
  const ImagingProblem q = make_inpaint_problem(cfg, Mask::Constant(64, 64, true), 7);
  CHECK(q.noise.kind == NoiseKind::laplace);
  CHECK(q.noise.sigma == 0.05);
  CHECK(q.y.size() == 64 * 64);
  CHECK_THROWS_AS(make_inpaint_problem(cfg, Mask::Constant(8, 8, true), 7), StructuralError);

  cfg.phantom.r_gear = 0.1;
  CHECK_THROWS_AS(make_inpaint_problem(cfg, 7), ParameterError);
}

TEST_CASE("tooth angles and peaks") {
  const Eigen::VectorXd a = gear_tooth_angles(10);
  for (int i = 0; i < 10; ++i) CHECK(gear_curve(a(i), 0.3, 10) == doctest::Approx(0.3 * (1 + 0.1 * std::tanh(10.0))));
  const int m = 257;
  const Eigen::VectorXd nodes = angular_nodes(m);
  Eigen::VectorXd T(m);
  for (int t = 0; t < m; ++t) T(t) = gear_curve(nodes(t), 0.3, 10);
  CHECK(count_tooth_peaks(T, 10, std::numbers::pi / 20) == 10);
  CHECK(count_tooth_peaks(Eigen::VectorXd::Constant(m, 0.3), 10, std::numbers::pi / 20) == 0);
  Eigen::VectorXd shifted(m);
  for (int t = 0; t < m; ++t) shifted(t) = gear_curve(nodes(t) + std::numbers::pi / 10, 0.3, 10);
  CHECK(count_tooth_peaks(shifted, 10, std::numbers::pi / 40) == 0);
  CHECK_THROWS_AS(gear_tooth_angles(0), ParameterError);
}

TEST_CASE("radial summary") {
  const KLConfig kl{4, 1.0};
  const HierarchicalModel model = HierarchicalModel::data_fitting(kl, NoiseModel{NoiseKind::gaussian, 0.1});
  Chain chain;
  chain.s_draws = Eigen::VectorXd::Constant(3, 1.0);
  chain.u_draws = Eigen::MatrixXd::Zero(3, 8);
  const StarShape shape;
  const NodeSummary s = radial_summary(chain, model, shape, 0.9);
  CHECK((s.mean.array() - 0.25).abs().maxCoeff() < 1e-15);
  CHECK((s.lo.array() - 0.25).abs().maxCoeff() < 1e-15);
}
