#ifndef ROUGHCURVE_KLMAP_HPP
#define ROUGHCURVE_KLMAP_HPP

// FFT-based Karhunen-Loeve mappings between standard-normal coefficients u
// (length 2k) and a zero-mean periodic field v on a uniform mesh.
//
// Coefficients are interleaved per frequency: h_j = u(2j-2), g_j = u(2j-1)
// (zero-based), j = 1..k. The fast map builds
//
//   fhat_j = kappa sqrt(mu_j) (g_j + i h_j),   j = 1..k,
//
// leaves the constant term and every index above k at zero, applies the
// 1/m-normalized inverse DFT and returns v = (Re f + Im f) / sqrt(2). In the
// sin-cos basis e_{2j-1} = sin(2 pi j x / l)/sqrt(pi), e_{2j} = cos(...)/sqrt(pi)
// this is
//
//   v = sum_j sqrt(mu_j) [ (g_j + h_j)/sqrt(2) e_{2j} + (g_j - h_j)/sqrt(2) e_{2j-1} ],
//
// which fixes kappa = m / sqrt(pi). The mesh has m = 2k + 1 nodes so that all
// 2k basis vectors stay linearly independent (an even mesh aliases the
// Nyquist sine to zero).

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <unsupported/Eigen/FFT>
#include <utility>
#include <vector>

#include "roughcurve/errors.hpp"
#include "roughcurve/spectrum.hpp"

namespace roughcurve {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Rng = std::mt19937_64;

inline constexpr double kSpectrumFloor = 1e-300;

struct KLConfig {
  int k = 1;
  double ell = 1.0;  // period length of [0, ell)

  int m() const { return 2 * k + 1; }
  int n_coeffs() const { return 2 * k; }
  double node(int t) const { return t * ell / m(); }  // t = 0..m-1

  void validate() const {
    if (k < 1 || (k & (k - 1)) != 0) throw ParameterError("truncation k must be a power of two");
    if (!(ell > 0)) throw ParameterError("period length must be positive");
  }
};

namespace detail {

template <typename Scalar>
Eigen::FFT<Scalar>& fft_engine() {
  thread_local Eigen::FFT<Scalar> engine;
  return engine;
}

template <typename Scalar>
void check_dims(Eigen::Index n, const Spectrum<Scalar>& spec, const KLConfig& cfg, Eigen::Index expected,
                const char* what) {
  cfg.validate();
  if (spec.k() != cfg.k) throw StructuralError("spectrum truncation does not match mesh configuration");
  if (n != expected)
    throw StructuralError(std::string(what) + " has length " + std::to_string(n) + ", expected " +
                          std::to_string(expected));
}

}  // namespace detail

// v = F(u) for a fixed spectrum.
template <typename Derived>
Vector<typename Derived::Scalar> forward_map(const Eigen::MatrixBase<Derived>& u,
                                             const Spectrum<typename Derived::Scalar>& spec, const KLConfig& cfg) {
  using Scalar = typename Derived::Scalar;
  using Complex = std::complex<Scalar>;
  detail::check_dims(u.size(), spec, cfg, cfg.n_coeffs(), "coefficient vector");

  const int m = cfg.m();
  const Scalar kappa = Scalar(m) / std::sqrt(std::numbers::pi_v<Scalar>);
  std::vector<Complex> fhat(m, Complex(0, 0));
  for (int j = 1; j <= cfg.k; ++j) {
    const Scalar amp = kappa * std::sqrt(spec.pair_value(j));
    fhat[j] = Complex(amp * u(2 * j - 1), amp * u(2 * j - 2));
  }
  std::vector<Complex> f;
  detail::fft_engine<Scalar>().inv(f, fhat);

  Vector<Scalar> v(m);
  const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
  for (int t = 0; t < m; ++t) v(t) = (f[t].real() + f[t].imag()) * inv_sqrt2;
  return v;
}

// u = F^{-1}(v). The DFT component at index 0 (the mean) and all indices
// above k are discarded, so F(F^{-1}(v)) is the zero-mean part of v.
template <typename Derived>
Vector<typename Derived::Scalar> inverse_map(const Eigen::MatrixBase<Derived>& v,
                                             const Spectrum<typename Derived::Scalar>& spec, const KLConfig& cfg,
                                             double floor = kSpectrumFloor) {
  using Scalar = typename Derived::Scalar;
  using Complex = std::complex<Scalar>;
  detail::check_dims(v.size(), spec, cfg, cfg.m(), "boundary field");

  const int m = cfg.m();
  std::vector<Complex> vin(m);
  for (int t = 0; t < m; ++t) vin[t] = Complex(v(t), 0);
  std::vector<Complex> vhat;
  detail::fft_engine<Scalar>().fwd(vhat, vin);

  const Scalar sqrt_pi = std::sqrt(std::numbers::pi_v<Scalar>);
  const Scalar sqrt2 = std::sqrt(Scalar(2));
  Vector<Scalar> u(cfg.n_coeffs());
  for (int j = 1; j <= cfg.k; ++j) {
    const Scalar mu = spec.pair_value(j);
    if (!(mu > Scalar(floor))) throw SingularSpectrumError("spectrum value below floor at frequency " + std::to_string(j));
    // cosine and sine amplitudes of frequency j
    const Scalar c = 2 * vhat[j].real() / m;
    const Scalar sn = -2 * vhat[j].imag() / m;
    const Scalar a = std::sqrt(mu) / sqrt_pi;
    u(2 * j - 1) = (c + sn) / (sqrt2 * a);  // g_j
    u(2 * j - 2) = (c - sn) / (sqrt2 * a);  // h_j
  }
  return u;
}

// Discretized sin-cos basis, m x 2k. Column 2j-2 (zero-based) is
// sin(2 pi j x / l)/sqrt(pi), column 2j-1 the matching cosine. Test oracle.
template <typename Scalar = double>
Matrix<Scalar> dense_basis(const KLConfig& cfg) {
  cfg.validate();
  const int m = cfg.m();
  const Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  const Scalar inv_sqrt_pi = 1 / std::sqrt(std::numbers::pi_v<Scalar>);
  Matrix<Scalar> B(m, cfg.n_coeffs());
  for (int t = 0; t < m; ++t) {
    const Scalar x = Scalar(cfg.node(t));
    for (int j = 1; j <= cfg.k; ++j) {
      const Scalar arg = two_pi * j * x / Scalar(cfg.ell);
      B(t, 2 * j - 2) = std::sin(arg) * inv_sqrt_pi;
      B(t, 2 * j - 1) = std::cos(arg) * inv_sqrt_pi;
    }
  }
  return B;
}

// O(m k) reference for forward_map: B diag(sqrt(lambda)) R u, where R rotates
// each (h_j, g_j) pair into ((g_j - h_j)/sqrt 2, (g_j + h_j)/sqrt 2).
template <typename Derived>
Vector<typename Derived::Scalar> dense_synthesis(const Eigen::MatrixBase<Derived>& u,
                                                 const Spectrum<typename Derived::Scalar>& spec,
                                                 const KLConfig& cfg) {
  using Scalar = typename Derived::Scalar;
  detail::check_dims(u.size(), spec, cfg, cfg.n_coeffs(), "coefficient vector");
  const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
  Vector<Scalar> w(cfg.n_coeffs());
  for (int j = 1; j <= cfg.k; ++j) {
    const Scalar h = u(2 * j - 2), g = u(2 * j - 1);
    w(2 * j - 2) = std::sqrt(spec.lambdas(2 * j - 2)) * (g - h) * inv_sqrt2;
    w(2 * j - 1) = std::sqrt(spec.lambdas(2 * j - 1)) * (g + h) * inv_sqrt2;
  }
  return dense_basis<Scalar>(cfg) * w;
}

// Sigma_s = B Lambda_s B^T. Test oracle.
template <typename Scalar = double>
Matrix<Scalar> dense_covariance(const Spectrum<Scalar>& spec, const KLConfig& cfg) {
  detail::check_dims(spec.lambdas.size(), spec, cfg, cfg.n_coeffs(), "spectrum");
  const Matrix<Scalar> B = dense_basis<Scalar>(cfg);
  return B * spec.lambdas.asDiagonal() * B.transpose();
}

template <typename Scalar = double>
Vector<Scalar> standard_normal(Rng& rng, Eigen::Index n) {
  std::normal_distribution<Scalar> normal(0, 1);
  Vector<Scalar> out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = normal(rng);
  return out;
}

// Draws u ~ N(0, I_{2k}) and returns (u, F(u)).
template <typename Scalar = double>
std::pair<Vector<Scalar>, Vector<Scalar>> sample_prior_field(Rng& rng, const Spectrum<Scalar>& spec,
                                                             const KLConfig& cfg) {
  cfg.validate();
  Vector<Scalar> u = standard_normal<Scalar>(rng, cfg.n_coeffs());
  Vector<Scalar> v = forward_map(u, spec, cfg);
  return {std::move(u), std::move(v)};
}

}  // namespace roughcurve

#endif  // ROUGHCURVE_KLMAP_HPP
