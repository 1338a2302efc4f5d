#ifndef ROUGHCURVE_SPECTRUM_HPP
#define ROUGHCURVE_SPECTRUM_HPP

// Truncated Whittle-Matern eigenvalue sequence on a periodic domain.
//
// For frequency pair j = 1..k the two eigenvalues (sine and cosine) are
//
//   lambda_{2j-1} = lambda_{2j} = c_s (sigma + j^2)^{-2(s + d/2)}
//
// with c_s chosen so that the infinite sequence sums to one.

#include <Eigen/Core>
#include <cmath>
#include <limits>

#include "roughcurve/errors.hpp"

namespace roughcurve {

inline constexpr double kDefaultRoughnessFloor = 1e-6;
inline constexpr double kDefaultSeriesTol = 1e-12;

struct RoughnessParams {
  double s = 1.0;
  double sigma = 100.0;
  int d = 1;
  int k = 1;

  void validate(double s_floor = kDefaultRoughnessFloor) const;
};

template <typename Scalar = double>
struct Spectrum {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector lambdas;  // 2k entries, lambdas(2j-2) == lambdas(2j-1)
  Scalar c_s = 0;
  RoughnessParams params;

  int k() const { return static_cast<int>(lambdas.size() / 2); }
  // Per-frequency value mu_j = lambda_{2j}, j = 1..k.
  Scalar pair_value(int j) const { return lambdas(2 * j - 1); }
};

namespace detail {

// Integral of (sigma + x^2)^{-a} over [x0, inf), valid for x0^2 >= 16 sigma.
// Expands (1 + sigma/x^2)^{-a} binomially and integrates term by term.
template <typename Scalar>
Scalar tail_integral(Scalar a, Scalar sigma, Scalar x0) {
  using std::pow;
  using std::abs;
  const Scalar z = sigma / (x0 * x0);
  Scalar coeff = 1;  // binom(-a, n) z^n
  Scalar total = 0;
  for (int n = 0; n < 400; ++n) {
    const Scalar term = coeff / (2 * a + 2 * n - 1);
    total += term;
    if (abs(term) <= std::numeric_limits<Scalar>::epsilon() * abs(total) * Scalar(1e-2)) break;
    coeff *= -(a + n) / Scalar(n + 1) * z;
  }
  return pow(x0, 1 - 2 * a) * total;
}

}  // namespace detail

// c_s such that 2 * sum_{j>=1} c_s (sigma + j^2)^{-2(s + d/2)} == 1.
//
// The series is summed directly up to J, and the remainder sum_{j>J} is
// bracketed with the integral test (f is convex for j^2 >= 16 sigma):
//   I(J) - f(J)/2  <=  R_J  <=  I(J + 1/2),   I(x) = int_x^inf f.
// Summation stops once half the bracket width is below tol * partial sum.
// R_J is taken at the upper end of the bracket, so c_s never overshoots and
// the truncated spectrum sums to at most one.
template <typename Scalar = double>
Scalar normalization_constant(Scalar s, Scalar sigma, int d, Scalar tol = Scalar(kDefaultSeriesTol),
                              Scalar s_floor = Scalar(kDefaultRoughnessFloor)) {
  using std::pow;
  using std::sqrt;
  if (!(s >= s_floor) || !std::isfinite(static_cast<double>(s)))
    throw ParameterError("roughness s must be >= " + std::to_string(static_cast<double>(s_floor)));
  if (!(sigma > 0)) throw ParameterError("length scale sigma must be positive");
  if (d < 1) throw ParameterError("dimension d must be >= 1");
  if (!(tol > 0)) throw ParameterError("series tolerance must be positive");

  const Scalar a = 2 * (s + Scalar(d) / 2);
  auto f = [&](Scalar x) { return pow(sigma + x * x, -a); };
  const Scalar j_min = std::ceil(static_cast<double>(4 * sqrt(sigma)));

  // Kahan-compensated partial sum.
  Scalar partial = 0, comp = 0;
  long long j = 1;
  for (;; ++j) {
    const Scalar term = f(Scalar(j)) - comp;
    const Scalar t = partial + term;
    comp = (t - partial) - term;
    partial = t;
    if (Scalar(j) < j_min) continue;
    // Cheap upper bound on the bracket width: (f(J) - f(J + 1/2)) / 2.
    const Scalar width_bound = (f(Scalar(j)) - f(Scalar(j) + Scalar(0.5))) / 2;
    if (width_bound / 2 <= tol * partial) break;
    if (j > 2'000'000'000LL) throw NumericalError("normalization series failed to converge");
  }
  const Scalar J = Scalar(j);
  const Scalar remainder = detail::tail_integral(a, sigma, J + Scalar(0.5));
  return 1 / (2 * (partial + remainder));
}

template <typename Scalar = double>
Spectrum<Scalar> build_spectrum(const RoughnessParams& params, Scalar tol = Scalar(kDefaultSeriesTol),
                                Scalar s_floor = Scalar(kDefaultRoughnessFloor)) {
  using std::pow;
  params.validate(static_cast<double>(s_floor));
  Spectrum<Scalar> out;
  out.params = params;
  out.c_s = normalization_constant<Scalar>(Scalar(params.s), Scalar(params.sigma), params.d, tol, s_floor);
  const Scalar a = 2 * (Scalar(params.s) + Scalar(params.d) / 2);
  out.lambdas.resize(2 * params.k);
  for (int j = 1; j <= params.k; ++j) {
    const Scalar lam = out.c_s * pow(Scalar(params.sigma) + Scalar(j) * Scalar(j), -a);
    out.lambdas(2 * j - 2) = lam;
    out.lambdas(2 * j - 1) = lam;
  }
  return out;
}

// Supremum of the Sobolev exponents t with realizations in H^t (k -> inf).
double smoothness_bound(double s, int d = 1);

}  // namespace roughcurve

#endif  // ROUGHCURVE_SPECTRUM_HPP
