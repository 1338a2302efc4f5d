#include "roughcurve/spectrum.hpp"

#include <string>

namespace roughcurve {

void RoughnessParams::validate(double s_floor) const {
  if (!(s >= s_floor) || !std::isfinite(s))
    throw ParameterError("roughness s must be >= " + std::to_string(s_floor) + ", got " + std::to_string(s));
  if (!(sigma > 0) || !std::isfinite(sigma)) throw ParameterError("length scale sigma must be positive");
  if (d < 1) throw ParameterError("dimension d must be >= 1");
  if (k < 1) throw ParameterError("truncation k must be >= 1");
}

double smoothness_bound(double s, int d) {
  if (!(s > 0)) throw ParameterError("roughness s must be strictly positive");
  if (d < 1) throw ParameterError("dimension d must be >= 1");
  return 2.0 * s + 0.5 * d;
}

template struct Spectrum<double>;

}  // namespace roughcurve
