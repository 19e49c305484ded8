#include "fractail/gamma.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fractail/error.hpp"

namespace fractail {

double sin_pi(double x) {
  // r in [-1, 1]; the subtraction is exact in binary floating point.
  double r = x - 2.0 * std::nearbyint(0.5 * x);
  if (r > 0.5) r = 1.0 - r;
  else if (r < -0.5) r = -1.0 - r;
  return std::sin(std::numbers::pi * r);
}

bool is_gamma_pole(double x) {
  if (x > 0.5) return false;
  const double n = std::nearbyint(x);
  return n <= 0.0 && std::abs(x - n) < kPoleTolerance;
}

double gamma_real(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::InvalidArgument, "gamma_real: non-finite argument");
  if (is_gamma_pole(x)) {
    std::ostringstream os;
    os << "gamma_real: argument " << x << " is a pole";
    fail(ErrorCode::PoleArgument, os.str());
  }
  if (x >= 0.5) return std::tgamma(x);
  const double s = sin_pi(x);
  const double g = std::tgamma(1.0 - x);
  if (std::isinf(g)) return 0.0 * s;  // |Gamma(x)| underflows below the smallest double
  return std::numbers::pi / (s * g);
}

double reciprocal_gamma(double x) {
  if (is_gamma_pole(x)) return 0.0;
  if (x >= 0.5) {
    if (x > 171.0) return std::exp(-std::lgamma(x));
    return 1.0 / std::tgamma(x);
  }
  const double s = sin_pi(x);
  const double y = 1.0 - x;
  if (y > 171.0) {
    const double mag = std::exp(std::lgamma(y) - std::log(std::numbers::pi));
    return s * mag;
  }
  return s * std::tgamma(y) / std::numbers::pi;
}

double log_abs_gamma(double x) {
  if (is_gamma_pole(x)) fail(ErrorCode::PoleArgument, "log_abs_gamma: pole");
  if (x >= 0.5) return std::lgamma(x);
  return std::log(std::numbers::pi) - std::log(std::abs(sin_pi(x))) - std::lgamma(1.0 - x);
}

}  // namespace fractail
