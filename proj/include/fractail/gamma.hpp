#pragma once

namespace fractail {

// Distance below which an argument counts as a pole of Gamma.
inline constexpr double kPoleTolerance = 1e-12;

/// sin(pi x) with exact argument reduction, so that integer x gives 0.
double sin_pi(double x);

/// True when x lies within kPoleTolerance of 0, -1, -2, ...
bool is_gamma_pole(double x);

/// Gamma(x) for real x off the poles. Negative arguments use the reflection
/// formula Gamma(x) Gamma(1-x) = pi / sin(pi x). Throws PoleArgument.
double gamma_real(double x);

/// 1/Gamma(x); exactly zero at the poles, finite (possibly underflowing)
/// everywhere else.
double reciprocal_gamma(double x);

/// log|Gamma(x)| off the poles.
double log_abs_gamma(double x);

}  // namespace fractail
