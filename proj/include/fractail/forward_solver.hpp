#pragma once

#include <span>
#include <vector>

#include "fractail/mittag_leffler.hpp"
#include "fractail/source.hpp"

namespace fractail {

/// psi_n(t) sampled on a grid strictly after the source support.
struct ModalTail {
  double lambda = 0.0;
  double alpha = 0.0;
  std::vector<double> times;
  std::vector<double> values;
};

/// c(t) = integral_0^t (t-s)^{alpha-1} E_{alpha,alpha}(-lambda (t-s)^alpha) mu(s) ds.
/// Evaluated in u = (t-s)^alpha, where the integrand (1/alpha) E(-lambda u)
/// mu(t - u^{1/alpha}) carries no endpoint singularity.
/// Throws NonPositiveTime, NonPositiveEigenvalue.
double duhamel_coefficient(double lambda, double alpha, const SourceSpec& source, double t);

/// Same, with a prepared E_{alpha,alpha} evaluator (hot loops).
double duhamel_coefficient(const MittagLeffler& e_aa, double lambda, const PiecewisePolynomial& mu, double t);

/// psi_n on `times` by direct integration in s over [0, t0], panels graded
/// toward s = t0. Throws TimeInsideSupport if any time is <= t0.
ModalTail psi_tail(double lambda, double alpha, const SourceSpec& source, std::span<const double> times);

/// Single-time version with a prepared evaluator.
double psi_value(const MittagLeffler& e_aa, double lambda, const PiecewisePolynomial& mu, double t0, double t);

struct DecayBoundReport {
  double constant = 0.0;            // max over modes and times of lambda |psi| / ||mu||_1
  std::vector<double> per_mode;     // max over times, per tail
  std::vector<double> running_max;  // running max of per_mode
  double mu_l1 = 0.0;
};

/// Empirical constant in |psi_n(t)| <= (C / lambda_n) ||mu||_1.
DecayBoundReport decay_bound_check(std::span<const ModalTail> tails, const SourceSpec& source);

/// J^alpha w on a uniform grid from 0 by product integration of the
/// piecewise-linear interpolant of w (exact for linear w).
std::vector<double> riemann_liouville_integral(std::span<const double> w, double alpha, std::span<const double> grid);

struct CaputoResidual {
  double max_residual = 0.0;    // over the checked points
  double h = 0.0;
  std::size_t checked_points = 0;
  double exclusion = 0.0;       // half-width of the windows skipped at t = 0 and t = t0
};

// Residual of D^alpha c + lambda c = mu, with c from duhamel_coefficient
// (f_n = 1) on a uniform grid from 0 and D^alpha by the L1 scheme. The
// solution has weak singularities at t = 0 and t = t0 that the L1 scheme
// does not resolve uniformly, so points within `exclusion` of either are
// skipped (default 0.1 t0). Throws UnsupportedOrder unless 0 < alpha < 1.
CaputoResidual caputo_residual_check(double lambda, double alpha, const SourceSpec& source,
                                     std::span<const double> grid, double exclusion = -1.0);

}  // namespace fractail
