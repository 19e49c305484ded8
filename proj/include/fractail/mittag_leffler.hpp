#pragma once

#include <memory>
#include <span>
#include <vector>

namespace fractail {

/// Parameters of the two-parameter Mittag-Leffler function E_{alpha,beta}.
struct MLParams {
  double alpha = 0.5;  // in (0, 2)
  double beta = 0.5;   // > 0

  void validate() const;
};

struct AsymptoticTerm {
  double exponent;     // power k of eta^{-k}
  double coefficient;  // (-1)^{k+1} / Gamma(beta - alpha k)
};

// Large-argument expansion E_{alpha,beta}(-eta) ~ sum_k c_k eta^{-k}.
// Terms sitting on a Gamma pole are dropped, so exponents may skip integers.
struct AsymptoticTermSeries {
  MLParams params;
  int requested_terms = 0;
  std::vector<AsymptoticTerm> terms;
  double remainder_order = 0.0;        // exponent of the first omitted nonzero term
  double remainder_coefficient = 0.0;  // its coefficient
  double validity_threshold = 0.0;     // eta_0: remainder bound certified for eta >= eta_0

  double value(double eta) const;
  double remainder_bound(double eta) const;
};

struct AsymptoticValue {
  double value;
  double remainder_bound;
};

/// Builds the N-term expansion of E_{alpha,beta}(-eta) and its validity threshold.
AsymptoticTermSeries ml_asymptotic_series(const MLParams& params, int terms);

/// Partial sums of sum_k x^k / Gamma(alpha k + beta) with Kahan accumulation.
/// Throws NonConvergent when the terms do not start decreasing within
/// `max_terms` or overflow.
double ml_series(const MLParams& params, double x, double tol, int max_terms = 10000);

/// N-term asymptotic value of E_{alpha,beta}(-eta) with a remainder bound.
/// Throws BelowValidityThreshold for eta below the series' eta_0.
AsymptoticValue ml_asymptotic(const MLParams& params, double eta, int terms);

/// Hybrid evaluation of E_{alpha,beta}(x) for x <= 0.
double ml_eval(const MLParams& params, double x);

/// max over the grid of |E_{alpha,alpha}(-eta)| (1 + eta).
double ml_uniform_bound_check(double alpha, std::span<const double> eta_grid);

/// Which branch of the dispatcher handles a given argument.
enum class MLPath { Zero, Series, ExtendedSeries, Asymptotic };

// Evaluator for a fixed (alpha, beta). Precomputes the reciprocal Gamma
// table used by the extended-precision series, so repeated evaluation in a
// quadrature loop is cheap. Immutable after construction.
class MittagLeffler {
 public:
  // Dispatch thresholds on z = |x|^{1/alpha}.
  static constexpr double kSeriesLimit = 2.0;
  static constexpr double kAsymptoticLimit = 32.0;

  explicit MittagLeffler(MLParams params);

  const MLParams& params() const { return params_; }
  double operator()(double x) const;
  MLPath path(double x) const;

  // Individual branches, exposed for the overlap tests.
  double series_double(double x) const;
  double series_extended(double x) const;
  double asymptotic_optimal(double x) const;

 private:
  struct Table;
  MLParams params_;
  std::shared_ptr<const Table> table_;
};

/// Evaluator for (alpha, beta), sharing the coefficient table already built
/// on this thread when there is one. Copies are cheap.
MittagLeffler mittag_leffler_for(const MLParams& params);

}  // namespace fractail
