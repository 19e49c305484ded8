#pragma once

// Arbitrary-precision reference values (MPFR). This library never includes
// the fractail numerics it is used to check.

#include <cstddef>
#include <memory>

namespace fractail::oracle {

struct Reference {
  double value;
  double abs_error;  // bound on |exact - value| before the final rounding to double
};

/// Gamma(x) at 256-bit precision.
double gamma(double x);

/// exp(x) at 256-bit precision (used for identity checks far below 1).
double exp(double x);

/// integral_0^{t0} (t - s)^{-sigma} ds, t > t0, evaluated in closed form.
double power_kernel_integral(double sigma, double t, double t0);

// E_{alpha,beta}(x) for x <= 0, to at least 50 significant digits.
//
// Arguments with z = |x|^{1/alpha} <= kSeriesLimitZ are summed from the
// defining power series at a working precision that covers the cancellation
// (about z / ln 10 digits) plus 60 guard digits, with a tail bound from the
// decreasing terms. Larger z use the large-argument expansion truncated at
// its smallest term (error ~ e^{-z} < 1e-56) plus the pair of oscillatory
// exponential contributions present for 1 <= alpha < 2.
//
// Not thread-safe: the reciprocal Gamma table grows lazily.
class MittagLefflerOracle {
 public:
  static constexpr double kSeriesLimitZ = 130.0;

  MittagLefflerOracle(double alpha, double beta);
  ~MittagLefflerOracle();
  MittagLefflerOracle(MittagLefflerOracle&&) noexcept;
  MittagLefflerOracle& operator=(MittagLefflerOracle&&) noexcept;

  Reference operator()(double x);
  Reference series(double x);
  Reference asymptotic(double x);

  std::size_t table_size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fractail::oracle
