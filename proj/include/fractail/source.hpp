#pragma once

#include <span>
#include <vector>

#include "fractail/spectral_domain.hpp"

namespace fractail {

// One polynomial piece p(s) = sum_j coeffs[j] s^j on [begin, end].
struct PolySegment {
  double begin;
  double end;
  std::vector<double> coeffs;  // global power basis in s

  double operator()(double s) const;
};

// Temporal factor mu on [0, t0], zero afterwards. Segments are contiguous,
// start at 0 and end at t0. Between breakpoints the left-closed segment wins;
// t0 itself belongs to the last segment.
class PiecewisePolynomial {
 public:
  PiecewisePolynomial() = default;
  explicit PiecewisePolynomial(std::vector<PolySegment> segments);

  static PiecewisePolynomial constant(double value, double t0);
  static PiecewisePolynomial polynomial(std::vector<double> coeffs, double t0);
  /// Piecewise-linear interpolant of samples; times strictly increasing from 0.
  static PiecewisePolynomial from_samples(std::span<const double> times, std::span<const double> values);

  double operator()(double s) const;
  double support_end() const { return segments_.empty() ? 0.0 : segments_.back().end; }
  const std::vector<PolySegment>& segments() const { return segments_; }
  bool is_zero() const;

  /// integral_0^{t0} |mu|, split at sign changes so each piece is integrated exactly.
  double l1_norm() const;
  /// integral_0^{t0} s^j mu(s) ds, exact.
  double power_moment(int j) const;
  /// integral_0^{t0} g(s) mu(s) ds by 64-point Gauss-Legendre per segment.
  template <class G>
  double integrate_against(G&& g) const;

  /// pointwise scaling
  PiecewisePolynomial scaled(double factor) const;

 private:
  std::vector<PolySegment> segments_;
};

struct SourceSpec {
  PiecewisePolynomial mu;
  double t0 = 1.0;
  SpatialProfile profile;

  /// Checks t0 > 0 and that mu's support ends at t0.
  void validate() const;
};

}  // namespace fractail

#include "fractail/quadrature.hpp"

namespace fractail {

template <class G>
double PiecewisePolynomial::integrate_against(G&& g) const {
  double s = 0.0;
  for (const auto& seg : segments_) {
    s += integrate_gl([&](double x) { return g(x) * seg(x); }, seg.begin, seg.end);
  }
  return s;
}

}  // namespace fractail
