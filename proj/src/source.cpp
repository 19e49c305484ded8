#include "fractail/source.hpp"

#include <algorithm>
#include <cmath>

#include "fractail/error.hpp"
#include "fractail/quadrature.hpp"

namespace fractail {

double PolySegment::operator()(double s) const {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * s + *it;
  return v;
}

PiecewisePolynomial::PiecewisePolynomial(std::vector<PolySegment> segments) : segments_(std::move(segments)) {
  require(!segments_.empty(), ErrorCode::InvalidArgument, "source needs at least one segment");
  require(segments_.front().begin == 0.0, ErrorCode::InvalidArgument, "source must start at t = 0");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    require(s.end > s.begin, ErrorCode::InvalidArgument, "source segment has non-positive length");
    require(i == 0 || s.begin == segments_[i - 1].end, ErrorCode::InvalidArgument,
            "source segments must be contiguous");
    for (double c : s.coeffs) require(std::isfinite(c), ErrorCode::InvalidArgument, "source coefficient not finite");
  }
}

PiecewisePolynomial PiecewisePolynomial::constant(double value, double t0) {
  return PiecewisePolynomial({PolySegment{0.0, t0, {value}}});
}

PiecewisePolynomial PiecewisePolynomial::polynomial(std::vector<double> coeffs, double t0) {
  return PiecewisePolynomial({PolySegment{0.0, t0, std::move(coeffs)}});
}

PiecewisePolynomial PiecewisePolynomial::from_samples(std::span<const double> times, std::span<const double> values) {
  require(times.size() == values.size() && times.size() >= 2, ErrorCode::InvalidArgument,
          "sampled source needs matching times and values, at least two");
  std::vector<PolySegment> segs;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double a = times[i], b = times[i + 1];
    require(b > a, ErrorCode::InvalidArgument, "sample times must increase strictly");
    const double slope = (values[i + 1] - values[i]) / (b - a);
    segs.push_back({a, b, {values[i] - slope * a, slope}});
  }
  return PiecewisePolynomial(std::move(segs));
}

double PiecewisePolynomial::operator()(double s) const {
  if (segments_.empty() || s < 0.0 || s > support_end()) return 0.0;
  auto it = std::upper_bound(segments_.begin(), segments_.end(), s,
                             [](double x, const PolySegment& seg) { return x < seg.end; });
  if (it == segments_.end()) --it;
  return (*it)(s);
}

bool PiecewisePolynomial::is_zero() const {
  for (const auto& s : segments_) {
    for (double c : s.coeffs) {
      if (c != 0.0) return false;
    }
  }
  return true;
}

double PiecewisePolynomial::l1_norm() const {
  double total = 0.0;
  for (const auto& seg : segments_) {
    // bracket sign changes on a fine grid, refine by bisection, then integrate
    // each sign-definite piece with Gauss-Legendre (exact for degree < 128)
    constexpr int kProbe = 512;
    std::vector<double> cuts{seg.begin};
    const double h = (seg.end - seg.begin) / kProbe;
    double xa = seg.begin, fa = seg(xa);
    for (int i = 1; i <= kProbe; ++i) {
      const double xb = i == kProbe ? seg.end : seg.begin + h * i;
      const double fb = seg(xb);
      if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
        double lo = xa, hi = xb, flo = fa;
        for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = seg(mid);
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        cuts.push_back(0.5 * (lo + hi));
      }
      xa = xb;
      fa = fb;
    }
    cuts.push_back(seg.end);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      total += std::abs(integrate_gl([&](double x) { return seg(x); }, cuts[i], cuts[i + 1]));
    }
  }
  return total;
}

double PiecewisePolynomial::power_moment(int j) const {
  require(j >= 0, ErrorCode::InvalidArgument, "power moment order must be non-negative");
  double total = 0.0;
  for (const auto& seg : segments_) {
    for (std::size_t i = 0; i < seg.coeffs.size(); ++i) {
      const int p = j + static_cast<int>(i) + 1;
      total += seg.coeffs[i] * (std::pow(seg.end, p) - std::pow(seg.begin, p)) / p;
    }
  }
  return total;
}

PiecewisePolynomial PiecewisePolynomial::scaled(double factor) const {
  auto segs = segments_;
  for (auto& s : segs) {
    for (double& c : s.coeffs) c *= factor;
  }
  return PiecewisePolynomial(std::move(segs));
}

void SourceSpec::validate() const {
  require(t0 > 0.0 && std::isfinite(t0), ErrorCode::InvalidArgument, "source support end t0 must be positive");
  require(!mu.segments().empty(), ErrorCode::InvalidArgument, "source temporal factor is empty");
  require(std::abs(mu.support_end() - t0) <= 1e-12 * t0, ErrorCode::InvalidArgument,
          "temporal factor must be supported exactly on [0, t0]");
}

}  // namespace fractail
