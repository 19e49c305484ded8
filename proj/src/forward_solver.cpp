#include "fractail/forward_solver.hpp"

#include <algorithm>
#include <cmath>

#include "fractail/error.hpp"
#include "fractail/gamma.hpp"
#include "fractail/parallel.hpp"
#include "fractail/quadrature.hpp"

namespace fractail {

namespace {

void check_lambda(double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), ErrorCode::NonPositiveEigenvalue, "eigenvalue must be positive");
}

double uniform_step(std::span<const double> grid) {
  require(grid.size() >= 2 && grid[0] == 0.0, ErrorCode::InvalidArgument, "grid must start at 0 with >= 2 points");
  const double h = grid[1] - grid[0];
  require(h > 0.0, ErrorCode::InvalidArgument, "grid must increase");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    require(std::abs(grid[i] - grid[i - 1] - h) <= 1e-9 * h, ErrorCode::InvalidArgument, "grid must be uniform");
  }
  return h;
}

}  // namespace

double duhamel_coefficient(const MittagLeffler& e_aa, double lambda, const PiecewisePolynomial& mu, double t) {
  require(t > 0.0 && std::isfinite(t), ErrorCode::NonPositiveTime, "time must be positive");
  check_lambda(lambda);
  const double alpha = e_aa.params().alpha;
  const double upper = std::min(t, mu.support_end());
  const double inv_alpha = 1.0 / alpha;
  double total = 0.0;
  for (const auto& seg : mu.segments()) {
    if (seg.begin >= upper) break;
    const double e = std::min(seg.end, upper);
    const double u_lo = e >= t ? 0.0 : std::pow(t - e, alpha);
    const double u_hi = std::pow(t - seg.begin, alpha);
    if (!(u_hi > u_lo)) continue;
    auto f = [&](double u) { return e_aa(-lambda * u) * seg(t - std::pow(u, inv_alpha)); };
    // u^{1/alpha} is singular at u = 0, which sits just below u_lo when t is
    // barely past the segment end: grow panels geometrically away from 0 first
    const double cap = std::min(u_hi - u_lo, 1.0 / lambda) / 64.0;
    double lo = u_lo;
    while (lo > 0.0 && lo < cap && lo < u_hi) {
      const double hi = std::min(2.0 * lo, u_hi);
      total += integrate_gl(f, lo, hi);
      lo = hi;
    }
    if (lo < u_hi) total += integrate_graded(f, lo, u_hi, Endpoint::Lower, std::max(lo, cap));
  }
  return total * inv_alpha;
}

double duhamel_coefficient(double lambda, double alpha, const SourceSpec& source, double t) {
  source.validate();
  return duhamel_coefficient(mittag_leffler_for({alpha, alpha}), lambda, source.mu, t);
}

double psi_value(const MittagLeffler& e_aa, double lambda, const PiecewisePolynomial& mu, double t0, double t) {
  check_lambda(lambda);
  require(t > t0, ErrorCode::TimeInsideSupport, "tail times must lie after the source support");
  const double alpha = e_aa.params().alpha;
  double total = 0.0;
  for (const auto& seg : mu.segments()) {
    auto g = [&](double s) {
      const double r = t - s;
      return std::pow(r, alpha - 1.0) * e_aa(-lambda * std::pow(r, alpha)) * seg(s);
    };
    // panel widths track the distance to the kernel singularity at s = t
    total += integrate_graded(g, seg.begin, seg.end, Endpoint::Upper, t - seg.end);
  }
  return total;
}

ModalTail psi_tail(double lambda, double alpha, const SourceSpec& source, std::span<const double> times) {
  source.validate();
  check_lambda(lambda);
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(times[i] > source.t0, ErrorCode::TimeInsideSupport, "tail times must lie after the source support");
    require(i == 0 || times[i] > times[i - 1], ErrorCode::InvalidArgument, "tail times must increase strictly");
  }
  const auto e_aa = mittag_leffler_for({alpha, alpha});
  ModalTail tail{lambda, alpha, {times.begin(), times.end()}, std::vector<double>(times.size())};
  for (std::size_t i = 0; i < times.size(); ++i) {
    tail.values[i] = psi_value(e_aa, lambda, source.mu, source.t0, times[i]);
  }
  return tail;
}

DecayBoundReport decay_bound_check(std::span<const ModalTail> tails, const SourceSpec& source) {
  require(!tails.empty(), ErrorCode::InvalidArgument, "decay bound check needs at least one tail");
  for (const auto& t : tails) {
    require(t.times == tails.front().times, ErrorCode::InvalidArgument, "tails must share a time grid");
  }
  DecayBoundReport r;
  r.mu_l1 = source.mu.l1_norm();
  require(r.mu_l1 > 0.0, ErrorCode::InvalidArgument, "decay bound check needs a non-zero source");
  double running = 0.0;
  for (const auto& tail : tails) {
    double m = 0.0;
    for (double v : tail.values) m = std::max(m, tail.lambda * std::abs(v) / r.mu_l1);
    r.per_mode.push_back(m);
    running = std::max(running, m);
    r.running_max.push_back(running);
  }
  r.constant = running;
  return r;
}

std::vector<double> riemann_liouville_integral(std::span<const double> w, double alpha, std::span<const double> grid) {
  require(alpha > 0.0, ErrorCode::InvalidArgument, "integral order must be positive");
  require(w.size() == grid.size(), ErrorCode::InvalidArgument, "samples and grid differ in length");
  const double h = uniform_step(grid);
  const std::size_t n_pts = grid.size();
  const double a1 = alpha + 1.0;
  const double scale = std::pow(h, alpha) / std::tgamma(alpha + 2.0);
  std::vector<double> pw(n_pts + 1);
  for (std::size_t k = 0; k <= n_pts; ++k) pw[k] = std::pow(static_cast<double>(k), a1);
  std::vector<double> out(n_pts, 0.0);
  for (std::size_t n = 1; n < n_pts; ++n) {
    const double nd = static_cast<double>(n);
    double s = (pw[n - 1] - (nd - alpha - 1.0) * std::pow(nd, alpha)) * w[0];
    for (std::size_t j = 1; j < n; ++j) {
      const std::size_t k = n - j;
      s += (pw[k + 1] - 2.0 * pw[k] + pw[k - 1]) * w[j];
    }
    s += w[n];
    out[n] = scale * s;
  }
  return out;
}

CaputoResidual caputo_residual_check(double lambda, double alpha, const SourceSpec& source,
                                     std::span<const double> grid, double exclusion) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::UnsupportedOrder,
          "the L1 residual check covers 0 < alpha < 1 only");
  source.validate();
  check_lambda(lambda);
  const double h = uniform_step(grid);
  if (exclusion < 0.0) exclusion = 0.1 * source.t0;

  const auto e_aa = mittag_leffler_for({alpha, alpha});
  std::vector<double> c(grid.size(), 0.0);
  parallel_for(grid.size() - 1, [&](std::size_t i) {
    c[i + 1] = duhamel_coefficient(e_aa, lambda, source.mu, grid[i + 1]);
  });

  const std::size_t n_pts = grid.size();
  std::vector<double> b(n_pts);
  for (std::size_t j = 0; j < n_pts; ++j) {
    b[j] = std::pow(static_cast<double>(j + 1), 1.0 - alpha) - std::pow(static_cast<double>(j), 1.0 - alpha);
  }
  const double scale = std::pow(h, -alpha) / std::tgamma(2.0 - alpha);
  CaputoResidual r;
  r.h = h;
  r.exclusion = exclusion;
  for (std::size_t n = 1; n < n_pts; ++n) {
    const double t = grid[n];
    if (t < exclusion || std::abs(t - source.t0) < exclusion) continue;
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) d += b[j] * (c[n - j] - c[n - j - 1]);
    const double res = scale * d + lambda * c[n] - source.mu(t);
    r.max_residual = std::max(r.max_residual, std::abs(res));
    ++r.checked_points;
  }
  return r;
}

}  // namespace fractail
