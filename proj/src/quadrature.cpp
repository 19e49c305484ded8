#include "fractail/quadrature.hpp"

#include <numbers>

#include "fractail/error.hpp"

namespace fractail {

GaussLegendreRule make_gauss_legendre(int n) {
  require(n >= 1, ErrorCode::InvalidArgument, "Gauss-Legendre rule needs n >= 1");
  GaussLegendreRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

const GaussLegendreRule& gauss_legendre_64() {
  static const GaussLegendreRule rule = make_gauss_legendre(64);
  return rule;
}

std::vector<double> simpson_weights(std::size_t n, double h) {
  require(n >= 3 && n % 2 == 1, ErrorCode::InvalidArgument,
          "Simpson's rule needs an odd number of points >= 3");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || i == n - 1) w[i] = h / 3.0;
    else w[i] = (i % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
  }
  return w;
}

std::vector<double> trapezoid_weights(std::size_t n, double h) {
  require(n >= 2, ErrorCode::InvalidArgument, "trapezoid rule needs >= 2 points");
  std::vector<double> w(n, h);
  w.front() = w.back() = 0.5 * h;
  return w;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  require(n >= 2 && hi > lo, ErrorCode::InvalidArgument, "uniform_grid: need n >= 2 and hi > lo");
  std::vector<double> g(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + h * static_cast<double>(i);
  g.back() = hi;
  return g;
}

std::vector<double> geometric_grid(double t_min, double t_max, int points_per_decade) {
  require(t_min > 0.0 && t_max > t_min && points_per_decade >= 1, ErrorCode::InvalidArgument,
          "geometric_grid: need 0 < t_min < t_max and a positive density");
  const double decades = std::log10(t_max / t_min);
  const auto n = static_cast<std::size_t>(std::ceil(decades * points_per_decade - 1e-9)) + 1;
  std::vector<double> g(std::max<std::size_t>(n, 2));
  const double step = decades / static_cast<double>(g.size() - 1);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = t_min * std::pow(10.0, step * static_cast<double>(i));
  g.front() = t_min;
  g.back() = t_max;
  return g;
}

}  // namespace fractail
