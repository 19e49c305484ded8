#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace fractail {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
GaussLegendreRule make_gauss_legendre(int n);

/// The 64-point rule, built once.
const GaussLegendreRule& gauss_legendre_64();

template <class F>
double integrate_gl(F&& f, double a, double b, const GaussLegendreRule& rule = gauss_legendre_64()) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    s += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return s * half;
}

enum class Endpoint { Lower, Upper };

// Composite Gauss-Legendre on [a, b] with panels that shrink geometrically
// (ratio 2) toward one endpoint, down to `min_width`; the last panel touches
// the endpoint. Suited to integrands whose scale of variation is the
// distance to that endpoint.
template <class F>
double integrate_graded(F&& f, double a, double b, Endpoint toward, double min_width) {
  if (!(b > a)) return 0.0;
  const double len = b - a;
  min_width = std::max(min_width, len * 1e-15);
  double s = 0.0;
  double far = len;  // distance of the current panel's far edge from the focus
  while (far > min_width) {
    const double near = (far * 0.5 > min_width) ? far * 0.5 : 0.0;
    if (toward == Endpoint::Lower) s += integrate_gl(f, a + near, a + far);
    else s += integrate_gl(f, b - far, b - near);
    if (near == 0.0) return s;
    far = near;
  }
  if (toward == Endpoint::Lower) s += integrate_gl(f, a, a + far);
  else s += integrate_gl(f, b - far, b);
  return s;
}

/// Composite Simpson weights for `n` uniform points (n odd) with spacing h.
std::vector<double> simpson_weights(std::size_t n, double h);

/// Trapezoid weights for `n` uniform points with spacing h.
std::vector<double> trapezoid_weights(std::size_t n, double h);

/// n points from lo to hi inclusive.
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

/// Geometric grid from t_min to t_max with the given density; endpoints included.
std::vector<double> geometric_grid(double t_min, double t_max, int points_per_decade);

}  // namespace fractail
