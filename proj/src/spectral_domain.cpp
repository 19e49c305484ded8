#include "fractail/spectral_domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fractail/error.hpp"
#include "fractail/fitting.hpp"
#include "fractail/quadrature.hpp"

namespace fractail {

namespace {

constexpr double kPi = std::numbers::pi;

// Entries below this fraction of the largest one are quadrature noise
// (e.g. the even modes of a symmetric profile) and are treated as zero.
double noise_floor(std::span<const double> terms, double relative) {
  double mx = 0.0;
  for (double t : terms) mx = std::max(mx, std::abs(t));
  return relative * mx;
}

struct TailFit {
  double exponent = -std::numeric_limits<double>::infinity();
  double occupancy = 0.0;  // fraction of the trailing half above the noise floor
};

// Power-law fit of the trailing half of a nonnegative sequence indexed from 1.
// The exponent is -inf when fewer than two significant entries are available.
TailFit tail_power(std::span<const double> terms, double floor) {
  const std::size_t n = terms.size();
  std::vector<double> idx, val;
  for (std::size_t i = n / 2; i < n; ++i) {
    if (terms[i] > floor && std::isfinite(terms[i])) {
      idx.push_back(static_cast<double>(i + 1));
      val.push_back(terms[i]);
    }
  }
  TailFit fit;
  fit.occupancy = static_cast<double>(idx.size()) / static_cast<double>(n - n / 2);
  if (idx.size() >= 2) fit.exponent = fit_power_law(idx, val).slope;
  return fit;
}

// Integral of c n^p from N + 1/2 to infinity, anchored at the last significant
// term and thinned by the occupancy (a profile with only odd modes gets half).
double power_tail_sum(std::span<const double> terms, const TailFit& fit, double floor) {
  const double p = fit.exponent;
  if (!(p > -std::numeric_limits<double>::infinity())) return 0.0;
  if (p >= -1.0) return std::numeric_limits<double>::infinity();
  std::size_t last = terms.size();
  while (last > 0 && !(terms[last - 1] > floor)) --last;
  if (last == 0) return 0.0;
  const double c = terms[last - 1] / std::pow(static_cast<double>(last), p);
  const double start = static_cast<double>(terms.size()) + 0.5;
  return fit.occupancy * c * std::pow(start, p + 1.0) / (-p - 1.0);
}

void check_strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(v[i] > 0.0 && (i == 0 || v[i] > v[i - 1]), ErrorCode::InvalidCoefficients,
            "eigenvalues are not strictly increasing and positive");
  }
}

// Sturm count: number of eigenvalues of the tridiagonal matrix below x.
std::size_t sturm_count(std::span<const double> d, std::span<const double> e, double x) {
  std::size_t count = 0;
  double q = 1.0;
  const double tiny = std::numeric_limits<double>::min();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double e2 = i > 0 ? e[i - 1] * e[i - 1] : 0.0;
    q = d[i] - x - (i > 0 ? e2 / q : 0.0);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

// Solves (T - shift I) x = b in place by Gaussian elimination with partial pivoting.
void shifted_tridiagonal_solve(std::span<const double> d, std::span<const double> e, double shift,
                               std::vector<double>& b, double pivot_floor) {
  const std::size_t n = d.size();
  std::vector<double> diag(n), up(n, 0.0), up2(n, 0.0), low(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = d[i] - shift;
    if (i + 1 < n) {
      up[i] = e[i];
      low[i] = e[i];
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(low[i]) > std::abs(diag[i])) {
      // swap rows i and i+1
      std::swap(diag[i], low[i]);
      std::swap(up[i], diag[i + 1]);
      if (i + 2 < n) std::swap(up2[i], up[i + 1]);
      std::swap(b[i], b[i + 1]);
    }
    if (diag[i] == 0.0) diag[i] = pivot_floor;
    const double m = low[i] / diag[i];
    diag[i + 1] -= m * up[i];
    if (i + 2 < n) up[i + 1] -= m * up2[i];
    b[i + 1] -= m * b[i];
  }
  if (diag[n - 1] == 0.0) diag[n - 1] = pivot_floor;
  b[n - 1] /= diag[n - 1];
  if (n >= 2) b[n - 2] = (b[n - 2] - up[n - 2] * b[n - 1]) / diag[n - 2];
  for (std::size_t k = n >= 2 ? n - 2 : 0; k-- > 0;) {
    b[k] = (b[k] - up[k] * b[k + 1] - up2[k] * b[k + 2]) / diag[k];
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::span<const double> EigenSystem::mode(std::size_t n) const {
  require(n < mode_count(), ErrorCode::InvalidArgument, "mode index out of range");
  return {modes_.data() + n * grid_.size(), grid_.size()};
}

double EigenSystem::eigenfunction(std::size_t n, double x) const {
  require(n < mode_count(), ErrorCode::InvalidArgument, "mode index out of range");
  if (x <= 0.0 || x >= length_) return 0.0;
  if (kind_ == Kind::AnalyticLaplacian) {
    return std::sqrt(2.0 / length_) * std::sin(static_cast<double>(n + 1) * kPi * x / length_);
  }
  const double h = grid_[1] - grid_[0];
  const auto i = std::min(static_cast<std::size_t>(x / h), grid_.size() - 2);
  const double s = (x - grid_[i]) / h;
  const auto m = mode(n);
  return (1.0 - s) * m[i] + s * m[i + 1];
}

double EigenSystem::boundary_flux(std::size_t n, Side side) const {
  require(n < mode_count(), ErrorCode::InvalidArgument, "mode index out of range");
  if (kind_ == Kind::AnalyticLaplacian) {
    const double k = static_cast<double>(n + 1) * kPi / length_;
    const double slope = std::sqrt(2.0 / length_) * k;
    if (side == Side::Left) return -slope;
    return slope * ((n + 1) % 2 == 0 ? 1.0 : -1.0);
  }
  const auto m = mode(n);
  const std::size_t last = m.size() - 1;
  const double h = grid_[1] - grid_[0];
  if (side == Side::Left) {
    const double deriv = (-3.0 * m[0] + 4.0 * m[1] - m[2]) / (2.0 * h);
    return -a_left_ * deriv;
  }
  const double deriv = (3.0 * m[last] - 4.0 * m[last - 1] + m[last - 2]) / (2.0 * h);
  return a_right_ * deriv;
}

double EigenSystem::inner(std::span<const double> f, std::span<const double> g) const {
  require(f.size() == grid_.size() && g.size() == grid_.size(), ErrorCode::InvalidArgument,
          "inner: samples do not match the grid");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += weights_[i] * f[i] * g[i];
  return s;
}

EigenSystem laplacian_1d_dirichlet(double length, std::size_t modes, std::size_t grid_points) {
  require(length > 0.0, ErrorCode::InvalidArgument, "domain length must be positive");
  require(modes >= 1, ErrorCode::InvalidArgument, "need at least one mode");
  require(grid_points >= 3 && grid_points % 2 == 1, ErrorCode::InvalidArgument,
          "grid needs an odd number of points >= 3");
  EigenSystem sys;
  sys.kind_ = EigenSystem::Kind::AnalyticLaplacian;
  sys.length_ = length;
  sys.grid_ = uniform_grid(0.0, length, grid_points);
  sys.weights_ = simpson_weights(grid_points, length / static_cast<double>(grid_points - 1));
  sys.eigenvalues_.resize(modes);
  sys.multiplicities_.assign(modes, 1);
  sys.modes_.resize(modes * grid_points);
  const double amp = std::sqrt(2.0 / length);
  for (std::size_t n = 0; n < modes; ++n) {
    const double k = static_cast<double>(n + 1) * kPi / length;
    sys.eigenvalues_[n] = k * k;
    double* row = sys.modes_.data() + n * grid_points;
    for (std::size_t i = 0; i < grid_points; ++i) {
      // exact zeros at the ends; sin(k L) is not exactly zero in floating point
      row[i] = (i == 0 || i + 1 == grid_points) ? 0.0 : amp * std::sin(k * sys.grid_[i]);
    }
  }
  return sys;
}

TridiagonalEigen tridiagonal_lowest_eigenpairs(std::span<const double> diag,
                                               std::span<const double> offdiag, std::size_t count) {
  const std::size_t n = diag.size();
  require(n >= 1 && offdiag.size() + 1 == n, ErrorCode::InvalidArgument,
          "tridiagonal: off-diagonal must have one fewer entry than the diagonal");
  require(count >= 1 && count <= n, ErrorCode::InvalidArgument,
          "tridiagonal: requested eigenpair count out of range");

  // Gershgorin interval
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(offdiag[i - 1]) : 0.0) + (i + 1 < n ? std::abs(offdiag[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  const double scale = std::max(std::abs(lo), std::abs(hi));
  const double eps = std::numeric_limits<double>::epsilon();

  TridiagonalEigen out;
  out.values.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    double a = lo, b = hi;
    while (b - a > 4.0 * eps * std::max(std::abs(a), std::abs(b)) + std::numeric_limits<double>::min()) {
      const double mid = 0.5 * (a + b);
      if (mid == a || mid == b) break;
      if (sturm_count(diag, offdiag, mid) > k) b = mid;
      else a = mid;
    }
    out.values[k] = 0.5 * (a + b);
  }

  out.vectors.resize(count);
  const double pivot_floor = eps * scale;
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3 * static_cast<double>(k));
    // perturb the shift slightly so the factorisation stays finite
    const double shift = out.values[k] + pivot_floor * 10.0;
    for (int iter = 0; iter < 4; ++iter) {
      shifted_tridiagonal_solve(diag, offdiag, shift, v, pivot_floor);
      for (std::size_t j = 0; j < k; ++j) {
        const double c = dot(v, out.vectors[j]);
        for (std::size_t i = 0; i < n; ++i) v[i] -= c * out.vectors[j][i];
      }
      const double nrm = std::sqrt(dot(v, v));
      require(nrm > 0.0 && std::isfinite(nrm), ErrorCode::NonConvergent, "inverse iteration broke down");
      for (double& x : v) x /= nrm;
    }
    out.vectors[k] = std::move(v);
  }
  return out;
}

EigenSystem discretize_sturm_liouville(const SturmLiouvilleProblem& problem,
                                       std::size_t interior_points, std::size_t modes) {
  require(problem.length > 0.0, ErrorCode::InvalidArgument, "domain length must be positive");
  require(problem.a && problem.c, ErrorCode::InvalidArgument, "coefficients must be provided");
  require(interior_points >= 3, ErrorCode::InvalidArgument, "need at least three interior points");
  require(modes >= 1 && modes <= interior_points, ErrorCode::InvalidArgument,
          "mode count must lie in [1, interior points]");

  const std::size_t m = interior_points;
  const double len = problem.length;
  const double h = len / static_cast<double>(m + 1);

  // a on nodes and half nodes; both are checked against the sign condition
  std::vector<double> a_half(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * h;
    a_half[i] = problem.a(x);
    require(a_half[i] >= problem.kappa_min, ErrorCode::InvalidCoefficients,
            "a(x) falls below kappa_min");
  }
  std::vector<double> diag(m), off(m - 1);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = static_cast<double>(i + 1) * h;
    const double a_node = problem.a(x);
    const double c = problem.c(x);
    require(a_node >= problem.kappa_min, ErrorCode::InvalidCoefficients, "a(x) falls below kappa_min");
    require(c <= 0.0, ErrorCode::InvalidCoefficients, "c(x) must be non-positive");
    diag[i] = (a_half[i] + a_half[i + 1]) / (h * h) - c;
    if (i + 1 < m) off[i] = -a_half[i + 1] / (h * h);
  }
  const double a0 = problem.a(0.0);
  const double aL = problem.a(len);
  require(a0 >= problem.kappa_min && aL >= problem.kappa_min, ErrorCode::InvalidCoefficients,
          "a(x) falls below kappa_min");
  require(problem.c(0.0) <= 0.0 && problem.c(len) <= 0.0, ErrorCode::InvalidCoefficients,
          "c(x) must be non-positive");

  auto eig = tridiagonal_lowest_eigenpairs(diag, off, modes);

  EigenSystem sys;
  sys.kind_ = EigenSystem::Kind::Discretized;
  sys.length_ = len;
  sys.a_left_ = a0;
  sys.a_right_ = aL;
  sys.grid_ = uniform_grid(0.0, len, m + 2);
  sys.weights_ = trapezoid_weights(m + 2, h);
  sys.eigenvalues_ = eig.values;
  check_strictly_increasing(sys.eigenvalues_);
  sys.multiplicities_.assign(modes, 1);
  sys.modes_.assign(modes * (m + 2), 0.0);
  const double norm = 1.0 / std::sqrt(h);
  for (std::size_t n = 0; n < modes; ++n) {
    const auto& v = eig.vectors[n];
    const double sign = v[0] >= 0.0 ? 1.0 : -1.0;
    double* row = sys.modes_.data() + n * (m + 2);
    for (std::size_t i = 0; i < m; ++i) row[i + 1] = sign * norm * v[i];
  }
  return sys;
}

double project(std::span<const double> f_samples, const EigenSystem& system, std::size_t n) {
  return system.inner(f_samples, system.mode(n));
}

SpatialProfile project_all(std::span<const double> f_samples, const EigenSystem& system,
                           double regularity_sigma) {
  SpatialProfile p;
  p.regularity_sigma = regularity_sigma;
  p.modal_coefficients.resize(system.mode_count());
  for (std::size_t n = 0; n < system.mode_count(); ++n) p.modal_coefficients[n] = project(f_samples, system, n);
  return p;
}

std::vector<double> reconstruct(const SpatialProfile& profile, const EigenSystem& system) {
  require(profile.modal_coefficients.size() <= system.mode_count(), ErrorCode::InvalidArgument,
          "profile has more modes than the system");
  std::vector<double> out(system.grid().size(), 0.0);
  for (std::size_t n = 0; n < profile.modal_coefficients.size(); ++n) {
    const double c = profile.modal_coefficients[n];
    if (c == 0.0) continue;
    const auto m = system.mode(n);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * m[i];
  }
  return out;
}

NormWithTail fractional_power_norm(const SpatialProfile& profile, const EigenSystem& system, double sigma) {
  require(sigma >= 0.0, ErrorCode::InvalidArgument, "sigma must be non-negative");
  require(profile.modal_coefficients.size() <= system.mode_count(), ErrorCode::InvalidArgument,
          "profile has more modes than the system");
  const auto lam = system.eigenvalues();
  std::vector<double> terms(profile.modal_coefficients.size());
  double s = 0.0;
  for (std::size_t n = 0; n < terms.size(); ++n) {
    const double f = profile.modal_coefficients[n];
    terms[n] = std::pow(lam[n], 2.0 * sigma) * f * f;
    s += terms[n];
  }
  NormWithTail out{std::sqrt(s), 0.0};
  if (terms.size() >= 4) {
    const double floor = noise_floor(terms, 1e-20);
    out.tail_estimate = power_tail_sum(terms, tail_power(terms, floor), floor);
  }
  return out;
}

ObservationSpec ObservationSpec::interior(double begin, double end, std::function<double(double)> v) {
  ObservationSpec s;
  s.kind = Kind::Interior;
  s.region_begin = begin;
  s.region_end = end;
  s.test_function = std::move(v);
  return s;
}

ObservationSpec ObservationSpec::flux(double weight_left, double weight_right) {
  ObservationSpec s;
  s.kind = Kind::Flux;
  s.weight_left = weight_left;
  s.weight_right = weight_right;
  return s;
}

std::vector<double> pairing_coefficients(const EigenSystem& system, const SpatialProfile& profile,
                                         const ObservationSpec& spec) {
  const std::size_t modes = profile.modal_coefficients.size();
  require(modes <= system.mode_count(), ErrorCode::InvalidArgument, "profile has more modes than the system");
  std::vector<double> a(modes, 0.0);
  if (spec.kind == ObservationSpec::Kind::Flux) {
    require(spec.weight_left != 0.0 || spec.weight_right != 0.0, ErrorCode::RegionMismatch,
            "flux observation with an empty boundary set");
    for (std::size_t n = 0; n < modes; ++n) {
      const double f = profile.modal_coefficients[n];
      if (f == 0.0) continue;
      a[n] = f * (spec.weight_left * system.boundary_flux(n, Side::Left) +
                  spec.weight_right * system.boundary_flux(n, Side::Right));
    }
    return a;
  }
  const double len = system.length();
  const double slack = 1e-12 * len;
  require(spec.region_begin >= -slack && spec.region_end <= len + slack &&
              spec.region_end > spec.region_begin,
          ErrorCode::RegionMismatch, "observation region is not a non-empty subinterval of the domain");
  require(static_cast<bool>(spec.test_function), ErrorCode::InvalidArgument, "interior observation needs a test function");
  const double lo = std::max(0.0, spec.region_begin);
  const double hi = std::min(len, spec.region_end);
  const std::size_t panels = 4 + system.mode_count() / 2;
  const double w = (hi - lo) / static_cast<double>(panels);
  for (std::size_t n = 0; n < modes; ++n) {
    const double f = profile.modal_coefficients[n];
    if (f == 0.0) continue;
    double s = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
      const double pa = lo + w * static_cast<double>(p);
      s += integrate_gl([&](double x) { return system.eigenfunction(n, x) * spec.test_function(x); }, pa, pa + w);
    }
    a[n] = f * s;
  }
  return a;
}

double observe(std::span<const double> modal_values, std::span<const double> pairings) {
  require(modal_values.size() <= pairings.size(), ErrorCode::InvalidArgument,
          "more modal values than pairing coefficients");
  double s = 0.0;
  for (std::size_t n = 0; n < modal_values.size(); ++n) s += modal_values[n] * pairings[n];
  return s;
}

double observe(std::span<const double> modal_values, const EigenSystem& system, const SpatialProfile& profile,
               const ObservationSpec& spec) {
  const auto a = pairing_coefficients(system, profile, spec);
  return observe(modal_values, a);
}

SummabilityReport summability_report(std::span<const double> pairings, const EigenSystem& system) {
  require(pairings.size() >= 10, ErrorCode::InvalidArgument, "summability report needs at least ten modes");
  require(pairings.size() <= system.mode_count(), ErrorCode::InvalidArgument,
          "more pairings than system modes");
  const auto lam = system.eigenvalues();
  std::vector<double> terms(pairings.size());
  SummabilityReport r{};
  r.partial_sums.resize(pairings.size());
  double s = 0.0;
  for (std::size_t n = 0; n < pairings.size(); ++n) {
    terms[n] = std::abs(pairings[n] / lam[n]);
    s += terms[n];
    r.partial_sums[n] = s;
  }
  const std::size_t half = pairings.size() / 2;
  const double total = r.partial_sums.back();
  r.last_half_growth = total > 0.0 ? (total - r.partial_sums[half - 1]) / total : 0.0;
  const double floor = noise_floor(terms, 1e-10);
  const auto fit = tail_power(terms, floor);
  r.tail_exponent = fit.exponent;
  r.tail_estimate = power_tail_sum(terms, fit, floor);
  r.divergent = !std::isfinite(total) || (r.tail_exponent >= -1.0 && r.last_half_growth > 1e-3);
  return r;
}

double weyl_growth_check(const EigenSystem& system, int dimension) {
  require(dimension >= 1, ErrorCode::InvalidArgument, "dimension must be positive");
  require(system.mode_count() >= 10, ErrorCode::InvalidArgument, "Weyl check needs at least ten eigenvalues");
  const auto lam = system.eigenvalues();
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < lam.size(); ++n) {
    c = std::min(c, lam[n] / std::pow(static_cast<double>(n + 1), 2.0 / dimension));
  }
  return c;
}

}  // namespace fractail
