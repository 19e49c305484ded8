#include "fractail/mittag_leffler.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include "fractail/error.hpp"
#include "fractail/gamma.hpp"

namespace fractail {

namespace {

using quad = __float128;

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool is_alpha_one(double alpha) { return std::abs(alpha - 1.0) < 1e-14; }

bool is_integer(double x) { return std::abs(x - std::nearbyint(x)) < 1e-14; }

// Weight of the exponentially small pair of saddle contributions on the
// negative axis: both conjugate poles count for 1 < alpha < 2, the negative
// axis is a Stokes line at alpha = 1, and there is no pole for alpha < 1.
double exponential_weight(double alpha) {
  if (is_alpha_one(alpha)) return 1.0;
  return alpha > 1.0 ? 2.0 / alpha : 0.0;
}

// w Re[ zeta^{1-beta} exp(zeta) ], zeta = eta^{1/alpha} e^{i pi/alpha}.
double exponential_part(const MLParams& p, double eta) {
  const double w = exponential_weight(p.alpha);
  if (w == 0.0) return 0.0;
  const double z = std::pow(eta, 1.0 / p.alpha);
  const double angle = std::numbers::pi / p.alpha;
  const double decay = z * std::cos(angle);
  const double phase = z * std::sin(angle) + angle * (1.0 - p.beta);
  return w * std::pow(z, 1.0 - p.beta) * std::exp(decay) * std::cos(phase);
}

double exponential_magnitude(const MLParams& p, double eta) {
  const double w = exponential_weight(p.alpha);
  if (w == 0.0) return 0.0;
  const double z = std::pow(eta, 1.0 / p.alpha);
  return w * std::pow(z, 1.0 - p.beta) * std::exp(z * std::cos(std::numbers::pi / p.alpha));
}

// Coefficient of eta^{-k} in the algebraic expansion of E_{alpha,beta}(-eta).
double asymptotic_coefficient(const MLParams& p, int k) {
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  return sign * reciprocal_gamma(p.beta - p.alpha * k);
}

double z_of(double alpha, double x) { return std::pow(std::abs(x), 1.0 / alpha); }

struct Kahan {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

void MLParams::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    std::ostringstream os;
    os << "Mittag-Leffler order alpha=" << alpha << " outside (0,2)";
    fail(ErrorCode::InvalidArgument, os.str());
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    std::ostringstream os;
    os << "Mittag-Leffler parameter beta=" << beta << " must be positive";
    fail(ErrorCode::InvalidArgument, os.str());
  }
}

// ---------------------------------------------------------------------------
// Plain double series (the spec-level operation).

double ml_series(const MLParams& params, double x, double tol, int max_terms) {
  // the power series is entire for every alpha > 0, so alpha = 2 is accepted here
  if (params.alpha != 2.0) params.validate();
  require(params.beta > 0.0 && std::isfinite(params.beta), ErrorCode::InvalidArgument,
          "ml_series: beta must be positive");
  require(tol > 0.0, ErrorCode::InvalidArgument, "ml_series: tol must be positive");
  if (x == 0.0) return reciprocal_gamma(params.beta);
  const double log_ax = std::log(std::abs(x));
  Kahan acc;
  double prev = std::numeric_limits<double>::infinity();
  double peak = 0.0;
  bool decreasing = false;
  for (int k = 0; k < max_terms; ++k) {
    const double arg = params.alpha * k + params.beta;
    const double mag = std::exp(k * log_ax - std::lgamma(arg));
    if (!std::isfinite(mag)) break;
    const double term = (x < 0.0 && (k % 2 == 1)) ? -mag : mag;
    acc.add(term);
    peak = std::max(peak, mag);
    if (mag < prev) decreasing = true;
    else if (decreasing && k > 0) decreasing = false;
    prev = mag;
    if (decreasing && (mag < tol * std::abs(acc.sum) || mag < kEps * kEps * peak)) {
      return acc.sum;
    }
  }
  std::ostringstream os;
  os << "ml_series: terms did not settle for x=" << x << " within " << max_terms
     << " terms; |x| too large for the series path";
  fail(ErrorCode::NonConvergent, os.str());
}

// ---------------------------------------------------------------------------
// Asymptotic expansion.

double AsymptoticTermSeries::value(double eta) const {
  double s = 0.0;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
    s += it->coefficient * std::pow(eta, -it->exponent);
  }
  return s;
}

double AsymptoticTermSeries::remainder_bound(double eta) const {
  return 2.0 * std::abs(remainder_coefficient) * std::pow(eta, -remainder_order) +
         exponential_magnitude(params, eta);
}

AsymptoticTermSeries ml_asymptotic_series(const MLParams& params, int n_terms) {
  params.validate();
  require(n_terms >= 1, ErrorCode::InvalidArgument, "ml_asymptotic_series: need at least one term");
  AsymptoticTermSeries s;
  s.params = params;
  s.requested_terms = n_terms;
  for (int k = 1; k <= n_terms; ++k) {
    const double c = asymptotic_coefficient(params, k);
    if (c != 0.0) s.terms.push_back({static_cast<double>(k), c});
  }
  // First and second omitted nonzero terms.
  int first = 0, second = 0;
  for (int k = n_terms + 1; k <= n_terms + 64 && second == 0; ++k) {
    if (asymptotic_coefficient(params, k) != 0.0) (first == 0 ? first : second) = k;
  }
  if (first == 0) {
    s.remainder_order = n_terms + 1;
    s.remainder_coefficient = 0.0;
  } else {
    s.remainder_order = first;
    s.remainder_coefficient = asymptotic_coefficient(params, first);
  }
  const double c2 = second == 0 ? 0.0 : std::abs(asymptotic_coefficient(params, second));

  // eta_0: first point of a 16-per-decade grid where the bound is below
  // 1e-3 of the smallest retained term and the omitted tail is dominated by
  // its first member.
  s.validity_threshold = std::numeric_limits<double>::infinity();
  for (int j = -64; j <= 16 * 40; ++j) {
    const double eta = std::pow(10.0, j / 16.0);
    const double bound = s.remainder_bound(eta);
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& t : s.terms) {
      smallest = std::min(smallest, std::abs(t.coefficient) * std::pow(eta, -t.exponent));
    }
    const bool small_remainder =
        s.terms.empty() ? bound <= 1e-12 : bound < 1e-3 * smallest;
    const bool dominated =
        second == 0 || c2 * std::pow(eta, -second) <=
                           0.5 * std::abs(s.remainder_coefficient) * std::pow(eta, -first);
    if (small_remainder && dominated) {
      s.validity_threshold = eta;
      break;
    }
  }
  return s;
}

AsymptoticValue ml_asymptotic(const MLParams& params, double eta, int n_terms) {
  require(eta > 0.0, ErrorCode::InvalidArgument, "ml_asymptotic: eta must be positive");
  const auto series = ml_asymptotic_series(params, n_terms);
  if (eta < series.validity_threshold) {
    std::ostringstream os;
    os << "ml_asymptotic: eta=" << eta << " below validity threshold "
       << series.validity_threshold << " for alpha=" << params.alpha << ", N=" << n_terms;
    fail(ErrorCode::BelowValidityThreshold, os.str());
  }
  return {series.value(eta), series.remainder_bound(eta)};
}

// ---------------------------------------------------------------------------
// Hybrid evaluator.

struct MittagLeffler::Table {
  std::vector<quad> coef;      // 1/Gamma(alpha k + beta)
  std::vector<double> coef_d;  // same, rounded
};

MittagLeffler::MittagLeffler(MLParams params) : params_(params) {
  params_.validate();
  auto table = std::make_shared<Table>();
  // Enough terms for the extended series up to z = 1.5 * kAsymptoticLimit.
  const double z_max = 1.5 * kAsymptoticLimit;
  const double log_x_max = params_.alpha * std::log(z_max);
  const int k_peak = static_cast<int>(z_max / params_.alpha) + 1;
  for (int k = 0;; ++k) {
    const double arg = params_.alpha * k + params_.beta;
    const quad g = tgammaq(static_cast<quad>(params_.alpha) * k + static_cast<quad>(params_.beta));
    if (!(g < FLT128_MAX)) break;
    table->coef.push_back(1 / g);
    table->coef_d.push_back(static_cast<double>(1 / g));
    if (k > k_peak && k * log_x_max - std::lgamma(arg) < -110.0) break;
  }
  table_ = std::move(table);
}

MLPath MittagLeffler::path(double x) const {
  if (x == 0.0) return MLPath::Zero;
  const double z = z_of(params_.alpha, x);
  if (z <= kSeriesLimit) return MLPath::Series;
  if (z <= kAsymptoticLimit) {
    // E_{1,n}(-x) has a terminating expansion, exact at every x.
    if (is_alpha_one(params_.alpha) && is_integer(params_.beta)) return MLPath::Asymptotic;
    return MLPath::ExtendedSeries;
  }
  return MLPath::Asymptotic;
}

double MittagLeffler::operator()(double x) const {
  if (!(x <= 0.0)) fail(ErrorCode::InvalidArgument, "Mittag-Leffler evaluation requires x <= 0");
  switch (path(x)) {
    case MLPath::Zero: return table_->coef_d[0];
    case MLPath::Series: return series_double(x);
    case MLPath::ExtendedSeries: return series_extended(x);
    case MLPath::Asymptotic: return asymptotic_optimal(x);
  }
  return 0.0;
}

double MittagLeffler::series_double(double x) const {
  const auto& c = table_->coef_d;
  Kahan acc;
  double p = 1.0, peak = 0.0, prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double term = c[k] * p;
    acc.add(term);
    const double mag = std::abs(term);
    peak = std::max(peak, mag);
    if (mag < prev && (mag < 1e-18 * std::abs(acc.sum) || mag < 1e-20 * peak)) break;
    prev = mag;
    p *= x;
  }
  return acc.sum;
}

double MittagLeffler::series_extended(double x) const {
  const auto& c = table_->coef;
  const quad xq = x;
  quad sum = 0, p = 1, peak = 0, prev = FLT128_MAX;
  std::size_t k = 0;
  for (; k < c.size(); ++k) {
    const quad term = c[k] * p;
    sum += term;
    const quad mag = fabsq(term);
    if (mag > peak) peak = mag;
    if (mag < prev && (mag < 1e-34Q * fabsq(sum) || mag < 1e-36Q * peak)) break;
    prev = mag;
    p *= xq;
  }
  if (k == c.size()) {
    std::ostringstream os;
    os << "extended Mittag-Leffler series ran out of coefficients at x=" << x;
    fail(ErrorCode::NonConvergent, os.str());
  }
  return static_cast<double>(sum);
}

double MittagLeffler::asymptotic_optimal(double x) const {
  const double eta = -x;
  const double alpha = params_.alpha, beta = params_.beta;
  const double log_eta = std::log(eta);
  const double log_pi = std::log(std::numbers::pi);
  // Terminating case: 1/Gamma(beta - k) vanishes for every k >= beta.
  const int k_stop = (is_alpha_one(alpha) && is_integer(beta))
                         ? static_cast<int>(std::nearbyint(beta)) - 1
                         : 100000;
  Kahan acc;
  double prev_env = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_stop; ++k) {
    const double y = beta - alpha * k;
    double env, term;
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    if (y > 0.0) {
      const double r = reciprocal_gamma(y);
      env = std::abs(r) * std::exp(-k * log_eta);
      term = sign * r * std::exp(-k * log_eta);
    } else {
      env = std::exp(std::lgamma(1.0 - y) - k * log_eta - log_pi);
      term = is_gamma_pole(y) ? 0.0 : sign * sin_pi(y) * env;
      // Past the smallest term the expansion starts to diverge.
      if (env > prev_env) break;
      prev_env = env;
    }
    acc.add(term);
    if (y <= 0.0 && env < 1e-18 * std::abs(acc.sum)) break;
  }
  return acc.sum + exponential_part(params_, eta);
}

// ---------------------------------------------------------------------------

namespace {

const MittagLeffler& cached_evaluator(const MLParams& params) {
  struct Entry {
    double alpha, beta;
    MittagLeffler ml;
  };
  // Per-thread, so evaluation stays free of shared mutable state.
  thread_local std::vector<std::unique_ptr<Entry>> cache;
  for (const auto& e : cache) {
    if (e->alpha == params.alpha && e->beta == params.beta) return e->ml;
  }
  if (cache.size() >= 32) cache.erase(cache.begin());
  cache.push_back(std::make_unique<Entry>(Entry{params.alpha, params.beta, MittagLeffler(params)}));
  return cache.back()->ml;
}

}  // namespace

MittagLeffler mittag_leffler_for(const MLParams& params) {
  params.validate();
  return cached_evaluator(params);
}

double ml_eval(const MLParams& params, double x) {
  params.validate();
  return cached_evaluator(params)(x);
}

double ml_uniform_bound_check(double alpha, std::span<const double> eta_grid) {
  require(!eta_grid.empty(), ErrorCode::InvalidArgument, "ml_uniform_bound_check: empty grid");
  const MLParams p{alpha, alpha};
  const auto& ml = cached_evaluator((p.validate(), p));
  double c = 0.0;
  for (double eta : eta_grid) {
    require(eta > 0.0, ErrorCode::InvalidArgument, "ml_uniform_bound_check: grid entries must be positive");
    c = std::max(c, std::abs(ml(-eta)) * (1.0 + eta));
  }
  return c;
}

}  // namespace fractail
