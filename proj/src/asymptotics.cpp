#include "fractail/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fractail/error.hpp"
#include "fractail/fitting.hpp"
#include "fractail/gamma.hpp"

namespace fractail {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace

bool near_positive_integer(double x) {
  const double r = std::round(x);
  return r >= 1.0 && std::abs(x - r) <= kLadderTolerance;
}

double ExponentLadder::sigma(std::size_t k) const { return alpha * ells.at(k) - alpha + 1.0; }

double ExponentLadder::gamma_factor(std::size_t k) const {
  const int l = ells.at(k);
  const double sign = (l + 1) % 2 == 0 ? 1.0 : -1.0;
  return sign * reciprocal_gamma(alpha - alpha * l);
}

ExponentLadder exponent_ladder(double alpha, int K, LadderRule rule) {
  require(alpha > 0.0 && alpha < 2.0, ErrorCode::InvalidArgument, "alpha must lie in (0, 2)");
  require(std::abs(alpha - 1.0) > kLadderTolerance, ErrorCode::AlphaIsOne, "the ladder is undefined at alpha = 1");
  require(K >= 1, ErrorCode::InvalidArgument, "ladder length must be at least 1");
  ExponentLadder ladder{alpha, rule, {}};
  for (int l = 2; static_cast<int>(ladder.ells.size()) < K; ++l) {
    const double x = rule == LadderRule::NonVanishing ? alpha * (l - 1) : alpha * l;
    if (!near_positive_integer(x)) ladder.ells.push_back(l);
  }
  return ladder;
}

MomentVector moments(const PiecewisePolynomial& mu, double t0, int M) {
  require(M >= 0, ErrorCode::InvalidArgument, "moment order must be non-negative");
  require(t0 > 0.0, ErrorCode::InvalidArgument, "t0 must be positive");
  MomentVector out;
  out.t0 = t0;
  out.l1_norm = mu.l1_norm();
  for (int m = 0; m <= M; ++m) {
    const double v = (m % 2 == 0 ? 1.0 : -1.0) * mu.power_moment(m);
    out.moments.push_back(v);
    if (!out.m1 && std::abs(v) > 1e-12 * std::pow(t0, m) * out.l1_norm) out.m1 = m;
  }
  return out;
}

double gen_binomial(double neg_sigma, int m) {
  require(m >= 0, ErrorCode::InvalidArgument, "binomial index must be non-negative");
  double v = 1.0;
  for (int j = 0; j < m; ++j) v *= (neg_sigma - j) / (j + 1);
  return v;
}

KernelExpansion kernel_moment_expansion(double sigma, const SourceSpec& source, int M, double t) {
  require(sigma > 0.0, ErrorCode::InvalidArgument, "kernel exponent must be positive");
  source.validate();
  require(t > source.t0 / kExpansionRatio, ErrorCode::TimeTooSmall, "expansion needs t > t0 / r");
  const auto mv = moments(source.mu, source.t0, M);
  KernelExpansion out;
  double abs_sum = 0.0;
  for (int m = 0; m <= M; ++m) {
    const double term = gen_binomial(-sigma, m) * mv.moments[m] * std::pow(t, -(sigma + m));
    out.terms.push_back(term);
    out.value += term;
    abs_sum += std::abs(term);
  }
  // (1 - eta)^{-sigma} Taylor remainder: |binom(-sigma, M+1)| eta^{M+1} (1 - r)^{-sigma-M-1}
  const double c4 = std::abs(gen_binomial(-sigma, M + 1)) * std::pow(1.0 - kExpansionRatio, -sigma - M - 1.0);
  out.remainder_bound = c4 * std::pow(source.t0, M + 1) * mv.l1_norm * std::pow(t, -(sigma + M + 1)) +
                        4.0 * (M + 2) * kEps * abs_sum;
  return out;
}

double TailModel::operator()(double t) const {
  double s = 0.0;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    for (std::size_t m = 0; m < coefficients[k].size(); ++m) s += coefficients[k][m] * std::pow(t, -exponents[k][m]);
  }
  return s;
}

double TailModel::magnitude(double t) const {
  double s = 0.0;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    for (std::size_t m = 0; m < coefficients[k].size(); ++m) {
      s += std::abs(coefficients[k][m]) * std::pow(t, -exponents[k][m]);
    }
  }
  return s;
}

TailModel build_tail_model(std::span<const double> pairings, std::span<const double> eigenvalues,
                           const ExponentLadder& ladder, const MomentVector& moments, int K, int M) {
  require(K >= 1 && M >= 0, ErrorCode::InvalidArgument, "tail model needs K >= 1 and M >= 0");
  require(pairings.size() <= eigenvalues.size() && !pairings.empty(), ErrorCode::InvalidArgument,
          "pairings must be non-empty and not exceed the spectrum");
  require(static_cast<int>(moments.moments.size()) >= M + 1, ErrorCode::InvalidArgument,
          "moment vector shorter than M + 1");
  for (double l : eigenvalues.first(pairings.size())) {
    require(l > 0.0, ErrorCode::NonPositiveEigenvalue, "eigenvalues must be positive");
  }
  TailModel model;
  model.ladder = ladder.size() >= static_cast<std::size_t>(K + 1) ? ladder
                                                                   : exponent_ladder(ladder.alpha, K + 1, ladder.rule);
  model.ladder.ells.resize(K + 1);
  model.moments = moments;
  model.K = K;
  model.M = M;
  model.lambda_min = *std::min_element(eigenvalues.begin(), eigenvalues.begin() + pairings.size());
  model.A.assign(K, 0.0);
  model.A_tail.assign(K, 0.0);
  for (int k = 0; k < K; ++k) {
    const int l = model.ladder.ells[k];
    double s = 0.0;
    for (std::size_t n = 0; n < pairings.size(); ++n) s += pairings[n] * std::pow(eigenvalues[n], -l);
    model.A[k] = s;
  }
  for (int k = 0; k < K; ++k) {
    const double sigma = model.ladder.sigma(k);
    const double g = model.ladder.gamma_factor(k);
    std::vector<double> e, c;
    for (int m = 0; m <= M; ++m) {
      e.push_back(sigma + m);
      c.push_back(g * gen_binomial(-sigma, m) * moments.moments[m] * model.A[k]);
    }
    model.exponents.push_back(std::move(e));
    model.coefficients.push_back(std::move(c));
  }
  model.remainder_order = std::min(model.ladder.sigma(K), model.ladder.sigma(0) + M + 1.0);
  return model;
}

TailModel build_tail_model(std::span<const double> pairings, const EigenSystem& system,
                           const ExponentLadder& ladder, const MomentVector& moments, int K, int M) {
  std::optional<SummabilityReport> report;
  if (pairings.size() >= 10) {
    report = summability_report(pairings, system);
    require(!report->divergent, ErrorCode::DivergentCoefficients, "sum a_n / lambda_n does not converge");
  }
  auto model = build_tail_model(pairings, system.eigenvalues(), ladder, moments, K, M);
  if (report) {
    // beyond the retained modes |a_n| lambda_n^{-l} <= |a_n / lambda_n| lambda_N^{1-l}
    const double lam_n = system.eigenvalues()[pairings.size() - 1];
    for (int k = 0; k < K; ++k) {
      model.A_tail[k] = report->tail_estimate * std::pow(lam_n, 1.0 - model.ladder.ells[k]);
    }
  }
  return model;
}

bool ErrorOrderFit::within_contract() const {
  return !degenerate && slope <= expected + 0.05 * std::abs(expected);
}

ErrorOrderFit model_error_order(std::span<const double> times, std::span<const double> observed,
                                const TailModel& model) {
  require(times.size() == observed.size() && times.size() >= 3, ErrorCode::InvalidArgument,
          "need matching times and observations, at least three");
  const double alpha = model.ladder.alpha;
  const double t0 = model.moments.t0;
  ErrorOrderFit fit;
  fit.expected = -model.remainder_order;
  fit.t_star = std::max(2.0 * t0, t0 + std::pow(10.0 / model.lambda_min, 1.0 / alpha));
  const double t_lo = std::max(times.front(), fit.t_star);
  require(times.back() >= 100.0 * t_lo, ErrorCode::InsufficientDecades,
          "the grid must extend two decades past max(t_min, T*)");

  std::vector<double> ft, fg;
  std::size_t considered = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const double gap = observed[i] - model(t);
    fit.gap.push_back(gap);
    if (t < t_lo) continue;
    ++considered;
    const double floor = 64.0 * kEps * (std::abs(observed[i]) + model.magnitude(t));
    if (std::abs(gap) > floor) {
      ft.push_back(t);
      fg.push_back(gap);
    }
  }
  fit.fitted_points = ft.size();
  if (ft.size() < 3 || 2 * ft.size() < considered) {
    fit.degenerate = true;
    fit.slope = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  const auto line = fit_power_law(ft, fg);
  fit.slope = line.slope;
  fit.slope_stderr = line.slope_stderr;
  fit.r_squared = line.r_squared;
  return fit;
}

}  // namespace fractail
