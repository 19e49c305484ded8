#include "fractail/inverse_source.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fractail/error.hpp"
#include "fractail/gamma.hpp"
#include "fractail/parallel.hpp"
#include "fractail/quadrature.hpp"

namespace fractail {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kMaxCondition = 1e12;

Eigen::VectorXd to_eigen(std::span<const double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// fit over the nonzero samples; NaN slope when fewer than two remain
LineFit guarded_fit(LineFit (*fit)(std::span<const double>, std::span<const double>), std::span<const double> t,
                    std::span<const double> y) {
  std::size_t nz = 0;
  for (double v : y) nz += v != 0.0 && std::isfinite(v);
  if (nz < 2) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan, nan};
  }
  return fit(t, y);
}

// col_k(t) for the A_k-structured dictionary
double model_column(const ExponentLadder& ladder, std::size_t k, const MomentVector& mv, int M, double t) {
  const double sigma = ladder.sigma(k);
  double s = 0.0;
  for (int m = 0; m <= M; ++m) s += gen_binomial(-sigma, m) * mv.moments[m] * std::pow(t, -(sigma + m));
  return ladder.gamma_factor(k) * s;
}

}  // namespace

void TailData::validate() const {
  require(times.size() == values.size() && times.size() >= 2, ErrorCode::InvalidArgument,
          "tail data needs matching times and values");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(std::isfinite(values[i]), ErrorCode::InvalidArgument, "tail data contains non-finite values");
    require(times[i] > 0.0 && (i == 0 || times[i] > times[i - 1]), ErrorCode::InvalidArgument,
            "tail times must be positive and strictly increasing");
  }
  require(noise_level >= 0.0, ErrorCode::InvalidArgument, "noise level must be non-negative");
}

std::vector<double> TailData::sample_noise() const {
  std::vector<double> out;
  for (double v : values) out.push_back(std::max(noise_level, 16.0 * kEps * std::abs(v)));
  return out;
}

TailData synthesize_tail(std::span<const double> pairings, std::span<const double> eigenvalues, double alpha,
                         const SourceSpec& source, std::span<const double> times) {
  require(pairings.size() <= eigenvalues.size(), ErrorCode::InvalidArgument, "more pairings than eigenvalues");
  std::vector<std::vector<double>> psi(pairings.size());
  parallel_for(pairings.size(), [&](std::size_t n) {
    if (pairings[n] != 0.0) psi[n] = psi_tail(eigenvalues[n], alpha, source, times).values;
  });
  TailData d{{times.begin(), times.end()}, std::vector<double>(times.size(), 0.0), 0.0};
  for (std::size_t n = 0; n < pairings.size(); ++n) {
    if (pairings[n] == 0.0) continue;
    for (std::size_t i = 0; i < times.size(); ++i) d.values[i] += pairings[n] * psi[n][i];
  }
  return d;
}

bool AExtraction::at_floor(std::size_t k) const { return std::abs(A.at(k)) <= noise_floor.at(k); }

AExtraction extract_A_sequence(const TailData& data, const ExponentLadder& ladder, const MomentVector& moments,
                               int K, int M) {
  data.validate();
  require(moments.m1.has_value(), ErrorCode::DegenerateMoments, "all source moments vanish");
  require(K >= 1 && M >= 0, ErrorCode::InvalidArgument, "extraction needs K >= 1 and M >= 0");
  require(static_cast<int>(moments.moments.size()) >= M + 1, ErrorCode::InvalidArgument,
          "moment vector shorter than M + 1");
  require(data.times.size() >= static_cast<std::size_t>(K), ErrorCode::InvalidArgument,
          "fewer samples than unknowns");

  AExtraction out;
  out.ladder = ladder.size() >= static_cast<std::size_t>(K) ? ladder : exponent_ladder(ladder.alpha, K, ladder.rule);
  out.ladder.ells.resize(K);
  out.K = K;
  out.M = M;
  out.m1 = *moments.m1;

  const std::size_t n = data.times.size();
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), K);
  Eigen::VectorXd weights(static_cast<Eigen::Index>(n));
  const double w_exp = out.ladder.sigma(0) + out.m1;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = data.times[i];
    for (int k = 0; k < K; ++k) design(static_cast<Eigen::Index>(i), k) = model_column(out.ladder, k, moments, M, t);
    weights(static_cast<Eigen::Index>(i)) = std::pow(t, w_exp);
  }
  const auto ls = weighted_least_squares(design, to_eigen(data.values), weights);
  out.condition_number = ls.condition_number;
  require(ls.condition_number <= kMaxCondition, ErrorCode::IllConditioned,
          "dictionary condition number exceeds 1e12; reduce K or M or extend the data span");
  out.A = to_std(ls.coefficients);
  out.residuals = to_std(ls.standard_errors);
  const Eigen::VectorXd floor = ls.pinv.cwiseAbs() * to_eigen(data.sample_noise());
  out.noise_floor = to_std(floor);

  // sequential: divide the running residual by col_k and average the flattest decade
  std::vector<double> r = data.values;
  for (int k = 0; k < K; ++k) {
    std::vector<double> h(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < n; ++i) {
      const double c = design(static_cast<Eigen::Index>(i), k);
      if (c != 0.0) h[i] = r[i] / c;
    }
    double best_spread = std::numeric_limits<double>::infinity(), best_mean = 0.0, best_begin = data.times.front();
    for (std::size_t i0 = 0; i0 < n; ++i0) {
      const double t_end = 10.0 * data.times[i0];
      if (i0 > 0 && t_end > data.times.back() * (1.0 + 1e-12)) break;
      double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
      std::size_t cnt = 0;
      for (std::size_t i = i0; i < n && data.times[i] <= t_end * (1.0 + 1e-12); ++i) {
        if (std::isnan(h[i])) continue;
        lo = std::min(lo, h[i]);
        hi = std::max(hi, h[i]);
        sum += h[i];
        ++cnt;
      }
      if (cnt < 2) continue;
      if (hi - lo < best_spread) {
        best_spread = hi - lo;
        best_mean = sum / static_cast<double>(cnt);
        best_begin = data.times[i0];
      }
    }
    if (!std::isfinite(best_spread)) best_spread = 0.0;
    out.A_sequential.push_back(best_mean);
    out.residuals_sequential.push_back(0.5 * best_spread);
    out.plateau_begin.push_back(best_begin);
    for (std::size_t i = 0; i < n; ++i) r[i] -= best_mean * design(static_cast<Eigen::Index>(i), k);
  }

  for (int k1 = 0; k1 < K; ++k1) {
    for (int k2 = k1 + 1; k2 < K; ++k2) {
      for (int m1 = 0; m1 <= M; ++m1) {
        for (int m2 = 0; m2 <= M; ++m2) {
          const double e1 = out.ladder.sigma(k1) + m1, e2 = out.ladder.sigma(k2) + m2;
          if (std::abs(e1 - e2) <= kLadderTolerance) out.collisions.push_back({k1, m1, k2, m2, e1});
        }
      }
    }
  }
  return out;
}

ModalRecovery recover_modal_amplitudes(std::span<const double> A, std::span<const double> A_residuals,
                                       std::span<const int> ells, std::span<const double> eigenvalues,
                                       std::size_t n_modes) {
  require(n_modes >= 1, ErrorCode::InvalidArgument, "need at least one mode");
  require(A.size() == ells.size() && A_residuals.size() == A.size(), ErrorCode::InvalidArgument,
          "A, residuals and ladder differ in length");
  require(A.size() >= n_modes, ErrorCode::InsufficientLadder, "fewer spectral sums than modes to recover");
  require(eigenvalues.size() >= n_modes, ErrorCode::InvalidArgument, "fewer eigenvalues than modes");
  for (std::size_t j = 0; j < n_modes; ++j) {
    require(eigenvalues[j] > 0.0, ErrorCode::NonPositiveEigenvalue, "eigenvalues must be positive");
    if (j + 1 < n_modes) {
      require(eigenvalues[j + 1] > eigenvalues[j], ErrorCode::InvalidArgument, "eigenvalues must increase strictly");
      require(eigenvalues[j + 1] / eigenvalues[j] >= 1.01, ErrorCode::NearDegenerateSpectrum,
              "consecutive eigenvalues closer than 1 percent");
    }
  }
  const std::size_t K = A.size();
  const double lam1 = eigenvalues[0];
  // rows scaled by lambda_1^{l_k}: entries (lambda_1 / lambda_n)^{l_k}
  Eigen::MatrixXd V(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(n_modes));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(K)), sig(static_cast<Eigen::Index>(K));
  double scale_max = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double s = std::pow(lam1, ells[k]);
    for (std::size_t j = 0; j < n_modes; ++j) {
      V(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = std::pow(lam1 / eigenvalues[j], ells[k]);
    }
    rhs(static_cast<Eigen::Index>(k)) = A[k] * s;
    sig(static_cast<Eigen::Index>(k)) = std::abs(A_residuals[k]) * s;
    scale_max = std::max(scale_max, std::abs(A[k] * s));
  }
  Eigen::VectorXd w(static_cast<Eigen::Index>(K));
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    w(k) = 1.0 / std::max({sig(k), 1e-15 * scale_max, std::numeric_limits<double>::min()});
  }
  const auto ls = weighted_least_squares(V, rhs, w);
  ModalRecovery out;
  out.condition_number = ls.condition_number;
  out.a = to_std(ls.coefficients);
  for (std::size_t j = 0; j < n_modes; ++j) {
    double e = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      e += std::abs(ls.pinv(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k))) * sig(static_cast<Eigen::Index>(k));
    }
    out.propagated_error.push_back(e);
  }

  std::vector<double> deflated(A.begin(), A.end());
  const int l_top = ells[K - 1];
  for (std::size_t j = 0; j < n_modes; ++j) {
    const double a = std::pow(eigenvalues[j], l_top) * deflated[K - 1];
    out.a_deflation.push_back(a);
    for (std::size_t k = 0; k < K; ++k) deflated[k] -= a * std::pow(eigenvalues[j], -ells[k]);
  }
  for (std::size_t j = 0; j < n_modes; ++j) {
    double b = 0.0;
    for (std::size_t i = j + 1; i < n_modes; ++i) b += std::abs(out.a[i]) * std::pow(eigenvalues[j] / eigenvalues[i], l_top);
    out.deflation_bound.push_back(b);
  }
  return out;
}

ModalRecovery recover_modal_amplitudes(const AExtraction& extraction, std::span<const double> eigenvalues,
                                       std::size_t n_modes) {
  std::vector<double> res;
  for (std::size_t k = 0; k < extraction.A.size(); ++k) {
    res.push_back(std::max(extraction.residuals[k], extraction.noise_floor[k]));
  }
  return recover_modal_amplitudes(extraction.A, res, extraction.ladder.ells, eigenvalues, n_modes);
}

double riemann_liouville_tail(double alpha, const PiecewisePolynomial& mu, double t) {
  require(alpha > 0.0, ErrorCode::InvalidArgument, "order must be positive");
  require(t > mu.support_end(), ErrorCode::TimeInsideSupport, "time must lie after the source support");
  double s = 0.0;
  for (const auto& seg : mu.segments()) {
    auto f = [&](double x) { return std::pow(t - x, alpha - 1.0) * seg(x); };
    s += integrate_graded(f, seg.begin, seg.end, Endpoint::Upper, t - seg.end);
  }
  return s * reciprocal_gamma(alpha);
}

ScalarRecovery scalar_moment_recovery(const TailData& v_tail, double alpha, double t0, int M) {
  v_tail.validate();
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "scalar recovery needs 0 < alpha < 1");
  require(M >= 0, ErrorCode::InvalidArgument, "moment order must be non-negative");
  require(v_tail.times.front() > 2.0 * t0 && v_tail.times.back() >= 100.0 * v_tail.times.front(),
          ErrorCode::InsufficientSpan, "scalar recovery needs t_min > 2 t0 and two decades of data");
  const std::size_t n = v_tail.times.size();
  const int cols = M + 2;
  require(n >= static_cast<std::size_t>(cols), ErrorCode::InvalidArgument, "fewer samples than unknowns");
  const double rg = reciprocal_gamma(alpha);
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), cols);
  Eigen::VectorXd weights(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = v_tail.times[i];
    const auto r = static_cast<Eigen::Index>(i);
    design(r, 0) = 1.0;
    for (int m = 0; m <= M; ++m) design(r, m + 1) = rg * gen_binomial(-(1.0 - alpha), m) * std::pow(t, -(1.0 - alpha + m));
    weights(r) = std::pow(t, 1.0 - alpha);
  }
  const auto ls = weighted_least_squares(design, to_eigen(v_tail.values), weights);
  require(ls.condition_number <= kMaxCondition, ErrorCode::IllConditioned,
          "moment dictionary condition number exceeds 1e12");
  ScalarRecovery out;
  out.condition_number = ls.condition_number;
  out.a = ls.coefficients(0);
  out.a_error = ls.standard_errors(0);
  const Eigen::VectorXd floor = ls.pinv.cwiseAbs() * to_eigen(v_tail.sample_noise());
  out.zero_verdict = true;
  for (int j = 0; j < cols; ++j) {
    out.noise_floor.push_back(floor(j));
    if (std::abs(ls.coefficients(j)) > out.noise_floor.back()) out.zero_verdict = false;
    if (j > 0) {
      out.moments.push_back(ls.coefficients(j));
      out.moment_errors.push_back(ls.standard_errors(j));
    }
  }
  return out;
}

DecayProbe probe_decay(std::span<const double> times, std::span<const double> values, std::span<const int> orders) {
  require(times.size() == values.size() && times.size() >= 2, ErrorCode::InvalidArgument,
          "decay probe needs matching samples");
  static constexpr int kDefaultOrders[] = {2, 4, 8};
  if (orders.empty()) orders = kDefaultOrders;
  DecayProbe out;
  const double first_end = 10.0 * times.front();
  const double last_begin = times.back() / 10.0;
  for (int p : orders) {
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double w = std::pow(times[i], p) * std::abs(values[i]);
      if (times[i] <= first_end) first = std::max(first, w);
      if (times[i] >= last_begin) last = std::max(last, w);
    }
    const bool ok = last <= 10.0 * first;
    out.orders.push_back(p);
    out.bounded.push_back(ok);
    if (ok) out.largest_bounded = std::max(out.largest_bounded, p);
  }
  std::vector<double> t, v;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (values[i] != 0.0 && std::isfinite(values[i])) {
      t.push_back(times[i]);
      v.push_back(values[i]);
    }
  }
  out.fitted_exponent = t.size() >= 2 ? fit_power_law(t, v).slope : std::numeric_limits<double>::quiet_NaN();
  return out;
}

UniquenessReport uniqueness_experiment(const SpatialProfile& f1, const SpatialProfile& f2, const SourceSpec& source,
                                       const EigenSystem& system, const ObservationSpec& obs, double alpha,
                                       double t_max, const UniquenessOptions& options) {
  source.validate();
  require(alpha > 0.0 && alpha < 2.0 && std::abs(alpha - 1.0) > kLadderTolerance, ErrorCode::InvalidArgument,
          "uniqueness experiment needs alpha in (0, 2), alpha != 1");
  require(options.t_min > 2.0 * source.t0 && t_max >= 100.0 * options.t_min, ErrorCode::InsufficientSpan,
          "need t_min > 2 t0 and two decades of tail");
  const std::size_t modes = std::max(f1.modal_coefficients.size(), f2.modal_coefficients.size());
  require(modes >= 1, ErrorCode::InvalidArgument, "profiles carry no modes");
  require(modes <= system.mode_count(), ErrorCode::InvalidArgument, "profiles exceed the system's modes");

  auto padded = [&](const SpatialProfile& f) {
    SpatialProfile p = f;
    p.modal_coefficients.resize(modes, 0.0);
    return p;
  };
  const auto p1 = padded(f1), p2 = padded(f2);
  UniquenessReport rep;
  rep.pairings_1 = pairing_coefficients(system, p1, obs);
  rep.pairings_2 = pairing_coefficients(system, p2, obs);
  SpatialProfile ones;
  ones.modal_coefficients.assign(modes, 1.0);
  const auto sensitivity = pairing_coefficients(system, ones, obs);
  double s_max = 0.0, df_max = 0.0;
  for (std::size_t n = 0; n < modes; ++n) {
    s_max = std::max(s_max, std::abs(sensitivity[n]));
    df_max = std::max(df_max, std::abs(p1.modal_coefficients[n] - p2.modal_coefficients[n]));
  }
  for (std::size_t n = 0; n < modes; ++n) rep.pairing_gap.push_back(rep.pairings_1[n] - rep.pairings_2[n]);
  const bool identical = df_max == 0.0;
  if (!identical) {
    bool visible = false;
    for (double d : rep.pairing_gap) visible = visible || std::abs(d) > 1e-10 * df_max * s_max;
    require(visible, ErrorCode::IndistinguishableAtScale,
            "every pairing of f1 - f2 vanishes for this observation");
  }
  rep.verdict = identical ? UniquenessReport::Verdict::IdenticalSources : UniquenessReport::Verdict::PowerLawGap;

  rep.times = geometric_grid(options.t_min, t_max, options.points_per_decade);
  const auto lam = system.eigenvalues();
  std::vector<std::vector<double>> psi(modes);
  parallel_for(modes, [&](std::size_t n) {
    if (rep.pairings_1[n] != 0.0 || rep.pairings_2[n] != 0.0) psi[n] = psi_tail(lam[n], alpha, source, rep.times).values;
  });
  const std::size_t nt = rep.times.size();
  rep.g1.assign(nt, 0.0);
  rep.g2.assign(nt, 0.0);
  std::vector<double> scale(nt, 0.0);
  for (std::size_t n = 0; n < modes; ++n) {
    if (psi[n].empty()) continue;
    for (std::size_t i = 0; i < nt; ++i) {
      rep.g1[i] += rep.pairings_1[n] * psi[n][i];
      rep.g2[i] += rep.pairings_2[n] * psi[n][i];
      scale[i] += (std::abs(rep.pairings_1[n]) + std::abs(rep.pairings_2[n])) * std::abs(psi[n][i]);
    }
  }
  rep.gap_at_floor = true;
  for (std::size_t i = 0; i < nt; ++i) {
    rep.gap.push_back(rep.g1[i] - rep.g2[i]);
    if (std::abs(rep.gap[i]) > 64.0 * kEps * scale[i]) rep.gap_at_floor = false;
  }
  rep.probe = probe_decay(rep.times, rep.gap);

  const auto ladder = exponent_ladder(alpha, options.K);
  const auto mv = moments(source.mu, source.t0, options.M);
  rep.expected_exponent = std::numeric_limits<double>::quiet_NaN();
  if (mv.m1) {
    for (int k = 0; k < options.K; ++k) {
      double Ak = 0.0, mag = 0.0;
      for (std::size_t n = 0; n < modes; ++n) {
        Ak += rep.pairing_gap[n] * std::pow(lam[n], -ladder.ells[k]);
        mag += std::abs(rep.pairing_gap[n]) * std::pow(lam[n], -ladder.ells[k]);
      }
      if (mag > 0.0 && std::abs(Ak) > 1e-12 * mag) {
        rep.expected_exponent = ladder.sigma(k) + *mv.m1;
        break;
      }
    }
  }
  if (rep.gap_at_floor) {
    rep.gap_exponent = std::numeric_limits<double>::infinity();
    return rep;
  }
  const auto line = fit_power_law(rep.times, rep.gap);
  rep.gap_exponent = -line.slope;
  rep.gap_r_squared = line.r_squared;

  if (mv.m1) {
    const auto ex = extract_A_sequence(TailData{rep.times, rep.gap, 0.0}, ladder, mv, options.K, options.M);
    const std::size_t n_rec = std::min({options.recover_modes, static_cast<std::size_t>(options.K), modes});
    const auto rec = recover_modal_amplitudes(ex, lam, n_rec);
    rep.recovered = rec.a;
    double gap_max = 0.0;
    for (double d : rep.pairing_gap) gap_max = std::max(gap_max, std::abs(d));
    for (std::size_t n = 0; n < n_rec; ++n) {
      rep.recovery_error = std::max(rep.recovery_error, std::abs(rec.a[n] - rep.pairing_gap[n]) / gap_max);
    }
  }
  return rep;
}

double scaled_heat_integral(double lambda, const PiecewisePolynomial& mu, double t0) {
  require(lambda > 0.0, ErrorCode::NonPositiveEigenvalue, "eigenvalue must be positive");
  double s = 0.0;
  for (const auto& seg : mu.segments()) {
    auto f = [&](double x) { return std::exp(-lambda * (t0 - x)) * seg(x); };
    const double len = seg.end - seg.begin;
    s += integrate_graded(f, seg.begin, seg.end, Endpoint::Upper, std::min(len, std::max(t0 - seg.end, 1.0 / lambda)));
  }
  return s;
}

PiecewisePolynomial vanishing_heat_source(double lambda, double t0) {
  require(t0 > 0.0, ErrorCode::InvalidArgument, "t0 must be positive");
  const double half = 0.5 * t0;
  auto integral = [&](double w) {
    return scaled_heat_integral(lambda, PiecewisePolynomial({{0.0, half, {1.0}}, {half, t0, {-w}}}), t0);
  };
  // the integral is affine in w, so one secant step from w = 0, 1 lands on the root
  const double j0 = integral(0.0), j1 = integral(1.0);
  const double w = j0 / (j0 - j1);
  return PiecewisePolynomial({{0.0, half, {1.0}}, {half, t0, {-w}}});
}

HeatContrastReport heat_contrast_experiment(const EigenSystem& system, const SourceSpec& source,
                                            std::span<const std::size_t> modes, std::span<const double> times,
                                            double fractional_alpha) {
  source.validate();
  require(fractional_alpha > 0.0 && fractional_alpha < 2.0 && std::abs(fractional_alpha - 1.0) > kLadderTolerance,
          ErrorCode::InvalidArgument, "fractional order must lie in (0, 2) away from 1");
  require(!times.empty() && times.front() > source.t0, ErrorCode::TimeInsideSupport,
          "contrast times must lie after the source support");
  HeatContrastReport rep;
  rep.fractional_alpha = fractional_alpha;
  rep.times.assign(times.begin(), times.end());
  rep.modes.resize(modes.size());
  parallel_for(modes.size(), [&](std::size_t j) {
    const std::size_t n = modes[j];
    require(n < system.mode_count(), ErrorCode::InvalidArgument, "mode index beyond the system");
    auto& m = rep.modes[j];
    m.mode = n;
    m.lambda = system.eigenvalues()[n];
    m.scaled_integral = scaled_heat_integral(m.lambda, source.mu, source.t0);
    for (double t : times) m.heat_tail.push_back(std::exp(-m.lambda * (t - source.t0)) * m.scaled_integral);
    m.fractional_tail = psi_tail(m.lambda, fractional_alpha, source, times).values;
    m.heat_fit = guarded_fit(fit_exponential, times, m.heat_tail);
    m.fractional_fit = guarded_fit(fit_power_law, times, m.fractional_tail);
  });
  return rep;
}

}  // namespace fractail
