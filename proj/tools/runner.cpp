#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "fractail/asymptotics.hpp"
#include "fractail/error.hpp"
#include "fractail/forward_solver.hpp"
#include "fractail/inverse_source.hpp"
#include "fractail/mittag_leffler.hpp"
#include "fractail/oracle/mp_oracle.hpp"
#include "fractail/parallel.hpp"
#include "fractail/quadrature.hpp"
#include "output.hpp"

namespace fractail::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

// Everything an experiment produces before anything touches the disk.
struct Product {
  std::vector<std::string> lines;
  std::vector<CsvTable> tables;
  std::vector<Check> checks;
  std::vector<std::function<void(const std::string& dir)>> plots;

  void line(std::string s) { lines.push_back(std::move(s)); }
  void check(std::string name, double value, double tol, bool ok) { checks.push_back({std::move(name), value, tol, ok}); }
  // value must not exceed tol
  void check_max(std::string name, double value, double tol) { check(std::move(name), value, tol, value <= tol); }
};

EigenSystem build_system(const OperatorSpec& op) {
  if (op.kind == OperatorSpec::Kind::Laplacian) return laplacian_1d_dirichlet(op.length, op.modes, op.grid_points);
  SturmLiouvilleProblem p;
  p.a = [f = op.a](double x) { return f(x); };
  p.c = [f = op.c](double x) { return f(x); };
  p.length = op.length;
  return discretize_sturm_liouville(p, op.interior_points, op.modes);
}

PiecewisePolynomial build_mu(const MuSpec& mu, double t0) {
  switch (mu.kind) {
    case MuSpec::Kind::Constant: return PiecewisePolynomial::constant(mu.constant, t0);
    case MuSpec::Kind::Polynomial: return PiecewisePolynomial::polynomial(mu.polynomial, t0);
    case MuSpec::Kind::Segments: {
      std::vector<PolySegment> segs;
      for (const auto& s : mu.segments) segs.push_back({s.begin, s.end, s.coeffs});
      return PiecewisePolynomial(std::move(segs));
    }
    case MuSpec::Kind::Samples: return PiecewisePolynomial::from_samples(mu.sample_t, mu.sample_values);
  }
  return {};
}

SpatialProfile build_profile(const ProfileSpec& p, const EigenSystem& sys) {
  if (!p.function) return {p.modal, 0.0};
  std::vector<double> samples;
  for (double x : sys.grid()) samples.push_back((*p.function)(x));
  return project_all(samples, sys);
}

ObservationSpec build_observation(const ObservationCfg& o, const EigenSystem& sys) {
  if (o.kind == ObservationCfg::Kind::Flux) return ObservationSpec::flux(o.left, o.right);
  if (o.test_mode) {
    const std::size_t n = *o.test_mode - 1;
    require(n < sys.mode_count(), ErrorCode::ConfigError, "observation.test_function.mode: beyond operator.modes");
    return ObservationSpec::interior(o.begin, o.end, [&sys, n](double x) { return sys.eigenfunction(n, x); });
  }
  return ObservationSpec::interior(o.begin, o.end, [f = *o.test_function](double x) { return f(x); });
}

std::vector<double> resolve_pairings(const Scenario& s, const EigenSystem& sys, const SourceSpec& src) {
  if (!s.pairings.empty()) return s.pairings;
  return pairing_coefficients(sys, src.profile, build_observation(*s.observation, sys));
}

void add_noise(std::vector<double>& v, const NoiseSpec& noise) {
  if (noise.level == 0.0) return;
  std::mt19937_64 rng(noise.rng_seed);
  std::uniform_real_distribution<double> u(-noise.level, noise.level);
  for (double& x : v) x += u(rng);
}

std::vector<double> times_of(const Scenario& s) {
  return geometric_grid(s.grid->t_min, s.grid->t_max, s.grid->points_per_decade);
}

// -- experiments --------------------------------------------------------------

void run_forward(const Scenario& s, const SourceSpec& src, const EigenSystem& sys, Product& out) {
  const auto ts = times_of(s);
  const std::size_t n_modes = s.forward_modes ? s.forward_modes : sys.mode_count();
  std::vector<ModalTail> tails(n_modes);
  std::vector<double> route(n_modes);
  parallel_for(n_modes, [&](std::size_t n) {
    const double lam = sys.eigenvalues()[n];
    tails[n] = psi_tail(lam, s.alpha, src, ts);
    route[n] = rel_err(tails[n].values.front(), duhamel_coefficient(lam, s.alpha, src, ts.front()));
  });
  CsvTable psi("psi", {"mode", "lambda", "t", "psi"});
  for (std::size_t n = 0; n < n_modes; ++n) {
    for (std::size_t i = 0; i < ts.size(); ++i) {
      psi.row({std::to_string(n + 1), num(tails[n].lambda), num(ts[i]), num(tails[n].values[i])});
    }
  }
  out.tables.push_back(std::move(psi));

  if (src.mu.l1_norm() > 0.0) {
    const auto bound = decay_bound_check(tails, src);
    out.line(fmt("decay bound constant C = max lambda_n |psi_n(t)| / ||mu||_1 = %.10g (||mu||_1 = %.10g)",
                 bound.constant, bound.mu_l1));
    CsvTable b("decay_bound", {"mode", "lambda_max_abs_psi_over_l1", "running_max"});
    for (std::size_t n = 0; n < n_modes; ++n) b.row({std::to_string(n + 1), num(bound.per_mode[n]), num(bound.running_max[n])});
    out.tables.push_back(std::move(b));
    if (n_modes >= 2) {
      const std::size_t half = n_modes / 2;
      out.line(fmt("running max growth from mode %zu to %zu: %.3e", half, n_modes,
                   bound.running_max.back() / bound.running_max[half - 1] - 1.0));
    }
  } else {
    out.line("source is identically zero: decay bound not evaluated");
  }
  const double worst = *std::max_element(route.begin(), route.end());
  out.line(fmt("psi_tail against duhamel_coefficient at t = %.6g: max relative difference %.3e", ts.front(), worst));
  out.check_max("route_consistency", worst, s.tolerance("route_consistency"));

  std::vector<double> g;
  if (s.profile && s.observation) {
    const auto a = pairing_coefficients(sys, src.profile, build_observation(*s.observation, sys));
    CsvTable obs("observation", {"t", "g"});
    for (std::size_t i = 0; i < ts.size(); ++i) {
      double v = 0.0;
      for (std::size_t n = 0; n < n_modes && n < a.size(); ++n) v += a[n] * tails[n].values[i];
      g.push_back(v);
      obs.row({num(ts[i]), num(v)});
    }
    out.tables.push_back(std::move(obs));
  }
  out.plots.push_back([=](const std::string& dir) {
    std::vector<Series> series;
    for (std::size_t n = 0; n < std::min<std::size_t>(n_modes, 6); ++n) {
      series.push_back({fmt("psi_%zu", n + 1), ts, tails[n].values});
    }
    if (!g.empty()) series.push_back({"g", ts, g});
    write_loglog_svg(dir + "/psi.svg", "modal tails |psi_n(t)|", "t", "|psi|", series);
  });
}

void run_tail(const Scenario& s, const SourceSpec& src, const EigenSystem& sys, Product& out) {
  const auto ts = times_of(s);
  const auto a = resolve_pairings(s, sys, src);
  const auto data = synthesize_tail(a, sys.eigenvalues(), s.alpha, src, ts);
  const auto model = build_tail_model(a, sys, exponent_ladder(s.alpha, s.K + 1), moments(src.mu, src.t0, s.M), s.K, s.M);
  out.line(fmt("ladder l_k:%s", [&] {
    std::string r;
    for (int l : model.ladder.ells) r += " " + std::to_string(l);
    return r;
  }().c_str()));
  for (int k = 0; k < s.K; ++k) {
    out.line(fmt("A_%d = %.10e (omitted-mode bound %.3e), sigma_%d = %.6f", k + 1, model.A[k], model.A_tail[k], k + 1,
                 model.ladder.sigma(k)));
  }
  const auto fit = model_error_order(ts, data.values, model);
  CsvTable t("tail_model", {"t", "observed", "model", "gap"});
  for (std::size_t i = 0; i < ts.size(); ++i) t.row({num(ts[i]), num(data.values[i]), num(model(ts[i])), num(fit.gap[i])});
  out.tables.push_back(std::move(t));
  if (fit.degenerate) {
    out.line(fmt("model error at the rounding floor on %zu of the fitted points: no slope", fit.fitted_points));
    out.check("model_error_slope", std::nan(""), s.tolerance("slope_rel"), false);
  } else {
    const double rel = std::abs(fit.slope - fit.expected) / std::abs(fit.expected);
    out.line(fmt("model error slope %.6f +- %.2e (R^2 %.6f) against -remainder_order %.6f, T* = %.4g, %zu points",
                 fit.slope, fit.slope_stderr, fit.r_squared, fit.expected, fit.t_star, fit.fitted_points));
    out.check_max("model_error_slope_rel", rel, s.tolerance("slope_rel"));
  }
  out.plots.push_back([=, values = data.values, gap = fit.gap](const std::string& dir) {
    write_loglog_svg(dir + "/tail.svg", "tail and model error", "t", "|value|",
                     {{"observed", ts, values}, {"observed - model", ts, gap}});
  });
}

void run_extract(const Scenario& s, const SourceSpec& src, const EigenSystem& sys, Product& out) {
  const auto ts = times_of(s);
  const auto a = resolve_pairings(s, sys, src);
  auto data = synthesize_tail(a, sys.eigenvalues(), s.alpha, src, ts);
  add_noise(data.values, s.noise);
  data.noise_level = s.noise.level;
  const auto mv = moments(src.mu, src.t0, s.M);
  const auto ex = extract_A_sequence(data, exponent_ladder(s.alpha, s.K), mv, s.K, s.M);
  const std::size_t n_rec = s.recover_modes ? s.recover_modes : std::min<std::size_t>(s.K, a.size());
  const auto rec = recover_modal_amplitudes(ex, sys.eigenvalues(), n_rec);

  out.line(fmt("m1 = %d, condition number %.3e, declared noise %.3e (floors never below 16 eps |g|)", ex.m1,
               ex.condition_number, data.noise_level));
  for (const auto& c : ex.collisions) {
    out.line(fmt("exponent collision: (k=%d, m=%d) and (k=%d, m=%d) share t^-%.6f", c.k1 + 1, c.m1, c.k2 + 1, c.m2,
                 c.exponent));
  }
  CsvTable coef("coefficients", {"quantity", "index", "estimate", "residual", "noise_floor", "truth"});
  std::vector<double> A_true;
  for (int k = 0; k < s.K; ++k) {
    double sum = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) sum += a[n] * std::pow(sys.eigenvalues()[n], -ex.ladder.ells[k]);
    A_true.push_back(sum);
    coef.row({"A", std::to_string(k + 1), num(ex.A[k]), num(ex.residuals[k]), num(ex.noise_floor[k]), num(sum)});
    out.line(fmt("A_%d = %.10e +- %.2e (floor %.2e%s), sequential %.10e +- %.2e, truth %.10e", k + 1, ex.A[k],
                 ex.residuals[k], ex.noise_floor[k], ex.at_floor(k) ? ", at floor" : "", ex.A_sequential[k],
                 ex.residuals_sequential[k], sum));
  }
  for (int k = 0; k < s.K; ++k) {
    coef.row({"A_sequential", std::to_string(k + 1), num(ex.A_sequential[k]), num(ex.residuals_sequential[k]),
              num(ex.noise_floor[k]), num(A_true[k])});
  }
  std::vector<double> truth_a, est_a;
  double worst_a = 0.0;
  for (std::size_t n = 0; n < n_rec; ++n) {
    const double truth = n < a.size() ? a[n] : 0.0;
    truth_a.push_back(truth);
    est_a.push_back(rec.a[n]);
    coef.row({"a", std::to_string(n + 1), num(rec.a[n]), num(rec.propagated_error[n]), num(0.0), num(truth)});
    out.line(fmt("a_%zu = %.10g +- %.2e (deflation cross-check %.10g +- %.2e over the recovered modes), truth %.10g", n + 1, rec.a[n],
                 rec.propagated_error[n], rec.a_deflation[n], rec.deflation_bound[n], truth));
    worst_a = std::max(worst_a, truth != 0.0 ? rel_err(rec.a[n], truth)
                                             : (std::abs(rec.a[n]) <= rec.propagated_error[n] ? 0.0 : INFINITY));
  }
  for (std::size_t n = 0; n < n_rec; ++n) {
    coef.row({"a_deflation", std::to_string(n + 1), num(rec.a_deflation[n]), num(rec.deflation_bound[n]), num(0.0),
              num(truth_a[n])});
  }
  out.tables.push_back(std::move(coef));
  out.line(fmt("modal recovery condition number %.3e", rec.condition_number));
  if (A_true[0] != 0.0) {
    out.check_max("A1_rel", rel_err(ex.A[0], A_true[0]), s.tolerance("A1_rel"));
  } else {
    out.check("A1_at_floor", std::abs(ex.A[0]), ex.noise_floor[0], ex.at_floor(0));
  }
  out.check_max("a_rel_max", worst_a, s.tolerance("a_rel"));

  CsvTable d("data", {"t", "g"});
  for (std::size_t i = 0; i < ts.size(); ++i) d.row({num(ts[i]), num(data.values[i])});
  out.tables.push_back(std::move(d));
  out.plots.push_back([=, values = data.values](const std::string& dir) {
    write_loglog_svg(dir + "/data.svg", "observed tail g(t)", "t", "|g|", {{"g", ts, values}});
    std::vector<std::string> cats;
    for (std::size_t n = 0; n < truth_a.size(); ++n) cats.push_back("a_" + std::to_string(n + 1));
    write_bar_svg(dir + "/recovery.svg", "modal amplitudes", cats, {{"truth", {}, truth_a}, {"recovered", {}, est_a}});
  });
}

void run_scalar(const Scenario& s, const SourceSpec& src, Product& out) {
  const auto ts = times_of(s);
  TailData v{ts, std::vector<double>(ts.size()), s.noise.level};
  parallel_for(ts.size(), [&](std::size_t i) { v.values[i] = s.offset + riemann_liouville_tail(s.alpha, src.mu, ts[i]); });
  add_noise(v.values, s.noise);
  const auto r = scalar_moment_recovery(v, s.alpha, src.t0, s.M);
  const auto truth = moments(src.mu, src.t0, s.M);

  CsvTable coef("coefficients", {"quantity", "index", "estimate", "residual", "noise_floor", "truth"});
  coef.row({"a", "0", num(r.a), num(r.a_error), num(r.noise_floor[0]), num(s.offset)});
  out.line(fmt("a = %.12g +- %.2e (floor %.2e), truth %.12g", r.a, r.a_error, r.noise_floor[0], s.offset));
  for (int m = 0; m <= s.M; ++m) {
    coef.row({"mu", std::to_string(m), num(r.moments[m]), num(r.moment_errors[m]), num(r.noise_floor[m + 1]),
              num(truth.moments[m])});
    out.line(fmt("mu_%d = %.12g +- %.2e (floor %.2e), truth %.12g", m, r.moments[m], r.moment_errors[m],
                 r.noise_floor[m + 1], truth.moments[m]));
  }
  out.tables.push_back(std::move(coef));
  out.line(fmt("condition number %.3e; zero verdict: %s", r.condition_number, r.zero_verdict ? "a = 0 and mu = 0" : "no"));
  if (s.offset != 0.0) {
    out.check_max("offset_rel", rel_err(r.a, s.offset), s.tolerance("offset_rel"));
  } else {
    out.check("offset_at_floor", std::abs(r.a), std::max(r.noise_floor[0], r.a_error), std::abs(r.a) <= std::max(r.noise_floor[0], r.a_error));
  }
  for (int m = 0; m <= std::min(s.M, 1); ++m) {
    const double want = truth.moments[m];
    if (std::abs(want) > 1e-12 * truth.l1_norm) {
      out.check_max(fmt("mu%d_rel", m), rel_err(r.moments[m], want), s.tolerance("moment_rel"));
    } else {
      // a vanishing moment is recovered when it stays within its floor or standard error
      const double band = std::max(r.noise_floor[m + 1], r.moment_errors[m]);
      out.check(fmt("mu%d_at_floor", m), std::abs(r.moments[m]), band, std::abs(r.moments[m]) <= band);
    }
  }
  CsvTable d("data", {"t", "v"});
  for (std::size_t i = 0; i < ts.size(); ++i) d.row({num(ts[i]), num(v.values[i])});
  out.tables.push_back(std::move(d));
  out.plots.push_back([=, values = v.values](const std::string& dir) {
    std::vector<double> dev;
    for (double x : values) dev.push_back(x - r.a);
    write_loglog_svg(dir + "/scalar.svg", "v(t) - a", "t", "|v - a|", {{"v - a", ts, dev}});
  });
}

void run_uniqueness(const Scenario& s, const SourceSpec& src, const EigenSystem& sys, Product& out) {
  const auto f1 = build_profile(s.f1, sys), f2 = build_profile(s.f2, sys);
  const auto obs = build_observation(*s.observation, sys);
  UniquenessOptions opt;
  opt.t_min = s.grid->t_min;
  opt.points_per_decade = s.grid->points_per_decade;
  opt.K = s.K;
  opt.M = s.M;
  opt.recover_modes = s.recover_modes;
  UniquenessReport rep;
  try {
    rep = uniqueness_experiment(f1, f2, src, sys, obs, s.alpha, s.grid->t_max, opt);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::IndistinguishableAtScale) throw;
    out.line("verdict: indistinguishable at this scale (every pairing of f1 - f2 with the test function vanishes)");
    out.line(std::string("detail: ") + e.what());
    return;
  }
  const bool identical = rep.verdict == UniquenessReport::Verdict::IdenticalSources;
  out.line(std::string("verdict: ") + (identical ? "identical sources" : "power-law gap"));
  CsvTable t("gap", {"t", "g1", "g2", "gap"});
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    t.row({num(rep.times[i]), num(rep.g1[i]), num(rep.g2[i]), num(rep.gap[i])});
  }
  out.tables.push_back(std::move(t));
  CsvTable c("pairings", {"mode", "pairing_1", "pairing_2", "pairing_gap", "recovered"});
  for (std::size_t n = 0; n < rep.pairing_gap.size(); ++n) {
    c.row({std::to_string(n + 1), num(rep.pairings_1[n]), num(rep.pairings_2[n]), num(rep.pairing_gap[n]),
           n < rep.recovered.size() ? num(rep.recovered[n]) : "nan"});
  }
  out.tables.push_back(std::move(c));
  out.line(fmt("decay probe: largest bounded order %d, fitted exponent %.6f", rep.probe.largest_bounded,
               rep.probe.fitted_exponent));
  if (identical) {
    out.line(fmt("gap at floor: %s", rep.gap_at_floor ? "yes" : "no"));
    out.check("gap_at_floor", rep.gap_at_floor ? 0.0 : 1.0, 0.0, rep.gap_at_floor);
    return;
  }
  const double rel = std::abs(rep.gap_exponent / rep.expected_exponent - 1.0);
  out.line(fmt("gap exponent %.6f (R^2 %.6f) against expected %.6f; recovery error %.3e", rep.gap_exponent,
               rep.gap_r_squared, rep.expected_exponent, rep.recovery_error));
  out.check_max("gap_exponent_rel", rel, s.tolerance("exponent_rel"));
  out.plots.push_back([=](const std::string& dir) {
    write_loglog_svg(dir + "/gap.svg", "observation gap |g1 - g2|", "t", "|gap|",
                     {{"g1", rep.times, rep.g1}, {"g2", rep.times, rep.g2}, {"g1 - g2", rep.times, rep.gap}});
  });
}

void run_heat_contrast(const Scenario& s, const SourceSpec& src, const EigenSystem& sys, Product& out) {
  const auto ts = times_of(s);
  std::vector<std::size_t> modes;
  for (std::size_t m : s.contrast_modes) modes.push_back(m - 1);
  const auto gen = heat_contrast_experiment(sys, src, modes, ts, s.fractional_alpha);
  std::vector<std::pair<std::string, HeatContrastReport>> reports{{"given", gen}};
  if (s.engineered) {
    const SourceSpec eng{vanishing_heat_source(sys.eigenvalues()[modes.front()], src.t0), src.t0, src.profile};
    reports.emplace_back("engineered", heat_contrast_experiment(sys, eng, modes, ts, s.fractional_alpha));
  }
  CsvTable t("contrast", {"source", "mode", "lambda", "t", "heat", "fractional"});
  for (const auto& [name, rep] : reports) {
    for (const auto& m : rep.modes) {
      for (std::size_t i = 0; i < ts.size(); ++i) {
        t.row({name, std::to_string(m.mode + 1), num(m.lambda), num(ts[i]), num(m.heat_tail[i]), num(m.fractional_tail[i])});
      }
      out.line(fmt("[%s] mode %zu lambda %.6g: heat integral %.6e; heat log-linear slope %.8g +- %.2e (R^2 %.8f); "
                   "alpha %.3g log-log slope %.6f +- %.2e (R^2 %.6f)",
                   name.c_str(), m.mode + 1, m.lambda, m.scaled_integral, m.heat_fit.slope, m.heat_fit.slope_stderr,
                   m.heat_fit.r_squared, s.fractional_alpha, m.fractional_fit.slope, m.fractional_fit.slope_stderr,
                   m.fractional_fit.r_squared));
    }
  }
  out.tables.push_back(std::move(t));
  const auto& m = gen.modes.front();
  const double r2 = s.tolerance("r_squared");
  out.check("heat_r_squared", m.heat_fit.r_squared, r2, m.heat_fit.r_squared > r2);
  out.check_max("heat_slope_rel", std::abs(m.heat_fit.slope + m.lambda) / m.lambda, s.tolerance("slope_rel"));
  out.check("fractional_r_squared", m.fractional_fit.r_squared, r2, m.fractional_fit.r_squared > r2);
  if (s.engineered) {
    const double e = reports[1].second.modes.front().scaled_integral;
    const double orders = e != 0.0 ? std::log10(std::abs(m.scaled_integral / e)) : INFINITY;
    out.line(fmt("engineered source: heat tail of mode %zu is %.2f orders below the given source at every t",
                 m.mode + 1, orders));
    out.check("engineered_orders", orders, s.tolerance("engineered_orders"), orders >= s.tolerance("engineered_orders"));
  }
  out.plots.push_back([=](const std::string& dir) {
    std::vector<Series> series;
    for (const auto& [name, rep] : reports) {
      for (const auto& md : rep.modes) {
        series.push_back({fmt("%s heat %zu", name.c_str(), md.mode + 1), ts, md.heat_tail});
        series.push_back({fmt("%s frac %zu", name.c_str(), md.mode + 1), ts, md.fractional_tail});
      }
    }
    write_loglog_svg(dir + "/contrast.svg", "heat against fractional tails", "t", "|psi|", series);
  });
}

void run_mlf_table(const Scenario& s, Product& out) {
  const auto etas = geometric_grid(s.eta.t_min, s.eta.t_max, s.eta.points_per_decade);
  oracle::MittagLefflerOracle ref(s.alpha, s.beta);
  const MLParams params{s.alpha, s.beta};
  CsvTable t("mlf", {"eta", "value", "oracle", "rel_error"});
  std::vector<double> vals, errs;
  double worst = 0.0;
  for (double eta : etas) {
    const double v = ml_eval(params, -eta);
    const double o = ref(-eta).value;
    const double e = rel_err(v, o);
    worst = std::max(worst, e);
    vals.push_back(v);
    errs.push_back(e);
    t.row({num(eta), num(v), num(o), num(e)});
  }
  out.tables.push_back(std::move(t));
  out.line(fmt("E_{%.6g,%.6g}(-eta) on %zu points in [%.3g, %.3g]: max relative error %.3e against the 50-digit oracle",
               s.alpha, s.beta, etas.size(), s.eta.t_min, s.eta.t_max, worst));
  out.check_max("max_rel_error", worst, s.tolerance("max_rel_error"));
  out.plots.push_back([=](const std::string& dir) {
    write_loglog_svg(dir + "/mlf.svg", "Mittag-Leffler values and error", "eta", "magnitude",
                     {{"|E(-eta)|", etas, vals}, {"relative error", etas, errs}});
  });
}

}  // namespace

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

RunReport run_scenario(const Scenario& s, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Product out;
  try {
    if (s.experiment == Experiment::MlfTable) {
      run_mlf_table(s, out);
    } else {
      SourceSpec src{build_mu(*s.mu, s.t0), s.t0, {}};
      if (s.experiment == Experiment::Scalar) {
        run_scalar(s, src, out);
      } else {
        const auto sys = build_system(*s.op);
        if (s.profile) src.profile = build_profile(*s.profile, sys);
        switch (s.experiment) {
          case Experiment::Forward: run_forward(s, src, sys, out); break;
          case Experiment::Tail: run_tail(s, src, sys, out); break;
          case Experiment::Extract: run_extract(s, src, sys, out); break;
          case Experiment::Uniqueness: run_uniqueness(s, src, sys, out); break;
          case Experiment::HeatContrast: run_heat_contrast(s, src, sys, out); break;
          default: break;
        }
      }
    }
  } catch (const Error& e) {
    throw Error(e.code(), "scenario " + s.path + " (" + to_string(s.experiment) + "): " + e.what());
  }
  const double compute = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunReport report;
  report.checks = out.checks;
  fs::create_directories(options.out_dir);
  for (const auto& t : out.tables) {
    const std::string path = options.out_dir + "/" + t.name() + ".csv";
    t.write(path);
    report.files.push_back(path);
  }
  if (options.plots) {
    for (const auto& plot : out.plots) plot(options.out_dir);
    for (const auto& entry : fs::directory_iterator(options.out_dir)) {
      if (entry.path().extension() == ".svg") report.files.push_back(entry.path().string());
    }
    std::sort(report.files.begin(), report.files.end());
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream r;
  r << "fractail run report\n";
  r << "scenario: " << s.path << "\n";
  r << "digest: fnv1a64:" << s.digest << "\n";
  r << "experiment: " << to_string(s.experiment) << "\n";
  r << "alpha: " << num(s.alpha) << "\n\n";
  for (const auto& l : out.lines) r << l << "\n";
  r << "\nchecks:\n";
  if (out.checks.empty()) r << "  (none for this outcome)\n";
  for (const auto& c : out.checks) {
    r << "  " << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << num(c.value) << " (tolerance " << num(c.tolerance)
      << ")\n";
  }
  r << "\nfiles:\n";
  for (const auto& f : report.files) r << "  " << f << "\n";
  r << "\ntimings: compute " << fmt("%.3f", compute) << " s, total " << fmt("%.3f", total) << " s, threads "
    << worker_count() << "\n";
  r << "result: " << (report.passed() ? "PASS" : "FAIL") << "\n";
  report.text = r.str();
  const std::string report_path = options.out_dir + "/report.txt";
  std::ofstream(report_path, std::ios::binary) << report.text;
  report.files.push_back(report_path);
  return report;
}

}  // namespace fractail::cli
