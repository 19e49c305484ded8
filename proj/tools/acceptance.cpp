#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <span>

#include "fractail/asymptotics.hpp"
#include "fractail/error.hpp"
#include "fractail/forward_solver.hpp"
#include "fractail/inverse_source.hpp"
#include "fractail/mittag_leffler.hpp"
#include "fractail/oracle/mp_oracle.hpp"
#include "fractail/parallel.hpp"
#include "fractail/quadrature.hpp"

namespace fractail::acceptance {

namespace {

using std::numbers::pi;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

SourceSpec unit_source() { return {PiecewisePolynomial::constant(1.0, 1.0), 1.0, {}}; }

struct Outcome {
  bool ok;
  std::string detail;
};

Outcome mittag_leffler_accuracy() {
  const double irr = 1.0 / std::sqrt(2.0);
  const std::vector<double> alphas{0.3, 0.5, 0.7, irr, 1.5, 1.9};
  std::vector<std::pair<double, double>> pairs;
  for (double a : alphas) {
    for (double b : {a, a + 1.0, 1.0}) pairs.emplace_back(a, b);
  }
  std::vector<double> xs;
  for (int i = 0; i < 200; ++i) xs.push_back(-std::pow(10.0, -4.0 + 8.0 * i / 199.0));

  std::vector<double> worst(pairs.size(), 0.0);
  parallel_for(pairs.size(), [&](std::size_t p) {
    oracle::MittagLefflerOracle ref(pairs[p].first, pairs[p].second);
    const MLParams params{pairs[p].first, pairs[p].second};
    for (double x : xs) worst[p] = std::max(worst[p], rel_err(ml_eval(params, x), ref(x).value));
  });
  const auto it = std::max_element(worst.begin(), worst.end());
  const auto& wp = pairs[it - worst.begin()];

  double id = 0.0;
  for (double x = -20.0; x <= 0.0; x += 0.01) {
    id = std::max(id, rel_err(ml_eval({1.0, 1.0}, x), oracle::exp(x)));
    if (x < -1e-12) id = std::max(id, rel_err(ml_eval({1.0, 2.0}, x), -std::expm1(x) / -x));
  }
  // cos has zeros on [0, 10]: compared absolutely
  for (double z = 0.0; z <= 10.0; z += 0.01) {
    id = std::max(id, std::abs(ml_series({2.0, 1.0}, -z * z, 1e-16) - std::cos(z)));
  }
  return {*it <= 1e-10 && id <= 1e-10,
          fmt("max rel err %.2e at (alpha %.3g, beta %.3g) over 18 x 200 points, identities %.2e (tol 1e-10)", *it,
              wp.first, wp.second, id)};
}

Outcome closed_form_duhamel() {
  double worst_closed = 0.0, worst_route = 0.0;
  std::vector<double> inside;
  for (int i = 1; i <= 40; ++i) inside.push_back(std::pow(10.0, -3.0 + 3.0 * i / 40.0));
  const auto after = geometric_grid(1.0 + 1e-6, 100.0, 8);
  for (double alpha : {0.5, 0.7, 1.5}) {
    oracle::MittagLefflerOracle e1(alpha, 1.0);
    for (double lambda : {1.0, 10.0, 100.0}) {
      for (double t : inside) {
        const double want = (1.0 - e1(-lambda * std::pow(t, alpha)).value) / lambda;
        worst_closed = std::max(worst_closed, rel_err(duhamel_coefficient(lambda, alpha, unit_source(), t), want));
      }
      const auto tail = psi_tail(lambda, alpha, unit_source(), after);
      std::vector<double> route(after.size());
      parallel_for(after.size(), [&](std::size_t i) {
        route[i] = rel_err(tail.values[i], duhamel_coefficient(lambda, alpha, unit_source(), after[i]));
      });
      worst_route = std::max(worst_route, *std::max_element(route.begin(), route.end()));
    }
  }
  return {worst_closed <= 1e-8 && worst_route <= 1e-10,
          fmt("closed form %.2e (tol 1e-8), route consistency %.2e (tol 1e-10)", worst_closed, worst_route)};
}

Outcome decay_bound_uniformity() {
  const auto sys = laplacian_1d_dirichlet(1.0, 50, 1025);
  const auto ts = geometric_grid(2.0, 100.0, 8);
  bool ok = true;
  std::string detail;
  for (double alpha : {0.5, 1.5}) {
    std::vector<ModalTail> tails(50);
    parallel_for(50, [&](std::size_t n) { tails[n] = psi_tail(sys.eigenvalues()[n], alpha, unit_source(), ts); });
    const auto r = decay_bound_check(tails, unit_source());
    const double growth = r.running_max[49] / r.running_max[24] - 1.0;
    ok = ok && std::isfinite(r.constant) && growth < 0.01;
    detail += fmt("alpha %.2g: C = %.6g, running max growth n=25..50 %.2e; ", alpha, r.constant, growth);
  }
  detail += "(tol < 1%)";
  return {ok, detail};
}

Outcome expansion_orders() {
  const double irr = 1.0 / std::sqrt(2.0);
  const auto ts = geometric_grid(4.0, 1e4, 8);
  std::size_t checked = 0, violated = 0;
  double worst_ratio = 0.0;
  for (double alpha : {0.5, irr}) {
    for (double sigma : {alpha + 1.0, 2.0 * alpha + 1.0}) {
      for (int M : {0, 2, 4}) {
        for (double t : ts) {
          const auto ex = kernel_moment_expansion(sigma, unit_source(), M, t);
          const double err = std::abs(ex.value - oracle::power_kernel_integral(sigma, t, 1.0));
          ++checked;
          if (err > ex.remainder_bound) ++violated;
          worst_ratio = std::max(worst_ratio, err / ex.remainder_bound);
        }
      }
    }
  }
  bool ok = violated == 0;
  std::string detail = fmt("(a) %zu/%zu within bound, max err/bound %.3f; (b)", checked - violated, checked,
                           worst_ratio);
  const auto times = geometric_grid(1e2, 1e6, 16);
  const std::vector<double> lam{pi * pi}, a{1.0};
  for (double alpha : {0.5, irr}) {
    const auto tail = psi_tail(pi * pi, alpha, unit_source(), times);
    for (int K : {1, 2}) {
      const auto model = build_tail_model(a, lam, exponent_ladder(alpha, K + 1), moments(unit_source().mu, 1.0, 4), K, 4);
      const auto fit = model_error_order(times, tail.values, model);
      const bool in = !fit.degenerate && std::abs(fit.slope - fit.expected) <= 0.05 * std::abs(fit.expected);
      ok = ok && in;
      detail += fmt(" a=%.3g K=%d slope %.4f vs %.4f;", alpha, K, fit.slope, fit.expected);
    }
  }
  detail += " (tol 5%)";
  return {ok, detail};
}

Outcome inverse_round_trip() {
  const double alpha = 1.0 / std::sqrt(2.0);
  const std::vector<double> a{1.0, 0.5, 0.25}, lam{pi * pi, 4 * pi * pi, 9 * pi * pi};
  const auto ts = geometric_grid(1e2, 1e7, 16);
  const int K = 6, M = 6;
  const auto mv = moments(unit_source().mu, 1.0, M);
  const auto data = synthesize_tail(a, lam, alpha, unit_source(), ts);
  const auto ex = extract_A_sequence(data, exponent_ladder(alpha, K), mv, K, M);
  const auto rec = recover_modal_amplitudes(ex, lam, 3);
  double A1 = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) A1 += a[n] / (lam[n] * lam[n]);
  const double eA = rel_err(ex.A[0], A1), e1 = rel_err(rec.a[0], a[0]), e2 = rel_err(rec.a[1], a[1]);

  // heat tails of the same modes decay faster than any power
  TailData heat{ts, {}, 1e-15};
  for (double t : ts) {
    double g = 0.0;
    for (std::size_t n = 0; n < lam.size(); ++n) {
      g += a[n] * std::exp(-lam[n] * (t - 1.0)) * scaled_heat_integral(lam[n], unit_source().mu, 1.0);
    }
    heat.values.push_back(g);
  }
  const auto dex = extract_A_sequence(heat, exponent_ladder(alpha, K), mv, K, M);
  const auto drec = recover_modal_amplitudes(dex, lam, 3);
  bool floor_ok = true;
  for (int k = 0; k < K; ++k) floor_ok = floor_ok && dex.at_floor(k);
  for (std::size_t n = 0; n < 3; ++n) floor_ok = floor_ok && std::abs(drec.a[n]) <= drec.propagated_error[n];
  return {eA <= 1e-4 && e1 <= 1e-3 && e2 <= 1e-2 && floor_ok,
          fmt("A1 rel %.2e (1e-4), a1 rel %.2e (1e-3), a2 rel %.2e (1e-2), a3 rel %.2e; degenerate input %s the "
              "declared floor",
              eA, e1, e2, rel_err(rec.a[2], a[2]), floor_ok ? "at" : "ABOVE")};
}

Outcome scalar_recovery() {
  const auto ts = geometric_grid(1e2, 1e6, 16);
  TailData v{ts, {}, 0.0};
  const auto mu = PiecewisePolynomial::polynomial({1.0, 1.0}, 1.0);
  for (double t : ts) v.values.push_back(riemann_liouville_tail(0.5, mu, t));
  const auto r = scalar_moment_recovery(v, 0.5, 1.0, 4);
  const double e0 = rel_err(r.moments[0], 1.5), e1 = rel_err(r.moments[1], -5.0 / 6.0);

  const TailData c{ts, std::vector<double>(ts.size(), 0.7), 0.0};
  const auto rc = scalar_moment_recovery(c, 0.5, 1.0, 4);
  bool at_floor = true;
  for (std::size_t m = 0; m < rc.moments.size(); ++m) at_floor = at_floor && std::abs(rc.moments[m]) <= rc.noise_floor[m + 1];
  const double ea = rel_err(rc.a, 0.7);
  return {e0 <= 0.01 && e1 <= 0.01 && ea <= 1e-6 && at_floor,
          fmt("mu0 rel %.2e, mu1 rel %.2e (1%%); offset a rel %.2e (1e-6), moments %s floor", e0, e1, ea,
              at_floor ? "at" : "ABOVE")};
}

Outcome caputo_order() {
  auto grid = [](double h) { return uniform_grid(0.0, 2.0, static_cast<std::size_t>(std::llround(2.0 / h)) + 1); };
  const auto coarse = caputo_residual_check(pi * pi, 0.5, unit_source(), grid(1.0 / 512));
  const auto fine = caputo_residual_check(pi * pi, 0.5, unit_source(), grid(1.0 / 2048));
  const double order = std::log2(coarse.max_residual / fine.max_residual) / 2.0;
  return {order >= 0.8, fmt("residual %.3e (h=1/512), %.3e (h=1/2048), order %.3f (>= 0.8)", coarse.max_residual,
                            fine.max_residual, order)};
}

Outcome heat_contrast() {
  const auto sys = laplacian_1d_dirichlet(1.0, 4, 257);
  const auto ts = geometric_grid(3.0, 60.0, 16);
  const std::vector<std::size_t> modes{0};
  const double lam1 = sys.eigenvalues()[0];
  const auto gen = heat_contrast_experiment(sys, unit_source(), modes, ts);
  const auto& m = gen.modes[0];
  const double slope_err = std::abs(m.heat_fit.slope + lam1) / lam1;
  const SourceSpec engineered{vanishing_heat_source(lam1, 1.0), 1.0, {}};
  const auto eng = heat_contrast_experiment(sys, engineered, modes, ts);
  // heat tails are e^{-lambda (t - t0)} J
  const double g10 = std::exp(-lam1 * 9.0) * m.scaled_integral;
  const double e10 = std::exp(-lam1 * 9.0) * eng.modes[0].scaled_integral;
  const double orders = std::abs(e10) > 0.0 ? std::log10(std::abs(g10 / e10)) : INFINITY;
  return {m.heat_fit.r_squared > 0.999 && slope_err <= 0.01 && m.fractional_fit.r_squared > 0.999 && orders >= 6.0,
          fmt("heat R2 %.6f slope err %.2e (1%%); alpha 0.5 power-law R2 %.6f; engineered source %.1f orders lower "
              "at t=10 (>= 6)",
              m.heat_fit.r_squared, slope_err, m.fractional_fit.r_squared, orders)};
}

Outcome uniqueness() {
  const double alpha = 1.0 / std::sqrt(2.0);
  const auto sys = laplacian_1d_dirichlet(1.0, 16, 1025);
  const auto obs = ObservationSpec::interior(0.0, 1.0, [&](double x) { return sys.eigenfunction(0, x); });
  SpatialProfile phi1, phi2, zero;
  phi1.modal_coefficients = {1.0};
  phi2.modal_coefficients = {0.0, 1.0};
  const auto gap = uniqueness_experiment(phi1, zero, unit_source(), sys, obs, alpha, 1e6);
  const double e = std::abs(gap.gap_exponent / (alpha + 1.0) - 1.0);
  const auto same = uniqueness_experiment(phi1, phi1, unit_source(), sys, obs, alpha, 1e6);
  bool raised = false;
  try {
    uniqueness_experiment(phi2, zero, unit_source(), sys, obs, alpha, 1e6);
  } catch (const Error& err) {
    raised = err.code() == ErrorCode::IndistinguishableAtScale;
  }
  return {e <= 0.05 && same.gap_at_floor && raised,
          fmt("gap exponent %.4f vs %.4f (rel %.2e, 5%%); identical sources %s floor; orthogonal case %s", gap.gap_exponent,
              alpha + 1.0, e, same.gap_at_floor ? "at" : "ABOVE",
              raised ? "raised IndistinguishableAtScale" : "did not raise")};
}

struct Entry {
  const char* title;
  double budget;
  Outcome (*run)();
};

const std::map<int, Entry>& registry() {
  static const std::map<int, Entry> r{
      {1, {"Mittag-Leffler accuracy", 30.0, mittag_leffler_accuracy}},
      {2, {"closed-form Duhamel and route consistency", 60.0, closed_form_duhamel}},
      {3, {"uniform modal decay bound", 120.0, decay_bound_uniformity}},
      {4, {"expansion remainders and orders", 120.0, expansion_orders}},
      {5, {"inverse round trip", 180.0, inverse_round_trip}},
      {6, {"scalar moment recovery", 60.0, scalar_recovery}},
      {7, {"Caputo residual convergence", 120.0, caputo_order}},
      {8, {"heat versus fractional tails", 60.0, heat_contrast}},
      {9, {"uniqueness experiment", 120.0, uniqueness}},
  };
  return r;
}

}  // namespace

std::string CriterionResult::line() const {
  return fmt("criterion %d %s  %s  %s  [%.1f s / budget %.0f s]", id, passed() ? "PASS" : "FAIL", title.c_str(),
             detail.c_str(), seconds, budget_seconds);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"mlf", "forward", "asymptotic", "inverse", "scalar", "contrast", "all"};
  return names;
}

std::optional<std::vector<int>> suite_criteria(std::string_view suite) {
  if (suite == "mlf") return std::vector<int>{1};
  if (suite == "forward") return std::vector<int>{2, 3, 7};
  if (suite == "asymptotic") return std::vector<int>{4};
  if (suite == "inverse") return std::vector<int>{5, 9};
  if (suite == "scalar") return std::vector<int>{6};
  if (suite == "contrast") return std::vector<int>{8};
  if (suite == "all") return std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9};
  return std::nullopt;
}

CriterionResult run_criterion(int id) {
  const auto it = registry().find(id);
  require(it != registry().end(), ErrorCode::InvalidArgument, "no such acceptance criterion");
  CriterionResult r;
  r.id = id;
  r.title = it->second.title;
  r.budget_seconds = it->second.budget;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto out = it->second.run();
    r.metric_passed = out.ok;
    r.detail = out.detail;
  } catch (const std::exception& e) {
    r.metric_passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace fractail::acceptance
