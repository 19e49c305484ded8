#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fractail/error.hpp"
#include "fractail/inverse_source.hpp"
#include "fractail/quadrature.hpp"

using namespace fractail;
using std::numbers::pi;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

const double kIrrational = 1.0 / std::sqrt(2.0);

SourceSpec unit_source(double t0 = 1.0) { return {PiecewisePolynomial::constant(1.0, t0), t0, {}}; }

std::vector<double> dirichlet_eigenvalues(int n) {
  std::vector<double> lam;
  for (int k = 1; k <= n; ++k) lam.push_back(k * k * pi * pi);
  return lam;
}

double direct_A(std::span<const double> a, std::span<const double> lam, int l) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * std::pow(lam[n], -l);
  return s;
}

TailData sample_model(const TailModel& model, std::span<const double> ts) {
  TailData d{{ts.begin(), ts.end()}, {}, 0.0};
  for (double t : ts) d.values.push_back(model(t));
  return d;
}

}  // namespace

TEST_CASE("extraction from the model generator") {
  const std::vector<double> a{1.0, 0.5}, lam = dirichlet_eigenvalues(2);
  const auto mv = moments(unit_source().mu, 1.0, 4);
  const auto model = build_tail_model(a, lam, exponent_ladder(kIrrational, 3), mv, 2, 4);
  const auto ts = geometric_grid(1e2, 1e6, 16);
  const auto ex = extract_A_sequence(sample_model(model, ts), exponent_ladder(kIrrational, 2), mv, 2, 4);
  CHECK(std::abs(ex.A[0] / model.A[0] - 1.0) < 1e-6);
  CHECK(std::abs(ex.A[1] / model.A[1] - 1.0) < 1e-3);
  CHECK(ex.collisions.empty());
  CHECK(ex.m1 == 0);
}

TEST_CASE("extraction from true tails") {
  const double alpha = kIrrational;
  const auto lam = dirichlet_eigenvalues(5);
  std::vector<double> a;
  for (int n = 1; n <= 5; ++n) a.push_back(1.0 / (n * n));
  const auto ts = geometric_grid(1e2, 1e6, 16);
  const auto data = synthesize_tail(a, lam, alpha, unit_source(), ts);
  const auto mv = moments(unit_source().mu, 1.0, 4);
  const auto ex = extract_A_sequence(data, exponent_ladder(alpha, 4), mv, 4, 4);
  const double A1 = direct_A(a, lam, 2);
  CHECK(A1 == doctest::Approx(1.0 / std::pow(pi, 4) * (1.0 + 1.0 / 64 + 1.0 / 729 + 1.0 / 4096 + 1.0 / 15625)));
  CHECK(std::abs(ex.A[0] / A1 - 1.0) <= 1e-3);

  SUBCASE("sequential and joint agree on A_1") {
    const double tol = 10.0 * std::max(ex.residuals[0], ex.residuals_sequential[0]);
    CHECK(std::abs(ex.A_sequential[0] - ex.A[0]) <= tol);
  }
  SUBCASE("scaling equivariance") {
    auto scaled = data;
    for (double& v : scaled.values) v *= 3.0;
    const auto ex3 = extract_A_sequence(scaled, exponent_ladder(alpha, 4), mv, 4, 4);
    for (int k = 0; k < 4; ++k) CHECK(ex3.A[k] == doctest::Approx(3.0 * ex.A[k]).epsilon(1e-12));
    const auto r1 = recover_modal_amplitudes(ex, lam, 2);
    const auto r3 = recover_modal_amplitudes(ex3, lam, 2);
    for (int n = 0; n < 2; ++n) CHECK(r3.a[n] == doctest::Approx(3.0 * r1.a[n]).epsilon(1e-10));
  }
}

TEST_CASE("extraction is stable under extending the window") {
  const double alpha = kIrrational;
  const auto lam = dirichlet_eigenvalues(3);
  const std::vector<double> a{1.0, 0.5, 0.25};
  const auto mv = moments(unit_source().mu, 1.0, 6);
  const auto short_ts = geometric_grid(1e2, 1e5, 16);
  const auto long_ts = geometric_grid(1e2, 1e7, 16);
  const auto e5 = extract_A_sequence(synthesize_tail(a, lam, alpha, unit_source(), short_ts),
                                     exponent_ladder(alpha, 3), mv, 3, 6);
  const auto e7 = extract_A_sequence(synthesize_tail(a, lam, alpha, unit_source(), long_ts),
                                     exponent_ladder(alpha, 3), mv, 3, 6);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(e7.A[k] / e5.A[k] - 1.0) <= 1e-3);
}

TEST_CASE("zero and degenerate data") {
  const auto ts = geometric_grid(1e2, 1e6, 16);
  const auto mv = moments(unit_source().mu, 1.0, 4);
  SUBCASE("zero data") {
    const TailData zero{ts, std::vector<double>(ts.size(), 0.0), 0.0};
    const auto ex = extract_A_sequence(zero, exponent_ladder(kIrrational, 3), mv, 3, 4);
    for (int k = 0; k < 3; ++k) CHECK(ex.at_floor(k));
  }
  SUBCASE("super-polynomial decay") {
    // heat tails of the same modes: e^{-lambda (t - t0)} J
    const auto lam = dirichlet_eigenvalues(3);
    TailData heat{ts, {}, 1e-15};
    for (double t : ts) {
      double g = 0.0;
      for (std::size_t n = 0; n < lam.size(); ++n) {
        g += std::exp(-lam[n] * (t - 1.0)) * scaled_heat_integral(lam[n], unit_source().mu, 1.0);
      }
      heat.values.push_back(g);
    }
    const auto ex = extract_A_sequence(heat, exponent_ladder(kIrrational, 3), mv, 3, 4);
    for (int k = 0; k < 3; ++k) CHECK(ex.at_floor(k));
    const auto probe = probe_decay(ts, heat.values);
    CHECK(probe.largest_bounded == 8);
  }
  SUBCASE("exponential cutoff on a power law") {
    TailData cut{ts, {}, 1e-15};
    for (double t : ts) cut.values.push_back(std::pow(t, -1.7) * std::exp(-t / 2.0));
    const auto ex = extract_A_sequence(cut, exponent_ladder(kIrrational, 3), mv, 3, 4);
    for (int k = 0; k < 3; ++k) CHECK(ex.at_floor(k));
  }
}

TEST_CASE("noisy data stays within the propagated floor") {
  const double alpha = kIrrational;
  const std::vector<double> a{1.0, 0.5}, lam = dirichlet_eigenvalues(2);
  const auto mv = moments(unit_source().mu, 1.0, 4);
  const auto model = build_tail_model(a, lam, exponent_ladder(alpha, 3), mv, 2, 4);
  const auto ts = geometric_grid(1e2, 1e6, 16);
  const auto clean = sample_model(model, ts);
  std::mt19937 rng(11);
  for (double eps : {1e-16, 1e-14, 1e-12}) {
    std::uniform_real_distribution<double> u(-eps, eps);
    auto noisy = clean;
    noisy.noise_level = eps;
    for (double& v : noisy.values) v += u(rng);
    const auto ex0 = extract_A_sequence(clean, exponent_ladder(alpha, 2), mv, 2, 4);
    const auto ex = extract_A_sequence(noisy, exponent_ladder(alpha, 2), mv, 2, 4);
    for (int k = 0; k < 2; ++k) CHECK(std::abs(ex.A[k] - ex0.A[k]) <= ex.noise_floor[k]);
  }
}

TEST_CASE("extraction errors and collisions") {
  const auto ts = geometric_grid(1e2, 1e6, 16);
  const TailData zero{ts, std::vector<double>(ts.size(), 0.0), 0.0};
  const auto mv0 = moments(PiecewisePolynomial::constant(0.0, 1.0), 1.0, 3);
  CHECK(code_of([&] { extract_A_sequence(zero, exponent_ladder(0.5, 2), mv0, 2, 3); }) == ErrorCode::DegenerateMoments);
  const auto mv = moments(unit_source().mu, 1.0, 16);
  const auto narrow = geometric_grid(1e2, 1e3, 16);
  const TailData narrow_zero{narrow, std::vector<double>(narrow.size(), 0.0), 0.0};
  CHECK(code_of([&] { extract_A_sequence(narrow_zero, exponent_ladder(kIrrational, 16), mv, 16, 16); }) ==
        ErrorCode::IllConditioned);
  const auto ex = extract_A_sequence(zero, exponent_ladder(0.5, 3), mv, 3, 2);
  CHECK_FALSE(ex.collisions.empty());
  for (const auto& c : ex.collisions) {
    CHECK(ex.ladder.sigma(c.k1) + c.m1 == doctest::Approx(ex.ladder.sigma(c.k2) + c.m2));
  }
}

TEST_CASE("modal amplitude recovery") {
  SUBCASE("two modes from exact sums") {
    const std::vector<double> a{1.0, 0.5}, lam = dirichlet_eigenvalues(2);
    const auto lad = exponent_ladder(kIrrational, 6);
    std::vector<double> A, res(6, 0.0);
    for (int l : lad.ells) A.push_back(direct_A(a, lam, l));
    const auto r = recover_modal_amplitudes(A, res, lad.ells, lam, 2);
    CHECK(r.a[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.a[1] == doctest::Approx(0.5).epsilon(1e-8));
    // deflation error is geometric in lambda_1 / lambda_2
    CHECK(std::abs(r.a_deflation[0] - 1.0) <= 2.0 * 0.5 * std::pow(0.25, lad.ells.back()));
  }
  SUBCASE("single mode") {
    const std::vector<double> lam{2.5};
    const auto lad = exponent_ladder(0.3, 5);
    std::vector<double> A, res(5, 0.0);
    for (int l : lad.ells) A.push_back(1.7 * std::pow(2.5, -l));
    for (std::size_t k = 0; k < A.size(); ++k) CHECK(A[k] * std::pow(2.5, lad.ells[k]) == doctest::Approx(1.7).epsilon(1e-12));
    const auto r = recover_modal_amplitudes(A, res, lad.ells, lam, 1);
    CHECK(r.a[0] == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(r.a_deflation[0] == doctest::Approx(1.7).epsilon(1e-12));
  }
  SUBCASE("zero sums") {
    const auto lad = exponent_ladder(kIrrational, 4);
    const std::vector<double> A(4, 0.0), res(4, 0.0), lam = dirichlet_eigenvalues(3);
    const auto r = recover_modal_amplitudes(A, res, lad.ells, lam, 3);
    for (double v : r.a) CHECK(v == 0.0);
  }
  SUBCASE("errors") {
    const auto lad = exponent_ladder(kIrrational, 2);
    const std::vector<double> A(2, 1.0), res(2, 0.0), lam = dirichlet_eigenvalues(3);
    CHECK(code_of([&] { recover_modal_amplitudes(A, res, lad.ells, lam, 3); }) == ErrorCode::InsufficientLadder);
    const std::vector<double> close{1.0, 1.005, 3.0};
    const auto lad3 = exponent_ladder(kIrrational, 3);
    const std::vector<double> A3(3, 1.0), res3(3, 0.0);
    CHECK(code_of([&] { recover_modal_amplitudes(A3, res3, lad3.ells, close, 3); }) ==
          ErrorCode::NearDegenerateSpectrum);
  }
}

TEST_CASE("synthetic round trip") {
  const std::vector<double> a{1.0, 0.5, 0.25}, lam = dirichlet_eigenvalues(3);
  const auto mv = moments(unit_source().mu, 1.0, 6);
  const auto model = build_tail_model(a, lam, exponent_ladder(kIrrational, 7), mv, 6, 6);
  // the model is an exact finite sum, so early times are admissible and carry the high-k information
  const auto ts = geometric_grid(10.0, 1e7, 16);
  const auto ex = extract_A_sequence(sample_model(model, ts), exponent_ladder(kIrrational, 6), mv, 6, 6);
  const auto r = recover_modal_amplitudes(ex, lam, 3);
  for (int n = 0; n < 3; ++n) CHECK(std::abs(r.a[n] / a[n] - 1.0) <= 1e-6);
}

TEST_CASE("scalar moment recovery") {
  const auto ts = geometric_grid(1e2, 1e6, 16);
  auto rl_data = [&](const PiecewisePolynomial& mu, double alpha) {
    TailData d{ts, {}, 0.0};
    for (double t : ts) d.values.push_back(riemann_liouville_tail(alpha, mu, t));
    return d;
  };
  SUBCASE("mu = 1 + s") {
    const auto r = scalar_moment_recovery(rl_data(PiecewisePolynomial::polynomial({1.0, 1.0}, 1.0), 0.5), 0.5, 1.0, 4);
    CHECK(std::abs(r.a) <= std::max(r.noise_floor[0], 1e-12));
    CHECK(r.moments[0] == doctest::Approx(1.5).epsilon(0.01));
    CHECK(r.moments[1] == doctest::Approx(-5.0 / 6.0).epsilon(0.01));
    CHECK_FALSE(r.zero_verdict);
  }
  SUBCASE("constant offset") {
    const TailData v{ts, std::vector<double>(ts.size(), 0.7), 0.0};
    const auto r = scalar_moment_recovery(v, 0.5, 1.0, 4);
    CHECK(r.a == doctest::Approx(0.7).epsilon(1e-6));
    for (std::size_t m = 0; m < r.moments.size(); ++m) CHECK(std::abs(r.moments[m]) <= r.noise_floor[m + 1]);
  }
  SUBCASE("zero mean source") {
    // M = 4 leaves a truncation bias of ~1e-15 in mu_0, above the rounding floor
    const auto r = scalar_moment_recovery(rl_data(PiecewisePolynomial::polynomial({-0.5, 1.0}, 1.0), 0.5), 0.5, 1.0, 6);
    // quadrature data: the vanishing moment sits within its fit error, not the pure rounding floor
    CHECK(std::abs(r.moments[0]) <= std::max(r.noise_floor[1], r.moment_errors[0]));
    CHECK(std::abs(r.moments[0]) < 1e-12 * std::abs(r.moments[1]));
    CHECK(r.moments[1] == doctest::Approx(-1.0 / 12.0).epsilon(0.05));
  }
  SUBCASE("rapidly decaying data gives the zero verdict") {
    TailData v{ts, {}, 1e-15};
    for (double t : ts) v.values.push_back(std::exp(-t));
    CHECK(scalar_moment_recovery(v, 0.5, 1.0, 4).zero_verdict);
    const TailData zero{ts, std::vector<double>(ts.size(), 0.0), 0.0};
    CHECK(scalar_moment_recovery(zero, 0.5, 1.0, 4).zero_verdict);
  }
  SUBCASE("span") {
    const auto short_ts = geometric_grid(1e2, 5e3, 16);
    const TailData v{short_ts, std::vector<double>(short_ts.size(), 1.0), 0.0};
    CHECK(code_of([&] { scalar_moment_recovery(v, 0.5, 1.0, 2); }) == ErrorCode::InsufficientSpan);
    const auto early = geometric_grid(1.5, 1e4, 16);
    const TailData e{early, std::vector<double>(early.size(), 1.0), 0.0};
    CHECK(code_of([&] { scalar_moment_recovery(e, 0.5, 1.0, 2); }) == ErrorCode::InsufficientSpan);
  }
}

TEST_CASE("decay probe") {
  const auto ts = geometric_grid(10.0, 1e5, 16);
  std::vector<double> p5;
  for (double t : ts) p5.push_back(3.0 * std::pow(t, -5.0));
  const auto probe = probe_decay(ts, p5);
  CHECK(probe.orders == std::vector<int>{2, 4, 8});
  CHECK(probe.bounded == std::vector<bool>{true, true, false});
  CHECK(probe.largest_bounded == 4);
  CHECK(probe.fitted_exponent == doctest::Approx(-5.0));
}

TEST_CASE("uniqueness experiment") {
  const auto sys = laplacian_1d_dirichlet(1.0, 16, 1025);
  const double alpha = kIrrational;
  const auto whole = ObservationSpec::interior(0.0, 1.0, [&](double x) { return sys.eigenfunction(0, x); });
  SpatialProfile phi1, phi2, zero;
  phi1.modal_coefficients = {1.0};
  phi2.modal_coefficients = {0.0, 1.0};
  SUBCASE("phi_1 against zero") {
    const auto rep = uniqueness_experiment(phi1, zero, unit_source(), sys, whole, alpha, 1e6);
    CHECK(rep.verdict == UniquenessReport::Verdict::PowerLawGap);
    CHECK_FALSE(rep.gap_at_floor);
    CHECK(rep.expected_exponent == doctest::Approx(alpha + 1.0));
    CHECK(std::abs(rep.gap_exponent / (alpha + 1.0) - 1.0) < 0.05);
    CHECK(rep.gap_r_squared > 0.999);
    CHECK(rep.recovered[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(rep.recovery_error < 1e-2);
  }
  SUBCASE("identical sources") {
    const auto rep = uniqueness_experiment(phi1, phi1, unit_source(), sys, whole, alpha, 1e6);
    CHECK(rep.verdict == UniquenessReport::Verdict::IdenticalSources);
    CHECK(rep.gap_at_floor);
    CHECK(rep.probe.largest_bounded == 8);
  }
  SUBCASE("orthogonal test function") {
    CHECK(code_of([&] { uniqueness_experiment(phi2, zero, unit_source(), sys, whole, alpha, 1e6); }) ==
          ErrorCode::IndistinguishableAtScale);
  }
  SUBCASE("sub-interval observation of a multi-mode profile") {
    const auto bump = ObservationSpec::interior(0.2, 0.7, [](double x) { return (x - 0.2) * (0.7 - x); });
    SpatialProfile f;
    f.modal_coefficients = {0.0, 1.0, 0.3, -0.2};
    const auto rep = uniqueness_experiment(f, zero, unit_source(), sys, bump, alpha, 1e6);
    CHECK(rep.verdict == UniquenessReport::Verdict::PowerLawGap);
    CHECK(std::abs(rep.gap_exponent / rep.expected_exponent - 1.0) < 0.05);
    CHECK(rep.probe.largest_bounded < 8);
  }
}

TEST_CASE("heat contrast") {
  const auto sys = laplacian_1d_dirichlet(1.0, 8, 513);
  const double lam1 = pi * pi;
  const auto ts = geometric_grid(3.0, 60.0, 16);
  const std::vector<std::size_t> modes{0, 1};
  SUBCASE("generic source") {
    const auto rep = heat_contrast_experiment(sys, unit_source(), modes, ts);
    const auto& m = rep.modes[0];
    CHECK(m.scaled_integral == doctest::Approx(-std::expm1(-lam1) / lam1).epsilon(1e-13));
    CHECK(m.heat_tail.front() == doctest::Approx(std::exp(-lam1 * ts.front()) * std::expm1(lam1) / lam1).epsilon(1e-12));
    CHECK(m.heat_fit.r_squared > 0.999);
    CHECK(m.heat_fit.slope == doctest::Approx(-lam1).epsilon(1e-10));
    CHECK(m.fractional_fit.r_squared > 0.999);
    CHECK(rep.modes[1].heat_fit.slope == doctest::Approx(-4 * lam1).epsilon(1e-10));
  }
  SUBCASE("source with a vanishing heat integral") {
    const auto mu = vanishing_heat_source(lam1, 1.0);
    CHECK(-mu.segments()[1].coeffs[0] == doctest::Approx(std::exp(-lam1 / 2)).epsilon(1e-12));
    const SourceSpec src{mu, 1.0, {}};
    const auto rep = heat_contrast_experiment(sys, src, modes, ts);
    const auto generic = heat_contrast_experiment(sys, unit_source(), modes, ts);
    CHECK(std::abs(rep.modes[0].scaled_integral) < 1e-15);
    // heat tails are e^{-lambda (t - t0)} J, so the ratio at t = 10 is the ratio of integrals
    const double w = std::exp(-lam1 / 2);
    const double at10 = std::exp(-9.0 * lam1) * rep.modes[0].scaled_integral;
    CHECK(std::abs(at10) <= 1e-6 * std::exp(-9.0 * lam1) * generic.modes[0].scaled_integral);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      CHECK(std::abs(rep.modes[0].heat_tail[i]) <= 1e-6 * std::abs(generic.modes[0].heat_tail[i]));
    }
    const double l2 = 4 * lam1;
    const double j2 = (std::exp(-l2 / 2) - std::exp(-l2)) / l2 + w * std::expm1(-l2 / 2) / l2;
    CHECK(rep.modes[1].scaled_integral == doctest::Approx(j2).epsilon(1e-10));
    CHECK(rep.modes[0].fractional_fit.r_squared > 0.999);
    CHECK(rep.modes[0].fractional_fit.slope < -1.0);
  }
}
