#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "fractail/error.hpp"
#include "fractail/fitting.hpp"
#include "fractail/gamma.hpp"
#include "fractail/mittag_leffler.hpp"
#include "fractail/oracle/mp_oracle.hpp"
#include "fractail/quadrature.hpp"

using namespace fractail;

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("gamma at the tabulated points") {
  CHECK(gamma_real(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rel_err(gamma_real(0.5), 1.7724538509055160) < 1e-15);
  CHECK(rel_err(gamma_real(-0.5), -3.5449077018110320) < 1e-15);
  CHECK(rel_err(oracle::gamma(-0.5), -3.5449077018110320) < 1e-16);
}

TEST_CASE("gamma against the multiprecision oracle") {
  for (double x = -9.87; x < 30.0; x += 0.173) {
    if (is_gamma_pole(x)) continue;
    INFO("x = " << x);
    CHECK(rel_err(gamma_real(x), oracle::gamma(x)) < 1e-13);
  }
  for (double x : {-3.5, -2.999, -1.0001, -0.25, 1e-3, 171.5}) {
    INFO("x = " << x);
    CHECK(rel_err(gamma_real(x), oracle::gamma(x)) < 1e-13);
  }
}

TEST_CASE("gamma poles") {
  for (double x : {0.0, -1.0, -2.0, -7.0, -3.0 + 5e-13}) {
    CHECK(is_gamma_pole(x));
    CHECK(code_of([&] { gamma_real(x); }) == ErrorCode::PoleArgument);
    CHECK(reciprocal_gamma(x) == 0.0);
  }
  CHECK_FALSE(is_gamma_pole(-3.0 + 1e-9));
  CHECK(sin_pi(5.0) == 0.0);
  CHECK(sin_pi(-4.0) == 0.0);
}

TEST_CASE("series path examples") {
  CHECK(rel_err(ml_series({0.5, 0.5}, 0.0, 1e-16), 0.5641895835477563) < 1e-15);
  CHECK(rel_err(ml_series({1.0, 1.0}, -1.0, 1e-16), 0.36787944117144233) < 1e-14);
  const double z = std::numbers::pi / 2;
  CHECK(std::abs(ml_series({2.0, 1.0}, -z * z, 1e-16)) < 1e-15);
}

TEST_CASE("series path refuses arguments it cannot sum") {
  CHECK(code_of([] { ml_series({0.5, 0.5}, -1e4, 1e-15, 100); }) == ErrorCode::NonConvergent);
  CHECK(code_of([] { ml_series({0.5, 0.5}, -1.0, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("parameter validation") {
  CHECK(code_of([] { ml_eval({0.0, 1.0}, -1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { ml_eval({2.0, 1.0}, -1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { ml_eval({0.5, -1.0}, -1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { ml_eval({0.5, 0.5}, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("asymptotic expansion against the oracle") {
  oracle::MittagLefflerOracle ref(0.5, 0.5);
  const auto a = ml_asymptotic({0.5, 0.5}, 1e6, 3);
  CHECK(rel_err(a.value, ref(-1e6).value) < 1e-6);
  CHECK(std::abs(a.value - ref(-1e6).value) <= a.remainder_bound);
}

TEST_CASE("asymptotic pole pattern") {
  // beta - alpha k = 0.5 - 0.5 k: poles at k = 1, 3, 5, ...
  const auto s = ml_asymptotic_series({0.5, 0.5}, 2);
  REQUIRE(s.terms.size() == 1);
  CHECK(s.terms[0].exponent == 2.0);
  CHECK(rel_err(s.terms[0].coefficient, -1.0 / oracle::gamma(-0.5)) < 1e-14);
  CHECK(s.remainder_order == 4.0);

  // alpha = 1: 1/Gamma(1 - k) = 0 for every k >= 1
  const auto one = ml_asymptotic_series({1.0, 1.0}, 6);
  CHECK(one.terms.empty());
  CHECK(ml_asymptotic({1.0, 1.0}, 50.0, 6).value == 0.0);
  CHECK(ml_asymptotic({1.0, 1.0}, 50.0, 6).remainder_bound >= std::exp(-50.0));

  // 0.7 - 0.7 k is a pole only at k = 1
  const auto s7 = ml_asymptotic_series({0.7, 0.7}, 4);
  REQUIRE(s7.terms.size() == 3);
  CHECK(s7.terms[0].exponent == 2.0);
  for (std::size_t i = 1; i < s7.terms.size(); ++i) CHECK(s7.terms[i].exponent > s7.terms[i - 1].exponent);
  CHECK(s7.remainder_order > s7.terms.back().exponent);
}

TEST_CASE("asymptotic path refuses small arguments") {
  const auto s = ml_asymptotic_series({0.5, 0.5}, 3);
  CHECK(s.validity_threshold > 0.0);
  CHECK(code_of([&] { ml_asymptotic({0.5, 0.5}, 0.5 * s.validity_threshold, 3); }) ==
        ErrorCode::BelowValidityThreshold);
  CHECK_NOTHROW(ml_asymptotic({0.5, 0.5}, s.validity_threshold, 3));
}

TEST_CASE("hybrid evaluation examples") {
  oracle::MittagLefflerOracle ref(0.5, 0.5);
  CHECK(rel_err(ml_eval({0.5, 0.5}, -1.0), ref(-1.0).value) < 1e-10);
  // 1/Gamma(1.5) = 2/sqrt(pi)
  CHECK(rel_err(ml_eval({1.5, 1.5}, 0.0), 1.1283791670955126) < 1e-15);
  CHECK(rel_err(ml_eval({1.5, 2.5}, 0.0), 0.7522527780636751) < 1e-15);
  CHECK(rel_err(ml_eval({1.0, 2.0}, -2.0), 0.43233235838169365) < 1e-14);
}

TEST_CASE("value at zero is 1/Gamma(beta)") {
  for (double a : {0.1, 0.5, 1.0, 1.3, 1.99}) {
    for (double b : {0.2, a, a + 1.0, 1.0, 3.7}) {
      CHECK(std::abs(ml_eval({a, b}, 0.0) * gamma_real(b) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("identity suite") {
  for (double x = -20.0; x <= 0.0; x += 0.05) {
    INFO("x = " << x);
    CHECK(rel_err(ml_eval({1.0, 1.0}, x), std::exp(x)) < 1e-10);
    if (x != 0.0) CHECK(rel_err(ml_eval({1.0, 2.0}, x), std::expm1(x) / x) < 1e-10);
  }
  for (double z = 0.0; z <= 10.0; z += 0.025) {
    INFO("z = " << z);
    CHECK(std::abs(ml_series({2.0, 1.0}, -z * z, 1e-16) - std::cos(z)) < 1e-10);
  }
}

TEST_CASE("hybrid branches agree across the crossover") {
  for (double a : {0.3, 0.5, 0.8, 1.2, 1.7}) {
    for (double b : {a, a + 1.0, 1.0}) {
      MittagLeffler ml({a, b});
      // oscillating cases cross zero, so measure against the size of the leading algebraic term
      const auto lead = ml_asymptotic_series({a, b}, 4).terms.front();
      for (double z = 26.0; z <= 40.0; z += 1.0) {
        const double x = -std::pow(z, a);
        const double s = ml.series_extended(x);
        const double as = ml.asymptotic_optimal(x);
        const double scale = std::max(std::abs(as), std::abs(lead.coefficient) * std::pow(-x, -lead.exponent));
        INFO("alpha " << a << " beta " << b << " z " << z);
        CHECK(std::abs(s - as) <= 1e-8 * scale);
      }
      for (double z = 1.0; z <= 3.0; z += 0.25) {
        const double x = -std::pow(z, a);
        CHECK(std::abs(ml.series_double(x) - ml.series_extended(x)) <= 1e-8 * std::abs(ml.series_extended(x)));
      }
    }
  }
}

TEST_CASE("negative axis decay is positive and monotone for alpha <= 1") {
  for (double a : {0.2, 0.5, 0.8, 0.95, 1.0}) {
    const auto eta = geometric_grid(1e-3, 1e5, 20);
    double prev = ml_eval({a, a}, 0.0);
    for (double e : eta) {
      if (prev < 1e-290) break;  // exp(-eta) underflows at alpha = 1
      const double v = ml_eval({a, a}, -e);
      INFO("alpha " << a << " eta " << e);
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("asymptotic remainder slope") {
  struct Case {
    double alpha;
    int n;
  };
  for (Case c : {Case{0.7, 2}, Case{0.7, 3}, Case{0.3, 1}, Case{0.5, 3}, Case{1.5, 2}}) {
    const MLParams p{c.alpha, c.alpha};
    const auto series = ml_asymptotic_series(p, c.n);
    // skip truncations whose next term vanishes on a Gamma pole
    if (reciprocal_gamma(p.beta - p.alpha * (c.n + 1)) == 0.0) continue;
    const double lo = std::max(series.validity_threshold, 1e3);
    std::vector<double> eta, rem;
    for (double e : geometric_grid(lo, lo * 1e3, 8)) {
      eta.push_back(e);
      rem.push_back(ml_eval(p, -e) - series.value(e));
    }
    const auto fit = fit_power_law(eta, rem);
    INFO("alpha " << c.alpha << " N " << c.n << " slope " << fit.slope);
    CHECK(std::abs(fit.slope + (c.n + 1)) <= 0.05 * (c.n + 1));
  }
}

TEST_CASE("uniform bound constant") {
  const auto grid6 = [] {
    std::vector<double> g;
    for (int j = 0; j <= 6; ++j) g.push_back(std::pow(10.0, j));
    return g;
  }();
  const double c05 = ml_uniform_bound_check(0.5, grid6);
  CHECK(std::isfinite(c05));
  CHECK(c05 > 0.0);

  std::vector<double> from_one;
  for (double e = 1.0; e <= 50.0; e += 0.5) from_one.push_back(e);
  CHECK(rel_err(ml_uniform_bound_check(1.0, from_one), 2.0 / std::numbers::e) < 1e-12);

  const std::vector<double> single{1.0};
  oracle::MittagLefflerOracle ref(1.9, 1.9);
  const double c19 = ml_uniform_bound_check(1.9, single);
  CHECK(c19 > 0.0);
  CHECK(rel_err(c19, 2.0 * std::abs(ref(-1.0).value)) < 1e-12);

  // extending the grid does not change a bound already attained
  auto longer = grid6;
  for (int j = 7; j <= 9; ++j) longer.push_back(std::pow(10.0, j));
  CHECK(rel_err(ml_uniform_bound_check(0.5, longer), c05) < 1e-3);
}

TEST_CASE("spot checks against the oracle on both sides of each threshold") {
  for (double a : {0.3, 0.7, 1.0, 1.4, 1.9}) {
    for (double b : {a, a + 1.0, 1.0}) {
      oracle::MittagLefflerOracle ref(a, b);
      for (double z : {0.5, 1.99, 2.01, 10.0, 31.9, 32.1, 60.0, 300.0}) {
        const double x = -std::pow(z, a);
        const auto r = ref(x);
        INFO("alpha " << a << " beta " << b << " x " << x);
        CHECK(std::abs(ml_eval({a, b}, x) - r.value) <= 1e-10 * std::abs(r.value) + 1e-300);
      }
    }
  }
}
