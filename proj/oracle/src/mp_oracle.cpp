#include "fractail/oracle/mp_oracle.hpp"

#include <mpfr.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fractail::oracle {

namespace {

// Minimal RAII handle over mpfr_t.
class Mp {
 public:
  explicit Mp(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Mp(mpfr_prec_t prec, double d) { mpfr_init2(v_, prec); mpfr_set_d(v_, d, MPFR_RNDN); }
  Mp(const Mp& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Mp& operator=(const Mp& o) {
    if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
    return *this;
  }
  ~Mp() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  // log2 |v|, -inf for zero
  double log2_abs() const {
    if (mpfr_zero_p(v_)) return -std::numeric_limits<double>::infinity();
    long e = 0;
    const double m = mpfr_get_d_2exp(&e, v_, MPFR_RNDN);
    return std::log2(std::abs(m)) + static_cast<double>(e);
  }

 private:
  mpfr_t v_;
};

constexpr mpfr_prec_t kTablePrec = 768;
constexpr mpfr_prec_t kAsymPrec = 320;
constexpr double kStopBits = 230.0;  // ~1e-69 relative

bool alpha_is_one(double alpha) { return std::abs(alpha - 1.0) < 1e-14; }
bool is_integral(double x) { return std::abs(x - std::nearbyint(x)) < 1e-14; }

}  // namespace

double gamma(double x) {
  Mp a(256, x), g(256);
  mpfr_gamma(g.get(), a.get(), MPFR_RNDN);
  return g.to_double();
}

double exp(double x) {
  Mp a(256, x), r(256);
  mpfr_exp(r.get(), a.get(), MPFR_RNDN);
  return r.to_double();
}

double power_kernel_integral(double sigma, double t, double t0) {
  if (!(t > t0 && t0 > 0.0)) throw std::invalid_argument("power_kernel_integral: need t > t0 > 0");
  Mp tt(256, t), lo(256), one_m(256), a(256), b(256), r(256);
  mpfr_sub_d(lo.get(), tt.get(), t0, MPFR_RNDN);
  if (sigma == 1.0) {
    mpfr_div(r.get(), tt.get(), lo.get(), MPFR_RNDN);
    mpfr_log(r.get(), r.get(), MPFR_RNDN);
    return r.to_double();
  }
  mpfr_set_d(one_m.get(), 1.0, MPFR_RNDN);
  mpfr_sub_d(one_m.get(), one_m.get(), sigma, MPFR_RNDN);
  mpfr_pow(a.get(), tt.get(), one_m.get(), MPFR_RNDN);
  mpfr_pow(b.get(), lo.get(), one_m.get(), MPFR_RNDN);
  mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN);
  mpfr_div(r.get(), r.get(), one_m.get(), MPFR_RNDN);
  return r.to_double();
}

struct MittagLefflerOracle::Impl {
  double alpha;
  double beta;
  std::vector<Mp> table;  // 1/Gamma(alpha k + beta) at kTablePrec

  const Mp& coef(std::size_t k) {
    while (table.size() <= k) {
      const std::size_t j = table.size();
      Mp arg(kTablePrec, alpha), g(kTablePrec);
      mpfr_mul_ui(arg.get(), arg.get(), static_cast<unsigned long>(j), MPFR_RNDN);
      mpfr_add_d(arg.get(), arg.get(), beta, MPFR_RNDN);
      mpfr_gamma(g.get(), arg.get(), MPFR_RNDN);
      mpfr_ui_div(g.get(), 1, g.get(), MPFR_RNDN);
      table.push_back(g);
    }
    return table[k];
  }
};

MittagLefflerOracle::MittagLefflerOracle(double alpha, double beta)
    : impl_(std::make_unique<Impl>()) {
  if (!(alpha > 0.0 && alpha < 2.0) || !(beta > 0.0)) {
    throw std::invalid_argument("MittagLefflerOracle: need 0 < alpha < 2 and beta > 0");
  }
  impl_->alpha = alpha;
  impl_->beta = beta;
}

MittagLefflerOracle::~MittagLefflerOracle() = default;
MittagLefflerOracle::MittagLefflerOracle(MittagLefflerOracle&&) noexcept = default;
MittagLefflerOracle& MittagLefflerOracle::operator=(MittagLefflerOracle&&) noexcept = default;

std::size_t MittagLefflerOracle::table_size() const { return impl_->table.size(); }

Reference MittagLefflerOracle::operator()(double x) {
  if (x > 0.0) throw std::invalid_argument("MittagLefflerOracle: x must be <= 0");
  if (x == 0.0) return series(x);
  const double z = std::pow(-x, 1.0 / impl_->alpha);
  return z <= kSeriesLimitZ ? series(x) : asymptotic(x);
}

Reference MittagLefflerOracle::series(double x) {
  const double alpha = impl_->alpha;
  const double z = std::pow(std::abs(x), 1.0 / alpha);
  // Largest term ~ e^z; the table precision must cover it plus 60 digits.
  if (z / std::log(2.0) + 260.0 > static_cast<double>(kTablePrec)) {
    throw std::domain_error("MittagLefflerOracle::series: argument too large for table precision");
  }
  const mpfr_prec_t prec = kTablePrec;
  Mp sum(prec), term(prec), power(prec, 1.0), xm(prec, x);
  double peak_bits = -std::numeric_limits<double>::infinity();
  double prev_bits = std::numeric_limits<double>::infinity();
  const std::size_t k_peak = static_cast<std::size_t>(z / alpha) + 2;
  std::size_t k = 0;
  double last_bits = 0.0;
  for (;; ++k) {
    mpfr_mul(term.get(), impl_->coef(k).get(), power.get(), MPFR_RNDN);
    mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    const double tb = term.log2_abs();
    peak_bits = std::max(peak_bits, tb);
    last_bits = tb;
    if (x == 0.0) break;
    if (k > k_peak && tb < prev_bits &&
        (tb < sum.log2_abs() - kStopBits || tb < peak_bits - static_cast<double>(prec))) {
      break;
    }
    prev_bits = tb;
    mpfr_mul(power.get(), power.get(), xm.get(), MPFR_RNDN);
    if (k > 200000) throw std::runtime_error("MittagLefflerOracle::series: no convergence");
  }
  const double rounding = static_cast<double>(k + 1) * std::exp2(peak_bits - static_cast<double>(prec) + 2.0);
  const double tail = 2.0 * std::exp2(last_bits);
  return {sum.to_double(), rounding + tail};
}

Reference MittagLefflerOracle::asymptotic(double x) {
  if (!(x < 0.0)) throw std::invalid_argument("MittagLefflerOracle::asymptotic: x must be < 0");
  const double alpha = impl_->alpha, beta = impl_->beta;
  const mpfr_prec_t prec = kAsymPrec;
  Mp eta(prec, -x), log_eta(prec), sum(prec), a(prec, alpha), b(prec, beta);
  mpfr_log(log_eta.get(), eta.get(), MPFR_RNDN);
  Mp pi(prec);
  mpfr_const_pi(pi.get(), MPFR_RNDN);

  const long k_max = (alpha_is_one(alpha) && is_integral(beta)) ? std::lround(beta) - 1 : 1000000;
  double prev_env_bits = std::numeric_limits<double>::infinity();
  double smallest_bits = std::numeric_limits<double>::infinity();
  Mp y(prec), g(prec), term(prec), env(prec), tmp(prec);
  for (long k = 1; k <= k_max; ++k) {
    // y = beta - alpha k
    mpfr_mul_si(y.get(), a.get(), k, MPFR_RNDN);
    mpfr_sub(y.get(), b.get(), y.get(), MPFR_RNDN);
    const bool pole = mpfr_integer_p(y.get()) && mpfr_sgn(y.get()) <= 0;
    // term = (-1)^{k+1} eta^{-k} / Gamma(y)
    if (!pole) {
      mpfr_gamma(g.get(), y.get(), MPFR_RNDN);
      mpfr_mul_si(tmp.get(), log_eta.get(), -k, MPFR_RNDN);
      mpfr_exp(tmp.get(), tmp.get(), MPFR_RNDN);
      mpfr_div(term.get(), tmp.get(), g.get(), MPFR_RNDN);
      if (k % 2 == 0) mpfr_neg(term.get(), term.get(), MPFR_RNDN);
      mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    }
    if (mpfr_sgn(y.get()) < 0) {
      // envelope Gamma(1-y) eta^{-k} / pi, monotone past its minimum
      mpfr_ui_sub(tmp.get(), 1, y.get(), MPFR_RNDN);
      mpfr_lngamma(env.get(), tmp.get(), MPFR_RNDN);
      mpfr_mul_si(tmp.get(), log_eta.get(), k, MPFR_RNDN);
      mpfr_sub(env.get(), env.get(), tmp.get(), MPFR_RNDN);
      const double env_bits = mpfr_get_d(env.get(), MPFR_RNDN) / std::log(2.0) - std::log2(M_PI);
      if (env_bits > prev_env_bits) break;
      prev_env_bits = env_bits;
      smallest_bits = env_bits;
      if (!mpfr_zero_p(sum.get()) && env_bits < sum.log2_abs() - kStopBits) break;
    }
  }

  // Exponential contributions for alpha >= 1.
  double weight = 0.0;
  if (alpha_is_one(alpha)) weight = 1.0;
  else if (alpha > 1.0) weight = 2.0 / alpha;
  if (weight != 0.0) {
    Mp z(prec), ang(prec), c(prec), s(prec), mag(prec), phase(prec), one_m_beta(prec);
    mpfr_ui_div(tmp.get(), 1, a.get(), MPFR_RNDN);
    mpfr_pow(z.get(), eta.get(), tmp.get(), MPFR_RNDN);          // z = eta^{1/alpha}
    mpfr_div(ang.get(), pi.get(), a.get(), MPFR_RNDN);           // pi/alpha
    mpfr_cos(c.get(), ang.get(), MPFR_RNDN);
    mpfr_sin(s.get(), ang.get(), MPFR_RNDN);
    mpfr_ui_sub(one_m_beta.get(), 1, b.get(), MPFR_RNDN);
    mpfr_mul(mag.get(), z.get(), c.get(), MPFR_RNDN);
    mpfr_exp(mag.get(), mag.get(), MPFR_RNDN);                   // e^{z cos}
    mpfr_pow(tmp.get(), z.get(), one_m_beta.get(), MPFR_RNDN);
    mpfr_mul(mag.get(), mag.get(), tmp.get(), MPFR_RNDN);        // z^{1-beta} e^{z cos}
    mpfr_mul(phase.get(), z.get(), s.get(), MPFR_RNDN);
    mpfr_mul(tmp.get(), ang.get(), one_m_beta.get(), MPFR_RNDN);
    mpfr_add(phase.get(), phase.get(), tmp.get(), MPFR_RNDN);
    mpfr_cos(phase.get(), phase.get(), MPFR_RNDN);
    mpfr_mul(mag.get(), mag.get(), phase.get(), MPFR_RNDN);
    mpfr_mul_d(mag.get(), mag.get(), weight, MPFR_RNDN);
    mpfr_add(sum.get(), sum.get(), mag.get(), MPFR_RNDN);
  }
  const double trunc = std::isfinite(smallest_bits) ? 2.0 * std::exp2(smallest_bits) : 0.0;
  const double rounding = std::exp2(sum.log2_abs() - static_cast<double>(prec) + 8.0);
  return {sum.to_double(), trunc + (std::isfinite(rounding) ? rounding : 0.0)};
}

}  // namespace fractail::oracle
