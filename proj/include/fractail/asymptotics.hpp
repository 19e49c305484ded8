#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fractail/source.hpp"
#include "fractail/spectral_domain.hpp"

namespace fractail {

// Which integers l >= 2 enter the ladder.
//  NonVanishing: alpha (l - 1) not a positive integer, i.e. 1/Gamma(alpha - alpha l) != 0.
//  Literal: alpha l not a positive integer.
// The two coincide for irrational alpha. For rational alpha only NonVanishing
// keeps the terms that actually survive in the large-time expansion.
enum class LadderRule { NonVanishing, Literal };

inline constexpr double kLadderTolerance = 1e-9;

struct ExponentLadder {
  double alpha = 0.5;
  LadderRule rule = LadderRule::NonVanishing;
  std::vector<int> ells;  // strictly increasing, all >= 2

  std::size_t size() const { return ells.size(); }
  /// sigma_k = alpha l_k - alpha + 1 (k is 0-based).
  double sigma(std::size_t k) const;
  /// (-1)^{l_k + 1} / Gamma(alpha - alpha l_k).
  double gamma_factor(std::size_t k) const;
};

/// First K ladder members. Throws AlphaIsOne, InvalidArgument.
ExponentLadder exponent_ladder(double alpha, int K, LadderRule rule = LadderRule::NonVanishing);

/// True when x is within kLadderTolerance of a positive integer.
bool near_positive_integer(double x);

struct MomentVector {
  std::vector<double> moments;  // mu_m = integral_0^{t0} (-s)^m mu(s) ds, m = 0..M
  std::optional<int> m1;        // first index with |mu_m| > 1e-12 t0^m ||mu||_1
  double t0 = 1.0;
  double l1_norm = 0.0;
};

MomentVector moments(const PiecewisePolynomial& mu, double t0, int M);

/// (-sigma)(-sigma-1)...(-sigma-m+1) / m!, written in terms of neg_sigma = -sigma.
double gen_binomial(double neg_sigma, int m);

/// Ratio bound s/t <= r used by every expansion in t; t must exceed t0 / r.
inline constexpr double kExpansionRatio = 0.5;

struct KernelExpansion {
  double value = 0.0;            // sum_{m<=M} binom(-sigma, m) mu_m / t^{sigma+m}
  double remainder_bound = 0.0;  // Lagrange remainder at s/t <= r plus a rounding allowance
  std::vector<double> terms;
};

/// Expansion of integral_0^{t0} mu(s) (t - s)^{-sigma} ds in powers of 1/t.
/// Throws TimeTooSmall if t <= t0 / r.
KernelExpansion kernel_moment_expansion(double sigma, const SourceSpec& source, int M, double t);

struct TailModel {
  ExponentLadder ladder;  // K + 1 members; the last one only fixes the remainder order
  MomentVector moments;
  int K = 0;
  int M = 0;
  std::vector<double> A;                      // A_k = sum_n a_n / lambda_n^{l_k}
  std::vector<double> A_tail;                 // bound on the omitted modes' share of A_k
  std::vector<std::vector<double>> exponents;  // e_{k,m} = sigma_k + m
  std::vector<std::vector<double>> coefficients;
  double remainder_order = 0.0;  // min(sigma_{K+1}, sigma_1 + M + 1)
  double lambda_min = 0.0;

  /// sum_{k,m} c_{k,m} t^{-e_{k,m}}.
  double operator()(double t) const;
  /// sum_{k,m} |c_{k,m}| t^{-e_{k,m}} (scale for rounding estimates).
  double magnitude(double t) const;
};

/// Assembles the tail model from pairings a_n over the system's eigenvalues.
/// Runs the summability report when ten or more pairings are given.
/// Throws DivergentCoefficients.
TailModel build_tail_model(std::span<const double> pairings, const EigenSystem& system,
                           const ExponentLadder& ladder, const MomentVector& moments, int K, int M);

/// Same, for an explicit finite spectrum (no tail, no summability check).
TailModel build_tail_model(std::span<const double> pairings, std::span<const double> eigenvalues,
                           const ExponentLadder& ladder, const MomentVector& moments, int K, int M);

struct ErrorOrderFit {
  double slope = 0.0;             // of log|observed - model| against log t
  double slope_stderr = 0.0;
  double expected = 0.0;          // -remainder_order
  double r_squared = 0.0;
  double t_star = 0.0;            // start of the asymptotic regime used for the span check
  std::size_t fitted_points = 0;
  bool degenerate = false;        // gap at the rounding floor, no slope
  std::vector<double> gap;

  /// slope <= expected + 0.05 |expected|
  bool within_contract() const;
};

/// Fits the decay of observed - model. Needs at least two decades between
/// max(t_min, T*) and t_max, with T* = max(2 t0, t0 + (10 / lambda_1)^{1/alpha}).
/// Throws InsufficientDecades.
ErrorOrderFit model_error_order(std::span<const double> times, std::span<const double> observed,
                                const TailModel& model);

}  // namespace fractail
