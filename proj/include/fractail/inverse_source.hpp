#pragma once

#include <span>
#include <vector>

#include "fractail/asymptotics.hpp"
#include "fractail/fitting.hpp"
#include "fractail/forward_solver.hpp"
#include "fractail/spectral_domain.hpp"

namespace fractail {

/// Long-time observations g(t) = sum_n a_n psi_n(t).
struct TailData {
  std::vector<double> times;   // strictly increasing, > t0
  std::vector<double> values;
  double noise_level = 0.0;    // declared additive bound; 0 for exact data

  void validate() const;
  /// Per-sample noise actually used: the declared level, but never below
  /// rounding of that sample (16 eps |value|).
  std::vector<double> sample_noise() const;
};

/// g sampled for explicit pairings, one psi_n per pairing (parallel over modes).
TailData synthesize_tail(std::span<const double> pairings, std::span<const double> eigenvalues, double alpha,
                         const SourceSpec& source, std::span<const double> times);

/// Two dictionary entries with the same power of t.
struct ExponentCollision {
  int k1, m1, k2, m2;
  double exponent;
};

struct AExtraction {
  ExponentLadder ladder;  // the K members used
  int K = 0;
  int M = 0;
  int m1 = 0;
  // joint weighted least squares over the K model columns
  std::vector<double> A;
  std::vector<double> residuals;    // standard errors
  std::vector<double> noise_floor;  // sum_i |pinv_{k,i}| sample_noise_i
  double condition_number = 0.0;
  // sequential plateau extraction
  std::vector<double> A_sequential;
  std::vector<double> residuals_sequential;  // half-spread of the plateau window
  std::vector<double> plateau_begin;         // start of the chosen decade window
  std::vector<ExponentCollision> collisions;

  /// |A_k| <= noise_floor_k.
  bool at_floor(std::size_t k) const;
};

/// Fits g ~ sum_k A_k col_k(t), col_k(t) = gamma_k sum_{m<=M} binom(-sigma_k, m) mu_m t^{-sigma_k - m},
/// jointly (weights t^{sigma_1 + m1}) and sequentially (plateaus of the
/// running residual divided by col_k). Throws DegenerateMoments, IllConditioned.
AExtraction extract_A_sequence(const TailData& data, const ExponentLadder& ladder, const MomentVector& moments,
                               int K, int M);

struct ModalRecovery {
  std::vector<double> a;                  // weighted linear solve of V a = A, V_{k,n} = lambda_n^{-l_k}
  std::vector<double> propagated_error;   // A residuals pushed through the solve
  std::vector<double> a_deflation;        // a_n ~ lambda_n^{l_K} A_K, then deflate and recurse
  std::vector<double> deflation_bound;    // geometric error estimate of the deflation value
  double condition_number = 0.0;
};

/// Throws InsufficientLadder (fewer A_k than modes), NearDegenerateSpectrum
/// (lambda_{n+1} / lambda_n < 1.01).
ModalRecovery recover_modal_amplitudes(std::span<const double> A, std::span<const double> A_residuals,
                                       std::span<const int> ells, std::span<const double> eigenvalues,
                                       std::size_t n_modes);

ModalRecovery recover_modal_amplitudes(const AExtraction& extraction, std::span<const double> eigenvalues,
                                       std::size_t n_modes);

struct ScalarRecovery {
  double a = 0.0;
  double a_error = 0.0;
  std::vector<double> moments;        // mu_0..mu_M
  std::vector<double> moment_errors;  // standard errors
  std::vector<double> noise_floor;    // [a, mu_0, ..., mu_M]
  double condition_number = 0.0;
  bool zero_verdict = false;          // every coefficient at its floor: a = 0 and mu = 0
};

/// v(t) = a + sum_m binom(-(1-alpha), m) mu_m t^{-(1-alpha+m)} / Gamma(alpha).
/// Throws InsufficientSpan (under two decades, or t_min <= 2 t0).
ScalarRecovery scalar_moment_recovery(const TailData& v_tail, double alpha, double t0, int M);

/// (1 / Gamma(alpha)) integral_0^{t0} (t - s)^{alpha-1} mu(s) ds by graded quadrature.
double riemann_liouville_tail(double alpha, const PiecewisePolynomial& mu, double t);

struct DecayProbe {
  std::vector<int> orders;       // probed p
  std::vector<bool> bounded;     // t^p |g| on the last decade <= 10 x its max on the first
  int largest_bounded = 0;       // 0 when none
  double fitted_exponent = 0.0;  // log-log slope over the nonzero samples
};

DecayProbe probe_decay(std::span<const double> times, std::span<const double> values,
                       std::span<const int> orders = {});

struct UniquenessOptions {
  double t_min = 100.0;
  int points_per_decade = 16;
  int K = 4;
  int M = 4;
  std::size_t recover_modes = 3;
};

struct UniquenessReport {
  enum class Verdict { PowerLawGap, IdenticalSources };

  Verdict verdict = Verdict::PowerLawGap;
  std::vector<double> pairings_1, pairings_2, pairing_gap;
  std::vector<double> times, g1, g2, gap;
  double gap_exponent = 0.0;       // fitted log-log slope of |g1 - g2|, negated
  double gap_r_squared = 0.0;
  double expected_exponent = 0.0;  // sigma_k + m1 for the first non-zero A_k of the gap
  bool gap_at_floor = false;
  DecayProbe probe;
  std::vector<double> recovered;   // modal pairings of f1 - f2 from the gap data
  double recovery_error = 0.0;     // max |recovered - pairing_gap| / max |pairing_gap|
};

/// Throws IndistinguishableAtScale when f1 != f2 but every pairing of f1 - f2 vanishes.
UniquenessReport uniqueness_experiment(const SpatialProfile& f1, const SpatialProfile& f2, const SourceSpec& source,
                                       const EigenSystem& system, const ObservationSpec& obs, double alpha,
                                       double t_max, const UniquenessOptions& options = {});

struct HeatContrastMode {
  std::size_t mode = 0;
  double lambda = 0.0;
  double scaled_integral = 0.0;  // e^{-lambda t0} integral_0^{t0} e^{lambda s} mu(s) ds
  std::vector<double> heat_tail;
  std::vector<double> fractional_tail;
  LineFit heat_fit;        // log|psi| against t
  LineFit fractional_fit;  // log|psi| against log t
};

struct HeatContrastReport {
  double fractional_alpha = 0.5;
  std::vector<double> times;
  std::vector<HeatContrastMode> modes;
};

/// Heat (alpha = 1) tails psi_n(t) = e^{-lambda_n (t - t0)} J_n against fractional tails on the same source.
HeatContrastReport heat_contrast_experiment(const EigenSystem& system, const SourceSpec& source,
                                            std::span<const std::size_t> modes, std::span<const double> times,
                                            double fractional_alpha = 0.5);

/// e^{-lambda t0} integral_0^{t0} e^{lambda s} mu(s) ds.
double scaled_heat_integral(double lambda, const PiecewisePolynomial& mu, double t0);

/// mu = 1 on (0, t0/2), -w on (t0/2, t0), with w chosen so the heat integral for lambda vanishes.
PiecewisePolynomial vanishing_heat_source(double lambda, double t0);

}  // namespace fractail
