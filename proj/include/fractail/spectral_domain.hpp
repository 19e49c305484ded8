#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fractail {

enum class Side { Left, Right };

struct SturmLiouvilleProblem;

// Eigen-decomposition of a 1-D elliptic operator -(a v')' - c v on (0, L)
// with Dirichlet ends. Modes are 0-based: mode n carries lambda_{n+1}.
// Eigenfunctions are stored as samples on `grid()` and are orthonormal with
// respect to `weights()`. Immutable once built.
class EigenSystem {
 public:
  enum class Kind { AnalyticLaplacian, Discretized };

  int dimension() const { return 1; }
  Kind kind() const { return kind_; }
  double length() const { return length_; }
  std::size_t mode_count() const { return eigenvalues_.size(); }
  std::span<const double> eigenvalues() const { return eigenvalues_; }
  std::span<const int> multiplicities() const { return multiplicities_; }
  std::span<const double> grid() const { return grid_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> mode(std::size_t n) const;

  /// phi_n(x), analytic for the Laplacian, linear interpolation otherwise.
  double eigenfunction(std::size_t n, double x) const;

  /// Conormal derivative a dphi_n/dnu at an endpoint, outward normal.
  double boundary_flux(std::size_t n, Side side) const;

  /// Weighted inner product of two sampled functions on the grid.
  double inner(std::span<const double> f, std::span<const double> g) const;

  friend EigenSystem laplacian_1d_dirichlet(double length, std::size_t modes, std::size_t grid_points);
  friend EigenSystem discretize_sturm_liouville(const SturmLiouvilleProblem& problem,
                                                std::size_t interior_points, std::size_t modes);

 private:
  Kind kind_ = Kind::AnalyticLaplacian;
  double length_ = 1.0;
  std::vector<double> eigenvalues_;
  std::vector<int> multiplicities_;
  std::vector<double> grid_;
  std::vector<double> weights_;
  std::vector<double> modes_;  // row-major: mode n occupies [n * grid, (n+1) * grid)
  double a_left_ = 1.0;
  double a_right_ = 1.0;
};

inline constexpr std::size_t kDefaultGridPoints = 4097;
inline constexpr std::size_t kDefaultModes = 64;

/// lambda_n = (n pi / L)^2, phi_n = sqrt(2/L) sin(n pi x / L), sampled on a
/// uniform grid with Simpson weights.
EigenSystem laplacian_1d_dirichlet(double length, std::size_t modes = kDefaultModes,
                                   std::size_t grid_points = kDefaultGridPoints);

struct SturmLiouvilleProblem {
  std::function<double(double)> a;  // a(x) >= kappa_min > 0
  std::function<double(double)> c;  // c(x) <= 0
  double length = 1.0;
  double kappa_min = 1e-12;
};

/// Second-order finite differences on `interior_points` nodes; the lowest
/// `modes` eigenpairs by Sturm bisection and inverse iteration.
/// Throws InvalidCoefficients if the sign conditions fail on the grid.
EigenSystem discretize_sturm_liouville(const SturmLiouvilleProblem& problem,
                                       std::size_t interior_points, std::size_t modes);

/// Eigenvalues and eigenvectors of a symmetric tridiagonal matrix.
struct TridiagonalEigen {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // Euclidean-normalised
};

TridiagonalEigen tridiagonal_lowest_eigenpairs(std::span<const double> diag,
                                               std::span<const double> offdiag, std::size_t count);

// ---------------------------------------------------------------------------

/// f through its modal coordinates (f, phi_n), plus the declared regularity
/// sigma with sum lambda_n^{2 sigma} f_n^2 < infinity.
struct SpatialProfile {
  std::vector<double> modal_coefficients;
  double regularity_sigma = 0.0;
};

/// (f, phi_n) for one mode.
double project(std::span<const double> f_samples, const EigenSystem& system, std::size_t n);

/// All retained modal coordinates of f as a profile.
SpatialProfile project_all(std::span<const double> f_samples, const EigenSystem& system,
                           double regularity_sigma = 0.0);

/// sum_n f_n phi_n sampled on the grid.
std::vector<double> reconstruct(const SpatialProfile& profile, const EigenSystem& system);

struct NormWithTail {
  double value;          // over the retained modes
  double tail_estimate;  // estimated contribution of the omitted modes to value^2
};

/// sqrt(sum_n lambda_n^{2 sigma} f_n^2).
NormWithTail fractional_power_norm(const SpatialProfile& profile, const EigenSystem& system,
                                   double sigma);

// ---------------------------------------------------------------------------

struct ObservationSpec {
  enum class Kind { Interior, Flux };

  Kind kind = Kind::Interior;
  double region_begin = 0.0;
  double region_end = 1.0;
  std::function<double(double)> test_function;  // interior: v on the region
  double weight_left = 0.0;                     // flux: v at x = 0
  double weight_right = 0.0;                    // flux: v at x = L

  static ObservationSpec interior(double begin, double end, std::function<double(double)> v);
  static ObservationSpec flux(double weight_left, double weight_right);
};

/// a_n = (P_n f, v)_{L^2(omega)} or the flux pairing, per retained mode.
/// Throws RegionMismatch when the region leaves the domain.
std::vector<double> pairing_coefficients(const EigenSystem& system, const SpatialProfile& profile,
                                         const ObservationSpec& spec);

/// sum_n c_n a_n.
double observe(std::span<const double> modal_values, const EigenSystem& system,
               const SpatialProfile& profile, const ObservationSpec& spec);

/// Same, with the pairings already computed.
double observe(std::span<const double> modal_values, std::span<const double> pairings);

// ---------------------------------------------------------------------------

struct SummabilityReport {
  std::vector<double> partial_sums;  // of |a_n / lambda_n|
  double tail_exponent;              // fitted p in |a_n / lambda_n| ~ n^p over the last half
  double tail_estimate;              // extrapolated sum beyond the retained modes
  double last_half_growth;           // relative growth of the partial sums over the last half
  bool divergent;
};

SummabilityReport summability_report(std::span<const double> pairings, const EigenSystem& system);

/// min_n lambda_n / n^{2/d}.
double weyl_growth_check(const EigenSystem& system, int dimension);

}  // namespace fractail
