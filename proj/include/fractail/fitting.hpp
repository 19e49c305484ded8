#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fractail {

struct LineFit {
  double slope;
  double intercept;
  double r_squared;
  double slope_stderr;
};

/// Ordinary least-squares line y ~ slope x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Slope of log|y| against log t (power-law exponent), points with y == 0 skipped.
LineFit fit_power_law(std::span<const double> t, std::span<const double> y);

/// Slope of log|y| against t (exponential rate), points with y == 0 skipped.
LineFit fit_exponential(std::span<const double> t, std::span<const double> y);

struct LeastSquaresSolution {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;  // sigma_residual * sqrt(diag((X^T X)^{-1}))
  Eigen::MatrixXd pinv;             // maps the (unweighted) data to the coefficients
  Eigen::VectorXd propagation;      // sum_i |pinv_{k,i}|: response to a unit max-norm perturbation of the data
  double condition_number;          // of the column-scaled design matrix
  double residual_rms;              // weighted residual, rms
  double residual_max;              // weighted residual, max abs
};

/// Weighted linear least squares: minimises sum_i (w_i (X beta - y)_i)^2.
/// Columns are scaled to unit norm before the SVD solve; the reported
/// condition number is that of the scaled matrix.
LeastSquaresSolution weighted_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& rhs,
                                            const Eigen::VectorXd& weights);

}  // namespace fractail
