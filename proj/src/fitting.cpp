#include "fractail/fitting.hpp"

#include <cmath>
#include <limits>

#include "fractail/error.hpp"

namespace fractail {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::InvalidArgument,
          "fit_line: need matching samples, at least two");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorCode::InvalidArgument, "fit_line: abscissae are all equal");
  LineFit fit{};
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.slope_stderr = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  return fit;
}

namespace {

LineFit fit_log_abs(std::span<const double> t, std::span<const double> y, bool log_abscissa) {
  require(t.size() == y.size(), ErrorCode::InvalidArgument, "fit: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (y[i] == 0.0 || !std::isfinite(y[i])) continue;
    xs.push_back(log_abscissa ? std::log(t[i]) : t[i]);
    ys.push_back(std::log(std::abs(y[i])));
  }
  return fit_line(xs, ys);
}

}  // namespace

LineFit fit_power_law(std::span<const double> t, std::span<const double> y) {
  return fit_log_abs(t, y, true);
}

LineFit fit_exponential(std::span<const double> t, std::span<const double> y) {
  return fit_log_abs(t, y, false);
}

LeastSquaresSolution weighted_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& rhs,
                                            const Eigen::VectorXd& weights) {
  const auto rows = design.rows();
  const auto cols = design.cols();
  require(rows == rhs.size() && rows == weights.size(), ErrorCode::InvalidArgument,
          "weighted_least_squares: dimension mismatch");
  require(rows >= cols && cols >= 1, ErrorCode::InvalidArgument,
          "weighted_least_squares: need at least as many samples as unknowns");

  Eigen::MatrixXd a = weights.asDiagonal() * design;
  const Eigen::VectorXd b = weights.asDiagonal() * rhs;
  Eigen::VectorXd scale(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double nrm = a.col(j).norm();
    scale(j) = nrm > 0.0 ? 1.0 / nrm : 1.0;
    a.col(j) *= scale(j);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  LeastSquaresSolution out;
  out.condition_number = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                 : std::numeric_limits<double>::infinity();
  const Eigen::VectorXd scaled = svd.solve(b);
  out.coefficients = scale.asDiagonal() * scaled;

  const Eigen::VectorXd resid = a * scaled - b;
  out.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(rows));
  out.residual_max = resid.cwiseAbs().maxCoeff();

  // pinv of the weighted, unscaled system: scale * V S^{-1} U^T * diag(w)
  Eigen::VectorXd inv_sv(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) inv_sv(i) = sv(i) > 0.0 ? 1.0 / sv(i) : 0.0;
  out.pinv = scale.asDiagonal() * svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose() *
             weights.asDiagonal();
  out.propagation = out.pinv.cwiseAbs().rowwise().sum();

  const double dof = rows > cols ? static_cast<double>(rows - cols) : 1.0;
  const double sigma = std::sqrt(resid.squaredNorm() / dof);
  Eigen::VectorXd se(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      const double q = svd.matrixV()(j, i) * inv_sv(i);
      v += q * q;
    }
    se(j) = sigma * std::sqrt(v) * scale(j);
  }
  out.standard_errors = se;
  return out;
}

}  // namespace fractail
