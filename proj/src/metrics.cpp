#include "btmdis/metrics.hpp"

#include <cmath>

#include "btmdis/errors.hpp"

namespace btm::metrics {

double rmse_c(const Matrix& est, const Matrix& truth) {
  if (est.rows() != truth.rows() || est.cols() != truth.cols()) {
    throw_error(ErrorCode::DimensionMismatch, "rmse_c: shape mismatch");
  }
  const double pm = static_cast<double>(est.rows()) * static_cast<double>(est.cols());
  return std::sqrt((est - truth).squaredNorm() / pm);
}

double ter(const std::vector<Matrix>& est, const std::vector<Matrix>& truth) {
  if (est.size() != truth.size()) {
    throw_error(ErrorCode::DimensionMismatch, "ter: class count mismatch");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t c = 0; c < est.size(); ++c) {
    if (est[c].rows() != truth[c].rows() || est[c].cols() != truth[c].cols()) {
      throw_error(ErrorCode::DimensionMismatch,
                  "ter: shape mismatch in class " + std::to_string(c));
    }
    for (int j = 0; j < est[c].cols(); ++j) {
      double err = (est[c].col(j) - truth[c].col(j)).lpNorm<1>();
      double mass = truth[c].col(j).lpNorm<1>();
      num += std::min(err, mass);
      den += mass;
    }
  }
  if (den <= 0.0) throw_error(ErrorCode::ZeroTruth, "ter: total truth mass is zero");
  return num / den;
}

double wrmse_c(const Matrix& est, const Matrix& truth, const std::vector<double>& u_values) {
  if (est.rows() != truth.rows() || est.cols() != truth.cols()) {
    throw_error(ErrorCode::DimensionMismatch, "wrmse_c: shape mismatch");
  }
  if (static_cast<int>(u_values.size()) != est.cols()) {
    throw_error(ErrorCode::DimensionMismatch, "wrmse_c: uncertainty count mismatch");
  }
  double num = 0.0;
  double inv_sum = 0.0;
  for (int j = 0; j < est.cols(); ++j) {
    if (!(u_values[j] > 0.0)) {
      throw_error(ErrorCode::NonPositiveUncertainty,
                  "wrmse_c: non-positive uncertainty at window " + std::to_string(j));
    }
    num += (est.col(j) - truth.col(j)).squaredNorm() / u_values[j];
    inv_sum += 1.0 / u_values[j];
  }
  return std::sqrt(num / (static_cast<double>(est.rows()) * inv_sum));
}

}  // namespace btm::metrics
