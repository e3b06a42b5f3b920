#pragma once

#include <vector>

#include "btmdis/types.hpp"

namespace btm::metrics {

/// Root mean square error over M windows of length P:
/// sqrt(sum_i ||est_i - truth_i||^2 / (P*M)). est/truth are P x M.
double rmse_c(const Matrix& est, const Matrix& truth);

/// Total Error Rate with per-term clipping at the truth's l1 mass:
/// sum_{i,c} min(||est-truth||_1, ||truth||_1) / sum_{i,c} ||truth||_1.
double ter(const std::vector<Matrix>& est, const std::vector<Matrix>& truth);

/// Uncertainty-weighted RMSE: windows with larger uncertainty u_i count less.
double wrmse_c(const Matrix& est, const Matrix& truth, const std::vector<double>& u_values);

struct MetricReport {
  std::vector<double> rmse;   // per class
  std::vector<double> wrmse;  // per class, empty for deterministic runs
  double ter = 0.0;
};

}  // namespace btm::metrics
