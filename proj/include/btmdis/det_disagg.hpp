#pragma once

#include <vector>

#include "btmdis/config.hpp"
#include "btmdis/types.hpp"

namespace btm::det {

/// Submatrix of trained coefficient columns (block-structured like A).
struct RepresentativeSet {
  std::vector<Matrix> blocks;        // blocks[c]: K_c x q
  std::vector<int> source_indices;   // training column of each representative

  int count() const { return static_cast<int>(source_indices.size()); }
  Matrix stacked() const;
};

struct DetTestConfig {
  double mu = 0.05;
  int q = 12;
  double support_threshold = 1e-3;
  int max_iters = 2000;
  double tol = 1e-9;

  static DetTestConfig from_toolkit(const ToolkitConfig& cfg);
  void validate() const;
};

/// Groups training columns by per-class support pattern, ranks patterns by
/// frequency, and returns medoid columns of the top patterns.
RepresentativeSet select_representatives(const CoefficientMatrix& A_hat,
                                         const DetTestConfig& cfg);

/// Minimizes ||x - D A~ w||_2 + mu ||w||_1 (un-squared fidelity, smoothed
/// with eps = 1e-8) by proximal gradient with backtracking.
Vector solve_weights(const Vector& x_test, const DictionaryBank& D_hat,
                     const RepresentativeSet& reps, const DetTestConfig& cfg);

/// Per-load reconstruction in truth convention: x^c = sign_c * D_c A~_c w.
DisaggregationEstimate reconstruct_loads(const DictionaryBank& D_hat,
                                         const RepresentativeSet& reps, const Vector& w);

/// Objective of the weight problem, exposed for oracle tests.
double weight_objective(const Vector& x_test, const Matrix& basis, const Vector& w,
                        double mu);

}  // namespace btm::det
