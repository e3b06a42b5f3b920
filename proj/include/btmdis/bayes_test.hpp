#pragma once

#include <cstdint>
#include <vector>

#include "btmdis/bayes_train.hpp"
#include "btmdis/config.hpp"
#include "btmdis/types.hpp"

namespace btm::bayes {

/// Final state of one Monte-Carlo test chain (the Psi tuple).
struct TestPosteriorSample {
  int snapshot_index = 0;
  std::vector<Vector> z_hat;  // per class, 0/1
  std::vector<Vector> s_hat;
  std::vector<char> y_hat;    // per class
  double gamma_eps_hat = 1.0;
};

struct McConfig {
  int samples = 50;       // L
  int inner_sweeps = 20;
  std::uint64_t seed = 1;

  static McConfig from_toolkit(const ToolkitConfig& cfg);
  void validate() const;
};

/// Per-class model contribution f(Psi) = D_c (z.*s) y.
Vector sample_contribution(const PosteriorSummary& posterior,
                           const TestPosteriorSample& sample, int c);

/// Runs L independent test chains conditioned on x_test. Test labels are
/// always Unknown; y_hat is sampled, never clamped.
std::vector<TestPosteriorSample> test_infer(const Vector& x_test,
                                            const PosteriorSummary& posterior,
                                            const BayesHyper& hyper, const McConfig& mc);

Vector predictive_mean(const PosteriorSummary& posterior,
                       const std::vector<TestPosteriorSample>& samples, int c);

Matrix predictive_covariance(const PosteriorSummary& posterior,
                             const std::vector<TestPosteriorSample>& samples, int c,
                             int c_total);

/// U_c per covariance (sum of singular values; equals the trace for PSD
/// inputs, asserted to 1e-8 relative) and their total.
std::pair<std::vector<double>, double> uncertainty_indices(
    const std::vector<Matrix>& covariances);

std::pair<Vector, Vector> confidence_band(const Vector& mean, const Matrix& covariance,
                                          double k);

/// Full per-window uncertain estimate in truth convention (sign applied to
/// the predictive mean; bands follow the signed mean).
UncertainEstimate disaggregate_window(const Vector& x_test, const PosteriorSummary& posterior,
                                      const BayesHyper& hyper, const McConfig& mc,
                                      double band_k);

}  // namespace btm::bayes
