#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "btmdis/config.hpp"
#include "btmdis/types.hpp"

namespace btm::det {

enum class StepRule { Fixed, Backtracking };
enum class InitRule { Data, Random };

struct DetTrainConfig {
  std::vector<double> lambda_sparsity;  // per-class lambda_i, broadcast if size 1
  double lambda_incoherence = 0.1;
  int max_outer_iters = 150;
  int inner_iters = 3;
  StepRule step_rule = StepRule::Backtracking;
  InitRule init_rule = InitRule::Data;
  double fixed_step = 1e-3;
  double tol_objective = 1e-6;
  int atoms_per_class = 4;
  std::uint64_t seed = 1;

  static DetTrainConfig from_toolkit(const ToolkitConfig& cfg);
  double lambda_for(int c) const;
  void validate() const;
};

/// Binary atom-pair weights: 1 across different class blocks, 0 within.
struct IncoherenceWeights {
  Matrix theta;  // K x K

  static IncoherenceWeights for_bank(const DictionaryBank& bank);
};

struct DetModel {
  DictionaryBank dictionary;
  CoefficientMatrix coefficients;
  std::vector<double> trace;  // per-iteration objective, non-increasing
};

/// Full training objective: reconstruction + group sparsity on blocks whose
/// class is not known-present + incoherence trace penalty.
double objective_value(const WindowedSeries& X, const DictionaryBank& D,
                       const CoefficientMatrix& A, const PartialLabelMatrix& labels,
                       const DetTrainConfig& cfg);

/// Group soft-threshold: max(0, 1 - tau/||v||) * v.
Vector group_prox(const Vector& v, double tau);

/// Gradient of the reconstruction term w.r.t. the stacked coefficients (K x N).
Matrix reconstruction_gradient_coeffs(const WindowedSeries& X, const DictionaryBank& D,
                                      const CoefficientMatrix& A);

/// Gradient of both smooth terms w.r.t. the stacked dictionary (P x K).
Matrix smooth_gradient_dictionary(const WindowedSeries& X, const DictionaryBank& D,
                                  const CoefficientMatrix& A, double lambda_incoherence,
                                  const IncoherenceWeights& theta);

/// Projects one atom onto the feasible set: clip negatives to zero, then
/// rescale to unit norm when above it. The order is fixed; the two
/// operations do not commute.
Vector project_atom(Vector atom);

CoefficientMatrix coefficient_step(const WindowedSeries& X, const DictionaryBank& D,
                                   const CoefficientMatrix& A, const PartialLabelMatrix& labels,
                                   const DetTrainConfig& cfg);

DictionaryBank dictionary_step(const WindowedSeries& X, const DictionaryBank& D,
                               const CoefficientMatrix& A, const DetTrainConfig& cfg,
                               const IncoherenceWeights& theta);

DetModel train(const WindowedSeries& X, const PartialLabelMatrix& labels,
               const std::vector<LoadClassSpec>& specs, const DetTrainConfig& cfg);

void write_det_model(const DetModel& model, const std::filesystem::path& dir,
                     const std::string& meta);

DetModel read_det_model(const std::filesystem::path& dir);

}  // namespace btm::det
