#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "btmdis/config.hpp"
#include "btmdis/rng.hpp"
#include "btmdis/types.hpp"

namespace btm::bayes {

enum class BayesInit { Data, Random };

struct BayesHyper {
  double lambda_d = 1.0;
  BayesInit init = BayesInit::Data;
  double a_eps = 1e-6, b_eps = 1e-6;  // Gamma prior on the noise precision
  double a_s = 1e-6, b_s = 1e-6;      // Gamma prior on slab precisions
  double a_pi = 1.0, b_pi = 1.0;      // Beta prior on atom-usage probabilities
  double a_y = 1.0, b_y = 1.0;        // Beta prior on load-existence probabilities
  int k_init = 8;
  int burn_in = 200;
  int n_collect = 50;
  int thin = 2;
  double prune_threshold = 0.05;
  std::uint64_t seed = 1;

  static BayesHyper from_toolkit(const ToolkitConfig& cfg);
  void validate() const;
};

/// Full latent state of one training chain. z and y are 0/1 stored as
/// double/char; atoms carry no nonnegativity constraint (Gaussian prior).
struct GibbsState {
  std::vector<Matrix> atoms;          // per class: P x K_c
  std::vector<Matrix> z;              // per class: K_c x N
  std::vector<Matrix> s;              // per class: K_c x N
  std::vector<std::vector<char>> y;   // C x N
  double gamma_eps = 1.0;
  std::vector<double> gamma_s;        // per class
  std::vector<Vector> pi_z;           // per class: K_c
  std::vector<double> pi_y;           // per class
  Matrix residual;                    // X - sum_c D_c (z.*s) diag(y)

  Rng global_rng;
  std::vector<Rng> column_rng;        // one stream per training column

  int num_classes() const { return static_cast<int>(atoms.size()); }
  int atoms_in(int c) const { return static_cast<int>(atoms.at(c).cols()); }
};

struct Snapshot {
  std::vector<Matrix> atoms;
  std::vector<double> gamma_s;
  std::vector<Vector> pi_z;
  std::vector<double> pi_y;
  double gamma_eps = 1.0;
};

struct PosteriorSummary {
  std::vector<Snapshot> collected_samples;
  std::vector<Vector> atom_usage;  // mean of z per atom over accumulation sweeps
  std::vector<int> final_k;
  std::vector<LoadClassSpec> class_specs;
  int window_length = 0;
  std::vector<double> loglik_trace;   // per-sweep Gaussian log-likelihood
  double seconds_per_sweep = 0.0;
};

GibbsState init_state(const ValidatedDataset& dataset, const BayesHyper& hyper);

/// log p(z=1|rest) - log p(z=0|rest) for atom k of class c in window j.
double conditional_z_logodds(const GibbsState& state, const ValidatedDataset& dataset,
                             int c, int k, int j);

/// One systematic scan: atoms, s, z, y (unclamped), precisions, probabilities.
void gibbs_sweep(GibbsState& state, const ValidatedDataset& dataset, const BayesHyper& hyper);

/// Drops atoms with usage below the threshold, renumbering z/s/pi_z; keeps
/// at least one atom per class.
void prune_atoms(GibbsState& state, std::vector<Vector>& usage, const BayesHyper& hyper);

PosteriorSummary train_bayes(const ValidatedDataset& dataset, const BayesHyper& hyper);

/// Gaussian data log-likelihood at the current state.
double log_likelihood(const GibbsState& state);

void write_bayes_model(const PosteriorSummary& posterior, const std::filesystem::path& dir,
                       const std::string& meta);

PosteriorSummary read_bayes_model(const std::filesystem::path& dir);

}  // namespace btm::bayes
