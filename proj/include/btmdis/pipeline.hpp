#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "btmdis/bayes_test.hpp"
#include "btmdis/bayes_train.hpp"
#include "btmdis/config.hpp"
#include "btmdis/dataset.hpp"
#include "btmdis/det_disagg.hpp"
#include "btmdis/det_train.hpp"
#include "btmdis/synth.hpp"

namespace btm::pipeline {

void run_gen(const ToolkitConfig& cfg, const std::filesystem::path& out_dir);

void run_train_det(const ToolkitConfig& cfg, const std::filesystem::path& data_dir,
                   const std::filesystem::path& model_dir);

void run_train_bayes(const ToolkitConfig& cfg, const std::filesystem::path& data_dir,
                     const std::filesystem::path& model_dir);

void run_disagg_det(const ToolkitConfig& cfg, const std::filesystem::path& model_dir,
                    const std::filesystem::path& data_dir,
                    const std::filesystem::path& out_dir);

void run_disagg_bayes(const ToolkitConfig& cfg, const std::filesystem::path& model_dir,
                      const std::filesystem::path& data_dir,
                      const std::filesystem::path& out_dir);

void run_eval(const ToolkitConfig& cfg, const std::filesystem::path& est_dir,
              const std::filesystem::path& data_dir, const std::filesystem::path& out_csv);

void run_report(const ToolkitConfig& cfg, const std::filesystem::path& data_dir,
                const std::filesystem::path& est_dir, const std::filesystem::path& out_dir,
                int max_windows);

/// Per-class estimates for all test windows, truth convention (P x M each).
std::vector<Matrix> det_disagg_all(const det::DetModel& model, const Matrix& test_windows,
                                   const det::DetTestConfig& cfg);

struct BayesDisaggAll {
  std::vector<Matrix> mean;      // per class: P x M
  std::vector<Matrix> band_lo;   // per class: P x M
  std::vector<Matrix> band_hi;   // per class: P x M
  Matrix u;                      // M x C
  Vector u_all;                  // M
};

BayesDisaggAll bayes_disagg_all(const bayes::PosteriorSummary& posterior,
                                const bayes::BayesHyper& hyper, const bayes::McConfig& mc,
                                const Matrix& test_windows, double band_k);

struct BenchResult {
  int seeds = 0;
  // seed-averaged
  std::vector<double> rmse_det, rmse_bayes, rmse_base;
  std::vector<double> wrmse_bayes;
  double ter_det = 0.0, ter_bayes = 0.0, ter_base = 0.0;
  // per seed
  std::vector<double> ter_det_seed, ter_bayes_seed, ter_base_seed;
  std::vector<std::array<double, 5>> u_all_cases;  // per seed, Cases 1-5
  double bayes_seconds_per_sweep = 0.0;
};

/// Full experimental protocol: generate, train both engines (deterministic
/// hyperparameters scanned over a small grid), disaggregate the test set,
/// evaluate Cases 1-5, emit metrics.csv / cases.csv / bench_meta.txt.
BenchResult run_bench(const ToolkitConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace btm::pipeline
