#pragma once

#include <cstdint>
#include <vector>

#include "btmdis/config.hpp"
#include "btmdis/dataset.hpp"
#include "btmdis/types.hpp"

namespace btm {

/// Parameters of one solar daily bell.
struct SolarTemplate {
  double peak_kw = 25.0;
  double pos_frac = 0.5;    // peak position, fraction of the window
  double width_frac = 0.12; // standard deviation, fraction of the window
};

struct GeneratorConfig {
  DataShape shape;            // P, N, M, C
  double gamma = 0.7;         // label purity
  std::uint64_t seed = 1;
  double noise_sigma = 1.0;   // kW
  double load1_level = 30.0;
  double load2_level = 40.0;
  std::vector<SolarTemplate> solar_templates;  // training bells
  double test_presence_prob = 0.65;

  static GeneratorConfig from_toolkit(const ToolkitConfig& cfg);
  void validate() const;

  /// Out-of-distribution bell for Cases 4-5: peak shifted by >= 25% of the
  /// window and width scaled x1.5 relative to every training template.
  SolarTemplate ood_solar() const;
};

struct SyntheticData {
  ValidatedDataset train;
  GroundTruth train_truth;
  ValidatedDataset test;
  GroundTruth test_truth;
};

struct CaseSpec {
  int case_id = 1;  // 1..5
  std::uint64_t base_seed = 0;
};

/// One case-study window: aggregate signal plus per-class ground truth in
/// truth convention (solar nonnegative).
struct CaseWindow {
  Vector aggregate;
  std::vector<Vector> truth;
};

/// Per-class prototype pattern, exposed for tests.
Vector industrial_pattern(int load_class, int variant, int window_length, double level);
Vector solar_pattern(int window_length, const SolarTemplate& tpl);

SyntheticData generate_dataset(const GeneratorConfig& config);

CaseWindow make_case(const GeneratorConfig& config, const SyntheticData& data,
                     const CaseSpec& spec, int base_test_window);

}  // namespace btm
