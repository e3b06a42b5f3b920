#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "btmdis/errors.hpp"

namespace btm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Ternary load-existence label.
enum class Label : std::int8_t { Absent = 0, Present = 1, Unknown = 2 };

/// Problem dimensions shared across the toolkit.
struct DataShape {
  int window_length = 0;   // P, samples per window
  int train_windows = 0;   // N
  int test_windows = 0;    // M
  int num_classes = 0;     // C

  void validate() const;
};

/// P x N matrix of aggregate power windows (kW), one window per column.
struct WindowedSeries {
  Matrix values;  // P rows, N columns
  std::vector<std::int64_t> timestamps;  // optional, one per window

  int window_length() const { return static_cast<int>(values.rows()); }
  int num_windows() const { return static_cast<int>(values.cols()); }
};

/// C x N ternary label matrix. Unknown is a first-class value.
struct PartialLabelMatrix {
  std::vector<std::vector<Label>> entries;  // entries[c][j]

  int num_classes() const { return static_cast<int>(entries.size()); }
  int num_windows() const {
    return entries.empty() ? 0 : static_cast<int>(entries.front().size());
  }
  Label at(int c, int j) const { return entries.at(c).at(j); }
};

struct LoadClassSpec {
  std::string name;
  int sign = +1;          // +1 consumer, -1 generator (solar)
  int initial_atoms = 1;  // K_c at initialization
};

/// Per-class blocks of nonnegative unit-capped atoms, D = [D_1,...,D_C].
struct DictionaryBank {
  std::vector<Matrix> blocks;  // blocks[c]: P x K_c
  std::vector<LoadClassSpec> class_specs;

  int num_classes() const { return static_cast<int>(blocks.size()); }
  int window_length() const {
    return blocks.empty() ? 0 : static_cast<int>(blocks.front().rows());
  }
  int atoms(int c) const { return static_cast<int>(blocks.at(c).cols()); }
  int total_atoms() const;

  /// Horizontal concatenation of all class blocks (P x K).
  Matrix stacked() const;

  void check_invariants() const;
};

/// Block-structured coefficients, A = [A_1;...;A_C].
struct CoefficientMatrix {
  std::vector<Matrix> blocks;  // blocks[c]: K_c x N

  int num_classes() const { return static_cast<int>(blocks.size()); }
  int num_windows() const {
    return blocks.empty() ? 0 : static_cast<int>(blocks.front().cols());
  }
  int atoms(int c) const { return static_cast<int>(blocks.at(c).rows()); }
  int total_atoms() const;

  /// Vertical concatenation of all class blocks (K x N).
  Matrix stacked() const;

  void check_sign_feasibility(const std::vector<LoadClassSpec>& specs) const;
};

enum class MethodTag { Deterministic, Bayesian };

/// Per-load point estimates in truth convention (solar reported as
/// nonnegative generation magnitude).
struct DisaggregationEstimate {
  std::vector<Vector> per_load;  // C vectors of length P
  MethodTag method_tag = MethodTag::Deterministic;
};

/// Per-load predictive mean/covariance with uncertainty indices and bands.
struct UncertainEstimate {
  std::vector<Vector> mean;        // C x P
  std::vector<Matrix> covariance;  // C x (P x P)
  std::vector<double> u_per_load;  // C
  double u_all = 0.0;
  std::vector<Vector> band_lo;
  std::vector<Vector> band_hi;
};

/// Index pair (class, window) into a label matrix.
struct CellIndex {
  int load_class = 0;
  int window = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// A dataset whose cross-type invariants have been checked.
struct ValidatedDataset {
  WindowedSeries windows;
  PartialLabelMatrix labels;
  std::vector<LoadClassSpec> specs;

  DataShape shape() const;
};

/// Checks all type invariants and dimension agreement; throws on violation.
/// Unlabeled test sets pass require_labels=false to admit fully-unknown
/// label columns.
ValidatedDataset validate_dataset(WindowedSeries windows, PartialLabelMatrix labels,
                                  std::vector<LoadClassSpec> specs,
                                  bool require_labels = true);

/// Splits label cells into (known, unknown) index sets: (Omega, Omega-bar).
std::pair<std::vector<CellIndex>, std::vector<CellIndex>> known_mask(
    const PartialLabelMatrix& labels);

/// Picks `count` training columns labeled Present for `load_class`. Keeps the
/// half of the label group with the smallest 3rd-nearest-neighbour distance
/// (recurring pure profiles cluster; contaminated columns are isolated), then
/// spreads the picks with farthest-point seeding refined to group medoids.
/// Columns repeat when the group is small; the result is empty when the class
/// has no Present labels.
std::vector<int> select_init_windows(const Matrix& windows, const PartialLabelMatrix& labels,
                                     int load_class, int count);

}  // namespace btm
