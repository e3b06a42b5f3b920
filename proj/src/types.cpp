#include "btmdis/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace btm {

namespace {

constexpr double kAtomNormSlack = 1e-9;
constexpr double kAtomNonnegSlack = 1e-12;
constexpr double kCoeffSignSlack = 1e-9;

}  // namespace

void DataShape::validate() const {
  if (window_length < 1 || train_windows < 1 || num_classes < 2) {
    std::ostringstream os;
    os << "invalid data shape: P=" << window_length << " N=" << train_windows
       << " C=" << num_classes << " (need P>=1, N>=1, C>=2)";
    throw_error(ErrorCode::InvalidConfig, os.str());
  }
}

int DictionaryBank::total_atoms() const {
  int k = 0;
  for (const auto& b : blocks) k += static_cast<int>(b.cols());
  return k;
}

Matrix DictionaryBank::stacked() const {
  Matrix out(window_length(), total_atoms());
  int col = 0;
  for (const auto& b : blocks) {
    out.middleCols(col, static_cast<int>(b.cols())) = b;
    col += static_cast<int>(b.cols());
  }
  return out;
}

void DictionaryBank::check_invariants() const {
  for (int c = 0; c < num_classes(); ++c) {
    const Matrix& b = blocks[c];
    for (int k = 0; k < b.cols(); ++k) {
      double nrm = b.col(k).norm();
      if (nrm > 1.0 + kAtomNormSlack) {
        std::ostringstream os;
        os << "atom norm " << nrm << " exceeds 1 (class " << c << ", atom " << k << ")";
        throw_error(ErrorCode::InvalidConfig, os.str());
      }
      if (b.col(k).minCoeff() < -kAtomNonnegSlack) {
        std::ostringstream os;
        os << "negative atom entry in class " << c << ", atom " << k;
        throw_error(ErrorCode::InvalidConfig, os.str());
      }
    }
  }
}

int CoefficientMatrix::total_atoms() const {
  int k = 0;
  for (const auto& b : blocks) k += static_cast<int>(b.rows());
  return k;
}

Matrix CoefficientMatrix::stacked() const {
  Matrix out(total_atoms(), num_windows());
  int row = 0;
  for (const auto& b : blocks) {
    out.middleRows(row, static_cast<int>(b.rows())) = b;
    row += static_cast<int>(b.rows());
  }
  return out;
}

void CoefficientMatrix::check_sign_feasibility(const std::vector<LoadClassSpec>& specs) const {
  for (int c = 0; c < num_classes(); ++c) {
    double worst = (specs.at(c).sign * blocks[c]).minCoeff();
    if (worst < -kCoeffSignSlack) {
      std::ostringstream os;
      os << "sign-infeasible coefficient block for class " << c << " (min " << worst << ")";
      throw_error(ErrorCode::InvalidConfig, os.str());
    }
  }
}

DataShape ValidatedDataset::shape() const {
  DataShape s;
  s.window_length = windows.window_length();
  s.train_windows = windows.num_windows();
  s.num_classes = static_cast<int>(specs.size());
  return s;
}

ValidatedDataset validate_dataset(WindowedSeries windows, PartialLabelMatrix labels,
                                  std::vector<LoadClassSpec> specs, bool require_labels) {
  const int c_count = static_cast<int>(specs.size());
  if (c_count < 2) {
    throw_error(ErrorCode::DimensionMismatch,
                "need at least 2 load classes, got " + std::to_string(c_count));
  }
  if (labels.num_classes() != c_count) {
    std::ostringstream os;
    os << "label matrix has " << labels.num_classes() << " classes, specs have " << c_count;
    throw_error(ErrorCode::DimensionMismatch, os.str());
  }
  if (labels.num_windows() != windows.num_windows()) {
    std::ostringstream os;
    os << "label matrix has " << labels.num_windows() << " windows, series has "
       << windows.num_windows();
    throw_error(ErrorCode::DimensionMismatch, os.str());
  }
  for (int c = 0; c < c_count; ++c) {
    if (static_cast<int>(labels.entries[c].size()) != labels.num_windows()) {
      throw_error(ErrorCode::DimensionMismatch,
                  "ragged label matrix at row " + std::to_string(c));
    }
    if (specs[c].sign != 1 && specs[c].sign != -1) {
      throw_error(ErrorCode::InvalidConfig, "class sign must be +1 or -1");
    }
    if (specs[c].initial_atoms < 1) {
      throw_error(ErrorCode::InvalidConfig, "initial_atoms must be >= 1");
    }
  }
  for (int j = 0; j < windows.num_windows(); ++j) {
    for (int i = 0; i < windows.window_length(); ++i) {
      if (!std::isfinite(windows.values(i, j))) {
        std::ostringstream os;
        os << "non-finite window value at (" << i << "," << j << ")";
        throw_error(ErrorCode::NonFiniteValue, os.str());
      }
    }
  }
  for (int j = 0; require_labels && j < labels.num_windows(); ++j) {
    bool any_known = false;
    for (int c = 0; c < c_count; ++c) {
      if (labels.at(c, j) != Label::Unknown) {
        any_known = true;
        break;
      }
    }
    if (!any_known) {
      throw_error(ErrorCode::FullyUnknownColumn,
                  "label column " + std::to_string(j) + " is fully unknown");
    }
  }
  return ValidatedDataset{std::move(windows), std::move(labels), std::move(specs)};
}

std::pair<std::vector<CellIndex>, std::vector<CellIndex>> known_mask(
    const PartialLabelMatrix& labels) {
  std::vector<CellIndex> known;
  std::vector<CellIndex> unknown;
  for (int c = 0; c < labels.num_classes(); ++c) {
    for (int j = 0; j < labels.num_windows(); ++j) {
      if (labels.at(c, j) == Label::Unknown) {
        unknown.push_back({c, j});
      } else {
        known.push_back({c, j});
      }
    }
  }
  return {std::move(known), std::move(unknown)};
}

std::vector<int> select_init_windows(const Matrix& windows, const PartialLabelMatrix& labels,
                                     int load_class, int count) {
  std::vector<int> labeled;
  for (int j = 0; j < labels.num_windows(); ++j) {
    if (labels.at(load_class, j) == Label::Present) labeled.push_back(j);
  }
  if (labeled.empty() || count <= 0) return {};

  // Pure columns of one recurring profile have many near-duplicates among the
  // labeled set, while a column contaminated by other classes is isolated: its
  // extra content rarely repeats. Rank columns by the distance to their 3rd
  // nearest labeled neighbour and keep the denser half.
  const std::size_t n_lab = labeled.size();
  std::vector<std::pair<double, int>> scored;
  scored.reserve(n_lab);
  std::vector<double> dists(n_lab);
  for (std::size_t i = 0; i < n_lab; ++i) {
    for (std::size_t j = 0; j < n_lab; ++j) {
      dists[j] = (windows.col(labeled[i]) - windows.col(labeled[j])).norm();
    }
    const std::size_t k = std::min<std::size_t>(3, n_lab - 1);
    auto kth = dists.begin() + static_cast<std::ptrdiff_t>(k);
    std::nth_element(dists.begin(), kth, dists.end());
    scored.emplace_back(*kth, labeled[i]);
  }
  std::sort(scored.begin(), scored.end());
  const std::size_t kept_count = (scored.size() + 1) / 2;
  std::vector<int> kept;
  for (std::size_t i = 0; i < kept_count; ++i) kept.push_back(scored[i].second);

  std::vector<int> chosen{kept.front()};
  std::vector<char> used(kept.size(), 0);
  used[0] = 1;
  while (static_cast<int>(chosen.size()) < count) {
    int best = -1;
    double best_dist = -1.0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (used[i]) continue;
      double d = std::numeric_limits<double>::infinity();
      for (int j : chosen) d = std::min(d, (windows.col(kept[i]) - windows.col(j)).norm());
      if (d > best_dist) {
        best_dist = d;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) {
      chosen.push_back(kept[chosen.size() % kept.size()]);
    } else {
      used[static_cast<std::size_t>(best)] = 1;
      chosen.push_back(kept[static_cast<std::size_t>(best)]);
    }
  }

  // Farthest-point picks sit at cluster edges; refine them k-medoids style so
  // each pick becomes the most central member of its neighbourhood.
  const std::size_t n_groups = std::min(chosen.size(), kept.size());
  for (int round = 0; round < 3; ++round) {
    std::vector<std::vector<int>> groups(n_groups);
    for (int j : kept) {
      std::size_t nearest = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t g = 0; g < n_groups; ++g) {
        double d = (windows.col(j) - windows.col(chosen[g])).norm();
        if (d < best_d) {
          best_d = d;
          nearest = g;
        }
      }
      groups[nearest].push_back(j);
    }
    bool changed = false;
    for (std::size_t g = 0; g < n_groups; ++g) {
      if (groups[g].size() < 2) continue;
      int medoid = groups[g].front();
      double best_total = std::numeric_limits<double>::infinity();
      for (int cand : groups[g]) {
        double total = 0.0;
        for (int j : groups[g]) total += (windows.col(cand) - windows.col(j)).norm();
        if (total < best_total) {
          best_total = total;
          medoid = cand;
        }
      }
      if (chosen[g] != medoid) {
        chosen[g] = medoid;
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (std::size_t i = n_groups; i < chosen.size(); ++i) chosen[i] = chosen[i % n_groups];
  return chosen;
}

}  // namespace btm
