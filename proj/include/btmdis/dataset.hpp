#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "btmdis/types.hpp"

namespace btm {

/// Ground-truth per-load windows in truth convention: entrywise >= 0 for
/// every class, solar included (the generator applies the sign only when
/// aggregating).
struct GroundTruth {
  std::vector<Matrix> per_class;  // per_class[c]: P x N
};

struct DatasetOnDisk {
  ValidatedDataset data;
  std::optional<GroundTruth> truth;
};

/// Writes windows.csv (N rows x P cols), labels.csv (N rows x C cols) and,
/// when truth is given, truth/load_<c>.csv.
void write_dataset(const ValidatedDataset& data, const std::optional<GroundTruth>& truth,
                   const std::filesystem::path& directory);

/// Reads a dataset directory; truth/ is optional. Class specs are taken
/// from classes.csv when present, otherwise all classes default to sign +1
/// except the last (treated as solar, sign -1).
DatasetOnDisk read_dataset(const std::filesystem::path& directory);

}  // namespace btm
