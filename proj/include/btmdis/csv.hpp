#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "btmdis/types.hpp"

namespace btm::csv {

/// Writes a numeric matrix as CSV with a header row. Values are printed
/// with round-trip precision so read(write(m)) == m to 1e-12 relative.
void write_matrix(const std::filesystem::path& path, const Matrix& values,
                  const std::vector<std::string>& header);

Matrix read_matrix(const std::filesystem::path& path);

/// Header names "c0,c1,...".
std::vector<std::string> index_header(int columns, const std::string& prefix);

void write_labels(const std::filesystem::path& path, const PartialLabelMatrix& labels);

PartialLabelMatrix read_labels(const std::filesystem::path& path);

std::string format_value(double v);

}  // namespace btm::csv
