#include "btmdis/dataset.hpp"

#include <fstream>
#include <sstream>

#include "btmdis/csv.hpp"

namespace btm {

namespace fs = std::filesystem;

namespace {

void write_classes(const fs::path& path, const std::vector<LoadClassSpec>& specs) {
  std::ofstream out(path);
  if (!out) throw_error(ErrorCode::Io, "cannot write " + path.string());
  out << "name,sign,initial_atoms\n";
  for (const auto& s : specs) {
    out << s.name << ',' << s.sign << ',' << s.initial_atoms << '\n';
  }
}

std::vector<LoadClassSpec> read_classes(const fs::path& path, int c_count) {
  std::vector<LoadClassSpec> specs;
  if (fs::exists(path)) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      LoadClassSpec s;
      std::string field;
      std::getline(ss, s.name, ',');
      std::getline(ss, field, ',');
      s.sign = std::stoi(field);
      std::getline(ss, field, ',');
      s.initial_atoms = std::stoi(field);
      specs.push_back(std::move(s));
    }
    if (static_cast<int>(specs.size()) != c_count) {
      throw_error(ErrorCode::Format, path.string() + ": class count mismatch with labels.csv");
    }
    return specs;
  }
  for (int c = 0; c < c_count; ++c) {
    LoadClassSpec s;
    s.name = (c == c_count - 1) ? "solar" : "load_" + std::to_string(c + 1);
    s.sign = (c == c_count - 1) ? -1 : +1;
    s.initial_atoms = 1;
    specs.push_back(std::move(s));
  }
  return specs;
}

}  // namespace

void write_dataset(const ValidatedDataset& data, const std::optional<GroundTruth>& truth,
                   const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw_error(ErrorCode::Io, "cannot create " + directory.string());

  // windows.csv stores one window per row
  csv::write_matrix(directory / "windows.csv", data.windows.values.transpose(),
                    csv::index_header(data.windows.window_length(), "t"));
  csv::write_labels(directory / "labels.csv", data.labels);
  write_classes(directory / "classes.csv", data.specs);

  if (truth) {
    fs::create_directories(directory / "truth", ec);
    if (ec) throw_error(ErrorCode::Io, "cannot create " + (directory / "truth").string());
    for (std::size_t c = 0; c < truth->per_class.size(); ++c) {
      csv::write_matrix(directory / "truth" / ("load_" + std::to_string(c) + ".csv"),
                        truth->per_class[c].transpose(),
                        csv::index_header(static_cast<int>(truth->per_class[c].rows()), "t"));
    }
  }
}

DatasetOnDisk read_dataset(const fs::path& directory) {
  if (!fs::exists(directory / "windows.csv")) {
    throw_error(ErrorCode::MissingData, "no windows.csv in " + directory.string());
  }
  WindowedSeries windows;
  windows.values = csv::read_matrix(directory / "windows.csv").transpose();
  PartialLabelMatrix labels = csv::read_labels(directory / "labels.csv");
  auto specs = read_classes(directory / "classes.csv", labels.num_classes());

  // a fully unlabeled matrix is a test set; partially labeled data must not
  // contain fully-unknown columns
  bool any_known = false;
  for (const auto& row : labels.entries) {
    for (Label l : row) {
      if (l != Label::Unknown) {
        any_known = true;
        break;
      }
    }
    if (any_known) break;
  }
  DatasetOnDisk out{validate_dataset(std::move(windows), std::move(labels), std::move(specs),
                                     /*require_labels=*/any_known),
                    std::nullopt};

  const fs::path truth_dir = directory / "truth";
  if (fs::exists(truth_dir)) {
    GroundTruth truth;
    for (int c = 0; c < static_cast<int>(out.data.specs.size()); ++c) {
      fs::path f = truth_dir / ("load_" + std::to_string(c) + ".csv");
      if (!fs::exists(f)) {
        throw_error(ErrorCode::MissingData, "missing truth file " + f.string());
      }
      truth.per_class.push_back(csv::read_matrix(f).transpose());
    }
    out.truth = std::move(truth);
  }
  return out;
}

}  // namespace btm
