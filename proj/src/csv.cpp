#include "btmdis/csv.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace btm::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string format_value(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> index_header(int columns, const std::string& prefix) {
  std::vector<std::string> h;
  h.reserve(columns);
  for (int i = 0; i < columns; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

void write_matrix(const std::filesystem::path& path, const Matrix& values,
                  const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw_error(ErrorCode::Io, "cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (int r = 0; r < values.rows(); ++r) {
    for (int c = 0; c < values.cols(); ++c) {
      if (c) out << ',';
      out << format_value(values(r, c));
    }
    out << '\n';
  }
  if (!out) throw_error(ErrorCode::Io, "write failed for " + path.string());
}

Matrix read_matrix(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  if (lines.empty()) throw_error(ErrorCode::Format, path.string() + ": empty file");
  const auto header = split_line(lines[0]);
  const int cols = static_cast<int>(header.size());
  const int rows = static_cast<int>(lines.size()) - 1;
  Matrix out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    auto fields = split_line(lines[r + 1]);
    if (static_cast<int>(fields.size()) != cols) {
      std::ostringstream os;
      os << path.string() << ": row " << r << " has " << fields.size()
         << " fields, expected " << cols;
      throw_error(ErrorCode::Format, os.str());
    }
    for (int c = 0; c < cols; ++c) {
      const std::string& f = fields[c];
      char* end = nullptr;
      double v = std::strtod(f.c_str(), &end);
      if (end == f.c_str() || *end != '\0') {
        std::ostringstream os;
        os << path.string() << ": bad number '" << f << "' at row " << r
           << ", column " << c;
        throw_error(ErrorCode::Format, os.str());
      }
      out(r, c) = v;
    }
  }
  return out;
}

void write_labels(const std::filesystem::path& path, const PartialLabelMatrix& labels) {
  std::ofstream out(path);
  if (!out) throw_error(ErrorCode::Io, "cannot write " + path.string());
  const int c_count = labels.num_classes();
  for (int c = 0; c < c_count; ++c) {
    if (c) out << ',';
    out << "load_" << c;
  }
  out << '\n';
  // one row per window
  for (int j = 0; j < labels.num_windows(); ++j) {
    for (int c = 0; c < c_count; ++c) {
      if (c) out << ',';
      switch (labels.at(c, j)) {
        case Label::Absent: out << '0'; break;
        case Label::Present: out << '1'; break;
        case Label::Unknown: out << '?'; break;
      }
    }
    out << '\n';
  }
  if (!out) throw_error(ErrorCode::Io, "write failed for " + path.string());
}

PartialLabelMatrix read_labels(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  if (lines.empty()) throw_error(ErrorCode::Format, path.string() + ": empty file");
  const int c_count = static_cast<int>(split_line(lines[0]).size());
  const int n = static_cast<int>(lines.size()) - 1;
  PartialLabelMatrix labels;
  labels.entries.assign(c_count, std::vector<Label>(n, Label::Unknown));
  for (int j = 0; j < n; ++j) {
    auto fields = split_line(lines[j + 1]);
    if (static_cast<int>(fields.size()) != c_count) {
      std::ostringstream os;
      os << path.string() << ": row " << j << " has " << fields.size()
         << " fields, expected " << c_count;
      throw_error(ErrorCode::Format, os.str());
    }
    for (int c = 0; c < c_count; ++c) {
      const std::string& f = fields[c];
      if (f == "0") {
        labels.entries[c][j] = Label::Absent;
      } else if (f == "1") {
        labels.entries[c][j] = Label::Present;
      } else if (f == "?") {
        labels.entries[c][j] = Label::Unknown;
      } else {
        std::ostringstream os;
        os << path.string() << ": invalid label '" << f << "' at row " << j
           << ", column " << c << " (alphabet is 0/1/?)";
        throw_error(ErrorCode::Format, os.str());
      }
    }
  }
  return labels;
}

}  // namespace btm::csv
