#include "btmdis/svg_report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "btmdis/errors.hpp"

namespace btm::report {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 360.0;
constexpr double kMargin = 40.0;

struct Scale {
  double lo, hi;
  int n;

  double x(int i) const {
    return kMargin + (kWidth - 2 * kMargin) * (n > 1 ? static_cast<double>(i) / (n - 1) : 0.5);
  }
  double y(double v) const {
    double t = (hi > lo) ? (v - lo) / (hi - lo) : 0.5;
    return kHeight - kMargin - (kHeight - 2 * kMargin) * t;
  }
};

std::string polyline(const Vector& v, const Scale& sc, const std::string& color,
                     const std::string& dash) {
  std::ostringstream os;
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
  if (!dash.empty()) os << " stroke-dasharray=\"" << dash << "\"";
  os << " points=\"";
  for (int i = 0; i < v.size(); ++i) {
    if (i) os << ' ';
    os << sc.x(i) << ',' << sc.y(v[i]);
  }
  os << "\"/>\n";
  return os.str();
}

}  // namespace

void write_plot(const SeriesPlot& plot, const std::filesystem::path& path) {
  const int n = static_cast<int>(plot.truth.size());
  double lo = std::min(plot.truth.minCoeff(), plot.estimate.minCoeff());
  double hi = std::max(plot.truth.maxCoeff(), plot.estimate.maxCoeff());
  if (plot.band_lo && plot.band_hi) {
    lo = std::min(lo, plot.band_lo->minCoeff());
    hi = std::max(hi, plot.band_hi->maxCoeff());
  }
  if (hi <= lo) hi = lo + 1.0;
  const Scale sc{lo, hi, n};

  std::ofstream out(path);
  if (!out) throw_error(ErrorCode::Io, "cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << plot.title << "</text>\n";

  if (plot.band_lo && plot.band_hi) {
    out << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
    for (int i = 0; i < n; ++i) out << sc.x(i) << ',' << sc.y((*plot.band_lo)[i]) << ' ';
    for (int i = n - 1; i >= 0; --i) out << sc.x(i) << ',' << sc.y((*plot.band_hi)[i]) << ' ';
    out << "\"/>\n";
  }
  out << polyline(plot.truth, sc, "#333333", "");
  out << polyline(plot.estimate, sc, "#d62728", "5,3");

  // axes
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
      << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << kMargin - 5 << "\" y=\"" << sc.y(lo)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << lo
      << "</text>\n";
  out << "<text x=\"" << kMargin - 5 << "\" y=\"" << sc.y(hi)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << hi
      << "</text>\n";
  out << "</svg>\n";
}

}  // namespace btm::report
