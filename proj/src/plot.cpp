#include "uiadapt/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "uiadapt/error.hpp"

namespace uiadapt {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  double x(double episode) const {
    return kLeft + (kWidth - kLeft - kRight) * (x_max > 0 ? episode / x_max : 0.0);
  }
  double y(double reward) const {
    const double t = (reward - y_min) / (y_max - y_min);
    return kHeight - kBottom - (kHeight - kTop - kBottom) * t;
  }
};

}  // namespace

std::string render_learning_curve_svg(const std::vector<CurveSeries>& series) {
  if (series.empty()) fail(ErrorKind::EmptyInput, "no learning curves to plot");
  std::size_t longest = 0;
  for (const CurveSeries& s : series) {
    if (s.mean.empty()) fail(ErrorKind::EmptyInput, "curve '" + s.label + "' has no points");
    if (!s.sd.empty() && s.sd.size() != s.mean.size()) {
      fail(ErrorKind::Range, "curve '" + s.label + "': sd length differs from mean length");
    }
    longest = std::max(longest, s.mean.size());
  }

  // Rewards live in [0, 1]; the axis always spans it.
  Frame f;
  f.x_max = static_cast<double>(longest > 1 ? longest - 1 : 1);

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes, ticks and labels.
  const double x0 = f.x(0), x1 = f.x(f.x_max), y0 = f.y(0.0), y1 = f.y(1.0);
  os << "<g stroke=\"black\" stroke-width=\"1\">\n"
     << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\""
     << num(y0) << "\"/>\n"
     << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0) << "\" y2=\""
     << num(y1) << "\"/>\n"
     << "</g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = i / 5.0;
    os << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(f.y(v) + 4)
       << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double e = f.x_max * i / 5.0;
    char label[32];
    std::snprintf(label, sizeof label, "%.0f", e);
    os << "<text x=\"" << num(f.x(e)) << "\" y=\"" << num(y0 + 16)
       << "\" text-anchor=\"middle\">" << label << "</text>\n";
  }
  os << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 12)
     << "\" text-anchor=\"middle\" font-size=\"13\">episode</text>\n"
     << "<text x=\"18\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
     << "transform=\"rotate(-90 18 " << num((y0 + y1) / 2) << ")\">mean reward</text>\n"
     << "</g>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const CurveSeries& s = series[k];
    const char* color = kPalette[k % kPalette.size()];
    const bool banded =
        std::any_of(s.sd.begin(), s.sd.end(), [](double v) { return v > 0.0; });
    if (banded) {
      os << "<polygon class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" "
         << "points=\"";
      for (std::size_t i = 0; i < s.mean.size(); ++i) {
        os << num(f.x(static_cast<double>(i))) << ','
           << num(f.y(std::clamp(s.mean[i] + s.sd[i], 0.0, 1.0))) << ' ';
      }
      for (std::size_t i = s.mean.size(); i-- > 0;) {
        os << num(f.x(static_cast<double>(i))) << ','
           << num(f.y(std::clamp(s.mean[i] - s.sd[i], 0.0, 1.0)));
        if (i > 0) os << ' ';
      }
      os << "\"/>\n";
    }
    os << "<polyline class=\"curve\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.mean.size(); ++i) {
      if (i > 0) os << ' ';
      os << num(f.x(static_cast<double>(i))) << ',' << num(f.y(std::clamp(s.mean[i], 0.0, 1.0)));
    }
    os << "\"/>\n";
  }

  os << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double ly = kTop + 10 + 20.0 * static_cast<double>(k);
    const double lx = kWidth - kRight + 15;
    os << "<g class=\"legend-entry\"><rect x=\"" << num(lx) << "\" y=\"" << num(ly - 8)
       << "\" width=\"14\" height=\"10\" fill=\"" << kPalette[k % kPalette.size()]
       << "\"/><text x=\"" << num(lx + 20) << "\" y=\"" << num(ly + 1) << "\">"
       << escape_xml(series[k].label) << "</text></g>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

std::vector<CurveSeries> curve_series(const ExperimentResult& result) {
  ComparisonReport report = summarize({result});
  return curve_series(report);
}

std::vector<CurveSeries> curve_series(const ComparisonReport& report) {
  std::vector<CurveSeries> out;
  for (const AgentSummary& a : report.agents) out.push_back({a.name, a.mean_curve, a.sd_curve});
  return out;
}

void render_learning_curve(const ExperimentResult& result, const std::filesystem::path& path) {
  write_text_file(path, render_learning_curve_svg(curve_series(result)));
}

void render_learning_curve(const ComparisonReport& report, const std::filesystem::path& path) {
  write_text_file(path, render_learning_curve_svg(curve_series(report)));
}

}  // namespace uiadapt
