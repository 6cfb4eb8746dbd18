#include "arbsim/svg.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "arbsim/errors.hpp"

namespace arbsim {

namespace {

constexpr double kWidth = 480.0, kHeight = 320.0;
constexpr double kLeft = 60.0, kRight = 20.0, kTop = 30.0, kBottom = 45.0;

const char* series_color(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  return colors[i % 4];
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

}  // namespace

std::string render_svg_chart(const CurveChart& chart) {
  double x_lo = 1e300, x_hi = -1e300, y_lo = 0.0, y_hi = -1e300;
  for (const auto& s : chart.series) {
    for (double x : s.x) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
    }
    for (double y : s.y) y_hi = std::max(y_hi, y);
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;
  y_hi *= 1.05;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"16\" text-anchor=\"middle\">" << chart.metric
      << " vs p_out</text>\n";
  // axes
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">p_out</text>\n";
  svg << "<text x=\"14\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << kTop + plot_h / 2 << ")\">"
      << chart.y_label << "</text>\n";
  // x ticks at the swept values
  std::set<double> ticks;
  for (const auto& s : chart.series) ticks.insert(s.x.begin(), s.x.end());
  for (double t : ticks) {
    svg << "<line x1=\"" << px(t) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << px(t)
        << "\" y2=\"" << kTop + plot_h + 4 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(t) << "\" y=\"" << kTop + plot_h + 16
        << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
  }
  // y ticks
  for (int i = 0; i <= 4; ++i) {
    const double v = y_lo + (y_hi - y_lo) * i / 4;
    svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << py(v) << "\" x2=\"" << kLeft
        << "\" y2=\"" << py(v) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(v) + 4
        << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
  }
  // series
  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const auto& s = chart.series[i];
    svg << "<polyline fill=\"none\" stroke=\"" << series_color(i)
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      svg << fmt(px(s.x[k])) << "," << fmt(py(s.y[k]));
      if (k + 1 < s.x.size()) svg << " ";
    }
    svg << "\"/>\n";
    for (std::size_t k = 0; k < s.x.size(); ++k)
      svg << "<circle cx=\"" << fmt(px(s.x[k])) << "\" cy=\"" << fmt(py(s.y[k]))
          << "\" r=\"3\" fill=\"" << series_color(i) << "\"/>\n";
    svg << "<text x=\"" << kLeft + plot_w - 4 << "\" y=\"" << kTop + 14 + 14 * i
        << "\" text-anchor=\"end\" fill=\"" << series_color(i) << "\">" << s.method
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::string> emit_curves(std::span<const MetricsSummary> summaries,
                                     const std::string& out_dir) {
  if (summaries.empty()) throw InsufficientData("no summaries to plot");
  std::set<double> pouts;
  for (const auto& s : summaries) pouts.insert(s.p_out);
  if (pouts.size() < 2)
    throw InsufficientData("robustness curves need at least two p_out values");

  struct MetricDef {
    const char* name;
    const char* label;
    double (*get)(const MetricsSummary&);
  };
  static const MetricDef metrics[] = {
      {"sr_safe", "safe success rate", [](const MetricsSummary& s) { return s.sr_safe; }},
      {"timeout", "timeout rate", [](const MetricsSummary& s) { return s.timeout; }},
      {"unsafe", "unsafe-proximity rate", [](const MetricsSummary& s) { return s.unsafe; }},
      {"runtime", "mean runtime (ms)",
       [](const MetricsSummary& s) { return s.runtime_mean_ms; }},
  };

  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;
  for (const auto& m : metrics) {
    std::map<std::string, CurveSeries> by_method;
    for (const auto& s : summaries) {
      CurveSeries& cs = by_method[s.method];
      cs.method = s.method;
      cs.x.push_back(s.p_out);
      cs.y.push_back(m.get(s));
    }
    CurveChart chart;
    chart.metric = m.name;
    chart.y_label = m.label;
    for (auto& [_, cs] : by_method) {
      // sort the polyline by p_out
      std::vector<std::size_t> order(cs.x.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return cs.x[a] < cs.x[b]; });
      CurveSeries sorted;
      sorted.method = cs.method;
      for (std::size_t i : order) {
        sorted.x.push_back(cs.x[i]);
        sorted.y.push_back(cs.y[i]);
      }
      chart.series.push_back(std::move(sorted));
    }

    const std::string csv_path = out_dir + "/curves_" + m.name + ".csv";
    std::ofstream csv(csv_path);
    csv << "method,p_out," << m.name << "\n";
    csv.precision(10);
    for (const auto& s : chart.series)
      for (std::size_t k = 0; k < s.x.size(); ++k)
        csv << s.method << "," << s.x[k] << "," << s.y[k] << "\n";
    written.push_back(csv_path);

    const std::string svg_path = out_dir + "/fig_robustness_" + m.name + ".svg";
    std::ofstream svg(svg_path);
    svg << render_svg_chart(chart);
    written.push_back(svg_path);
  }
  return written;
}

}  // namespace arbsim
