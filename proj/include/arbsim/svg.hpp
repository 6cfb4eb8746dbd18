#pragma once

#include <span>
#include <string>
#include <vector>

#include "arbsim/metrics.hpp"

namespace arbsim {

// one polyline per method over the p_out sweep
struct CurveSeries {
  std::string method;
  std::vector<double> x;  // p_out
  std::vector<double> y;  // metric value
};

struct CurveChart {
  std::string metric;  // "sr_safe", "timeout", "unsafe", "runtime_mean_ms"
  std::string y_label;
  std::vector<CurveSeries> series;
};

// self-contained line chart; fixed 480x320 viewport with margins
std::string render_svg_chart(const CurveChart& chart);

// Robustness-curve outputs: per metric a CSV (method, p_out, value) and an SVG
// polyline chart. Requires summaries spanning at least two p_out values;
// throws InsufficientData otherwise. Returns the written file paths.
std::vector<std::string> emit_curves(std::span<const MetricsSummary> summaries,
                                     const std::string& out_dir);

}  // namespace arbsim
