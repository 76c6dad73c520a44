#pragma once

#include <string>
#include <vector>

namespace facestat {

struct PlotSeries {
  std::string label;
  std::vector<double> values;
  /// Optional per-value marker (bar plots hatch flagged bars); empty = none.
  std::vector<bool> flagged;
};

enum class LegendPosition { Right, None };

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::vector<std::string> ticks;
  std::string y_label;
  std::vector<PlotSeries> series;
  double width = 900;
  double height = 500;
  LegendPosition legend = LegendPosition::Right;
};

/// Series colors; the first three follow class order fake, real, synthetic.
const std::vector<std::string>& plot_palette();

/// One polyline per series over categorical ticks.
std::string render_line_plot(const PlotSpec& spec);

/// Grouped bars from a zero baseline; flagged values get a hatch overlay.
/// Throws NegativeValue for values below zero.
std::string render_bar_plot(const PlotSpec& spec);

}  // namespace facestat
