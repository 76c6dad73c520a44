#include "facestat/plot.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "facestat/error.hpp"

namespace facestat {

const std::vector<std::string>& plot_palette() {
  static const std::vector<std::string> palette = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
      "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return palette;
}

namespace {

constexpr double kLeft = 80;
constexpr double kTop = 48;
constexpr double kBottom = 64;
constexpr double kLegendWidth = 150;
constexpr double kRightPad = 20;

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) { return fmt::format("{:.2f}", v); }

const std::string& color_of(std::size_t i) {
  const auto& p = plot_palette();
  return p[i % p.size()];
}

struct Frame {
  double x0, y0, x1, y1;  // plot area, y0 = top
  double lo, hi;          // data range on the y axis

  double w() const { return x1 - x0; }
  double tick_x(std::size_t i, std::size_t n) const {
    return x0 + (static_cast<double>(i) + 0.5) * w() / static_cast<double>(n);
  }
  double map_y(double v) const { return y1 - (v - lo) / (hi - lo) * (y1 - y0); }
};

void validate(const PlotSpec& spec, std::size_t min_ticks) {
  if (spec.series.empty()) throw Error(ErrorCode::EmptySpec, "plot has no series");
  if (spec.ticks.size() < min_ticks)
    throw Error(ErrorCode::EmptySpec,
                fmt::format("plot needs at least {} tick(s), got {}", min_ticks, spec.ticks.size()));
  if (spec.width < 100 || spec.height < 100)
    throw Error(ErrorCode::Domain, "plot dimensions must be at least 100x100");
  for (const auto& s : spec.series) {
    if (s.values.size() != spec.ticks.size())
      throw Error(ErrorCode::Domain,
                  fmt::format("series '{}' has {} values for {} ticks", s.label, s.values.size(),
                              spec.ticks.size()));
    if (!s.flagged.empty() && s.flagged.size() != s.values.size())
      throw Error(ErrorCode::Domain, "flag count must match value count");
    for (double v : s.values)
      if (!std::isfinite(v)) throw Error(ErrorCode::Domain, "plot values must be finite");
  }
}

Frame make_frame(const PlotSpec& spec, double lo, double hi) {
  const double right = spec.legend == LegendPosition::Right ? kLegendWidth : kRightPad;
  return {kLeft, kTop, spec.width - right, spec.height - kBottom, lo, hi};
}

std::string header(const PlotSpec& spec) {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"#ffffff\"/>\n"
      "<text x=\"{2}\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      "font-size=\"16\">{3}</text>\n",
      num(spec.width), num(spec.height), num(spec.width / 2), escape(spec.title));
}

std::string axes(const PlotSpec& spec, const Frame& f) {
  std::string out;
  out += fmt::format(
      "<rect class=\"frame\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
      "stroke=\"#000000\"/>\n",
      num(f.x0), num(f.y0), num(f.w()), num(f.y1 - f.y0));
  constexpr int kYTicks = 5;
  for (int i = 0; i <= kYTicks; ++i) {
    const double v = f.lo + (f.hi - f.lo) * i / kYTicks;
    const double y = f.map_y(v);
    out += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#dddddd\"/>\n"
        "<text x=\"{3}\" y=\"{4}\" text-anchor=\"end\" font-family=\"sans-serif\" "
        "font-size=\"11\">{5:.4f}</text>\n",
        num(f.x0), num(y), num(f.x1), num(f.x0 - 6), num(y + 4), v);
  }
  for (std::size_t i = 0; i < spec.ticks.size(); ++i) {
    const double x = f.tick_x(i, spec.ticks.size());
    out += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000000\"/>\n"
        "<text x=\"{0}\" y=\"{3}\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"11\">{4}</text>\n",
        num(x), num(f.y1), num(f.y1 + 5), num(f.y1 + 18), escape(spec.ticks[i]));
  }
  out += fmt::format(
      "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      "font-size=\"13\">{}</text>\n",
      num((f.x0 + f.x1) / 2), num(spec.height - 18), escape(spec.x_label));
  const double cy = (f.y0 + f.y1) / 2;
  out += fmt::format(
      "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      "font-size=\"13\" transform=\"rotate(-90 18 {0})\">{1}</text>\n",
      num(cy), escape(spec.y_label));
  return out;
}

template <typename Swatch>
std::string legend(const PlotSpec& spec, const Frame& f, Swatch swatch) {
  if (spec.legend != LegendPosition::Right) return {};
  std::string out = "<g class=\"legend\">\n";
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const double x = f.x1 + 14;
    const double y = f.y0 + 10 + 20 * static_cast<double>(i);
    out += swatch(x, y, color_of(i));
    out += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
        num(x + 26), num(y + 4), escape(spec.series[i].label));
  }
  out += "</g>\n";
  return out;
}

}  // namespace

std::string render_line_plot(const PlotSpec& spec) {
  validate(spec, 2);
  double lo = spec.series.front().values.front();
  double hi = lo;
  for (const auto& s : spec.series)
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  // Padding keeps every point strictly inside the frame.
  const double pad = hi > lo ? 0.08 * (hi - lo) : std::max(1.0, 0.1 * std::abs(lo));
  const Frame f = make_frame(spec, lo - pad, hi + pad);

  std::string out = header(spec) + axes(spec, f);
  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const auto& s = spec.series[si];
    std::string points;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (i) points += ' ';
      points += num(f.tick_x(i, s.values.size())) + "," + num(f.map_y(s.values[i]));
    }
    out += fmt::format(
        "<polyline class=\"series\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\" "
        "points=\"{}\"/>\n",
        color_of(si), points);
    for (std::size_t i = 0; i < s.values.size(); ++i)
      out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>\n",
                         num(f.tick_x(i, s.values.size())), num(f.map_y(s.values[i])),
                         color_of(si));
  }
  out += legend(spec, f, [](double x, double y, const std::string& color) {
    return fmt::format(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
        num(x), num(y), num(x + 20), num(y), color);
  });
  out += "</svg>\n";
  return out;
}

std::string render_bar_plot(const PlotSpec& spec) {
  validate(spec, 1);
  double hi = 0.0;
  for (const auto& s : spec.series)
    for (double v : s.values) {
      if (v < 0.0)
        throw Error(ErrorCode::NegativeValue,
                    fmt::format("bar value {} in series '{}' is negative", v, s.label));
      hi = std::max(hi, v);
    }
  const Frame f = make_frame(spec, 0.0, hi > 0.0 ? hi * 1.08 : 1.0);

  std::string out = header(spec);
  out +=
      "<defs><pattern id=\"capped-hatch\" patternUnits=\"userSpaceOnUse\" width=\"6\" "
      "height=\"6\"><path d=\"M0,6 L6,0\" stroke=\"#000000\" stroke-width=\"1\"/></pattern>"
      "</defs>\n";
  out += axes(spec, f);

  const std::size_t n_ticks = spec.ticks.size();
  const std::size_t n_series = spec.series.size();
  const double slot = f.w() / static_cast<double>(n_ticks);
  const double group = 0.8 * slot;
  const double bar_w = group / static_cast<double>(n_series);
  for (std::size_t t = 0; t < n_ticks; ++t) {
    const double gx = f.tick_x(t, n_ticks) - group / 2;
    for (std::size_t si = 0; si < n_series; ++si) {
      const auto& s = spec.series[si];
      const double x = gx + bar_w * static_cast<double>(si);
      const double top = f.map_y(s.values[t]);
      const double h = f.y1 - top;
      out += fmt::format(
          "<rect class=\"bar\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
          num(x), num(top), num(bar_w), num(h), color_of(si));
      if (!s.flagged.empty() && s.flagged[t]) {
        out += fmt::format(
            "<rect class=\"capped\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" "
            "fill=\"url(#capped-hatch)\"/>\n",
            num(x), num(top), num(bar_w), num(h));
      }
    }
  }
  out += legend(spec, f, [](double x, double y, const std::string& color) {
    return fmt::format(
        "<rect class=\"legend-swatch\" x=\"{}\" y=\"{}\" width=\"20\" height=\"10\" "
        "fill=\"{}\"/>\n",
        num(x), num(y - 5), color);
  });
  out += "</svg>\n";
  return out;
}

}  // namespace facestat
