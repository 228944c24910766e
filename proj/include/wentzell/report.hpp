#pragma once

// Output helpers: versioned JSON, CSV number formatting, static SVG charts.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wentzell/types.hpp"

namespace wentzell {

/// Adds schema_version and the command name to a JSON document.
nlohmann::json stamp(nlohmann::json doc, const std::string& command);

/// Shortest round-trip representation of a double ("nan" / "inf" spelled out).
std::string csv_number(double v);

struct PlotSeries {
  std::string name;
  Vec x;
  Vec y;
};

/// Minimal line chart: one polyline per series on shared axes, with tick
/// labels and a legend.  Non-finite points break the polyline.
std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::vector<PlotSeries>& series, int width = 720, int height = 420);

/// Writes to the file at `path`, or to stdout when path is empty or "-".
void write_text(const std::string& path, const std::string& text);

}  // namespace wentzell
