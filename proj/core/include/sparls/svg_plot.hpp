// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace sparls::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Static SVG line chart; deterministic output (no timestamps, fixed palette).
// Non-finite samples are skipped, breaking the polyline at that point.
void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series);

}  // namespace sparls::plot
