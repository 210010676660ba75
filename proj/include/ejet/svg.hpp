#pragma once

#include <string>
#include <vector>

namespace ejet {

// Minimal deterministic line chart: axes, min/max tick labels, one polyline.
std::string line_chart_svg(const std::string& title, const std::string& xlabel,
                           const std::string& ylabel,
                           const std::vector<double>& xs,
                           const std::vector<double>& ys);

}  // namespace ejet
