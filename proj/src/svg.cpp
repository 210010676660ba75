#include "ejet/svg.hpp"

#include <algorithm>

#include "ejet/errors.hpp"
#include "ejet/textio.hpp"

namespace ejet {

std::string line_chart_svg(const std::string& title, const std::string& xlabel,
                           const std::string& ylabel,
                           const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  if (xs.empty() || xs.size() != ys.size())
    throw DataError("line_chart_svg: series must be non-empty and equal length");

  const double width = 640, height = 420;
  const double left = 70, right = 20, top = 40, bottom = 50;
  double xmin = *std::min_element(xs.begin(), xs.end());
  double xmax = *std::max_element(xs.begin(), xs.end());
  double ymin = *std::min_element(ys.begin(), ys.end());
  double ymax = *std::max_element(ys.begin(), ys.end());
  if (xmin == xmax) xmax = xmin + 1.0;
  if (ymin == ymax) ymax = ymin + 1.0;

  auto px = [&](double x) {
    return left + (x - xmin) / (xmax - xmin) * (width - left - right);
  };
  auto py = [&](double y) {
    return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom);
  };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
       "viewBox=\"0 0 640 420\">\n";
  s += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">" + title + "</text>\n";
  // axes
  s += "<line x1=\"" + format_real(left) + "\" y1=\"" + format_real(top) +
       "\" x2=\"" + format_real(left) + "\" y2=\"" +
       format_real(height - bottom) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + format_real(left) + "\" y1=\"" +
       format_real(height - bottom) + "\" x2=\"" + format_real(width - right) +
       "\" y2=\"" + format_real(height - bottom) + "\" stroke=\"black\"/>\n";
  // min/max tick labels
  s += "<text x=\"" + format_real(left) + "\" y=\"" +
       format_real(height - bottom + 18) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
       format_real(xmin) + "</text>\n";
  s += "<text x=\"" + format_real(width - right) + "\" y=\"" +
       format_real(height - bottom + 18) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
       format_real(xmax) + "</text>\n";
  s += "<text x=\"" + format_real(left - 8) + "\" y=\"" +
       format_real(height - bottom + 4) +
       "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
       format_real(ymin) + "</text>\n";
  s += "<text x=\"" + format_real(left - 8) + "\" y=\"" + format_real(top + 4) +
       "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
       format_real(ymax) + "</text>\n";
  // axis labels
  s += "<text x=\"" + format_real((left + width - right) / 2) + "\" y=\"" +
       format_real(height - 12) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
       xlabel + "</text>\n";
  s += "<text x=\"18\" y=\"" + format_real((top + height - bottom) / 2) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
       "transform=\"rotate(-90 18 " +
       format_real((top + height - bottom) / 2) + ")\">" + ylabel + "</text>\n";

  std::string points;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) points += ' ';
    points += format_real(px(xs[i])) + "," + format_real(py(ys[i]));
  }
  s += "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"2\" points=\"" +
       points + "\"/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    s += "<circle cx=\"" + format_real(px(xs[i])) + "\" cy=\"" +
         format_real(py(ys[i])) + "\" r=\"3\" fill=\"#1f6fb2\"/>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace ejet
