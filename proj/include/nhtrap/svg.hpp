#pragma once
// Minimal log-log SVG plot: data points plus any number of curves.

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace nhtrap::svg {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  // points instead of a polyline
};

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline std::string loglog_plot(const std::string& title, const std::string& x_label,
                               const std::string& y_label, const std::vector<Series>& series) {
  constexpr double W = 640, H = 440, L = 80, Rm = 170, T = 40, B = 60;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0 && s.y[i] > 0)) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmin < xmax)) { xmin = xmin / 2; xmax = xmax * 2; }
  if (!(ymin < ymax)) { ymin = ymin / 2; ymax = ymax * 2; }
  const double lx0 = std::floor(std::log10(xmin)), lx1 = std::ceil(std::log10(xmax));
  const double ly0 = std::floor(std::log10(ymin)), ly1 = std::ceil(std::log10(ymax));
  auto px = [&](double x) { return L + (std::log10(x) - lx0) / (lx1 - lx0) * (W - L - Rm); };
  auto py = [&](double y) { return H - B - (std::log10(y) - ly0) / (ly1 - ly0) * (H - T - B); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
     << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - Rm << "\" height=\""
     << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = lx0; e <= lx1; e += 1.0) {
    for (int m = 1; m < 10 && e + std::log10(m) <= lx1; ++m) {
      const double x = px(m * std::pow(10.0, e));
      os << "<line x1=\"" << num(x) << "\" y1=\"" << H - B << "\" x2=\"" << num(x) << "\" y2=\""
         << H - B - (m == 1 ? 8 : 4) << "\" stroke=\"black\"/>\n";
    }
    os << "<text x=\"" << num(px(std::pow(10.0, e))) << "\" y=\"" << H - B + 18
       << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
  }
  for (double e = ly0; e <= ly1; e += 1.0) {
    for (int m = 1; m < 10 && e + std::log10(m) <= ly1; ++m) {
      const double y = py(m * std::pow(10.0, e));
      os << "<line x1=\"" << L << "\" y1=\"" << num(y) << "\" x2=\"" << L + (m == 1 ? 8 : 4)
         << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
    }
    os << "<text x=\"" << L - 6 << "\" y=\"" << num(py(std::pow(10.0, e)) + 4)
       << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  os << "<text x=\"" << (W - Rm + L) / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">"
     << x_label << "</text>\n";
  os << "<text x=\"18\" y=\"" << (H - B + T) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << (H - B + T) / 2 << ")\">" << y_label << "</text>\n";

  double legend_y = T + 10;
  for (const auto& s : series) {
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size(); ++i)
        os << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
           << "\" r=\"4\" fill=\"" << s.color << "\"/>\n";
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        os << (i ? " " : "") << num(px(s.x[i])) << "," << num(py(s.y[i]));
      os << "\"/>\n";
    }
    os << "<rect x=\"" << W - Rm + 12 << "\" y=\"" << legend_y - 9 << "\" width=\"10\" height=\"10\" fill=\""
       << s.color << "\"/>\n";
    os << "<text x=\"" << W - Rm + 28 << "\" y=\"" << legend_y << "\">" << s.label << "</text>\n";
    legend_y += 18;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace nhtrap::svg
