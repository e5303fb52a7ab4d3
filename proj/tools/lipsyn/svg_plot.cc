#include "svg_plot.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace lipsyn::cli {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const LinePlot& plot, int width, int height) {
  const double left = 70, right = 20, top = 30, bottom = 40;
  const double pw = width - left - right, ph = height - top - bottom;
  const Eigen::Index n = plot.values.size();

  double lo = n ? plot.values.minCoeff() : 0.0, hi = n ? plot.values.maxCoeff() : 1.0;
  if (plot.reference) {
    lo = std::min(lo, *plot.reference);
    hi = std::max(hi, *plot.reference);
  }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const double kmax = std::max<double>(1, n - 1);
  auto px = [&](double k) { return left + pw * k / kmax; };
  auto py = [&](double v) { return top + ph * (hi - v) / (hi - lo); };

  std::ostringstream os;
  os << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      width, height);
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << fmt::format("<text x=\"{}\" y=\"20\" text-anchor=\"middle\">{}</text>\n", width / 2,
                    escape(plot.title));
  os << fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>\n",
      left, top, pw, ph);
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    const double k = kmax * i / 4.0;
    os << fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n",
                      left - 6, py(v) + 4, v);
    os << fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{:.0f}</text>\n",
                      px(k), height - bottom + 16, k);
  }
  os << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">k</text>\n",
                    left + pw / 2, height - 6);
  os << fmt::format(
      "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>\n",
      top + ph / 2, top + ph / 2, escape(plot.y_label));

  if (plot.reference) {
    os << fmt::format(
        "<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"#d62728\" "
        "stroke-dasharray=\"6 4\"/>\n",
        left, py(*plot.reference), left + pw, py(*plot.reference));
  }

  os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\" points=\"";
  const Eigen::Index buckets = static_cast<Eigen::Index>(pw);
  if (n <= 2 * buckets) {
    for (Eigen::Index k = 0; k < n; ++k) os << fmt::format("{:.2f},{:.2f} ", px(k), py(plot.values(k)));
  } else {
    for (Eigen::Index b = 0; b < buckets; ++b) {
      const Eigen::Index a = b * n / buckets, e = (b + 1) * n / buckets;
      Eigen::Index kmin = a, kmaxi = a;
      for (Eigen::Index k = a; k < e; ++k) {
        if (plot.values(k) < plot.values(kmin)) kmin = k;
        if (plot.values(k) > plot.values(kmaxi)) kmaxi = k;
      }
      const Eigen::Index first = std::min(kmin, kmaxi), second = std::max(kmin, kmaxi);
      os << fmt::format("{:.2f},{:.2f} ", px(first), py(plot.values(first)));
      if (second != first) os << fmt::format("{:.2f},{:.2f} ", px(second), py(plot.values(second)));
    }
  }
  os << "\"/>\n</svg>\n";
  return os.str();
}

void write_svg(const LinePlot& plot, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << render_svg(plot);
}

}  // namespace lipsyn::cli
