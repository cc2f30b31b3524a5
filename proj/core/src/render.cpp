#include "ppkg/render.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>

namespace ppkg {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kPlotLeft = 60.0;
constexpr double kPlotTop = 40.0;
constexpr double kPlotSize = 400.0;
constexpr double kLegendLeft = 490.0;

struct Bounds {
  double lo;
  double hi;
};

Bounds padded(const Matrix& data, Eigen::Index col) {
  if (data.rows() == 0 || col >= data.cols()) return {-1.0, 1.0};
  double lo = data.col(col).minCoeff();
  double hi = data.col(col).maxCoeff();
  if (hi - lo <= 0.0) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

std::string xml_escape(std::string_view s) {
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

std::string render_scatter(const Projection& y, const ClusterAssignment& a, const Annotations& annotations,
                           std::string_view title) {
  const Bounds bx = padded(y.data, 0);
  const Bounds by = padded(y.data, 1);
  auto sx = [&](double v) { return kPlotLeft + (v - bx.lo) / (bx.hi - bx.lo) * kPlotSize; };
  auto sy = [&](double v) { return kPlotTop + kPlotSize - (v - by.lo) / (by.hi - by.lo) * kPlotSize; };

  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n",
      kWidth, kHeight, kWidth, kHeight);
  out += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!title.empty()) {
    out += fmt::format("<text x=\"{:.1f}\" y=\"22\" font-size=\"14\">{}</text>\n", kPlotLeft, xml_escape(title));
  }

  // Axes.
  const double bottom = kPlotTop + kPlotSize;
  out += "<g class=\"axes\" stroke=\"#333333\" stroke-width=\"1\">\n";
  out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\"/>\n", kPlotLeft, bottom,
                     kPlotLeft + kPlotSize, bottom);
  out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\"/>\n", kPlotLeft, kPlotTop,
                     kPlotLeft, bottom);
  out += "</g>\n";
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"start\">{:.3g}</text>\n", kPlotLeft,
                     bottom + 16.0, bx.lo);
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n", kPlotLeft + kPlotSize,
                     bottom + 16.0, bx.hi);
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n", kPlotLeft - 4.0, bottom,
                     by.lo);
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n", kPlotLeft - 4.0,
                     kPlotTop + 10.0, by.hi);

  // Points.
  std::map<int, std::size_t> sizes;
  std::size_t noise = 0;
  out += "<g class=\"points\">\n";
  for (Eigen::Index i = 0; i < y.data.rows(); ++i) {
    const int label = static_cast<std::size_t>(i) < a.labels.size() ? a.labels[static_cast<std::size_t>(i)] : kNoise;
    const double px = sx(y.data(i, 0));
    const double py = y.data.cols() > 1 ? sy(y.data(i, 1)) : sy(0.0);
    const std::string id = static_cast<std::size_t>(i) < y.node_order.size() ? y.node_order[static_cast<std::size_t>(i)] : "";
    if (label < 0) {
      ++noise;
      out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"><title>{}</title></circle>\n", px,
                         py, kNoiseColor, xml_escape(id));
    } else {
      ++sizes[label];
      out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"{}\"><title>{}</title></circle>\n", px, py,
                         kClusterPalette[static_cast<std::size_t>(label) % kClusterPalette.size()], xml_escape(id));
    }
  }
  out += "</g>\n";

  // Legend.
  out += "<g class=\"legend\">\n";
  double ly = kPlotTop;
  for (const auto& [label, count] : sizes) {
    std::string terms;
    if (auto it = annotations.find(label); it != annotations.end()) {
      for (std::size_t t = 0; t < it->second.size() && t < 3; ++t) {
        if (t > 0) terms += ", ";
        terms += it->second[t];
      }
    }
    out += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n", kLegendLeft, ly,
                       kClusterPalette[static_cast<std::size_t>(label) % kClusterPalette.size()]);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">cluster {} ({}){}{}</text>\n", kLegendLeft + 16.0, ly + 9.0,
                       label, count, terms.empty() ? "" : ": ", xml_escape(terms));
    ly += 18.0;
  }
  if (noise > 0) {
    out += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n", kLegendLeft, ly,
                       kNoiseColor);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">noise ({})</text>\n", kLegendLeft + 16.0, ly + 9.0, noise);
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace ppkg
