#include <gtest/gtest.h>

#include <regex>
#include <set>

#include "fixtures.hpp"
#include "ppkg/cluster.hpp"
#include "ppkg/render.hpp"

using namespace ppkg;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Render, EmptyProjectionHasAxes) {
  Projection y;
  y.data = Matrix(0, 2);
  const std::string svg = render_scatter(y, ClusterAssignment{}, {});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(count(svg, "<circle"), 0u);
  EXPECT_EQ(count(svg, "<line"), 2u);
}

TEST(Render, TwoPointsTwoClusters) {
  Matrix x(2, 2);
  x << 0, 0, 1, 1;
  const Projection y = fixtures::projection(x);
  const ClusterAssignment a = make_assignment({0, 1}, ClusterMethod::MBKMeans, {}, y.node_order);
  const std::string svg = render_scatter(y, a, {});
  EXPECT_EQ(count(svg, "<circle"), 2u);
  std::regex fill("<circle[^>]*fill=\"(#[0-9a-f]{6})\"");
  std::set<std::string> fills;
  for (std::sregex_iterator it(svg.begin(), svg.end(), fill), end; it != end; ++it) fills.insert((*it)[1]);
  EXPECT_EQ(fills.size(), 2u);
}

TEST(Render, NoiseGraySmaller) {
  Matrix x(3, 2);
  x << 0, 0, 1, 1, 2, 0;
  const Projection y = fixtures::projection(x);
  const ClusterAssignment a = make_assignment({0, -1, 0}, ClusterMethod::DBSCAN, {}, y.node_order);
  const std::string svg = render_scatter(y, a, {});
  EXPECT_NE(svg.find("r=\"2.5\" fill=\"#9e9e9e\""), std::string::npos);
  EXPECT_EQ(count(svg, "r=\"4\""), 2u);
  EXPECT_NE(svg.find("noise (1)"), std::string::npos);
}

TEST(Render, LegendListsClustersWithTerms) {
  const auto blobs = fixtures::three_blobs_2d();
  const Projection y = fixtures::projection(blobs.x);
  const ClusterAssignment a = make_assignment(blobs.labels, ClusterMethod::MBKMeans, {}, y.node_order);
  const Annotations ann{{0, {"device", "identifier"}}, {1, {"location"}}, {2, {"email", "contact", "name"}}};
  const std::string svg = render_scatter(y, a, ann, "blobs");
  const auto legend = svg.substr(svg.find("<g class=\"legend\">"));
  EXPECT_EQ(count(legend, "<rect"), 3u);
  EXPECT_NE(legend.find("cluster 0 (50): device, identifier"), std::string::npos);
  EXPECT_NE(legend.find("cluster 1 (50): location"), std::string::npos);
  EXPECT_NE(legend.find("cluster 2 (50): email, contact, name"), std::string::npos);
  EXPECT_EQ(count(svg, "<circle"), 150u);
}

TEST(Render, PaletteCyclesAndOutputDeterministic) {
  Matrix x(14, 2);
  std::vector<int> labels;
  for (int i = 0; i < 14; ++i) {
    x.row(i) << i, i % 3;
    labels.push_back(i);
  }
  const Projection y = fixtures::projection(x);
  const ClusterAssignment a = make_assignment(labels, ClusterMethod::Agglomerative, {}, y.node_order);
  const std::string svg = render_scatter(y, a, {});
  EXPECT_EQ(svg, render_scatter(y, a, {}));
  EXPECT_EQ(count(svg, std::string("fill=\"") + std::string(kClusterPalette[0]) + "\""), 4u);  // labels 0 and 12
}

TEST(Render, EscapesText) {
  EXPECT_EQ(xml_escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
}
