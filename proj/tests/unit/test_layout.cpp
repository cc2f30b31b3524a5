#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ppkg/error.hpp"
#include "ppkg/layout.hpp"

using namespace ppkg;

namespace {

PolicyGraph path_graph(std::size_t n) {
  std::vector<PolicyNode> nodes;
  std::vector<PolicyEdge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    nodes.push_back({"v" + std::to_string(i), "", "DATA", {}});
    if (i > 0) edges.push_back({nodes[i - 1].id, nodes[i].id, "COLLECT", "", "e" + std::to_string(i), {}});
  }
  return PolicyGraph(nodes, edges);
}

}  // namespace

TEST(SpringLayout, EmptyGraphRejected) {
  try {
    spring_layout(PolicyGraph{}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyGraph);
  }
}

TEST(SpringLayout, SingleNodeAtOrigin) {
  const EmbeddingMatrix e = spring_layout(path_graph(1), {});
  ASSERT_EQ(e.rows(), 1);
  EXPECT_EQ(e.data(0, 0), 0.0);
  EXPECT_EQ(e.data(0, 1), 0.0);
}

TEST(SpringLayout, TwoNodesReachEquilibrium) {
  const PolicyGraph g = path_graph(2);
  LayoutParams p;
  p.iterations = 500;
  p.seed = 3;
  const Matrix raw = spring_layout_raw(g, p);
  const Matrix f = spring_forces(raw, undirected_adjacency(g), std::sqrt(1.0 / 2.0));
  EXPECT_LT(f.rowwise().norm().maxCoeff(), 1e-3);

  const EmbeddingMatrix e = spring_layout(g, p);
  const Eigen::RowVectorXd mid = 0.5 * (e.data.row(0) + e.data.row(1));
  EXPECT_NEAR((e.data.row(0) - mid).norm(), (e.data.row(1) - mid).norm(), 1e-12);
}

TEST(SpringLayout, PathMiddleNodeNearMidpoint) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    LayoutParams p;
    p.seed = seed;
    p.iterations = 200;
    const Matrix raw = spring_layout_raw(path_graph(3), p);
    const Eigen::RowVectorXd a = raw.row(0), b = raw.row(1), c = raw.row(2);
    const Eigen::RowVectorXd axis = (c - a).normalized();
    const double t = (b - a).dot(axis) / (c - a).norm();
    EXPECT_NEAR(t, 0.5, 0.05) << "seed " << seed;
  }
}

TEST(SpringLayout, DeterministicAndNormalized) {
  const PolicyGraph g = parse_graphml_file(PPKG_TEST_DATA "/offerup.graphml");
  LayoutParams p;
  p.seed = 99;
  const EmbeddingMatrix a = spring_layout(g, p);
  const EmbeddingMatrix b = spring_layout(g, p);
  EXPECT_TRUE(a.data == b.data);
  EXPECT_EQ(a.node_order, g.node_ids());
  for (Eigen::Index c = 0; c < a.dim(); ++c) {
    EXPECT_DOUBLE_EQ(a.data.col(c).cwiseAbs().maxCoeff(), 1.0);
    EXPECT_DOUBLE_EQ(a.data.col(c).maxCoeff(), 1.0);
    EXPECT_DOUBLE_EQ(a.data.col(c).minCoeff(), -1.0);
  }
  EXPECT_TRUE(a.data.allFinite());
}

TEST(SpringLayout, HigherDimensionSupported) {
  LayoutParams p;
  p.dim = 4;
  const EmbeddingMatrix e = spring_layout(path_graph(6), p);
  EXPECT_EQ(e.dim(), 4);
  EXPECT_TRUE(e.data.allFinite());
}

TEST(SpringLayout, ConnectedPairsCloserThanAverageOnRandomTrees) {
  int successes = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed + 1000);
    const std::size_t n = 5 + rng.below(46);
    std::vector<PolicyNode> nodes;
    std::vector<PolicyEdge> edges;
    for (std::size_t i = 0; i < n; ++i) {
      nodes.push_back({"t" + std::to_string(i), "", "DATA", {}});
      if (i > 0) edges.push_back({nodes[rng.below(i)].id, nodes[i].id, "SUBSUM", "", "e" + std::to_string(i), {}});
    }
    const PolicyGraph g(nodes, edges);
    LayoutParams p;
    p.seed = seed;
    const EmbeddingMatrix e = spring_layout(g, p);
    double edge_mean = 0.0;
    for (const auto& edge : edges) {
      edge_mean += (e.data.row(static_cast<Eigen::Index>(*g.index_of(edge.source))) -
                    e.data.row(static_cast<Eigen::Index>(*g.index_of(edge.target))))
                       .norm();
    }
    edge_mean /= static_cast<double>(edges.size());
    double all_mean = 0.0;
    for (Eigen::Index i = 0; i < e.rows(); ++i)
      for (Eigen::Index j = i + 1; j < e.rows(); ++j) all_mean += (e.data.row(i) - e.data.row(j)).norm();
    all_mean /= static_cast<double>(n * (n - 1) / 2);
    if (edge_mean < all_mean) ++successes;
  }
  EXPECT_GE(successes, 16);
}

TEST(EmbeddingFromPositions, FollowsOrder) {
  const std::map<std::string, std::vector<double>> pos{{"a", {0, 0}}, {"b", {1, 2}}};
  const EmbeddingMatrix ab = embedding_from_positions(pos, {"a", "b"});
  EXPECT_EQ(ab.data(1, 0), 1.0);
  EXPECT_EQ(ab.data(1, 1), 2.0);
  const EmbeddingMatrix ba = embedding_from_positions(pos, {"b", "a"});
  EXPECT_EQ(ba.data(0, 1), 2.0);
  EXPECT_EQ(ba.data(1, 0), 0.0);
  EXPECT_EQ(ba.node_order, (std::vector<std::string>{"b", "a"}));
}

TEST(EmbeddingFromPositions, Errors) {
  try {
    embedding_from_positions({{"a", {0, 0}}}, {"a", "c"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingNode);
  }
  try {
    embedding_from_positions({{"a", {0, 0}}, {"b", {1}}}, {"a", "b"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RaggedDimensions);
  }
}

TEST(EmbeddingCsv, RoundTrip) {
  const PolicyGraph g = parse_graphml_file(PPKG_TEST_DATA "/offerup.graphml");
  LayoutParams p;
  p.dim = 3;
  const EmbeddingMatrix e = spring_layout(g, p);
  const std::string csv = embedding_to_csv(e);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "node_id,x0,x1,x2");
  const EmbeddingMatrix back = embedding_from_csv(csv);
  EXPECT_EQ(back.node_order, e.node_order);
  EXPECT_TRUE(back.data == e.data);
}
