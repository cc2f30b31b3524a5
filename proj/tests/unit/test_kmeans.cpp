#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "ppkg/cluster.hpp"
#include "ppkg/error.hpp"
#include "ppkg/metrics.hpp"

using namespace ppkg;

TEST(MiniBatchKMeans, KEqualsNGivesSingletons) {
  Rng rng(1);
  const Matrix x = fixtures::random_matrix(7, 2, rng);
  ClusterParams p;
  p.k = 7;
  const KMeansResult r = minibatch_kmeans_fit(x, p);
  EXPECT_EQ(std::set<int>(r.labels.begin(), r.labels.end()).size(), 7u);
  EXPECT_NEAR(r.inertia, 0.0, 1e-20);
}

TEST(MiniBatchKMeans, KOneIsMean) {
  Rng rng(2);
  const Matrix x = fixtures::random_matrix(30, 2, rng);
  ClusterParams p;
  p.k = 1;
  const KMeansResult r = minibatch_kmeans_fit(x, p);
  EXPECT_EQ(std::set<int>(r.labels.begin(), r.labels.end()), std::set<int>{0});
  EXPECT_LT((r.centroids.row(0) - x.colwise().mean()).norm(), 1e-12);
}

TEST(MiniBatchKMeans, BlobsPerfect) {
  const auto blobs = fixtures::three_blobs_2d();
  ClusterParams p;
  p.k = 3;
  p.seed = 4;
  const ClusterAssignment a = minibatch_kmeans(fixtures::projection(blobs.x), p);
  EXPECT_DOUBLE_EQ(adjusted_rand(a.labels, blobs.labels), 1.0);
  EXPECT_EQ(a.k_found, 3);
}

TEST(MiniBatchKMeans, TooFewPoints) {
  Matrix x(3, 2);
  x.setZero();
  ClusterParams p;
  p.k = 4;
  try {
    minibatch_kmeans(fixtures::projection(x), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewPoints);
  }
}

TEST(MiniBatchKMeans, EveryPointNearestOwnCentroid) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix x = fixtures::random_matrix(20 + static_cast<Eigen::Index>(rng.below(100)), 2, rng);
    ClusterParams p;
    p.k = 2 + static_cast<int>(rng.below(6));
    p.batch_size = 10 + static_cast<int>(rng.below(50));
    p.seed = rng.next();
    const KMeansResult r = minibatch_kmeans_fit(x, p);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double own = (x.row(i) - r.centroids.row(r.labels[static_cast<std::size_t>(i)])).norm();
      for (Eigen::Index c = 0; c < r.centroids.rows(); ++c) EXPECT_LE(own, (x.row(i) - r.centroids.row(c)).norm() + 1e-9);
    }
  }
}

TEST(MiniBatchKMeans, Deterministic) {
  const auto blobs = fixtures::three_blobs_2d(3);
  ClusterParams p;
  p.k = 4;
  p.seed = 10;
  const KMeansResult a = minibatch_kmeans_fit(blobs.x, p);
  const KMeansResult b = minibatch_kmeans_fit(blobs.x, p);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_TRUE(a.centroids == b.centroids);
}

TEST(Lloyd, InertiaNonIncreasing) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = fixtures::random_matrix(80, 2, rng);
    const KMeansResult r = lloyd_kmeans(x, 4, rng.next(), 1);
    for (std::size_t i = 1; i < r.inertia_trace.size(); ++i) {
      EXPECT_LE(r.inertia_trace[i], r.inertia_trace[i - 1] + 1e-9);
    }
    EXPECT_NEAR(r.inertia, inertia(x, r.labels, r.centroids), 1e-9);
  }
}

TEST(NearestCentroid, TiesGoToLowestIndex) {
  Matrix x(1, 2);
  x << 0, 0;
  Matrix c(2, 2);
  c << 1, 0, -1, 0;
  EXPECT_EQ(nearest_centroid(x, c), std::vector<int>{0});
}

TEST(Canonicalize, FirstAppearanceOrder) {
  const std::vector<int> in{5, 5, -1, 2, 9, 2};
  EXPECT_EQ(canonicalize_labels(in), (std::vector<int>{0, 0, -1, 1, 2, 1}));
  EXPECT_EQ(count_clusters(in), 3);
}

TEST(ClusterParamsJson, RoundTripAndErrorsNameField) {
  ClusterParams p;
  p.k = 7;
  p.linkage = Linkage::Average;
  p.affinity.kind = Affinity::Kind::Knn;
  p.affinity.neighbors = 4;
  const ClusterParams q = cluster_params_from_json(to_json(p));
  EXPECT_EQ(q.k, 7);
  EXPECT_EQ(q.linkage, Linkage::Average);
  EXPECT_EQ(q.affinity.kind, Affinity::Kind::Knn);
  EXPECT_EQ(q.affinity.neighbors, 4);
  try {
    cluster_params_from_json(nlohmann::json{{"linkage", "centroid"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("linkage"), std::string::npos);
  }
  ClusterParams bad;
  bad.eps = 0.0;
  EXPECT_THROW(validate(bad), Error);
}

TEST(AssignmentCsv, Layout) {
  const ClusterAssignment a = make_assignment({1, 1, -1, 0}, ClusterMethod::DBSCAN, {}, {"a", "b", "c", "d"});
  EXPECT_EQ(a.labels, (std::vector<int>{0, 0, -1, 1}));
  EXPECT_EQ(assignment_to_csv(a), "node_id,label\na,0\nb,0\nc,-1\nd,1\n");
}
