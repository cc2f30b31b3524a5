#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ppkg/dimred.hpp"
#include "ppkg/matrix.hpp"
#include "ppkg/rng.hpp"

namespace ppkg {

enum class ClusterMethod { MBKMeans, Agglomerative, DBSCAN, HDBSCAN, Spectral, LDA };

std::string_view to_string(ClusterMethod m) noexcept;
std::string_view display_name(ClusterMethod m) noexcept;
ClusterMethod cluster_method_from_string(std::string_view s);

enum class Linkage { Single, Complete, Average, Ward };
std::string_view to_string(Linkage l) noexcept;
Linkage linkage_from_string(std::string_view s);

struct Affinity {
  enum class Kind { Rbf, Knn };
  Kind kind = Kind::Rbf;
  double gamma = 1.0;  // rbf
  int neighbors = 10;  // knn
};

inline constexpr int kNoise = -1;

struct ClusterParams {
  int k = 5;
  int batch_size = 100;
  int max_epochs = 100;
  Linkage linkage = Linkage::Ward;
  double eps = 0.5;
  int min_pts = 5;
  int min_cluster_size = 5;
  int min_samples = 0;  // 0: same as min_cluster_size
  Affinity affinity;
  int spectral_restarts = 10;
  int n_topics = 5;
  double alpha = 0.1;
  double beta = 0.01;
  int gibbs_iters = 1000;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const ClusterParams& p);
/// Reads known fields over `defaults`; throws InvalidArgument naming the bad field.
ClusterParams cluster_params_from_json(const nlohmann::json& j, ClusterParams defaults = {});
void validate(const ClusterParams& p);

struct ClusterAssignment {
  std::vector<int> labels;  // aligned with node_order, kNoise for noise
  int k_found = 0;
  ClusterMethod method = ClusterMethod::MBKMeans;
  nlohmann::json params;
  std::vector<std::string> node_order;
};

/// Relabels non-noise ids to 0..k-1 in first-appearance order.
std::vector<int> canonicalize_labels(std::span<const int> labels);
int count_clusters(std::span<const int> labels);

ClusterAssignment make_assignment(std::vector<int> labels, ClusterMethod method, nlohmann::json params,
                                  std::vector<std::string> node_order);

/// CSV `node_id,label`.
std::string assignment_to_csv(const ClusterAssignment& a);

// ---------------------------------------------------------------- k-means

struct KMeansResult {
  std::vector<int> labels;
  Matrix centroids;
  double inertia = 0.0;
  std::vector<double> inertia_trace;  // Lloyd only: inertia after each assignment step
  int iterations = 0;
};

/// k-means++ seeding; returns row indices of the chosen centres.
std::vector<Eigen::Index> kmeans_plus_plus(const Matrix& x, int k, Rng& rng);

/// Nearest centroid per row, ties to the lowest centroid index.
std::vector<int> nearest_centroid(const Matrix& x, const Matrix& centroids);
double inertia(const Matrix& x, std::span<const int> labels, const Matrix& centroids);

/// Sculley mini-batch k-means. Batches of min(batch_size, n) rows drawn
/// without replacement; per-centroid learning rate 1/count. Stops after
/// `max_epochs` passes (ceil(n/batch) batches each) or once every centroid
/// moves less than 1e-6 in a batch. Final centroids are the means of the
/// resulting groups and labels are nearest-centroid to those.
KMeansResult minibatch_kmeans_fit(const Matrix& x, const ClusterParams& p);

/// Full-batch Lloyd with k-means++ seeding; best of `restarts` by inertia.
KMeansResult lloyd_kmeans(const Matrix& x, int k, std::uint64_t seed, int restarts = 10, int max_iter = 300);

ClusterAssignment minibatch_kmeans(const Projection& y, const ClusterParams& p);

// ---------------------------------------------------------------- hierarchical

/// Bottom-up merging with Lance-Williams updates until k clusters remain.
/// Ward works on squared Euclidean distances, the others on Euclidean.
/// Equal-distance pairs merge in lexicographic (min id, max id) order where a
/// cluster's id is its smallest member index.
std::vector<int> agglomerative_labels(const Matrix& x, int k, Linkage linkage);
ClusterAssignment agglomerative(const Projection& y, const ClusterParams& p);

// ---------------------------------------------------------------- density

/// Core point: at least min_pts points (self included) within eps.
/// Clusters are grown from cores in ascending index order; a border point
/// joins the first cluster that reaches it.
std::vector<int> dbscan_labels(const Matrix& x, double eps, int min_pts);
ClusterAssignment dbscan(const Projection& y, const ClusterParams& p);

/// One edge of the mutual-reachability minimum spanning tree.
struct MstEdge {
  int a;
  int b;
  double weight;
};

/// Distance to the min_samples-th nearest point, the point itself counted first.
std::vector<double> core_distances(const Matrix& x, int min_samples);
/// Prim's algorithm on the dense mutual-reachability graph; edges sorted by
/// weight (stable on discovery order).
std::vector<MstEdge> mutual_reachability_mst(const Matrix& x, std::span<const double> core);

struct CondensedNode {
  int parent;
  int child;  // < n: a point; >= n: a cluster id
  double lambda;
  int child_size;
};

/// Condensed cluster tree of a single-linkage hierarchy; cluster ids start at n
/// (the root).
std::vector<CondensedNode> condense_tree(std::span<const MstEdge> mst, int n, int min_cluster_size);

std::vector<int> hdbscan_labels(const Matrix& x, int min_cluster_size, int min_samples = 0);
ClusterAssignment hdbscan(const Projection& y, const ClusterParams& p);

// ---------------------------------------------------------------- spectral

/// exp(-gamma * d^2) off the diagonal, zero diagonal.
Matrix rbf_affinity(const Matrix& x, double gamma);
/// Symmetrised m-NN adjacency: W_ij = 1 if j is among i's m nearest or vice versa.
Matrix knn_affinity(const Matrix& x, int m);
/// L = I - D^{-1/2} W D^{-1/2}. Zero-degree vertices get a 1e-12 self-loop.
Matrix normalized_laplacian(const Matrix& w);

struct SpectralResult {
  std::vector<int> labels;
  Matrix embedding;  // n x k, rows L2-normalised
  Vector eigenvalues;
  KMeansResult kmeans;
};

SpectralResult spectral_fit(const Matrix& x, const ClusterParams& p);
SpectralResult spectral_fit_affinity(const Matrix& w, int k, std::uint64_t seed, int restarts);
ClusterAssignment spectral(const Projection& y, const ClusterParams& p);

}  // namespace ppkg
