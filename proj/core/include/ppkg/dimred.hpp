#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ppkg/matrix.hpp"

namespace ppkg {

enum class DrMethod { PCA, TSNE, UMAP };

std::string_view to_string(DrMethod m) noexcept;
/// Accepts "pca", "tsne"/"t-sne", "umap" (case-insensitive). Throws InvalidArgument.
DrMethod dr_method_from_string(std::string_view s);
/// Column header used in report tables: "PCA", "t-SNE", "UMAP".
std::string_view display_name(DrMethod m) noexcept;

/// Low-dimensional projection; row order identical to the source embedding.
struct Projection {
  Matrix data;
  DrMethod method = DrMethod::PCA;
  nlohmann::json params;
  std::vector<std::string> node_order;
  std::vector<double> explained_variance;  // PCA only
  std::vector<double> kl_trace;            // t-SNE only: KL at iteration 0, every 50th, and the last
};

// ---------------------------------------------------------------- PCA

/// Projects mean-centred data onto the top `out_dim` eigenvectors of the
/// sample covariance (1/(n-1) normalisation), eigenvalues descending. Each
/// component's sign is fixed so its largest-magnitude loading is positive.
Projection pca(const EmbeddingMatrix& x, int out_dim = 2);

/// Loadings (d x out_dim) matching `pca`, exposed for tests.
Matrix pca_components(const Matrix& x, int out_dim, std::vector<double>* explained_variance = nullptr);

// ---------------------------------------------------------------- t-SNE

struct TsneParams {
  double perplexity = 30.0;
  double learning_rate = 200.0;
  int n_iter = 1000;
  double early_exaggeration = 12.0;
  int exaggeration_iters = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  std::uint64_t seed = 0;
};

struct PerplexityResult {
  double beta = 1.0;
  double perplexity = 0.0;  // achieved 2^H
  bool converged = false;
  int steps = 0;
};

/// Bisection on the precision beta so that the conditional distribution
/// p_j ~ exp(-beta * d_j^2) has perplexity 2^H within 1e-5 * target.
/// `distances` are plain (not squared) distances to the other points.
PerplexityResult perplexity_calibration(std::span<const double> distances, double target_perplexity);

/// Symmetrised joint affinities P = (P_cond + P_cond^T) / (2n), sum 1.
/// `perplexity` is clamped to (n-1)/3 with a logged warning.
Matrix tsne_affinities(const Matrix& x, double perplexity);

/// Student-t (one degree of freedom) low-dimensional affinities, sum 1.
Matrix tsne_low_dim_affinities(const Matrix& y);

/// KL(P || Q) over entries with p > 0.
double kl_divergence(const Matrix& p, const Matrix& q);

/// Exact O(n^2) t-SNE to two dimensions.
Projection tsne(const EmbeddingMatrix& x, const TsneParams& p);

// ---------------------------------------------------------------- UMAP

struct UmapParams {
  int n_neighbors = 15;
  double min_dist = 0.1;
  double spread = 1.0;
  int n_epochs = 500;
  int negative_sample_rate = 5;
  std::uint64_t seed = 0;
};

struct SmoothKnnResult {
  double sigma = 1.0;
  bool converged = false;
};

/// Solves sum_j exp(-max(0, d_j - rho) / sigma) = log2(k) for sigma, where
/// k = distances.size(), within 1e-5.
SmoothKnnResult smooth_knn_sigma(std::span<const double> distances, double rho);

struct CurveParams {
  double a;
  double b;
};

/// Least-squares fit of 1 / (1 + a x^(2b)) to the offset-exponential target
/// curve on 300 points of [0, 3*spread].
CurveParams fit_curve_params(double min_dist, double spread = 1.0);

/// Exact Euclidean k nearest neighbours excluding self; ties to lower index.
/// Returned row-major n x k: indices and distances.
struct KnnGraph {
  int k = 0;
  std::vector<int> indices;
  std::vector<double> distances;
};
KnnGraph exact_knn(const Matrix& x, int k);

/// Symmetric fuzzy simplicial set (fuzzy union a + b - ab) as a dense matrix.
Matrix fuzzy_graph(const Matrix& x, int n_neighbors);

Projection umap(const EmbeddingMatrix& x, const UmapParams& p);

// ---------------------------------------------------------------- persistence

/// CSV `node_id,x,y`.
std::string projection_to_csv(const Projection& y);
/// JSON sidecar echoing method, params and seed (and explained variance for PCA).
std::string projection_sidecar_json(const Projection& y);

nlohmann::json to_json(const TsneParams& p);
nlohmann::json to_json(const UmapParams& p);
TsneParams tsne_params_from_json(const nlohmann::json& j, TsneParams defaults = {});
UmapParams umap_params_from_json(const nlohmann::json& j, UmapParams defaults = {});

}  // namespace ppkg
