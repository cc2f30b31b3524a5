#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ppkg/dimred.hpp"
#include "ppkg/error.hpp"
#include "ppkg/rng.hpp"

namespace ppkg {

namespace {

constexpr double kSigmaTolerance = 1e-5;
constexpr int kSigmaSteps = 64;
constexpr double kMinKDistScale = 1e-3;
constexpr double kGradClip = 4.0;

double clip(double v) { return std::clamp(v, -kGradClip, kGradClip); }

}  // namespace

SmoothKnnResult smooth_knn_sigma(std::span<const double> distances, double rho) {
  if (distances.empty()) throw Error(ErrorCode::InvalidArgument, "smooth kNN calibration needs neighbours");
  const double target = std::log2(static_cast<double>(distances.size()));
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double mid = 1.0;
  SmoothKnnResult r;
  for (int step = 0; step < kSigmaSteps; ++step) {
    double psum = 0.0;
    for (double d : distances) psum += std::exp(-std::max(0.0, d - rho) / mid);
    if (std::abs(psum - target) < kSigmaTolerance) {
      r.converged = true;
      break;
    }
    if (psum > target) {
      hi = mid;
      mid = 0.5 * (lo + hi);
    } else {
      lo = mid;
      mid = std::isinf(hi) ? mid * 2.0 : 0.5 * (lo + hi);
    }
  }
  r.sigma = mid;
  const double mean = std::accumulate(distances.begin(), distances.end(), 0.0) / static_cast<double>(distances.size());
  const double floor = kMinKDistScale * (mean > 0.0 ? mean : 1.0);
  if (r.sigma < floor) r.sigma = floor;
  return r;
}

CurveParams fit_curve_params(double min_dist, double spread) {
  if (min_dist < 0.0 || !(spread > 0.0)) throw Error(ErrorCode::InvalidArgument, "invalid min_dist/spread");
  constexpr int kPoints = 300;
  std::vector<double> xs(kPoints);
  std::vector<double> ys(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    xs[i] = 3.0 * spread * static_cast<double>(i) / static_cast<double>(kPoints - 1);
    ys[i] = xs[i] < min_dist ? 1.0 : std::exp(-(xs[i] - min_dist) / spread);
  }

  auto residual_norm = [&](double a, double b) {
    double s = 0.0;
    for (int i = 0; i < kPoints; ++i) {
      const double u = xs[i] > 0.0 ? std::pow(xs[i], 2.0 * b) : 0.0;
      const double r = 1.0 / (1.0 + a * u) - ys[i];
      s += r * r;
    }
    return s;
  };

  // Levenberg-Marquardt on (a, b).
  double a = 1.0;
  double b = 1.0;
  double lambda = 1e-3;
  double cost = residual_norm(a, b);
  for (int it = 0; it < 500; ++it) {
    double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jtr0 = 0.0, jtr1 = 0.0;
    for (int i = 0; i < kPoints; ++i) {
      const double x = xs[i];
      const double u = x > 0.0 ? std::pow(x, 2.0 * b) : 0.0;
      const double denom = 1.0 + a * u;
      const double f = 1.0 / denom;
      const double r = f - ys[i];
      const double da = -u / (denom * denom);
      const double db = x > 0.0 ? -a * u * 2.0 * std::log(x) / (denom * denom) : 0.0;
      jtj00 += da * da;
      jtj01 += da * db;
      jtj11 += db * db;
      jtr0 += da * r;
      jtr1 += db * r;
    }
    bool improved = false;
    while (lambda < 1e12) {
      const double m00 = jtj00 * (1.0 + lambda);
      const double m11 = jtj11 * (1.0 + lambda);
      const double det = m00 * m11 - jtj01 * jtj01;
      const double step_a = -(m11 * jtr0 - jtj01 * jtr1) / det;
      const double step_b = -(m00 * jtr1 - jtj01 * jtr0) / det;
      const double na = a + step_a;
      const double nb = b + step_b;
      const double ncost = (na > 0.0 && nb > 0.0) ? residual_norm(na, nb) : std::numeric_limits<double>::infinity();
      if (ncost < cost) {
        const double rel = (cost - ncost) / std::max(cost, 1e-300);
        a = na;
        b = nb;
        cost = ncost;
        lambda = std::max(lambda * 0.1, 1e-12);
        improved = true;
        if (rel < 1e-15 && std::abs(step_a) < 1e-12 && std::abs(step_b) < 1e-12) return {a, b};
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }
  return {a, b};
}

KnnGraph exact_knn(const Matrix& x, int k) {
  const Eigen::Index n = x.rows();
  if (k < 1 || k > n - 1) throw Error(ErrorCode::InvalidArgument, "k must lie in [1, n-1]");
  KnnGraph g;
  g.k = k;
  g.indices.resize(static_cast<std::size_t>(n * k));
  g.distances.resize(static_cast<std::size_t>(n * k));
  std::vector<std::pair<double, int>> row;
  row.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    row.clear();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) row.emplace_back(squared_distance(x, i, j), static_cast<int>(j));
    }
    std::partial_sort(row.begin(), row.begin() + k, row.end());
    for (int m = 0; m < k; ++m) {
      g.indices[static_cast<std::size_t>(i * k + m)] = row[static_cast<std::size_t>(m)].second;
      g.distances[static_cast<std::size_t>(i * k + m)] = std::sqrt(row[static_cast<std::size_t>(m)].first);
    }
  }
  return g;
}

Matrix fuzzy_graph(const Matrix& x, int n_neighbors) {
  const Eigen::Index n = x.rows();
  const KnnGraph knn = exact_knn(x, n_neighbors);
  const auto k = static_cast<std::size_t>(n_neighbors);
  Matrix w = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::span<const double> dists(knn.distances.data() + static_cast<std::size_t>(i) * k, k);
    double rho = 0.0;
    for (double d : dists) {
      if (d > 0.0) {
        rho = d;
        break;
      }
    }
    const SmoothKnnResult cal = smooth_knn_sigma(dists, rho);
    for (std::size_t m = 0; m < k; ++m) {
      const int j = knn.indices[static_cast<std::size_t>(i) * k + m];
      w(i, j) = std::exp(-std::max(0.0, dists[m] - rho) / cal.sigma);
    }
  }
  Matrix wt = w.transpose();
  return w + wt - w.cwiseProduct(wt);
}

Projection umap(const EmbeddingMatrix& x, const UmapParams& p) {
  const Eigen::Index n = x.rows();
  if (p.n_neighbors < 2) throw Error(ErrorCode::InvalidArgument, "UMAP n_neighbors must be >= 2");
  if (p.n_epochs < 1 || p.negative_sample_rate < 0 || p.min_dist < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "invalid UMAP parameters");
  }
  if (n < 3) throw Error(ErrorCode::TooFewPoints, "UMAP needs at least 3 points, got " + std::to_string(n));
  int n_neighbors = p.n_neighbors;
  if (n_neighbors > n - 1) {
    spdlog::warn("UMAP n_neighbors {} clamped to {} for n = {}", n_neighbors, n - 1, n);
    n_neighbors = static_cast<int>(n - 1);
  }

  const Matrix graph = fuzzy_graph(x.data, n_neighbors);
  const CurveParams curve = fit_curve_params(p.min_dist, p.spread);

  struct Edge {
    int head;
    int tail;
    double weight;
  };
  std::vector<Edge> edges;
  double max_w = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && graph(i, j) > 0.0) {
        edges.push_back({static_cast<int>(i), static_cast<int>(j), graph(i, j)});
        max_w = std::max(max_w, graph(i, j));
      }
    }
  }
  const double prune = max_w / static_cast<double>(p.n_epochs);
  std::erase_if(edges, [&](const Edge& e) { return e.weight < prune; });

  // Initialise from PCA, scaled into [-10, 10].
  Rng rng(p.seed);
  Matrix y(n, 2);
  const int pca_dim = static_cast<int>(std::min<Eigen::Index>(2, x.dim()));
  const Matrix comps = pca_components(x.data, pca_dim);
  const Eigen::RowVectorXd mean = x.data.colwise().mean();
  const Matrix init = (x.data.rowwise() - mean) * comps;
  y.setZero();
  y.leftCols(pca_dim) = init;
  const double extent = y.cwiseAbs().maxCoeff();
  if (extent > 0.0) {
    y *= 10.0 / extent;
  }
  for (Eigen::Index c = pca_dim; c < 2; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) y(i, c) = 20.0 * rng.uniform() - 10.0;
  }
  if (extent == 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index c = 0; c < pca_dim; ++c) y(i, c) = 20.0 * rng.uniform() - 10.0;
    }
  }

  const std::size_t m = edges.size();
  std::vector<double> epochs_per_sample(m);
  std::vector<double> next_sample(m);
  std::vector<double> epochs_per_negative(m);
  std::vector<double> next_negative(m);
  for (std::size_t e = 0; e < m; ++e) {
    epochs_per_sample[e] = max_w / edges[e].weight;
    next_sample[e] = epochs_per_sample[e];
    epochs_per_negative[e] = p.negative_sample_rate > 0
                                 ? epochs_per_sample[e] / static_cast<double>(p.negative_sample_rate)
                                 : std::numeric_limits<double>::infinity();
    next_negative[e] = epochs_per_negative[e];
  }

  const double a = curve.a;
  const double b = curve.b;
  const std::uint64_t sample_seed = derive_seed(p.seed, "umap-negative");
  for (int epoch = 0; epoch < p.n_epochs; ++epoch) {
    const double alpha = 1.0 - static_cast<double>(epoch) / static_cast<double>(p.n_epochs);
    const std::uint64_t epoch_seed = mix64(sample_seed, static_cast<std::uint64_t>(epoch));
    for (std::size_t e = 0; e < m; ++e) {
      if (next_sample[e] > static_cast<double>(epoch)) continue;
      const int j = edges[e].head;
      const int k = edges[e].tail;
      double d2 = squared_distance(y, j, k);
      if (d2 > 0.0) {
        const double coeff = -2.0 * a * b * std::pow(d2, b - 1.0) / (a * std::pow(d2, b) + 1.0);
        for (Eigen::Index c = 0; c < 2; ++c) {
          const double g = clip(coeff * (y(j, c) - y(k, c)));
          y(j, c) += g * alpha;
          y(k, c) -= g * alpha;
        }
      }
      next_sample[e] += epochs_per_sample[e];

      const int n_neg = p.negative_sample_rate > 0
                            ? static_cast<int>((static_cast<double>(epoch) - next_negative[e]) / epochs_per_negative[e])
                            : 0;
      const std::uint64_t edge_seed = mix64(epoch_seed, static_cast<std::uint64_t>(e));
      for (int s = 0; s < n_neg; ++s) {
        const auto other = static_cast<Eigen::Index>(mix64(edge_seed, static_cast<std::uint64_t>(s)) %
                                                     static_cast<std::uint64_t>(n));
        if (other == j) continue;
        d2 = squared_distance(y, j, other);
        if (d2 <= 0.0) continue;
        const double coeff = 2.0 * b / ((0.001 + d2) * (a * std::pow(d2, b) + 1.0));
        for (Eigen::Index c = 0; c < 2; ++c) {
          y(j, c) += clip(coeff * (y(j, c) - y(other, c))) * alpha;
        }
      }
      if (n_neg > 0) next_negative[e] += static_cast<double>(n_neg) * epochs_per_negative[e];
    }
  }

  Projection out;
  out.method = DrMethod::UMAP;
  out.node_order = x.node_order;
  out.params = to_json(p);
  out.params["n_neighbors_effective"] = n_neighbors;
  out.params["a"] = a;
  out.params["b"] = b;
  out.data = std::move(y);
  return out;
}

}  // namespace ppkg
