#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ppkg/cluster.hpp"
#include "ppkg/error.hpp"

namespace ppkg {

std::vector<Eigen::Index> kmeans_plus_plus(const Matrix& x, int k, Rng& rng) {
  const Eigen::Index n = x.rows();
  if (k < 1 || k > n) throw Error(ErrorCode::TooFewPoints, "k-means++ needs 1 <= k <= n");
  std::vector<Eigen::Index> centres;
  centres.reserve(static_cast<std::size_t>(k));
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  centres.push_back(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  chosen[static_cast<std::size_t>(centres.back())] = true;

  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = squared_distance(x, i, centres[0]);

  while (static_cast<int>(centres.size()) < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[static_cast<std::size_t>(i)];
        if (acc > target && d2[static_cast<std::size_t>(i)] > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {  // rounding at the top end
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (d2[static_cast<std::size_t>(i)] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // All remaining points coincide with a centre: pick uniformly among unchosen.
      std::vector<Eigen::Index> pool;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) pool.push_back(i);
      }
      pick = pool[rng.below(pool.size())];
    }
    centres.push_back(pick);
    chosen[static_cast<std::size_t>(pick)] = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], squared_distance(x, i, pick));
    }
  }
  return centres;
}

std::vector<int> nearest_centroid(const Matrix& x, const Matrix& centroids) {
  std::vector<int> labels(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = (x.row(i) - centroids.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  return labels;
}

double inertia(const Matrix& x, std::span<const int> labels, const Matrix& centroids) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    if (l >= 0) s += (x.row(i) - centroids.row(l)).squaredNorm();
  }
  return s;
}

namespace {

Matrix rows_of(const Matrix& x, const std::vector<Eigen::Index>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(idx[r]);
  return out;
}

// Replaces each centroid by the mean of its group; empty groups keep theirs.
void recompute_means(const Matrix& x, std::span<const int> labels, Matrix& centroids) {
  Matrix sums = Matrix::Zero(centroids.rows(), centroids.cols());
  std::vector<int> counts(static_cast<std::size_t>(centroids.rows()), 0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    sums.row(l) += x.row(i);
    ++counts[static_cast<std::size_t>(l)];
  }
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) {
      centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }
  }
}

}  // namespace

KMeansResult minibatch_kmeans_fit(const Matrix& x, const ClusterParams& p) {
  const Eigen::Index n = x.rows();
  if (p.k < 1 || p.batch_size < 1) throw Error(ErrorCode::InvalidArgument, "k and batch_size must be positive");
  if (n < p.k) throw Error(ErrorCode::TooFewPoints, "mini-batch k-means needs n >= k");

  Rng rng(p.seed);
  Matrix centroids = rows_of(x, kmeans_plus_plus(x, p.k, rng));
  std::vector<long long> counts(static_cast<std::size_t>(p.k), 0);

  const Eigen::Index batch = std::min<Eigen::Index>(p.batch_size, n);
  const Eigen::Index batches_per_epoch = (n + batch - 1) / batch;
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::vector<int> batch_labels(static_cast<std::size_t>(batch));

  KMeansResult result;
  bool converged = false;
  for (int epoch = 0; epoch < p.max_epochs && !converged; ++epoch) {
    for (Eigen::Index b = 0; b < batches_per_epoch && !converged; ++b) {
      for (Eigen::Index s = 0; s < batch; ++s) {
        const auto j = s + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n - s)));
        std::swap(perm[static_cast<std::size_t>(s)], perm[static_cast<std::size_t>(j)]);
      }
      for (Eigen::Index s = 0; s < batch; ++s) {
        const Eigen::Index i = perm[static_cast<std::size_t>(s)];
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < p.k; ++c) {
          const double d = (x.row(i) - centroids.row(c)).squaredNorm();
          if (d < best_d) {
            best_d = d;
            best = c;
          }
        }
        batch_labels[static_cast<std::size_t>(s)] = best;
      }
      const Matrix before = centroids;
      for (Eigen::Index s = 0; s < batch; ++s) {
        const int c = batch_labels[static_cast<std::size_t>(s)];
        const double eta = 1.0 / static_cast<double>(++counts[static_cast<std::size_t>(c)]);
        centroids.row(c) += eta * (x.row(perm[static_cast<std::size_t>(s)]) - centroids.row(c));
      }
      ++result.iterations;
      double drift = 0.0;
      for (int c = 0; c < p.k; ++c) drift = std::max(drift, (centroids.row(c) - before.row(c)).norm());
      converged = drift < 1e-6;
    }
  }

  const std::vector<int> provisional = nearest_centroid(x, centroids);
  recompute_means(x, provisional, centroids);
  result.labels = nearest_centroid(x, centroids);
  result.centroids = std::move(centroids);
  result.inertia = inertia(x, result.labels, result.centroids);
  return result;
}

KMeansResult lloyd_kmeans(const Matrix& x, int k, std::uint64_t seed, int restarts, int max_iter) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  if (x.rows() < k) throw Error(ErrorCode::TooFewPoints, "k-means needs n >= k");
  if (restarts < 1 || max_iter < 1) throw Error(ErrorCode::InvalidArgument, "restarts and max_iter must be positive");

  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng(mix64(seed, static_cast<std::uint64_t>(r)));
    KMeansResult run;
    run.centroids = rows_of(x, kmeans_plus_plus(x, k, rng));
    run.labels = nearest_centroid(x, run.centroids);
    run.inertia_trace.push_back(inertia(x, run.labels, run.centroids));
    for (int it = 0; it < max_iter; ++it) {
      recompute_means(x, run.labels, run.centroids);
      std::vector<int> next = nearest_centroid(x, run.centroids);
      run.inertia_trace.push_back(inertia(x, next, run.centroids));
      ++run.iterations;
      const bool stable = next == run.labels;
      run.labels = std::move(next);
      if (stable) break;
    }
    run.inertia = run.inertia_trace.back();
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

ClusterAssignment minibatch_kmeans(const Projection& y, const ClusterParams& p) {
  validate(p);
  KMeansResult fit = minibatch_kmeans_fit(y.data, p);
  return make_assignment(std::move(fit.labels), ClusterMethod::MBKMeans, to_json(p), y.node_order);
}

}  // namespace ppkg
