#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ppkg/cluster.hpp"
#include "ppkg/dimred.hpp"
#include "ppkg/matrix.hpp"

namespace ppkg {

/// Validity scores for one (projection, assignment) pair. Both scores are
/// unset when fewer than 2 non-noise clusters or fewer than 3 non-noise
/// points remain.
struct MetricValue {
  std::optional<double> silhouette;
  std::optional<double> davies_bouldin;  // +inf when two centroids coincide
  bool coincident_centroids = false;
  std::size_t n_evaluated = 0;
  double noise_fraction = 0.0;

  bool defined() const noexcept { return silhouette.has_value() && davies_bouldin.has_value(); }
};

/// Mean silhouette over non-noise points. Points alone in their cluster
/// score 0. Unset with fewer than two distinct non-noise labels.
std::optional<double> silhouette(const Matrix& y, std::span<const int> labels);

/// Mean over clusters of max_j (S_i + S_j) / |mu_i - mu_j|, with S the mean
/// distance to the centroid. Noise excluded. Unset with fewer than two
/// clusters; +inf if two centroids coincide.
std::optional<double> davies_bouldin(const Matrix& y, std::span<const int> labels);

/// Pair-counting adjusted Rand index. Throws LengthMismatch.
double adjusted_rand(std::span<const int> a, std::span<const int> b);

MetricValue evaluate(const Matrix& y, std::span<const int> labels);
MetricValue evaluate(const Projection& y, const ClusterAssignment& a);

}  // namespace ppkg
