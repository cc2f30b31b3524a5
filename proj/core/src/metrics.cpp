#include "ppkg/metrics.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "ppkg/error.hpp"

namespace ppkg {

namespace {

struct Groups {
  std::vector<int> cluster_of;  // dense index per point, -1 for noise
  std::vector<std::vector<Eigen::Index>> members;
};

Groups group_points(std::span<const int> labels) {
  Groups g;
  std::map<int, int> dense;
  for (int l : labels) {
    if (l >= 0) dense.emplace(l, 0);
  }
  int next = 0;
  for (auto& [l, idx] : dense) idx = next++;
  g.members.resize(dense.size());
  g.cluster_of.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) {
      g.cluster_of.push_back(-1);
    } else {
      const int c = dense[labels[i]];
      g.cluster_of.push_back(c);
      g.members[static_cast<std::size_t>(c)].push_back(static_cast<Eigen::Index>(i));
    }
  }
  return g;
}

void check_aligned(const Matrix& y, std::span<const int> labels) {
  if (static_cast<std::size_t>(y.rows()) != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "labels do not match projection rows");
  }
}

}  // namespace

std::optional<double> silhouette(const Matrix& y, std::span<const int> labels) {
  check_aligned(y, labels);
  const Groups g = group_points(labels);
  const std::size_t k = g.members.size();
  if (k < 2) return std::nullopt;

  double total = 0.0;
  std::size_t counted = 0;
  std::vector<double> sums(k);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const int own = g.cluster_of[static_cast<std::size_t>(i)];
    if (own < 0) continue;
    ++counted;
    const std::size_t own_size = g.members[static_cast<std::size_t>(own)].size();
    if (own_size == 1) continue;  // singleton scores 0
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      for (Eigen::Index j : g.members[c]) {
        if (j != i) sums[c] += std::sqrt(squared_distance(y, i, j));
      }
    }
    const double a = sums[static_cast<std::size_t>(own)] / static_cast<double>(own_size - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (static_cast<int>(c) == own) continue;
      b = std::min(b, sums[c] / static_cast<double>(g.members[c].size()));
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(counted);
}

std::optional<double> davies_bouldin(const Matrix& y, std::span<const int> labels) {
  check_aligned(y, labels);
  const Groups g = group_points(labels);
  const std::size_t k = g.members.size();
  if (k < 2) return std::nullopt;

  Matrix centroids = Matrix::Zero(static_cast<Eigen::Index>(k), y.cols());
  std::vector<double> scatter(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    for (Eigen::Index i : g.members[c]) centroids.row(static_cast<Eigen::Index>(c)) += y.row(i);
    centroids.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(g.members[c].size());
    for (Eigen::Index i : g.members[c]) {
      scatter[c] += (y.row(i) - centroids.row(static_cast<Eigen::Index>(c))).norm();
    }
    scatter[c] /= static_cast<double>(g.members[c].size());
  }
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double sep = (centroids.row(static_cast<Eigen::Index>(i)) - centroids.row(static_cast<Eigen::Index>(j))).norm();
      const double r = sep > 0.0 ? (scatter[i] + scatter[j]) / sep : std::numeric_limits<double>::infinity();
      worst = std::max(worst, r);
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

double adjusted_rand(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "partitions differ in length");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::map<std::pair<int, int>, long long> table;
  std::map<int, long long> rows;
  std::map<int, long long> cols;
  for (std::size_t i = 0; i < n; ++i) {
    ++table[{a[i], b[i]}];
    ++rows[a[i]];
    ++cols[b[i]];
  }
  auto comb2 = [](long long m) { return static_cast<double>(m) * static_cast<double>(m - 1) / 2.0; };
  double index = 0.0;
  for (const auto& [cell, m] : table) index += comb2(m);
  double sum_a = 0.0;
  for (const auto& [l, m] : rows) sum_a += comb2(m);
  double sum_b = 0.0;
  for (const auto& [l, m] : cols) sum_b += comb2(m);
  const double expected = sum_a * sum_b / comb2(static_cast<long long>(n));
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

MetricValue evaluate(const Matrix& y, std::span<const int> labels) {
  check_aligned(y, labels);
  MetricValue v;
  std::size_t noise = 0;
  for (int l : labels) noise += l < 0 ? 1 : 0;
  v.n_evaluated = labels.size() - noise;
  v.noise_fraction = labels.empty() ? 0.0 : static_cast<double>(noise) / static_cast<double>(labels.size());
  if (v.n_evaluated < 3) return v;
  v.silhouette = silhouette(y, labels);
  v.davies_bouldin = davies_bouldin(y, labels);
  if (v.davies_bouldin && std::isinf(*v.davies_bouldin)) v.coincident_centroids = true;
  return v;
}

MetricValue evaluate(const Projection& y, const ClusterAssignment& a) { return evaluate(y.data, a.labels); }

}  // namespace ppkg
