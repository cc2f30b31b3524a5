#include <cmath>
#include <limits>

#include "ppkg/cluster.hpp"
#include "ppkg/error.hpp"

namespace ppkg {

namespace {

double lance_williams(Linkage linkage, double d_ak, double d_bk, double d_ab, double n_a, double n_b, double n_k) {
  switch (linkage) {
    case Linkage::Single: return std::min(d_ak, d_bk);
    case Linkage::Complete: return std::max(d_ak, d_bk);
    case Linkage::Average: return (n_a * d_ak + n_b * d_bk) / (n_a + n_b);
    case Linkage::Ward: return ((n_a + n_k) * d_ak + (n_b + n_k) * d_bk - n_k * d_ab) / (n_a + n_b + n_k);
  }
  return d_ak;
}

}  // namespace

std::vector<int> agglomerative_labels(const Matrix& x, int k, Linkage linkage) {
  const Eigen::Index n = x.rows();
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  if (n < k) throw Error(ErrorCode::TooFewPoints, "agglomerative clustering needs n >= k");

  Matrix dist = pairwise_squared_distances(x);
  if (linkage != Linkage::Ward) dist = dist.cwiseSqrt();

  const auto un = static_cast<std::size_t>(n);
  std::vector<bool> active(un, true);
  std::vector<double> size(un, 1.0);
  std::vector<std::vector<Eigen::Index>> members(un);
  for (Eigen::Index i = 0; i < n; ++i) members[static_cast<std::size_t>(i)] = {i};

  // Nearest neighbour among active j > i, ties to the smallest j.
  std::vector<Eigen::Index> nn(un, -1);
  std::vector<double> nn_dist(un, std::numeric_limits<double>::infinity());
  auto refresh = [&](Eigen::Index i) {
    nn[static_cast<std::size_t>(i)] = -1;
    nn_dist[static_cast<std::size_t>(i)] = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (active[static_cast<std::size_t>(j)] && dist(i, j) < nn_dist[static_cast<std::size_t>(i)]) {
        nn_dist[static_cast<std::size_t>(i)] = dist(i, j);
        nn[static_cast<std::size_t>(i)] = j;
      }
    }
  };
  for (Eigen::Index i = 0; i < n; ++i) refresh(i);

  for (Eigen::Index remaining = n; remaining > k; --remaining) {
    Eigen::Index a = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (active[static_cast<std::size_t>(i)] && nn[static_cast<std::size_t>(i)] >= 0 &&
          nn_dist[static_cast<std::size_t>(i)] < best) {
        best = nn_dist[static_cast<std::size_t>(i)];
        a = i;
      }
    }
    const Eigen::Index b = nn[static_cast<std::size_t>(a)];
    const double d_ab = dist(a, b);
    const double n_a = size[static_cast<std::size_t>(a)];
    const double n_b = size[static_cast<std::size_t>(b)];

    for (Eigen::Index m = 0; m < n; ++m) {
      if (!active[static_cast<std::size_t>(m)] || m == a || m == b) continue;
      const double updated =
          lance_williams(linkage, dist(a, m), dist(b, m), d_ab, n_a, n_b, size[static_cast<std::size_t>(m)]);
      dist(a, m) = updated;
      dist(m, a) = updated;
    }
    active[static_cast<std::size_t>(b)] = false;
    size[static_cast<std::size_t>(a)] += n_b;
    auto& into = members[static_cast<std::size_t>(a)];
    auto& from = members[static_cast<std::size_t>(b)];
    into.insert(into.end(), from.begin(), from.end());
    from.clear();

    refresh(a);
    for (Eigen::Index i = 0; i < b; ++i) {
      if (!active[static_cast<std::size_t>(i)] || i == a) continue;
      const Eigen::Index cur = nn[static_cast<std::size_t>(i)];
      if (cur == a || cur == b) {
        refresh(i);
      } else if (i < a && (dist(i, a) < nn_dist[static_cast<std::size_t>(i)] ||
                           (dist(i, a) == nn_dist[static_cast<std::size_t>(i)] && a < cur))) {
        nn[static_cast<std::size_t>(i)] = a;
        nn_dist[static_cast<std::size_t>(i)] = dist(i, a);
      }
    }
  }

  std::vector<int> labels(un, 0);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index i : members[static_cast<std::size_t>(c)]) labels[static_cast<std::size_t>(i)] = static_cast<int>(c);
  }
  return canonicalize_labels(labels);
}

ClusterAssignment agglomerative(const Projection& y, const ClusterParams& p) {
  validate(p);
  return make_assignment(agglomerative_labels(y.data, p.k, p.linkage), ClusterMethod::Agglomerative, to_json(p),
                         y.node_order);
}

}  // namespace ppkg
