#include <deque>

#include "ppkg/cluster.hpp"
#include "ppkg/error.hpp"

namespace ppkg {

std::vector<int> dbscan_labels(const Matrix& x, double eps, int min_pts) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  if (min_pts < 1) throw Error(ErrorCode::InvalidArgument, "min_pts must be positive");
  const Eigen::Index n = x.rows();
  const auto un = static_cast<std::size_t>(n);
  const double eps2 = eps * eps;

  std::vector<std::vector<Eigen::Index>> neighbours(un);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (squared_distance(x, i, j) <= eps2) neighbours[static_cast<std::size_t>(i)].push_back(j);
    }
  }
  auto is_core = [&](Eigen::Index i) {
    return static_cast<int>(neighbours[static_cast<std::size_t>(i)].size()) >= min_pts;
  };

  constexpr int kUnassigned = -2;
  std::vector<int> labels(un, kUnassigned);
  int cluster = 0;
  std::deque<Eigen::Index> queue;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[static_cast<std::size_t>(i)] != kUnassigned || !is_core(i)) continue;
    labels[static_cast<std::size_t>(i)] = cluster;
    queue.push_back(i);
    while (!queue.empty()) {
      const Eigen::Index p = queue.front();
      queue.pop_front();
      if (!is_core(p)) continue;
      for (Eigen::Index q : neighbours[static_cast<std::size_t>(p)]) {
        if (labels[static_cast<std::size_t>(q)] == kUnassigned) {
          labels[static_cast<std::size_t>(q)] = cluster;
          queue.push_back(q);
        }
      }
    }
    ++cluster;
  }
  for (int& l : labels) {
    if (l == kUnassigned) l = kNoise;
  }
  return labels;
}

ClusterAssignment dbscan(const Projection& y, const ClusterParams& p) {
  validate(p);
  return make_assignment(dbscan_labels(y.data, p.eps, p.min_pts), ClusterMethod::DBSCAN, to_json(p), y.node_order);
}

}  // namespace ppkg
