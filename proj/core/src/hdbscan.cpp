#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "ppkg/cluster.hpp"
#include "ppkg/error.hpp"

namespace ppkg {

namespace {

// Zero-length merges would give infinite lambda; clamp so stabilities stay finite.
constexpr double kMinMergeDistance = 1e-12;

struct Merge {
  int left;
  int right;
  double distance;
  int size;
};

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(2 * n - 1)), size_(parent_.size(), 1), next_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }
  int merge(int a, int b) {
    const int id = next_++;
    parent_[static_cast<std::size_t>(a)] = id;
    parent_[static_cast<std::size_t>(b)] = id;
    size_[static_cast<std::size_t>(id)] = size_[static_cast<std::size_t>(a)] + size_[static_cast<std::size_t>(b)];
    return id;
  }
  int size(int x) const { return size_[static_cast<std::size_t>(x)]; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  int next_;
};

std::vector<Merge> single_linkage(std::span<const MstEdge> mst, int n) {
  UnionFind uf(n);
  std::vector<Merge> merges;
  merges.reserve(mst.size());
  for (const auto& e : mst) {
    const int l = uf.find(e.a);
    const int r = uf.find(e.b);
    const int id = uf.merge(l, r);
    merges.push_back({l, r, e.weight, uf.size(id)});
  }
  return merges;
}

std::vector<int> bfs_from_hierarchy(const std::vector<Merge>& merges, int n, int root) {
  std::vector<int> out;
  std::vector<int> frontier{root};
  while (!frontier.empty()) {
    out.insert(out.end(), frontier.begin(), frontier.end());
    std::vector<int> next;
    for (int node : frontier) {
      if (node >= n) {
        next.push_back(merges[static_cast<std::size_t>(node - n)].left);
        next.push_back(merges[static_cast<std::size_t>(node - n)].right);
      }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace

std::vector<double> core_distances(const Matrix& x, int min_samples) {
  const Eigen::Index n = x.rows();
  if (min_samples < 1) throw Error(ErrorCode::InvalidArgument, "min_samples must be positive");
  std::vector<double> core(static_cast<std::size_t>(n), 0.0);
  std::vector<double> row(static_cast<std::size_t>(n));
  const auto rank = static_cast<std::size_t>(std::min<Eigen::Index>(min_samples, n) - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = squared_distance(x, i, j);
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(rank), row.end());
    core[static_cast<std::size_t>(i)] = std::sqrt(row[rank]);
  }
  return core;
}

std::vector<MstEdge> mutual_reachability_mst(const Matrix& x, std::span<const double> core) {
  const Eigen::Index n = x.rows();
  std::vector<MstEdge> edges;
  if (n < 2) return edges;
  const auto un = static_cast<std::size_t>(n);
  std::vector<bool> in_tree(un, false);
  std::vector<double> best(un, std::numeric_limits<double>::infinity());
  std::vector<int> from(un, 0);
  int current = 0;
  in_tree[0] = true;
  for (Eigen::Index step = 1; step < n; ++step) {
    int next = -1;
    double next_w = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      if (in_tree[uj]) continue;
      const double w = std::max({core[static_cast<std::size_t>(current)], core[uj],
                                 std::sqrt(squared_distance(x, current, j))});
      if (w < best[uj]) {
        best[uj] = w;
        from[uj] = current;
      }
      if (best[uj] < next_w) {
        next_w = best[uj];
        next = static_cast<int>(j);
      }
    }
    in_tree[static_cast<std::size_t>(next)] = true;
    edges.push_back({from[static_cast<std::size_t>(next)], next, next_w});
    current = next;
  }
  std::stable_sort(edges.begin(), edges.end(), [](const MstEdge& a, const MstEdge& b) { return a.weight < b.weight; });
  return edges;
}

std::vector<CondensedNode> condense_tree(std::span<const MstEdge> mst, int n, int min_cluster_size) {
  std::vector<CondensedNode> result;
  if (n < 2) return result;
  const std::vector<Merge> merges = single_linkage(mst, n);
  const int root = 2 * n - 2;
  const std::vector<int> order = bfs_from_hierarchy(merges, n, root);

  std::vector<int> relabel(static_cast<std::size_t>(root + 1), 0);
  std::vector<bool> ignore(static_cast<std::size_t>(root + 1), false);
  relabel[static_cast<std::size_t>(root)] = n;
  int next_label = n + 1;

  auto size_of = [&](int node) { return node < n ? 1 : merges[static_cast<std::size_t>(node - n)].size; };
  auto shed = [&](int parent_label, int subtree, double lambda) {
    for (int sub : bfs_from_hierarchy(merges, n, subtree)) {
      if (sub < n) result.push_back({parent_label, sub, lambda, 1});
      ignore[static_cast<std::size_t>(sub)] = true;
    }
  };

  for (int node : order) {
    if (node < n || ignore[static_cast<std::size_t>(node)]) continue;
    const Merge& m = merges[static_cast<std::size_t>(node - n)];
    const double lambda = 1.0 / std::max(m.distance, kMinMergeDistance);
    const int label = relabel[static_cast<std::size_t>(node)];
    const int left_size = size_of(m.left);
    const int right_size = size_of(m.right);
    const bool left_big = left_size >= min_cluster_size;
    const bool right_big = right_size >= min_cluster_size;
    if (left_big && right_big) {
      relabel[static_cast<std::size_t>(m.left)] = next_label++;
      result.push_back({label, relabel[static_cast<std::size_t>(m.left)], lambda, left_size});
      relabel[static_cast<std::size_t>(m.right)] = next_label++;
      result.push_back({label, relabel[static_cast<std::size_t>(m.right)], lambda, right_size});
    } else if (!left_big && !right_big) {
      shed(label, m.left, lambda);
      shed(label, m.right, lambda);
    } else if (!left_big) {
      relabel[static_cast<std::size_t>(m.right)] = label;
      shed(label, m.left, lambda);
    } else {
      relabel[static_cast<std::size_t>(m.left)] = label;
      shed(label, m.right, lambda);
    }
  }
  return result;
}

std::vector<int> hdbscan_labels(const Matrix& x, int min_cluster_size, int min_samples) {
  if (min_cluster_size < 1) throw Error(ErrorCode::InvalidArgument, "min_cluster_size must be positive");
  const auto n = static_cast<int>(x.rows());
  std::vector<int> labels(static_cast<std::size_t>(n), kNoise);
  if (n < 2 || n < 2 * min_cluster_size) return labels;
  if (min_samples <= 0) min_samples = min_cluster_size;

  const std::vector<double> core = core_distances(x, min_samples);
  const std::vector<MstEdge> mst = mutual_reachability_mst(x, core);
  const std::vector<CondensedNode> tree = condense_tree(mst, n, min_cluster_size);

  // Stability: sum over children of (lambda - birth lambda of parent) * size.
  std::map<int, double> birth{{n, 0.0}};
  std::map<int, double> stability{{n, 0.0}};
  std::map<int, int> cluster_parent;
  std::map<int, std::vector<int>> cluster_children;
  std::vector<int> point_parent(static_cast<std::size_t>(n), n);
  for (const auto& row : tree) {
    if (row.child >= n) {
      birth[row.child] = row.lambda;
      stability.try_emplace(row.child, 0.0);
      cluster_parent[row.child] = row.parent;
      cluster_children[row.parent].push_back(row.child);
    } else {
      point_parent[static_cast<std::size_t>(row.child)] = row.parent;
    }
  }
  for (const auto& row : tree) stability[row.parent] += (row.lambda - birth[row.parent]) * row.child_size;

  // Excess-of-mass selection, leaves first (descending id), root excluded.
  std::map<int, bool> selected;
  for (auto it = stability.rbegin(); it != stability.rend(); ++it) {
    const int node = it->first;
    if (node == n) continue;
    double subtree = 0.0;
    for (int c : cluster_children[node]) subtree += stability[c];
    if (subtree > stability[node]) {
      selected[node] = false;
      stability[node] = subtree;
    } else {
      selected[node] = true;
      std::vector<int> stack = cluster_children[node];
      while (!stack.empty()) {
        const int c = stack.back();
        stack.pop_back();
        selected[c] = false;
        for (int cc : cluster_children[c]) stack.push_back(cc);
      }
    }
  }

  std::map<int, int> label_of;
  for (const auto& [node, sel] : selected) {
    if (sel) label_of.emplace(node, static_cast<int>(label_of.size()));
  }
  for (int i = 0; i < n; ++i) {
    int c = point_parent[static_cast<std::size_t>(i)];
    while (c != n) {
      if (auto it = label_of.find(c); it != label_of.end()) {
        labels[static_cast<std::size_t>(i)] = it->second;
        break;
      }
      c = cluster_parent[c];
    }
  }
  return canonicalize_labels(labels);
}

ClusterAssignment hdbscan(const Projection& y, const ClusterParams& p) {
  validate(p);
  return make_assignment(hdbscan_labels(y.data, p.min_cluster_size, p.min_samples), ClusterMethod::HDBSCAN,
                         to_json(p), y.node_order);
}

}  // namespace ppkg
