#pragma once

// Seeded data generators and brute-force reference implementations shared by
// the unit and acceptance suites. Nothing here calls into ppkg algorithms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ppkg/dimred.hpp"
#include "ppkg/graph.hpp"
#include "ppkg/matrix.hpp"
#include "ppkg/rng.hpp"

namespace fixtures {

using ppkg::Matrix;

struct Labeled {
  Matrix x;
  std::vector<int> labels;
};

inline std::vector<std::string> ids(std::size_t n, const std::string& prefix = "p") {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline ppkg::EmbeddingMatrix embedding(const Matrix& x) { return {x, ids(static_cast<std::size_t>(x.rows()))}; }

inline ppkg::Projection projection(const Matrix& x) {
  ppkg::Projection p;
  p.data = x;
  p.node_order = ids(static_cast<std::size_t>(x.rows()));
  return p;
}

/// Isotropic Gaussian blobs, points grouped by blob.
inline Labeled blobs(const std::vector<std::vector<double>>& centers, int per_blob, double sigma, std::uint64_t seed) {
  ppkg::Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(centers.front().size());
  Labeled out{Matrix(static_cast<Eigen::Index>(centers.size()) * per_blob, d), {}};
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (int i = 0; i < per_blob; ++i, ++row) {
      for (Eigen::Index j = 0; j < d; ++j) out.x(row, j) = centers[c][static_cast<std::size_t>(j)] + sigma * rng.normal();
      out.labels.push_back(static_cast<int>(c));
    }
  }
  return out;
}

/// Three 5-D blobs of 50 points, sigma 1, pairwise center distance 30.
inline Labeled three_blobs(std::uint64_t seed = 11) {
  return blobs({{0, 0, 0, 0, 0}, {30, 0, 0, 0, 0}, {15, 25.98, 0, 0, 0}}, 50, 1.0, seed);
}

/// Three 2-D blobs of 50 points, sigma 1, pairwise center distance 30.
inline Labeled three_blobs_2d(std::uint64_t seed = 11) {
  return blobs({{0, 0}, {30, 0}, {15, 25.98}}, 50, 1.0, seed);
}

/// Two concentric rings of radius 1 and 5 with slight radial jitter.
inline Labeled rings(int per_ring = 100, std::uint64_t seed = 5) {
  ppkg::Rng rng(seed);
  Labeled out{Matrix(2 * per_ring, 2), {}};
  for (int r = 0; r < 2; ++r) {
    const double radius = r == 0 ? 1.0 : 5.0;
    for (int i = 0; i < per_ring; ++i) {
      const double t = 2.0 * std::numbers::pi * (i + 0.5 * rng.uniform()) / per_ring;
      const double rr = radius * (1.0 + 0.01 * (rng.uniform() - 0.5));
      out.x(r * per_ring + i, 0) = rr * std::cos(t);
      out.x(r * per_ring + i, 1) = rr * std::sin(t);
      out.labels.push_back(r);
    }
  }
  return out;
}

inline Matrix random_matrix(Eigen::Index n, Eigen::Index d, ppkg::Rng& rng, double scale = 1.0) {
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = scale * rng.normal();
  return m;
}

inline std::vector<int> random_labels(std::size_t n, int k, ppkg::Rng& rng) {
  std::vector<int> out(n);
  for (auto& l : out) l = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  return out;
}

// ---------------------------------------------------------------- oracles

inline double dist(const Matrix& x, Eigen::Index i, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double d = x(i, c) - x(j, c);
    s += d * d;
  }
  return std::sqrt(s);
}

/// Silhouette straight from the definition; noise (-1) excluded, singletons 0.
inline double silhouette_oracle(const Matrix& x, const std::vector<int>& labels) {
  std::vector<Eigen::Index> pts;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) pts.push_back(static_cast<Eigen::Index>(i));
  double total = 0.0;
  for (Eigen::Index i : pts) {
    std::map<int, std::pair<double, int>> sums;
    for (Eigen::Index j : pts) {
      if (j == i) continue;
      auto& s = sums[labels[static_cast<std::size_t>(j)]];
      s.first += dist(x, i, j);
      s.second += 1;
    }
    const int own = labels[static_cast<std::size_t>(i)];
    if (sums.find(own) == sums.end()) continue;  // singleton scores 0
    const double a = sums[own].first / sums[own].second;
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [l, s] : sums)
      if (l != own) b = std::min(b, s.first / s.second);
    const double m = std::max(a, b);
    total += m > 0.0 ? (b - a) / m : 0.0;
  }
  return total / static_cast<double>(pts.size());
}

inline double davies_bouldin_oracle(const Matrix& x, const std::vector<int>& labels) {
  std::map<int, std::vector<Eigen::Index>> members;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) members[labels[i]].push_back(static_cast<Eigen::Index>(i));
  std::vector<std::vector<double>> centroids;
  std::vector<double> scatter;
  for (const auto& [l, m] : members) {
    std::vector<double> c(static_cast<std::size_t>(x.cols()), 0.0);
    for (Eigen::Index i : m)
      for (Eigen::Index j = 0; j < x.cols(); ++j) c[static_cast<std::size_t>(j)] += x(i, j);
    for (auto& v : c) v /= static_cast<double>(m.size());
    double s = 0.0;
    for (Eigen::Index i : m) {
      double d2 = 0.0;
      for (Eigen::Index j = 0; j < x.cols(); ++j) d2 += std::pow(x(i, j) - c[static_cast<std::size_t>(j)], 2);
      s += std::sqrt(d2);
    }
    centroids.push_back(c);
    scatter.push_back(s / static_cast<double>(m.size()));
  }
  const std::size_t k = centroids.size();
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      double d2 = 0.0;
      for (std::size_t c = 0; c < centroids[i].size(); ++c) d2 += std::pow(centroids[i][c] - centroids[j][c], 2);
      worst = std::max(worst, (scatter[i] + scatter[j]) / std::sqrt(d2));
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

/// ARI from explicit pair counting (no contingency table).
inline double ari_oracle(const std::vector<int>& a, const std::vector<int>& b) {
  double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool sa = a[i] == a[j];
      const bool sb = b[i] == b[j];
      if (sa && sb) ++n11;
      else if (sa) ++n10;
      else if (sb) ++n01;
      else ++n00;
    }
  }
  const double den = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
  if (den == 0.0) return 1.0;
  return 2.0 * (n00 * n11 - n01 * n10) / den;
}

/// Cyclic Jacobi eigensolver for small symmetric matrices. Returns
/// eigenvalues descending and the matching eigenvectors as columns.
inline std::pair<std::vector<double>, std::vector<std::vector<double>>> jacobi_eigen(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  std::vector<double> values;
  std::vector<std::vector<double>> vectors(n, std::vector<double>(n));
  for (std::size_t c = 0; c < n; ++c) {
    values.push_back(a[order[c]][order[c]]);
    for (std::size_t r = 0; r < n; ++r) vectors[r][c] = v[r][order[c]];
  }
  return {values, vectors};
}

/// Sample covariance (1/(n-1)) computed with plain loops.
inline std::vector<std::vector<double>> covariance(const Matrix& x) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto d = static_cast<std::size_t>(x.cols());
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  for (auto& m : mean) m /= static_cast<double>(n);
  std::vector<std::vector<double>> c(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        c[a][b] += (x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) - mean[a]) *
                   (x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) - mean[b]);
  for (auto& row : c)
    for (auto& v : row) v /= static_cast<double>(n - 1);
  return c;
}

/// Labels from cutting the Euclidean MST (Kruskal) at its k-1 heaviest edges.
inline std::vector<int> mst_cut_labels(const Matrix& x, int k) {
  const auto n = static_cast<std::size_t>(x.rows());
  struct E {
    double w;
    std::size_t a, b;
  };
  std::vector<E> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({dist(x, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), i, j});
  std::sort(edges.begin(), edges.end(), [](const E& l, const E& r) { return l.w < r.w; });
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::size_t components = n;
  for (const E& e : edges) {
    if (components == static_cast<std::size_t>(k)) break;
    const std::size_t ra = find(e.a), rb = find(e.b);
    if (ra == rb) continue;
    parent[std::max(ra, rb)] = std::min(ra, rb);
    --components;
  }
  std::map<std::size_t, int> ids;
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = ids.emplace(find(i), static_cast<int>(ids.size()));
    out[i] = it->second;
  }
  return out;
}

// ---------------------------------------------------------------- graphs

/// Random multigraph with self-loops and parallel edges.
inline ppkg::PolicyGraph random_graph(std::size_t n, std::size_t m, ppkg::Rng& rng) {
  static const char* kTypes[] = {"DATA", "ACTOR", "PURPOSE"};
  static const char* kRels[] = {"COLLECT", "SUBSUM", "SHARE"};
  std::vector<ppkg::PolicyNode> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    ppkg::PolicyNode node{"n" + std::to_string(i), "label <" + std::to_string(rng.below(100)) + "> & \"q\"",
                          kTypes[rng.below(3)], {}};
    if (rng.below(4) == 0) node.attributes["weight"] = std::to_string(rng.below(10));
    nodes.push_back(std::move(node));
  }
  std::vector<ppkg::PolicyEdge> edges;
  for (std::size_t e = 0; e < m && n > 0; ++e) {
    ppkg::PolicyEdge edge{nodes[rng.below(n)].id, nodes[rng.below(n)].id, kRels[rng.below(3)],
                          "sentence " + std::to_string(e) + " é", "e" + std::to_string(e), {}};
    edges.push_back(std::move(edge));
  }
  return ppkg::PolicyGraph(std::move(nodes), std::move(edges));
}

/// GraphML text for a graph with the four standard keys.
inline std::string to_graphml(const ppkg::PolicyGraph& g) {
  auto esc = [](const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '&') o += "&amp;";
      else if (c == '<') o += "&lt;";
      else if (c == '>') o += "&gt;";
      else if (c == '"') o += "&quot;";
      else o += c;
    }
    return o;
  };
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "<key id=\"d0\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
      "<key id=\"d1\" for=\"node\" attr.name=\"type\" attr.type=\"string\"/>\n"
      "<key id=\"d2\" for=\"edge\" attr.name=\"relationship\" attr.type=\"string\"/>\n"
      "<key id=\"d3\" for=\"edge\" attr.name=\"text\" attr.type=\"string\"/>\n"
      "<graph edgedefault=\"directed\">\n";
  for (const auto& n : g.nodes()) {
    out += "<node id=\"" + esc(n.id) + "\"><data key=\"d0\">" + esc(n.label) + "</data><data key=\"d1\">" +
           esc(n.node_type) + "</data></node>\n";
  }
  for (const auto& e : g.edges()) {
    out += "<edge id=\"" + esc(e.edge_id) + "\" source=\"" + esc(e.source) + "\" target=\"" + esc(e.target) +
           "\"><data key=\"d2\">" + esc(e.relationship) + "</data><data key=\"d3\">" + esc(e.text) +
           "</data></edge>\n";
  }
  out += "</graph>\n</graphml>\n";
  return out;
}

/// Synthetic policy graph: `n` nodes in `groups` themed communities with
/// `m` edges, mostly intra-community.
inline ppkg::PolicyGraph synthetic_policy(std::size_t n, std::size_t m, std::uint64_t seed, std::size_t groups = 5) {
  static const std::vector<std::vector<std::string>> kVocab = {
      {"device", "identifier", "hardware", "model", "advertising"},
      {"location", "gps", "precise", "region", "coordinates"},
      {"email", "contact", "name", "phone", "address"},
      {"payment", "card", "billing", "purchase", "transaction"},
      {"usage", "activity", "pages", "clicks", "browsing"}};
  ppkg::Rng rng(seed);
  std::vector<ppkg::PolicyNode> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = kVocab[(i % groups) % kVocab.size()];
    nodes.push_back({"n" + std::to_string(i), v[rng.below(v.size())] + " " + v[rng.below(v.size())],
                     i % 7 == 0 ? "ACTOR" : "DATA", {}});
  }
  std::vector<ppkg::PolicyEdge> edges;
  for (std::size_t e = 0; e < m; ++e) {
    const std::size_t a = rng.below(n);
    std::size_t b = rng.below(n);
    if (rng.below(10) < 8) b = (b / groups) * groups + a % groups;
    if (b >= n) b = a;
    const auto& v = kVocab[(a % groups) % kVocab.size()];
    edges.push_back({nodes[a].id, nodes[b].id, rng.below(2) ? "COLLECT" : "SUBSUM",
                     "We collect your " + v[rng.below(v.size())] + " and " + v[rng.below(v.size())] + ".",
                     "e" + std::to_string(e), {}});
  }
  return ppkg::PolicyGraph(std::move(nodes), std::move(edges));
}

}  // namespace fixtures
