#include "ppkg/layout.hpp"

#include <algorithm>
#include <cmath>

#include "ppkg/error.hpp"
#include "ppkg/io.hpp"
#include "ppkg/rng.hpp"

namespace ppkg {

Matrix pairwise_squared_distances(const Matrix& x) {
  const Eigen::Index n = x.rows();
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = squared_distance(x, i, j);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

Matrix undirected_adjacency(const PolicyGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Matrix a = Matrix::Zero(n, n);
  for (const auto& e : g.edges()) {
    const auto s = static_cast<Eigen::Index>(*g.index_of(e.source));
    const auto t = static_cast<Eigen::Index>(*g.index_of(e.target));
    if (s == t) continue;
    a(s, t) = 1.0;
    a(t, s) = 1.0;
  }
  return a;
}

namespace {

constexpr double kMinDistance = 0.01;
constexpr double kStopThreshold = 1e-4;

// Accumulates into `out` in fixed (i, j) order.
void accumulate_forces(const Matrix& pos, const Matrix& adjacency, double k, Matrix& out) {
  const Eigen::Index n = pos.rows();
  const double k2 = k * k;
  out.setZero();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto delta = pos.row(i) - pos.row(j);
      const double dist = std::max(delta.norm(), kMinDistance);
      const double coeff = k2 / (dist * dist) - adjacency(i, j) * dist / k;
      out.row(i) += coeff * delta;
    }
  }
}

}  // namespace

Matrix spring_forces(const Matrix& positions, const Matrix& adjacency, double k) {
  Matrix out(positions.rows(), positions.cols());
  accumulate_forces(positions, adjacency, k, out);
  return out;
}

Matrix spring_layout_raw(const PolicyGraph& g, const LayoutParams& p) {
  if (g.empty()) throw Error(ErrorCode::EmptyGraph, "spring layout needs at least one node");
  if (p.dim < 1) throw Error(ErrorCode::InvalidArgument, "layout dim must be >= 1");
  if (p.iterations < 1) throw Error(ErrorCode::InvalidArgument, "layout iterations must be >= 1");
  if (p.optimal_distance && !(*p.optimal_distance > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "optimal_distance must be positive");
  }

  const auto n = static_cast<Eigen::Index>(g.node_count());
  const double k = p.optimal_distance.value_or(std::sqrt(1.0 / static_cast<double>(n)));

  Rng rng(p.seed);
  Matrix pos(n, p.dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < p.dim; ++c) pos(i, c) = rng.uniform();
  }
  if (n == 1) return pos;

  const Matrix adjacency = undirected_adjacency(g);
  double t = 0.0;
  for (Eigen::Index c = 0; c < p.dim; ++c) {
    t = std::max(t, pos.col(c).maxCoeff() - pos.col(c).minCoeff());
  }
  t *= 0.1;
  const double dt = t / static_cast<double>(p.iterations + 1);

  Matrix force(n, p.dim);
  Matrix step(n, p.dim);
  for (int it = 0; it < p.iterations; ++it) {
    accumulate_forces(pos, adjacency, k, force);
    for (Eigen::Index i = 0; i < n; ++i) {
      double length = force.row(i).norm();
      if (length < kMinDistance) length = 0.1;
      step.row(i) = force.row(i) * (t / length);
    }
    pos += step;
    t -= dt;
    if (step.norm() / static_cast<double>(n) < kStopThreshold) break;
  }
  return pos;
}

void rescale_per_axis(Matrix& positions) {
  for (Eigen::Index c = 0; c < positions.cols(); ++c) {
    if (positions.rows() == 0) return;
    const double lo = positions.col(c).minCoeff();
    const double hi = positions.col(c).maxCoeff();
    const double half_span = 0.5 * (hi - lo);
    const double mid = lo + half_span;
    for (Eigen::Index i = 0; i < positions.rows(); ++i) {
      positions(i, c) = half_span > 0.0 ? (positions(i, c) - mid) / half_span : 0.0;
    }
  }
}

EmbeddingMatrix spring_layout(const PolicyGraph& g, const LayoutParams& p) {
  EmbeddingMatrix e;
  e.data = spring_layout_raw(g, p);
  rescale_per_axis(e.data);
  e.node_order = g.node_ids();
  return e;
}

EmbeddingMatrix embedding_from_positions(const std::map<std::string, std::vector<double>>& positions,
                                         const std::vector<std::string>& order) {
  EmbeddingMatrix e;
  e.node_order = order;
  std::size_t dim = 0;
  bool first = true;
  for (const auto& id : order) {
    auto it = positions.find(id);
    if (it == positions.end()) throw Error(ErrorCode::MissingNode, "no position for node '" + id + "'");
    if (first) {
      dim = it->second.size();
      first = false;
    } else if (it->second.size() != dim) {
      throw Error(ErrorCode::RaggedDimensions, "node '" + id + "' has " + std::to_string(it->second.size()) +
                                                   " coordinates, expected " + std::to_string(dim));
    }
  }
  for (const auto& [id, v] : positions) {
    if (!first && v.size() != dim) {
      throw Error(ErrorCode::RaggedDimensions, "node '" + id + "' has mismatched dimension");
    }
  }
  e.data.resize(static_cast<Eigen::Index>(order.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& v = positions.at(order[i]);
    for (std::size_t c = 0; c < dim; ++c) {
      e.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v[c];
    }
  }
  return e;
}

std::string embedding_to_csv(const EmbeddingMatrix& e) {
  std::string out = "node_id";
  for (Eigen::Index c = 0; c < e.dim(); ++c) out += ",x" + std::to_string(c);
  out += '\n';
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    out += io::csv_field(e.node_order[static_cast<std::size_t>(i)]);
    for (Eigen::Index c = 0; c < e.dim(); ++c) {
      out += ',';
      out += io::format_double(e.data(i, c));
    }
    out += '\n';
  }
  return out;
}

EmbeddingMatrix embedding_from_csv(std::string_view csv) {
  const auto rows = io::parse_csv(csv);
  if (rows.empty() || rows[0].empty() || rows[0][0] != "node_id") {
    throw Error(ErrorCode::InvalidArgument, "embedding CSV must start with a node_id header");
  }
  const std::size_t dim = rows[0].size() - 1;
  EmbeddingMatrix e;
  e.data.resize(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != dim + 1) throw Error(ErrorCode::RaggedDimensions, "row " + std::to_string(r));
    e.node_order.push_back(rows[r][0]);
    for (std::size_t c = 0; c < dim; ++c) {
      e.data(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) = std::stod(rows[r][c + 1]);
    }
  }
  return e;
}

}  // namespace ppkg
