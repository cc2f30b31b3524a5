#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppkg/graph.hpp"
#include "ppkg/matrix.hpp"

namespace ppkg {

struct LayoutParams {
  int dim = 2;
  int iterations = 50;
  std::uint64_t seed = 0;
  std::optional<double> optimal_distance;  // unset: sqrt(1 / n)
};

/// Fruchterman-Reingold spring layout over the undirected simple graph
/// underlying `g` (directions, relationship tags and parallel edges are
/// ignored; every edge has weight 1).
///
/// Positions start uniform in [0,1)^dim. Each step moves every node along its
/// net force by the current temperature t (or by 10*t*|force| when the force
/// is below 0.01); t starts at 0.1 of the widest initial axis span and drops
/// linearly by t0/(iterations+1) per step. The result is rescaled per axis to
/// span [-1, 1]; zero-span axes collapse to 0.
EmbeddingMatrix spring_layout(const PolicyGraph& g, const LayoutParams& p);

/// Same simulation without the final rescale, for force-balance checks.
Matrix spring_layout_raw(const PolicyGraph& g, const LayoutParams& p);

/// 0/1 adjacency of the undirected simple graph (no self-loops).
Matrix undirected_adjacency(const PolicyGraph& g);

/// Net Fruchterman-Reingold force on each node: sum over j of
/// unit(x_i - x_j) * (k^2/d - A_ij d^2/k).
Matrix spring_forces(const Matrix& positions, const Matrix& adjacency, double k);

/// Centers each axis on its midrange and scales it to [-1, 1].
void rescale_per_axis(Matrix& positions);

EmbeddingMatrix embedding_from_positions(const std::map<std::string, std::vector<double>>& positions,
                                         const std::vector<std::string>& order);

/// CSV with header `node_id,x0,...,x{d-1}`.
std::string embedding_to_csv(const EmbeddingMatrix& e);
EmbeddingMatrix embedding_from_csv(std::string_view csv);

}  // namespace ppkg
