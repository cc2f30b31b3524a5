#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace ppkg {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// n x d node coordinates; row i belongs to node_order[i].
struct EmbeddingMatrix {
  Matrix data;
  std::vector<std::string> node_order;

  Eigen::Index rows() const noexcept { return data.rows(); }
  Eigen::Index dim() const noexcept { return data.cols(); }
};

inline double squared_distance(const Matrix& x, Eigen::Index i, Eigen::Index j) {
  return (x.row(i) - x.row(j)).squaredNorm();
}

/// Dense n x n matrix of squared Euclidean distances.
Matrix pairwise_squared_distances(const Matrix& x);

}  // namespace ppkg
