#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cctype>
#include <cmath>

#include "ppkg/dimred.hpp"
#include "ppkg/error.hpp"

namespace ppkg {

std::string_view to_string(DrMethod m) noexcept {
  switch (m) {
    case DrMethod::PCA: return "pca";
    case DrMethod::TSNE: return "tsne";
    case DrMethod::UMAP: return "umap";
  }
  return "pca";
}

std::string_view display_name(DrMethod m) noexcept {
  switch (m) {
    case DrMethod::PCA: return "PCA";
    case DrMethod::TSNE: return "t-SNE";
    case DrMethod::UMAP: return "UMAP";
  }
  return "PCA";
}

DrMethod dr_method_from_string(std::string_view s) {
  std::string lower;
  for (char c : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "pca") return DrMethod::PCA;
  if (lower == "tsne" || lower == "t-sne") return DrMethod::TSNE;
  if (lower == "umap") return DrMethod::UMAP;
  throw Error(ErrorCode::InvalidArgument, "unknown dimensionality reduction method '" + std::string(s) + "'");
}

Matrix pca_components(const Matrix& x, int out_dim, std::vector<double>* explained_variance) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n < 2) throw Error(ErrorCode::DegenerateInput, "PCA needs at least 2 rows");
  if (out_dim < 1 || out_dim > std::min(n, d)) {
    throw Error(ErrorCode::InvalidArgument, "PCA out_dim must lie in [1, min(n, d)]");
  }

  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Matrix centred = x.rowwise() - mean;
  const Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::DegenerateInput, "covariance eigensolve failed");

  // Eigen returns ascending eigenvalues.
  Matrix components(d, out_dim);
  if (explained_variance) explained_variance->clear();
  for (int c = 0; c < out_dim; ++c) {
    const Eigen::Index src = d - 1 - c;
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index arg = 0;
    for (Eigen::Index r = 1; r < d; ++r) {
      if (std::abs(v(r)) > std::abs(v(arg))) arg = r;
    }
    if (v(arg) < 0.0) v = -v;
    components.col(c) = v;
    if (explained_variance) explained_variance->push_back(std::max(0.0, solver.eigenvalues()(src)));
  }
  return components;
}

Projection pca(const EmbeddingMatrix& x, int out_dim) {
  Projection y;
  y.method = DrMethod::PCA;
  y.node_order = x.node_order;
  const Matrix components = pca_components(x.data, out_dim, &y.explained_variance);
  const Eigen::RowVectorXd mean = x.data.colwise().mean();
  y.data = (x.data.rowwise() - mean) * components;
  y.params = {{"out_dim", out_dim}};
  return y;
}

}  // namespace ppkg
