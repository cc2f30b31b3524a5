#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

#include <cmath>

#include "ppkg/cluster.hpp"
#include "ppkg/error.hpp"

namespace ppkg {

Matrix rbf_affinity(const Matrix& x, double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "affinity.gamma must be positive");
  Matrix w = pairwise_squared_distances(x);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = i == j ? 0.0 : std::exp(-gamma * w(i, j));
  }
  return w;
}

Matrix knn_affinity(const Matrix& x, int m) {
  const Eigen::Index n = x.rows();
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "affinity.neighbors must be positive");
  Matrix w = Matrix::Zero(n, n);
  if (n < 2) return w;
  const int k = static_cast<int>(std::min<Eigen::Index>(m, n - 1));
  const KnnGraph knn = exact_knn(x, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int t = 0; t < k; ++t) {
      const int j = knn.indices[static_cast<std::size_t>(i * k + t)];
      w(i, j) = 1.0;
      w(j, i) = 1.0;
    }
  }
  return w;
}

Matrix normalized_laplacian(const Matrix& w_in) {
  const Eigen::Index n = w_in.rows();
  Matrix w = w_in;
  Vector inv_sqrt_deg(n);
  int isolated = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double deg = w.row(i).sum();
    if (!(deg > 0.0)) {
      w(i, i) = 1e-12;
      deg = 1e-12;
      ++isolated;
    }
    inv_sqrt_deg(i) = 1.0 / std::sqrt(deg);
  }
  if (isolated > 0) {
    spdlog::warn("spectral: {} zero-degree vertices given 1e-12 self-loops", isolated);
  }
  Matrix l = Matrix::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) l(i, j) -= inv_sqrt_deg(i) * w(i, j) * inv_sqrt_deg(j);
  }
  return l;
}

SpectralResult spectral_fit_affinity(const Matrix& w, int k, std::uint64_t seed, int restarts) {
  const Eigen::Index n = w.rows();
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  if (n < k) throw Error(ErrorCode::TooFewPoints, "spectral clustering needs n >= k");

  const Matrix lap = normalized_laplacian(w);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::DegenerateInput, "Laplacian eigensolve failed");

  SpectralResult r;
  r.eigenvalues = solver.eigenvalues();
  r.embedding = solver.eigenvectors().leftCols(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = r.embedding.row(i).norm();
    if (norm > 0.0) r.embedding.row(i) /= norm;
  }
  r.kmeans = lloyd_kmeans(r.embedding, k, seed, restarts);
  r.labels = r.kmeans.labels;
  return r;
}

SpectralResult spectral_fit(const Matrix& x, const ClusterParams& p) {
  validate(p);
  if (x.rows() < p.k) throw Error(ErrorCode::TooFewPoints, "spectral clustering needs n >= k");
  const Matrix w = p.affinity.kind == Affinity::Kind::Rbf ? rbf_affinity(x, p.affinity.gamma)
                                                          : knn_affinity(x, p.affinity.neighbors);
  return spectral_fit_affinity(w, p.k, p.seed, p.spectral_restarts);
}

ClusterAssignment spectral(const Projection& y, const ClusterParams& p) {
  SpectralResult r = spectral_fit(y.data, p);
  return make_assignment(std::move(r.labels), ClusterMethod::Spectral, to_json(p), y.node_order);
}

}  // namespace ppkg
