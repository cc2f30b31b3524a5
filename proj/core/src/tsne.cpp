#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppkg/dimred.hpp"
#include "ppkg/error.hpp"
#include "ppkg/rng.hpp"

namespace ppkg {

namespace {

constexpr double kPerplexityTolerance = 1e-5;
constexpr int kMaxBisectionSteps = 50;

// Perplexity of p_j ~ exp(-beta * shifted_j), with shifted_j = d_j^2 - min d^2.
double perplexity_at(std::span<const double> shifted, double beta) {
  double sum = 0.0;
  double weighted = 0.0;
  for (double s : shifted) {
    const double p = std::exp(-beta * s);
    sum += p;
    weighted += s * p;
  }
  const double entropy = std::log(sum) + beta * weighted / sum;  // nats
  return std::exp(entropy);
}

}  // namespace

PerplexityResult perplexity_calibration(std::span<const double> distances, double target_perplexity) {
  std::size_t finite = 0;
  for (double d : distances) finite += std::isfinite(d) ? 1 : 0;
  if (finite < 2) throw Error(ErrorCode::InvalidArgument, "perplexity calibration needs >= 2 finite distances");
  if (!(target_perplexity > 0.0)) throw Error(ErrorCode::InvalidArgument, "target perplexity must be positive");

  double min_sq = std::numeric_limits<double>::infinity();
  for (double d : distances) {
    if (std::isfinite(d)) min_sq = std::min(min_sq, d * d);
  }
  std::vector<double> shifted;
  shifted.reserve(finite);
  for (double d : distances) {
    if (std::isfinite(d)) shifted.push_back(d * d - min_sq);
  }

  const double tol = kPerplexityTolerance * target_perplexity;
  double beta = 1.0;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  PerplexityResult best;
  double best_err = std::numeric_limits<double>::infinity();

  for (int step = 0; step <= kMaxBisectionSteps; ++step) {
    const double perp = perplexity_at(shifted, beta);
    const double err = std::abs(perp - target_perplexity);
    if (err < best_err) {
      best_err = err;
      best = PerplexityResult{beta, perp, false, step};
    }
    if (err <= tol) {
      best.converged = true;
      return best;
    }
    if (step == kMaxBisectionSteps) break;
    if (perp > target_perplexity) {
      lo = beta;
      beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
    } else {
      hi = beta;
      beta = 0.5 * (lo + beta);
    }
  }
  spdlog::warn("perplexity calibration did not converge: target {}, reached {}", target_perplexity,
               best.perplexity);
  return best;
}

Matrix tsne_affinities(const Matrix& x, double perplexity) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw Error(ErrorCode::TooFewPoints, "t-SNE affinities need at least 2 points");
  const double max_perplexity = static_cast<double>(n - 1) / 3.0;
  if (perplexity > max_perplexity) {
    spdlog::warn("t-SNE perplexity {} clamped to {} for n = {}", perplexity, max_perplexity, n);
    perplexity = max_perplexity;
  }

  const Matrix d2 = pairwise_squared_distances(x);
  Matrix cond = Matrix::Zero(n, n);
  std::vector<double> row(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) row[m++] = std::sqrt(d2(i, j));
    }
    const PerplexityResult cal = perplexity_calibration(row, perplexity);
    double min_sq = std::numeric_limits<double>::infinity();
    for (double d : row) min_sq = std::min(min_sq, d * d);
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double p = std::exp(-cal.beta * (d2(i, j) - min_sq));
      cond(i, j) = p;
      sum += p;
    }
    cond.row(i) /= sum;
  }
  Matrix joint = (cond + cond.transpose()) / (2.0 * static_cast<double>(n));
  return joint;
}

Matrix tsne_low_dim_affinities(const Matrix& y) {
  const Eigen::Index n = y.rows();
  Matrix q = Matrix::Zero(n, n);
  double z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double num = 1.0 / (1.0 + squared_distance(y, i, j));
      q(i, j) = num;
      z += num;
    }
  }
  return q / z;
}

double kl_divergence(const Matrix& p, const Matrix& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw Error(ErrorCode::LengthMismatch, "KL divergence needs equally shaped matrices");
  }
  constexpr double kFloor = 1e-300;
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      const double pij = p(i, j);
      if (pij > 0.0) kl += pij * std::log(pij / std::max(q(i, j), kFloor));
    }
  }
  return kl;
}

Projection tsne(const EmbeddingMatrix& x, const TsneParams& p) {
  const Eigen::Index n = x.rows();
  if (n < 5) throw Error(ErrorCode::TooFewPoints, "t-SNE needs at least 5 points, got " + std::to_string(n));
  if (p.n_iter < 250) throw Error(ErrorCode::InvalidArgument, "t-SNE n_iter must be >= 250");
  if (!(p.perplexity > 0.0) || !(p.learning_rate > 0.0) || !(p.early_exaggeration > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "t-SNE perplexity, learning rate and exaggeration must be positive");
  }

  const Matrix affinities = tsne_affinities(x.data, p.perplexity);
  Matrix pmat = affinities * p.early_exaggeration;

  Rng rng(p.seed);
  Matrix y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < 2; ++c) y(i, c) = rng.normal() * 1e-4;
  }

  Projection out;
  out.method = DrMethod::TSNE;
  out.node_order = x.node_order;
  out.params = to_json(p);
  out.params["perplexity_effective"] = std::min(p.perplexity, static_cast<double>(n - 1) / 3.0);
  out.kl_trace.push_back(kl_divergence(affinities, tsne_low_dim_affinities(y)));

  Matrix update = Matrix::Zero(n, 2);
  Matrix gains = Matrix::Ones(n, 2);
  Matrix num(n, n);
  Matrix grad(n, 2);
  double momentum = p.initial_momentum;

  for (int iter = 0; iter < p.n_iter; ++iter) {
    double z = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      num(i, i) = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double v = 1.0 / (1.0 + squared_distance(y, i, j));
        num(i, j) = v;
        num(j, i) = v;
        z += 2.0 * v;
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      double gx = 0.0;
      double gy = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double mult = (pmat(i, j) - num(i, j) / z) * num(i, j);
        gx += mult * (y(i, 0) - y(j, 0));
        gy += mult * (y(i, 1) - y(j, 1));
      }
      grad(i, 0) = 4.0 * gx;
      grad(i, 1) = 4.0 * gy;
    }

    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index c = 0; c < 2; ++c) {
        const bool same_sign = (grad(i, c) > 0.0) == (update(i, c) > 0.0);
        gains(i, c) = same_sign ? std::max(gains(i, c) * 0.8, 0.01) : gains(i, c) + 0.2;
        update(i, c) = momentum * update(i, c) - p.learning_rate * gains(i, c) * grad(i, c);
        y(i, c) += update(i, c);
      }
    }
    const Eigen::RowVectorXd mean = y.colwise().mean();
    y.rowwise() -= mean;

    if (iter + 1 == p.exaggeration_iters) {
      pmat = affinities;
      momentum = p.final_momentum;
    }
    if ((iter + 1) % 50 == 0 || iter + 1 == p.n_iter) {
      out.kl_trace.push_back(kl_divergence(affinities, tsne_low_dim_affinities(y)));
    }
  }

  out.data = std::move(y);
  return out;
}

}  // namespace ppkg
