#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ppkg/metrics.hpp"

namespace ppkg {

struct MetricCell {
  DrMethod dr;
  ClusterMethod clustering;
  MetricValue value;
};

/// Clustering x DR grid laid out like the published comparison table:
/// rows MB K-means, Agglomerative, HDBSCAN, Spectral, LDA (plus DBSCAN when
/// present), columns t-SNE, UMAP, PCA; a silhouette stanza then a
/// Davies-Bouldin stanza.
class MetricsReport {
 public:
  MetricsReport() = default;
  explicit MetricsReport(std::string scope) : scope_(std::move(scope)) {}

  /// Throws DuplicateCell.
  void add(const MetricCell& cell);

  const MetricValue* find(ClusterMethod c, DrMethod d) const;
  std::size_t size() const noexcept { return cells_.size(); }
  const std::string& scope() const noexcept { return scope_; }
  std::vector<ClusterMethod> rows() const;
  std::vector<MetricCell> cells() const;

  /// Number of cells with both scores defined.
  std::size_t defined_count() const;

  /// Four-decimal values; "undef" for undefined cells (footnoted with their
  /// noise fraction), "n/a" for cells never computed, "inf" for coincident
  /// centroids. Footer lines start with '#'.
  std::string to_csv() const;
  std::string to_json() const;

 private:
  std::string scope_;
  std::map<std::pair<ClusterMethod, DrMethod>, MetricValue> cells_;
};

MetricsReport build_metrics_report(std::span<const MetricCell> cells, std::string scope = "");

/// Unweighted mean across policies of every defined score, per cell.
MetricsReport corpus_mean(std::span<const MetricsReport> reports);

}  // namespace ppkg
