#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppkg/cluster.hpp"
#include "ppkg/dimred.hpp"
#include "ppkg/graph.hpp"
#include "ppkg/layout.hpp"
#include "ppkg/metrics.hpp"
#include "ppkg/report.hpp"
#include "ppkg/topics.hpp"

namespace ppkg {

/// Every knob of a run. Stage seeds are derived from `seed`; seeds embedded
/// in the stage parameter blocks are ignored.
struct RunConfig {
  std::vector<std::string> inputs;
  std::string output_dir = "out";
  std::optional<std::uint64_t> seed;
  LayoutParams layout;
  std::vector<DrMethod> dr = {DrMethod::TSNE, DrMethod::UMAP, DrMethod::PCA};
  TsneParams tsne;
  UmapParams umap;
  std::vector<ClusterMethod> clustering = {ClusterMethod::MBKMeans, ClusterMethod::Agglomerative,
                                           ClusterMethod::HDBSCAN, ClusterMethod::Spectral, ClusterMethod::LDA};
  ClusterParams cluster;
  int annotation_terms = 3;
  int workers = 0;  // 0: hardware concurrency
};

/// Throws InvalidConfig naming the offending field.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
/// Includes `output_dir` only when `with_output` is set.
nlohmann::json to_json(const RunConfig& c, bool with_output = true);
/// Seed present, at least one DR and one clustering method, valid parameters.
void validate(const RunConfig& c);

LayoutParams layout_params_for(const RunConfig& c);
TsneParams tsne_params_for(const RunConfig& c);
UmapParams umap_params_for(const RunConfig& c);
ClusterParams cluster_params_for(const RunConfig& c, ClusterMethod m, DrMethod dr);

Projection project(const EmbeddingMatrix& x, DrMethod dr, const RunConfig& c);
/// Geometric methods only; LDA needs documents.
ClusterAssignment cluster_projection(const Projection& y, ClusterMethod m, const ClusterParams& p);

struct CellResult {
  DrMethod dr;
  ClusterMethod clustering;
  std::optional<ClusterAssignment> assignment;
  Annotations annotations;
  MetricValue metrics;
  std::string svg;
  std::string error;  // empty on success

  bool ok() const noexcept { return error.empty(); }
};

struct PolicyAnalysis {
  std::string policy_id;
  EmbeddingMatrix embedding;
  std::map<DrMethod, Projection> projections;
  std::map<DrMethod, std::string> dr_errors;
  std::optional<ClusterAssignment> lda;
  Annotations lda_annotations;
  std::vector<CellResult> cells;  // DR-major in config order
  MetricsReport report;
};

/// Runs every configured DR and clustering over a precomputed embedding.
/// `docs` feed LDA, `node_labels` feed annotations; both align with rows.
PolicyAnalysis analyze_embedding(const std::string& policy_id, const EmbeddingMatrix& embedding,
                                 std::span<const std::vector<std::string>> docs,
                                 std::span<const std::string> node_labels, const RunConfig& c);

/// Layout followed by analyze_embedding.
PolicyAnalysis analyze_policy(const std::string& policy_id, const PolicyGraph& g, const RunConfig& c);

struct ArtifactEntry {
  std::string path;  // relative to the output directory, '/' separated
  std::string sha256;
  std::size_t bytes = 0;
};

struct FileError {
  std::string input;
  std::string code;
  std::string message;
};

struct RunArtifacts {
  std::vector<std::string> policies;
  std::vector<ArtifactEntry> artifacts;  // sorted by path; excludes the manifest
  std::vector<FileError> errors;
  MetricsReport corpus;
  std::filesystem::path manifest_path;

  /// 0 all inputs succeeded, 2 some failed.
  int exit_code() const noexcept { return errors.empty() ? 0 : 2; }
};

/// Directories expand to their *.graphml files (sorted); files pass through.
std::vector<std::string> expand_inputs(std::span<const std::string> inputs);

/// Writes per-policy artifacts under <output_dir>/<policy id>/, the corpus
/// report and manifest.json. Per-file failures are collected; throws
/// NoValidInputs when nothing succeeded.
RunArtifacts run_pipeline(const RunConfig& c);

}  // namespace ppkg
