#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

#include "ppkg/cluster.hpp"
#include "ppkg/error.hpp"
#include "ppkg/io.hpp"

namespace ppkg {

namespace {

std::string lowercase(std::string_view s) {
  std::string out;
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(ClusterMethod m) noexcept {
  switch (m) {
    case ClusterMethod::MBKMeans: return "mbkmeans";
    case ClusterMethod::Agglomerative: return "agglomerative";
    case ClusterMethod::DBSCAN: return "dbscan";
    case ClusterMethod::HDBSCAN: return "hdbscan";
    case ClusterMethod::Spectral: return "spectral";
    case ClusterMethod::LDA: return "lda";
  }
  return "mbkmeans";
}

std::string_view display_name(ClusterMethod m) noexcept {
  switch (m) {
    case ClusterMethod::MBKMeans: return "MB K-means";
    case ClusterMethod::Agglomerative: return "Agglomerative";
    case ClusterMethod::DBSCAN: return "DBSCAN";
    case ClusterMethod::HDBSCAN: return "HDBSCAN";
    case ClusterMethod::Spectral: return "Spectral";
    case ClusterMethod::LDA: return "LDA";
  }
  return "MB K-means";
}

ClusterMethod cluster_method_from_string(std::string_view s) {
  const std::string l = lowercase(s);
  if (l == "mbkmeans" || l == "minibatch_kmeans" || l == "mb-kmeans") return ClusterMethod::MBKMeans;
  if (l == "agglomerative") return ClusterMethod::Agglomerative;
  if (l == "dbscan") return ClusterMethod::DBSCAN;
  if (l == "hdbscan") return ClusterMethod::HDBSCAN;
  if (l == "spectral") return ClusterMethod::Spectral;
  if (l == "lda") return ClusterMethod::LDA;
  throw Error(ErrorCode::InvalidArgument, "unknown clustering method '" + std::string(s) + "'");
}

std::string_view to_string(Linkage l) noexcept {
  switch (l) {
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
    case Linkage::Ward: return "ward";
  }
  return "ward";
}

Linkage linkage_from_string(std::string_view s) {
  const std::string l = lowercase(s);
  if (l == "single") return Linkage::Single;
  if (l == "complete") return Linkage::Complete;
  if (l == "average") return Linkage::Average;
  if (l == "ward") return Linkage::Ward;
  throw Error(ErrorCode::InvalidArgument, "linkage: unknown value '" + std::string(s) + "'");
}

nlohmann::json to_json(const ClusterParams& p) {
  nlohmann::json affinity;
  if (p.affinity.kind == Affinity::Kind::Rbf) {
    affinity = {{"kind", "rbf"}, {"gamma", p.affinity.gamma}};
  } else {
    affinity = {{"kind", "knn"}, {"neighbors", p.affinity.neighbors}};
  }
  return {{"k", p.k},
          {"batch_size", p.batch_size},
          {"max_epochs", p.max_epochs},
          {"linkage", std::string(to_string(p.linkage))},
          {"eps", p.eps},
          {"min_pts", p.min_pts},
          {"min_cluster_size", p.min_cluster_size},
          {"min_samples", p.min_samples},
          {"affinity", affinity},
          {"spectral_restarts", p.spectral_restarts},
          {"n_topics", p.n_topics},
          {"alpha", p.alpha},
          {"beta", p.beta},
          {"gibbs_iters", p.gibbs_iters},
          {"seed", p.seed}};
}

namespace {

template <typename T>
void read_field(const nlohmann::json& j, const char* name, T& out) {
  auto it = j.find(name);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + ": wrong type");
  }
}

}  // namespace

ClusterParams cluster_params_from_json(const nlohmann::json& j, ClusterParams p) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "params: expected an object");
  read_field(j, "k", p.k);
  read_field(j, "batch_size", p.batch_size);
  read_field(j, "max_epochs", p.max_epochs);
  if (auto it = j.find("linkage"); it != j.end()) {
    if (!it->is_string()) throw Error(ErrorCode::InvalidArgument, "linkage: wrong type");
    p.linkage = linkage_from_string(it->get<std::string>());
  }
  read_field(j, "eps", p.eps);
  read_field(j, "min_pts", p.min_pts);
  read_field(j, "min_cluster_size", p.min_cluster_size);
  read_field(j, "min_samples", p.min_samples);
  if (auto it = j.find("affinity"); it != j.end()) {
    const auto& a = *it;
    std::string kind = a.is_string() ? a.get<std::string>() : a.value("kind", std::string("rbf"));
    if (kind == "rbf") {
      p.affinity.kind = Affinity::Kind::Rbf;
      if (a.is_object()) read_field(a, "gamma", p.affinity.gamma);
    } else if (kind == "knn") {
      p.affinity.kind = Affinity::Kind::Knn;
      if (a.is_object()) read_field(a, "neighbors", p.affinity.neighbors);
    } else {
      throw Error(ErrorCode::InvalidArgument, "affinity: unknown kind '" + kind + "'");
    }
  }
  read_field(j, "spectral_restarts", p.spectral_restarts);
  read_field(j, "n_topics", p.n_topics);
  read_field(j, "alpha", p.alpha);
  read_field(j, "beta", p.beta);
  read_field(j, "gibbs_iters", p.gibbs_iters);
  read_field(j, "seed", p.seed);
  validate(p);
  return p;
}

void validate(const ClusterParams& p) {
  auto require = [](bool ok, const char* field) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, std::string(field) + ": out of range");
  };
  require(p.k >= 1, "k");
  require(p.batch_size >= 1, "batch_size");
  require(p.max_epochs >= 1, "max_epochs");
  require(p.eps > 0.0, "eps");
  require(p.min_pts >= 1, "min_pts");
  require(p.min_cluster_size >= 1, "min_cluster_size");
  require(p.min_samples >= 0, "min_samples");
  require(p.affinity.kind == Affinity::Kind::Knn || p.affinity.gamma > 0.0, "affinity.gamma");
  require(p.affinity.kind == Affinity::Kind::Rbf || p.affinity.neighbors >= 1, "affinity.neighbors");
  require(p.spectral_restarts >= 1, "spectral_restarts");
  require(p.n_topics >= 1, "n_topics");
  require(p.alpha > 0.0, "alpha");
  require(p.beta > 0.0, "beta");
  require(p.gibbs_iters >= 1, "gibbs_iters");
}

std::vector<int> canonicalize_labels(std::span<const int> labels) {
  std::unordered_map<int, int> remap;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) {
    if (l < 0) {
      out.push_back(kNoise);
      continue;
    }
    auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
    out.push_back(it->second);
  }
  return out;
}

int count_clusters(std::span<const int> labels) {
  std::set<int> seen;
  for (int l : labels) {
    if (l >= 0) seen.insert(l);
  }
  return static_cast<int>(seen.size());
}

ClusterAssignment make_assignment(std::vector<int> labels, ClusterMethod method, nlohmann::json params,
                                  std::vector<std::string> node_order) {
  ClusterAssignment a;
  a.labels = canonicalize_labels(labels);
  a.k_found = count_clusters(a.labels);
  a.method = method;
  a.params = std::move(params);
  a.node_order = std::move(node_order);
  return a;
}

std::string assignment_to_csv(const ClusterAssignment& a) {
  std::string out = "node_id,label\n";
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    out += io::csv_field(i < a.node_order.size() ? a.node_order[i] : std::to_string(i));
    out += ',';
    out += std::to_string(a.labels[i]);
    out += '\n';
  }
  return out;
}

}  // namespace ppkg
