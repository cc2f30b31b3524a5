#include "ppkg/report.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>

#include "ppkg/error.hpp"

namespace ppkg {

namespace {

constexpr std::array<ClusterMethod, 5> kTableRows = {ClusterMethod::MBKMeans, ClusterMethod::Agglomerative,
                                                     ClusterMethod::HDBSCAN, ClusterMethod::Spectral,
                                                     ClusterMethod::LDA};
constexpr std::array<DrMethod, 3> kTableColumns = {DrMethod::TSNE, DrMethod::UMAP, DrMethod::PCA};

std::string format_score(const MetricValue* v, bool dbi) {
  if (v == nullptr) return "n/a";
  const auto& score = dbi ? v->davies_bouldin : v->silhouette;
  if (!score) return "undef";
  if (std::isinf(*score)) return "inf";
  return fmt::format("{:.4f}", *score);
}

nlohmann::json score_json(const std::optional<double>& s) {
  if (!s || !std::isfinite(*s)) return nullptr;
  return *s;
}

}  // namespace

void MetricsReport::add(const MetricCell& cell) {
  if (!cells_.emplace(std::make_pair(cell.clustering, cell.dr), cell.value).second) {
    throw Error(ErrorCode::DuplicateCell, std::string(display_name(cell.clustering)) + " / " +
                                              std::string(display_name(cell.dr)) + " reported twice");
  }
}

const MetricValue* MetricsReport::find(ClusterMethod c, DrMethod d) const {
  auto it = cells_.find({c, d});
  return it == cells_.end() ? nullptr : &it->second;
}

std::vector<ClusterMethod> MetricsReport::rows() const {
  std::vector<ClusterMethod> out(kTableRows.begin(), kTableRows.end());
  for (const auto& [key, v] : cells_) {
    if (key.first == ClusterMethod::DBSCAN) {
      out.push_back(ClusterMethod::DBSCAN);
      break;
    }
  }
  return out;
}

std::vector<MetricCell> MetricsReport::cells() const {
  std::vector<MetricCell> out;
  for (ClusterMethod c : rows()) {
    for (DrMethod d : kTableColumns) {
      if (const MetricValue* v = find(c, d)) out.push_back({d, c, *v});
    }
  }
  return out;
}

std::size_t MetricsReport::defined_count() const {
  std::size_t n = 0;
  for (const auto& [key, v] : cells_) n += v.defined() ? 1 : 0;
  return n;
}

std::string MetricsReport::to_csv() const {
  std::string out;
  const auto header = [&] {
    out += "clustering";
    for (DrMethod d : kTableColumns) {
      out += ',';
      out += display_name(d);
    }
    out += '\n';
  };
  for (bool dbi : {false, true}) {
    out += dbi ? "davies_bouldin\n" : "silhouette\n";
    header();
    for (ClusterMethod c : rows()) {
      out += display_name(c);
      for (DrMethod d : kTableColumns) {
        out += ',';
        out += format_score(find(c, d), dbi);
      }
      out += '\n';
    }
  }
  if (!scope_.empty()) out += "# scope: " + scope_ + "\n";
  for (ClusterMethod c : rows()) {
    for (DrMethod d : kTableColumns) {
      const MetricValue* v = find(c, d);
      if (v != nullptr && !v->defined()) {
        out += fmt::format("# undef: {} / {} noise_fraction={:.4f} n_evaluated={}\n", display_name(c),
                           display_name(d), v->noise_fraction, v->n_evaluated);
      } else if (v != nullptr && v->noise_fraction > 0.0) {
        out += fmt::format("# noise: {} / {} noise_fraction={:.4f} (excluded from scores)\n", display_name(c),
                           display_name(d), v->noise_fraction);
      }
    }
  }
  if (!cells_.empty()) {
    out += "# LDA labels come from node text and are shared by every column; only the projection differs.\n";
  }
  return out;
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["scope"] = scope_;
  j["columns"] = nlohmann::ordered_json::array();
  for (DrMethod d : kTableColumns) j["columns"].push_back(std::string(to_string(d)));
  j["cells"] = nlohmann::ordered_json::array();
  for (const auto& cell : cells()) {
    nlohmann::ordered_json c;
    c["clustering"] = std::string(to_string(cell.clustering));
    c["dr"] = std::string(to_string(cell.dr));
    c["silhouette"] = score_json(cell.value.silhouette);
    c["davies_bouldin"] = score_json(cell.value.davies_bouldin);
    c["coincident_centroids"] = cell.value.coincident_centroids;
    c["n_evaluated"] = cell.value.n_evaluated;
    c["noise_fraction"] = cell.value.noise_fraction;
    j["cells"].push_back(std::move(c));
  }
  return j.dump(2) + "\n";
}

MetricsReport build_metrics_report(std::span<const MetricCell> cells, std::string scope) {
  MetricsReport r(std::move(scope));
  for (const auto& c : cells) r.add(c);
  return r;
}

MetricsReport corpus_mean(std::span<const MetricsReport> reports) {
  struct Acc {
    double sil = 0.0, dbi = 0.0, noise = 0.0;
    int n_sil = 0, n_dbi = 0, n = 0;
    std::size_t evaluated = 0;
  };
  std::map<std::pair<ClusterMethod, DrMethod>, Acc> acc;
  for (const auto& r : reports) {
    for (const auto& cell : r.cells()) {
      Acc& a = acc[{cell.clustering, cell.dr}];
      ++a.n;
      a.noise += cell.value.noise_fraction;
      a.evaluated += cell.value.n_evaluated;
      if (cell.value.silhouette) {
        a.sil += *cell.value.silhouette;
        ++a.n_sil;
      }
      if (cell.value.davies_bouldin) {
        a.dbi += *cell.value.davies_bouldin;
        ++a.n_dbi;
      }
    }
  }
  MetricsReport out(fmt::format("corpus mean over {} policies", reports.size()));
  for (const auto& [key, a] : acc) {
    MetricValue v;
    if (a.n_sil > 0) v.silhouette = a.sil / a.n_sil;
    if (a.n_dbi > 0) v.davies_bouldin = a.dbi / a.n_dbi;
    v.coincident_centroids = v.davies_bouldin && std::isinf(*v.davies_bouldin);
    v.noise_fraction = a.noise / a.n;
    v.n_evaluated = a.evaluated;
    out.add({key.second, key.first, v});
  }
  return out;
}

}  // namespace ppkg
