#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "ppkg/error.hpp"
#include "ppkg/topics.hpp"

namespace ppkg {

Annotations annotate_labels(std::span<const int> labels, std::span<const std::string> node_labels, int top_n) {
  if (labels.size() != node_labels.size()) throw Error(ErrorCode::LengthMismatch, "labels and node labels differ in length");
  if (top_n < 1) throw Error(ErrorCode::InvalidArgument, "top_n must be positive");

  std::map<int, std::map<std::string, int>> counts;
  std::map<int, int> totals;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) continue;
    auto& c = counts[labels[i]];
    for (auto& tok : tokenize(node_labels[i])) {
      ++c[tok];
      ++totals[labels[i]];
    }
  }
  std::map<std::string, int> df;
  for (const auto& [cluster, terms] : counts) {
    for (const auto& [term, n] : terms) ++df[term];
  }
  const auto n_clusters = static_cast<double>(counts.size());

  Annotations out;
  for (const auto& [cluster, terms] : counts) {
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& [term, n] : terms) {
      const double tf = static_cast<double>(n) / static_cast<double>(totals[cluster]);
      scored.emplace_back(tf * std::log(n_clusters / df[term]), term);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    auto& list = out[cluster];
    for (std::size_t i = 0; i < scored.size() && static_cast<int>(i) < top_n; ++i) list.push_back(scored[i].second);
  }
  return out;
}

Annotations annotate_clusters(const ClusterAssignment& a, const PolicyGraph& g, int top_n) {
  if (a.labels.size() != g.node_count()) throw Error(ErrorCode::LengthMismatch, "assignment not aligned with graph");
  std::vector<std::string> node_labels;
  node_labels.reserve(g.node_count());
  for (const auto& n : g.nodes()) node_labels.push_back(n.label);
  return annotate_labels(a.labels, node_labels, top_n);
}

std::string annotations_to_json(const Annotations& a) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [cluster, terms] : a) j[std::to_string(cluster)] = terms;
  return j.dump(2) + "\n";
}

}  // namespace ppkg
