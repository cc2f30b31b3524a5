#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ppkg {

/// Well-known tags emitted by the upstream extractor. Both vocabularies are
/// open: any other tag is kept verbatim.
namespace tags {
inline constexpr std::string_view kCollect = "COLLECT";
inline constexpr std::string_view kSubsum = "SUBSUM";
inline constexpr std::string_view kData = "DATA";
inline constexpr std::string_view kActor = "ACTOR";
}  // namespace tags

using AttributeMap = std::map<std::string, std::string>;

struct PolicyNode {
  std::string id;
  std::string label;
  std::string node_type;
  AttributeMap attributes;  // uninterpreted GraphML data keys

  bool operator==(const PolicyNode&) const = default;
};

struct PolicyEdge {
  std::string source;
  std::string target;
  std::string relationship;
  std::string text;
  std::string edge_id;
  AttributeMap attributes;

  bool operator==(const PolicyEdge&) const = default;
};

/// Immutable once built. Node order is the canonical row order for every
/// matrix derived from the graph.
class PolicyGraph {
 public:
  PolicyGraph() = default;

  /// Validates ids and edge endpoints; throws DuplicateNodeId, DuplicateEdgeId
  /// or DanglingEdge.
  PolicyGraph(std::vector<PolicyNode> nodes, std::vector<PolicyEdge> edges);

  const std::vector<PolicyNode>& nodes() const noexcept { return nodes_; }
  const std::vector<PolicyEdge>& edges() const noexcept { return edges_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  std::optional<std::size_t> index_of(std::string_view id) const;
  std::vector<std::string> node_ids() const;

  bool operator==(const PolicyGraph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  std::vector<PolicyNode> nodes_;
  std::vector<PolicyEdge> edges_;
  std::unordered_map<std::string, std::size_t> node_index_;
};

struct DegreeSummary {
  std::vector<std::size_t> degrees;  // aligned with graph node order
  std::unordered_map<std::string, std::size_t> by_id;
  std::size_t max_degree = 0;

  std::size_t of(const std::string& id) const { return by_id.at(id); }
};

/// Parses a GraphML document. Data keys are resolved by their `attr.name`
/// ("label", "type", "relationship", "text"); other keys land in
/// `attributes`. Missing attributes default to the key's declared default,
/// else the empty string.
PolicyGraph parse_graphml(std::string_view bytes);
PolicyGraph parse_graphml_file(const std::string& path);

/// Total (in + out) degree; a self-loop adds 2.
DegreeSummary degree_summary(const PolicyGraph& g);

/// floor(n_buckets * degree / (max_degree + 1)).
std::size_t degree_color_bucket(std::size_t degree, std::size_t max_degree, std::size_t n_buckets);

inline constexpr std::size_t kDefaultColorBuckets = 5;

/// Deterministic JSON export consumed by the explorer UI. Newline-terminated.
std::string export_graph_json(const PolicyGraph& g, const DegreeSummary& degrees,
                              std::size_t n_buckets = kDefaultColorBuckets);

/// Inverse of export_graph_json (degree and color fields are recomputed, not read).
PolicyGraph parse_graph_json(std::string_view json);

}  // namespace ppkg
