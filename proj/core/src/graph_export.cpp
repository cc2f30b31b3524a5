#include <json.hpp>

#include "ppkg/error.hpp"
#include "ppkg/graph.hpp"

namespace ppkg {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json attributes_json(const AttributeMap& attrs) {
  ordered_json out = ordered_json::object();
  for (const auto& [k, v] : attrs) out[k] = v;
  return out;
}

AttributeMap attributes_from(const nlohmann::json& obj) {
  AttributeMap out;
  if (auto it = obj.find("attributes"); it != obj.end()) {
    for (const auto& [k, v] : it->items()) out[k] = v.get<std::string>();
  }
  return out;
}

}  // namespace

std::string export_graph_json(const PolicyGraph& g, const DegreeSummary& degrees, std::size_t n_buckets) {
  ordered_json doc;
  doc["nodes"] = ordered_json::array();
  doc["edges"] = ordered_json::array();
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto& n = g.nodes()[i];
    const std::size_t deg = degrees.degrees.at(i);
    ordered_json node;
    node["id"] = n.id;
    node["label"] = n.label;
    node["type"] = n.node_type;
    node["degree"] = deg;
    node["color_bucket"] = degree_color_bucket(deg, degrees.max_degree, n_buckets);
    if (!n.attributes.empty()) node["attributes"] = attributes_json(n.attributes);
    doc["nodes"].push_back(std::move(node));
  }
  for (const auto& e : g.edges()) {
    ordered_json edge;
    edge["source"] = e.source;
    edge["target"] = e.target;
    edge["relationship"] = e.relationship;
    edge["text"] = e.text;
    edge["id"] = e.edge_id;
    if (!e.attributes.empty()) edge["attributes"] = attributes_json(e.attributes);
    doc["edges"].push_back(std::move(edge));
  }
  return doc.dump() + "\n";
}

PolicyGraph parse_graph_json(std::string_view json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  try {
    std::vector<PolicyNode> nodes;
    for (const auto& n : doc.at("nodes")) {
      nodes.push_back(PolicyNode{n.at("id").get<std::string>(), n.value("label", std::string{}),
                                 n.value("type", std::string{}), attributes_from(n)});
    }
    std::vector<PolicyEdge> edges;
    for (const auto& e : doc.at("edges")) {
      edges.push_back(PolicyEdge{e.at("source").get<std::string>(), e.at("target").get<std::string>(),
                                 e.value("relationship", std::string{}), e.value("text", std::string{}),
                                 e.at("id").get<std::string>(), attributes_from(e)});
    }
    return PolicyGraph(std::move(nodes), std::move(edges));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
}

}  // namespace ppkg
