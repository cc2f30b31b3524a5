#include "ppkg/graph.hpp"

#include <expat.h>

#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "ppkg/error.hpp"

namespace ppkg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::DuplicateNodeId: return "DuplicateNodeId";
    case ErrorCode::DuplicateEdgeId: return "DuplicateEdgeId";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::MissingNode: return "MissingNode";
    case ErrorCode::RaggedDimensions: return "RaggedDimensions";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DuplicateCell: return "DuplicateCell";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NoValidInputs: return "NoValidInputs";
    case ErrorCode::Io: return "Io";
    case ErrorCode::BindFailure: return "BindFailure";
  }
  return "Unknown";
}

PolicyGraph::PolicyGraph(std::vector<PolicyNode> nodes, std::vector<PolicyEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  node_index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id.empty()) {
      throw Error(ErrorCode::InvalidArgument, "node at position " + std::to_string(i) + " has an empty id");
    }
    if (!node_index_.emplace(nodes_[i].id, i).second) {
      throw Error(ErrorCode::DuplicateNodeId, "node id '" + nodes_[i].id + "' declared twice");
    }
  }
  std::unordered_set<std::string> edge_ids;
  for (const auto& e : edges_) {
    if (!node_index_.contains(e.source)) {
      throw Error(ErrorCode::DanglingEdge, "edge '" + e.edge_id + "' references unknown source '" + e.source + "'");
    }
    if (!node_index_.contains(e.target)) {
      throw Error(ErrorCode::DanglingEdge, "edge '" + e.edge_id + "' references unknown target '" + e.target + "'");
    }
    if (!edge_ids.insert(e.edge_id).second) {
      throw Error(ErrorCode::DuplicateEdgeId, "edge id '" + e.edge_id + "' used twice");
    }
  }
}

std::optional<std::size_t> PolicyGraph::index_of(std::string_view id) const {
  auto it = node_index_.find(std::string(id));
  if (it == node_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> PolicyGraph::node_ids() const {
  std::vector<std::string> ids;
  ids.reserve(nodes_.size());
  for (const auto& n : nodes_) ids.push_back(n.id);
  return ids;
}

namespace {

struct KeyDecl {
  std::string name;
  std::string domain;  // node, edge, graph, all
  std::optional<std::string> default_value;
};

struct RawElement {
  std::map<std::string, std::string> xml_attrs;
  std::vector<std::pair<std::string, std::string>> data;  // key id -> value, document order
};

enum class Context { None, Key, KeyDefault, Node, Edge, Data };

struct ParseState {
  XML_Parser parser = nullptr;
  std::map<std::string, KeyDecl> keys;
  std::string current_key_id;
  std::vector<RawElement> nodes;
  std::vector<RawElement> edges;
  std::vector<Context> stack;
  std::string text;
  std::string data_key;
  bool saw_graphml_root = false;
  std::string error;
};

std::string_view local_name(const XML_Char* name) {
  std::string_view s(name);
  auto colon = s.rfind(':');
  return colon == std::string_view::npos ? s : s.substr(colon + 1);
}

std::map<std::string, std::string> collect_attrs(const XML_Char** atts) {
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; atts[i] != nullptr; i += 2) {
    out.emplace(std::string(local_name(atts[i])), atts[i + 1]);
  }
  return out;
}

void fail(ParseState& st, std::string message) {
  if (st.error.empty()) {
    st.error = std::move(message) + " (line " + std::to_string(XML_GetCurrentLineNumber(st.parser)) + ")";
  }
  XML_StopParser(st.parser, XML_FALSE);
}

Context innermost_owner(const ParseState& st) {
  for (auto it = st.stack.rbegin(); it != st.stack.rend(); ++it) {
    if (*it == Context::Node || *it == Context::Edge) return *it;
  }
  return Context::None;
}

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** atts) {
  auto& st = *static_cast<ParseState*>(user);
  const auto tag = local_name(name);
  auto attrs = collect_attrs(atts);

  if (st.stack.empty() && !st.saw_graphml_root) {
    if (tag != "graphml") {
      fail(st, "root element is <" + std::string(tag) + ">, expected <graphml>");
      return;
    }
    st.saw_graphml_root = true;
    st.stack.push_back(Context::None);
    return;
  }

  if (tag == "key") {
    auto id = attrs.find("id");
    if (id == attrs.end()) {
      fail(st, "<key> without id");
      return;
    }
    KeyDecl decl;
    auto nm = attrs.find("attr.name");
    decl.name = nm != attrs.end() ? nm->second : id->second;
    auto dom = attrs.find("for");
    decl.domain = dom != attrs.end() ? dom->second : "all";
    st.current_key_id = id->second;
    st.keys[id->second] = std::move(decl);
    st.stack.push_back(Context::Key);
  } else if (tag == "default" && !st.stack.empty() && st.stack.back() == Context::Key) {
    st.text.clear();
    st.stack.push_back(Context::KeyDefault);
  } else if (tag == "node") {
    auto id = attrs.find("id");
    if (id == attrs.end()) {
      fail(st, "<node> without id");
      return;
    }
    st.nodes.push_back(RawElement{std::move(attrs), {}});
    st.stack.push_back(Context::Node);
  } else if (tag == "edge") {
    if (!attrs.contains("source") || !attrs.contains("target")) {
      fail(st, "<edge> without source/target");
      return;
    }
    st.edges.push_back(RawElement{std::move(attrs), {}});
    st.stack.push_back(Context::Edge);
  } else if (tag == "data") {
    auto key = attrs.find("key");
    if (key == attrs.end()) {
      fail(st, "<data> without key");
      return;
    }
    st.data_key = key->second;
    st.text.clear();
    st.stack.push_back(Context::Data);
  } else {
    st.stack.push_back(Context::None);
  }
}

void XMLCALL on_end(void* user, const XML_Char* /*name*/) {
  auto& st = *static_cast<ParseState*>(user);
  if (st.stack.empty()) return;
  const Context ctx = st.stack.back();
  st.stack.pop_back();
  if (ctx == Context::KeyDefault) {
    st.keys[st.current_key_id].default_value = st.text;
  } else if (ctx == Context::Data) {
    switch (innermost_owner(st)) {
      case Context::Node: st.nodes.back().data.emplace_back(st.data_key, st.text); break;
      case Context::Edge: st.edges.back().data.emplace_back(st.data_key, st.text); break;
      default: break;  // graph-level data is not interpreted
    }
  }
}

void XMLCALL on_chars(void* user, const XML_Char* s, int len) {
  auto& st = *static_cast<ParseState*>(user);
  if (!st.stack.empty() && (st.stack.back() == Context::Data || st.stack.back() == Context::KeyDefault)) {
    st.text.append(s, static_cast<std::size_t>(len));
  }
}

struct ParserDeleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

/// Resolves data key ids to names and applies declared defaults.
AttributeMap resolve(const ParseState& st, const RawElement& el, std::string_view domain) {
  AttributeMap out;
  for (const auto& [key_id, value] : el.data) {
    auto it = st.keys.find(key_id);
    const std::string& name = it != st.keys.end() ? it->second.name : key_id;
    out[name] = value;
  }
  for (const auto& [id, decl] : st.keys) {
    if (decl.default_value && (decl.domain == domain || decl.domain == "all")) {
      out.try_emplace(decl.name, *decl.default_value);
    }
  }
  return out;
}

std::string take(AttributeMap& attrs, const std::string& key) {
  auto it = attrs.find(key);
  if (it == attrs.end()) return {};
  std::string v = std::move(it->second);
  attrs.erase(it);
  return v;
}

}  // namespace

PolicyGraph parse_graphml(std::string_view bytes) {
  std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreate(nullptr));
  if (!parser) throw Error(ErrorCode::MalformedXml, "could not allocate XML parser");

  ParseState st;
  st.parser = parser.get();
  XML_SetUserData(parser.get(), &st);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_chars);

  const auto status = XML_Parse(parser.get(), bytes.data(), static_cast<int>(bytes.size()), XML_TRUE);
  if (!st.error.empty()) throw Error(ErrorCode::MalformedXml, st.error);
  if (status != XML_STATUS_OK) {
    throw Error(ErrorCode::MalformedXml,
                std::string(XML_ErrorString(XML_GetErrorCode(parser.get()))) + " (line " +
                    std::to_string(XML_GetCurrentLineNumber(parser.get())) + ")");
  }
  if (!st.saw_graphml_root) throw Error(ErrorCode::MalformedXml, "no <graphml> root element");

  std::vector<PolicyNode> nodes;
  nodes.reserve(st.nodes.size());
  for (const auto& raw : st.nodes) {
    PolicyNode n;
    n.id = raw.xml_attrs.at("id");
    n.attributes = resolve(st, raw, "node");
    n.label = take(n.attributes, "label");
    n.node_type = take(n.attributes, "type");
    nodes.push_back(std::move(n));
  }

  std::vector<PolicyEdge> edges;
  edges.reserve(st.edges.size());
  for (std::size_t i = 0; i < st.edges.size(); ++i) {
    const auto& raw = st.edges[i];
    PolicyEdge e;
    e.source = raw.xml_attrs.at("source");
    e.target = raw.xml_attrs.at("target");
    e.attributes = resolve(st, raw, "edge");
    e.relationship = take(e.attributes, "relationship");
    e.text = take(e.attributes, "text");
    if (auto id = raw.xml_attrs.find("id"); id != raw.xml_attrs.end()) {
      e.edge_id = id->second;
    } else if (auto data_id = e.attributes.find("id"); data_id != e.attributes.end()) {
      e.edge_id = take(e.attributes, "id");
    } else {
      e.edge_id = "e" + std::to_string(i);
    }
    edges.push_back(std::move(e));
  }

  return PolicyGraph(std::move(nodes), std::move(edges));
}

PolicyGraph parse_graphml_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_graphml(bytes);
}

DegreeSummary degree_summary(const PolicyGraph& g) {
  DegreeSummary s;
  s.degrees.assign(g.node_count(), 0);
  for (const auto& e : g.edges()) {
    ++s.degrees[*g.index_of(e.source)];
    ++s.degrees[*g.index_of(e.target)];
  }
  s.by_id.reserve(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    s.by_id.emplace(g.nodes()[i].id, s.degrees[i]);
    s.max_degree = std::max(s.max_degree, s.degrees[i]);
  }
  return s;
}

std::size_t degree_color_bucket(std::size_t degree, std::size_t max_degree, std::size_t n_buckets) {
  if (n_buckets == 0) throw Error(ErrorCode::InvalidArgument, "n_buckets must be positive");
  if (degree > max_degree) throw Error(ErrorCode::InvalidArgument, "degree exceeds max_degree");
  return n_buckets * degree / (max_degree + 1);
}

}  // namespace ppkg
