#include "ppkg/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <future>
#include <mutex>
#include <set>
#include <thread>

#include "ppkg/digest.hpp"
#include "ppkg/error.hpp"
#include "ppkg/io.hpp"
#include "ppkg/render.hpp"
#include "ppkg/rng.hpp"

namespace ppkg {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad_config(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, "config field '" + field + "': " + why);
}

template <typename T>
T get_field(const json& j, const std::string& key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad_config(path + key, e.what());
  }
}

const json& object_field(const json& j, const std::string& key, const std::string& path) {
  static const json kEmpty = json::object();
  if (!j.contains(key)) return kEmpty;
  const json& v = j.at(key);
  if (!v.is_object()) bad_config(path + key, "expected an object");
  return v;
}

template <typename Enum, typename Parse>
std::vector<Enum> method_list(const json& j, const std::string& field, Parse parse) {
  if (!j.is_array()) bad_config(field, "expected an array of method names");
  std::vector<Enum> out;
  for (const auto& item : j) {
    if (!item.is_string()) bad_config(field, "expected a method name");
    Enum m;
    try {
      m = parse(item.get<std::string>());
    } catch (const Error& e) {
      bad_config(field, e.what());
    }
    if (std::find(out.begin(), out.end(), m) != out.end()) bad_config(field, "duplicate method");
    out.push_back(m);
  }
  return out;
}

std::uint64_t stage_seed(const RunConfig& c, const std::string& tag) {
  return derive_seed(c.seed.value_or(0), tag);
}

}  // namespace

// ---------------------------------------------------------------- config

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) bad_config("<root>", "expected an object");
  RunConfig c;
  if (j.contains("inputs")) {
    const json& in = j.at("inputs");
    if (in.is_string()) {
      c.inputs = {in.get<std::string>()};
    } else {
      c.inputs = get_field<std::vector<std::string>>(j, "inputs", "", {});
    }
  }
  c.output_dir = get_field<std::string>(j, "output_dir", "", c.output_dir);
  if (j.contains("seed") && !j.at("seed").is_null()) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      bad_config("seed", "expected a non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }

  const json& layout = object_field(j, "layout", "");
  c.layout.dim = get_field<int>(layout, "dim", "layout.", c.layout.dim);
  c.layout.iterations = get_field<int>(layout, "iterations", "layout.", c.layout.iterations);
  if (layout.contains("optimal_distance") && !layout.at("optimal_distance").is_null()) {
    c.layout.optimal_distance = get_field<double>(layout, "optimal_distance", "layout.", 0.0);
  }

  const json& dr = object_field(j, "dr", "");
  if (dr.contains("methods")) {
    c.dr = method_list<DrMethod>(dr.at("methods"), "dr.methods", [](const std::string& s) { return dr_method_from_string(s); });
  }
  try {
    c.tsne = tsne_params_from_json(object_field(dr, "tsne", "dr."), c.tsne);
  } catch (const Error& e) {
    bad_config("dr.tsne", e.what());
  }
  try {
    c.umap = umap_params_from_json(object_field(dr, "umap", "dr."), c.umap);
  } catch (const Error& e) {
    bad_config("dr.umap", e.what());
  }

  const json& cl = object_field(j, "clustering", "");
  if (cl.contains("methods")) {
    c.clustering = method_list<ClusterMethod>(cl.at("methods"), "clustering.methods",
                                              [](const std::string& s) { return cluster_method_from_string(s); });
  }
  try {
    c.cluster = cluster_params_from_json(object_field(cl, "params", "clustering."), c.cluster);
  } catch (const Error& e) {
    bad_config("clustering.params", e.what());
  }

  c.annotation_terms = get_field<int>(j, "annotation_terms", "", c.annotation_terms);
  c.workers = get_field<int>(j, "workers", "", c.workers);
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, "config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

json to_json(const RunConfig& c, bool with_output) {
  json j;
  j["inputs"] = c.inputs;
  if (with_output) j["output_dir"] = c.output_dir;
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["layout"] = {{"dim", c.layout.dim}, {"iterations", c.layout.iterations}};
  j["layout"]["optimal_distance"] = c.layout.optimal_distance ? json(*c.layout.optimal_distance) : json(nullptr);
  json dr_methods = json::array();
  for (DrMethod m : c.dr) dr_methods.push_back(std::string(to_string(m)));
  json tsne = to_json(c.tsne);
  json umap = to_json(c.umap);
  tsne.erase("seed");
  umap.erase("seed");
  j["dr"] = {{"methods", dr_methods}, {"tsne", tsne}, {"umap", umap}};
  json cl_methods = json::array();
  for (ClusterMethod m : c.clustering) cl_methods.push_back(std::string(to_string(m)));
  json params = to_json(c.cluster);
  params.erase("seed");
  j["clustering"] = {{"methods", cl_methods}, {"params", params}};
  j["annotation_terms"] = c.annotation_terms;
  j["workers"] = c.workers;
  return j;
}

void validate(const RunConfig& c) {
  if (!c.seed) bad_config("seed", "a seed is mandatory");
  if (c.dr.empty()) bad_config("dr.methods", "select at least one method");
  if (c.clustering.empty()) bad_config("clustering.methods", "select at least one method");
  if (c.layout.dim < 2) bad_config("layout.dim", "must be at least 2");
  if (c.layout.iterations < 1) bad_config("layout.iterations", "must be positive");
  if (c.layout.optimal_distance && !(*c.layout.optimal_distance > 0.0)) {
    bad_config("layout.optimal_distance", "must be positive");
  }
  if (c.annotation_terms < 1) bad_config("annotation_terms", "must be positive");
  if (c.workers < 0) bad_config("workers", "must be non-negative");
  try {
    validate(c.cluster);
  } catch (const Error& e) {
    bad_config("clustering.params", e.what());
  }
}

LayoutParams layout_params_for(const RunConfig& c) {
  LayoutParams p = c.layout;
  p.seed = stage_seed(c, "layout");
  return p;
}

TsneParams tsne_params_for(const RunConfig& c) {
  TsneParams p = c.tsne;
  p.seed = stage_seed(c, "dr/tsne");
  return p;
}

UmapParams umap_params_for(const RunConfig& c) {
  UmapParams p = c.umap;
  p.seed = stage_seed(c, "dr/umap");
  return p;
}

ClusterParams cluster_params_for(const RunConfig& c, ClusterMethod m, DrMethod dr) {
  ClusterParams p = c.cluster;
  p.seed = m == ClusterMethod::LDA ? stage_seed(c, "cluster/lda")
                                   : stage_seed(c, "cluster/" + std::string(to_string(m)) + "/" +
                                                       std::string(to_string(dr)));
  return p;
}

// ---------------------------------------------------------------- analysis

Projection project(const EmbeddingMatrix& x, DrMethod dr, const RunConfig& c) {
  switch (dr) {
    case DrMethod::PCA: return pca(x, 2);
    case DrMethod::TSNE: return tsne(x, tsne_params_for(c));
    case DrMethod::UMAP: return umap(x, umap_params_for(c));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown DR method");
}

ClusterAssignment cluster_projection(const Projection& y, ClusterMethod m, const ClusterParams& p) {
  switch (m) {
    case ClusterMethod::MBKMeans: return minibatch_kmeans(y, p);
    case ClusterMethod::Agglomerative: return agglomerative(y, p);
    case ClusterMethod::DBSCAN: return dbscan(y, p);
    case ClusterMethod::HDBSCAN: return hdbscan(y, p);
    case ClusterMethod::Spectral: return spectral(y, p);
    case ClusterMethod::LDA: break;
  }
  throw Error(ErrorCode::InvalidArgument, "LDA clusters documents, not projections");
}

PolicyAnalysis analyze_embedding(const std::string& policy_id, const EmbeddingMatrix& embedding,
                                 std::span<const std::vector<std::string>> docs,
                                 std::span<const std::string> node_labels, const RunConfig& c) {
  validate(c);
  PolicyAnalysis out;
  out.policy_id = policy_id;
  out.embedding = embedding;

  // DR methods are independent; run them concurrently and collect in config order.
  std::vector<std::future<Projection>> jobs;
  jobs.reserve(c.dr.size());
  for (DrMethod dr : c.dr) {
    jobs.push_back(std::async(std::launch::async, [&embedding, dr, &c] { return project(embedding, dr, c); }));
  }
  for (std::size_t i = 0; i < c.dr.size(); ++i) {
    try {
      out.projections.emplace(c.dr[i], jobs[i].get());
    } catch (const std::exception& e) {
      spdlog::warn("{}: {} failed: {}", policy_id, to_string(c.dr[i]), e.what());
      out.dr_errors.emplace(c.dr[i], e.what());
    }
  }

  std::string lda_error;
  if (std::find(c.clustering.begin(), c.clustering.end(), ClusterMethod::LDA) != c.clustering.end()) {
    try {
      LdaResult r = lda_cluster(docs, cluster_params_for(c, ClusterMethod::LDA, DrMethod::PCA), embedding.node_order);
      out.lda_annotations = annotate_labels(r.assignment.labels, node_labels, c.annotation_terms);
      out.lda = std::move(r.assignment);
    } catch (const std::exception& e) {
      spdlog::warn("{}: lda failed: {}", policy_id, e.what());
      lda_error = e.what();
    }
  }

  std::vector<MetricCell> report_cells;
  for (DrMethod dr : c.dr) {
    auto proj = out.projections.find(dr);
    for (ClusterMethod m : c.clustering) {
      CellResult cell{dr, m, std::nullopt, {}, {}, {}, {}};
      try {
        if (proj == out.projections.end()) {
          throw Error(ErrorCode::DegenerateInput, "projection unavailable: " + out.dr_errors.at(dr));
        }
        if (m == ClusterMethod::LDA) {
          if (!out.lda) throw Error(ErrorCode::DegenerateInput, "lda unavailable: " + lda_error);
          cell.assignment = *out.lda;
          cell.annotations = out.lda_annotations;
        } else {
          cell.assignment = cluster_projection(proj->second, m, cluster_params_for(c, m, dr));
          cell.annotations = annotate_labels(cell.assignment->labels, node_labels, c.annotation_terms);
        }
        cell.metrics = evaluate(proj->second, *cell.assignment);
        cell.svg = render_scatter(proj->second, *cell.assignment, cell.annotations,
                                  policy_id + " / " + std::string(display_name(dr)) + " / " +
                                      std::string(display_name(m)));
        report_cells.push_back({dr, m, cell.metrics});
      } catch (const std::exception& e) {
        if (proj != out.projections.end() && !(m == ClusterMethod::LDA && !out.lda)) {
          spdlog::warn("{}: {} on {} failed: {}", policy_id, to_string(m), to_string(dr), e.what());
        }
        cell.error = e.what();
        cell.assignment.reset();
      }
      out.cells.push_back(std::move(cell));
    }
  }
  out.report = build_metrics_report(report_cells, policy_id);
  return out;
}

PolicyAnalysis analyze_policy(const std::string& policy_id, const PolicyGraph& g, const RunConfig& c) {
  validate(c);
  EmbeddingMatrix embedding = spring_layout(g, layout_params_for(c));
  std::vector<std::vector<std::string>> docs = node_documents(g);
  std::vector<std::string> labels;
  labels.reserve(g.node_count());
  for (const auto& n : g.nodes()) labels.push_back(n.label);
  return analyze_embedding(policy_id, embedding, docs, labels, c);
}

// ---------------------------------------------------------------- corpus runs

std::vector<std::string> expand_inputs(std::span<const std::string> inputs) {
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      std::vector<std::string> found;
      for (const auto& entry : fs::directory_iterator(in)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (ext == ".graphml") found.push_back(entry.path().generic_string());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(in);
    }
  }
  return out;
}

namespace {

struct PolicyOutcome {
  std::string input;
  std::string policy_id;
  bool ok = false;
  FileError error;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::vector<std::pair<std::string, std::string>> files;  // relative path, bytes
  ordered_json cell_errors = ordered_json::array();
  MetricsReport report;
};

std::string policy_id_of(const std::string& input) { return fs::path(input).stem().string(); }

void run_one(const std::string& input, const RunConfig& c, PolicyOutcome& out) {
  out.input = input;
  out.policy_id = policy_id_of(input);
  const PolicyGraph g = parse_graphml_file(input);
  if (g.empty()) throw Error(ErrorCode::EmptyGraph, "graph has no nodes");
  out.node_count = g.node_count();
  out.edge_count = g.edge_count();

  PolicyAnalysis a = analyze_policy(out.policy_id, g, c);
  const std::string dir = out.policy_id + "/";
  auto add = [&](std::string name, std::string bytes) { out.files.emplace_back(dir + name, std::move(bytes)); };

  add("graph.json", export_graph_json(g, degree_summary(g)));
  add("embedding.csv", embedding_to_csv(a.embedding));
  for (const auto& [dr, proj] : a.projections) {
    add("projection_" + std::string(to_string(dr)) + ".csv", projection_to_csv(proj));
    add("projection_" + std::string(to_string(dr)) + ".json", projection_sidecar_json(proj));
  }
  if (a.lda) {
    add("assignment_lda.csv", assignment_to_csv(*a.lda));
    add("annotations_lda.json", annotations_to_json(a.lda_annotations));
  }
  for (const auto& cell : a.cells) {
    const std::string tag = std::string(to_string(cell.dr)) + "_" + std::string(to_string(cell.clustering));
    if (!cell.ok()) {
      ordered_json e;
      e["dr"] = std::string(to_string(cell.dr));
      e["clustering"] = std::string(to_string(cell.clustering));
      e["error"] = cell.error;
      out.cell_errors.push_back(std::move(e));
      continue;
    }
    if (cell.clustering != ClusterMethod::LDA) {
      add("assignment_" + tag + ".csv", assignment_to_csv(*cell.assignment));
      add("annotations_" + tag + ".json", annotations_to_json(cell.annotations));
    }
    add("scatter_" + tag + ".svg", cell.svg);
  }
  add("metrics.csv", a.report.to_csv());
  add("metrics.json", a.report.to_json());
  out.report = std::move(a.report);
  out.ok = true;
}

}  // namespace

RunArtifacts run_pipeline(const RunConfig& c) {
  validate(c);
  const std::vector<std::string> inputs = expand_inputs(c.inputs);
  if (inputs.empty()) throw Error(ErrorCode::NoValidInputs, "no input files");

  std::vector<PolicyOutcome> outcomes(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      try {
        run_one(inputs[i], c, outcomes[i]);
      } catch (const Error& e) {
        outcomes[i].ok = false;
        outcomes[i].error = {inputs[i], std::string(to_string(e.code())), e.what()};
      } catch (const std::exception& e) {
        outcomes[i].ok = false;
        outcomes[i].error = {inputs[i], "Internal", e.what()};
      }
      if (!outcomes[i].ok) spdlog::error("{}: {}", inputs[i], outcomes[i].error.message);
    }
  };
  std::size_t n_workers = c.workers > 0 ? static_cast<std::size_t>(c.workers)
                                        : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min(n_workers, inputs.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }

  // Duplicate stems would overwrite each other; the later input loses.
  std::set<std::string> seen;
  for (auto& o : outcomes) {
    if (o.ok && !seen.insert(o.policy_id).second) {
      o.ok = false;
      o.error = {o.input, std::string(to_string(ErrorCode::InvalidArgument)),
                 "duplicate policy id '" + o.policy_id + "'"};
      o.files.clear();
    }
  }

  RunArtifacts run;
  const fs::path root(c.output_dir);
  std::vector<MetricsReport> reports;
  ordered_json policies = ordered_json::array();
  auto record = [&](const std::string& rel, const std::string& bytes) {
    io::write_file(root / rel, bytes);
    run.artifacts.push_back({rel, sha256_hex(bytes), bytes.size()});
  };
  for (auto& o : outcomes) {
    if (!o.ok) {
      run.errors.push_back(o.error);
      continue;
    }
    run.policies.push_back(o.policy_id);
    for (const auto& [rel, bytes] : o.files) record(rel, bytes);
    reports.push_back(o.report);
    ordered_json p;
    p["id"] = o.policy_id;
    p["input"] = o.input;
    p["node_count"] = o.node_count;
    p["edge_count"] = o.edge_count;
    p["cell_errors"] = o.cell_errors;
    policies.push_back(std::move(p));
  }
  if (!reports.empty()) {
    run.corpus = corpus_mean(reports);
    record("corpus_metrics.csv", run.corpus.to_csv());
    record("corpus_metrics.json", run.corpus.to_json());
  }
  std::sort(run.artifacts.begin(), run.artifacts.end(),
            [](const ArtifactEntry& a, const ArtifactEntry& b) { return a.path < b.path; });

  ordered_json manifest;
  manifest["config"] = ordered_json::parse(to_json(c, false).dump());
  manifest["policies"] = std::move(policies);
  ordered_json errors = ordered_json::array();
  for (const auto& e : run.errors) {
    ordered_json je;
    je["input"] = e.input;
    je["code"] = e.code;
    je["message"] = e.message;
    errors.push_back(std::move(je));
  }
  manifest["errors"] = std::move(errors);
  ordered_json artifacts = ordered_json::array();
  for (const auto& a : run.artifacts) {
    ordered_json ja;
    ja["path"] = a.path;
    ja["sha256"] = a.sha256;
    ja["bytes"] = a.bytes;
    artifacts.push_back(std::move(ja));
  }
  manifest["artifacts"] = std::move(artifacts);
  run.manifest_path = root / "manifest.json";
  io::write_file(run.manifest_path, manifest.dump(2) + "\n");

  if (run.policies.empty()) {
    throw Error(ErrorCode::NoValidInputs, "no input could be processed (" + std::to_string(run.errors.size()) +
                                              " failed)");
  }
  return run;
}

}  // namespace ppkg
