#include "ppkg/service.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <cmath>
#include <future>
#include <semaphore>

#include "ppkg/digest.hpp"
#include "ppkg/error.hpp"
#include "ppkg/render.hpp"

namespace ppkg {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

enum class JobState { Pending, Done, Failed };

AnalysisService::Response json_response(int status, const ordered_json& body) {
  return {status, "application/json", body.dump() + "\n"};
}

AnalysisService::Response error_response(int status, std::string_view message, std::string_view field = {}) {
  ordered_json body;
  body["error"] = std::string(message);
  if (!field.empty()) body["field"] = std::string(field);
  return json_response(status, body);
}

std::counting_semaphore<>& compute_slots() {
  static std::counting_semaphore<> slots(std::max<std::ptrdiff_t>(1, std::thread::hardware_concurrency()));
  return slots;
}

ordered_json optional_number(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (!std::isfinite(*v)) return "inf";
  return *v;
}

}  // namespace

struct AnalysisService::Job {
  std::string run_id;
  std::string policy_id;
  mutable std::mutex mutex;
  JobState state = JobState::Pending;
  std::string payload;
  std::string svg;
  std::string error;
  std::shared_future<void> done;
};

AnalysisService::AnalysisService(RunConfig config) : config_(std::move(config)) {
  validate(config_);
  for (const auto& input : expand_inputs(config_.inputs)) {
    try {
      PolicyGraph g = parse_graphml_file(input);
      std::string id = std::filesystem::path(input).stem().string();
      if (policies_.count(id) != 0) {
        spdlog::warn("{}: duplicate policy id '{}', skipped", input, id);
        continue;
      }
      policies_.emplace(std::move(id), Policy{std::move(g), input});
    } catch (const std::exception& e) {
      spdlog::warn("{}: skipped: {}", input, e.what());
    }
  }
}

AnalysisService::~AnalysisService() {
  std::lock_guard lock(registry_mutex_);
  for (auto& [id, job] : jobs_) {
    if (job->done.valid()) job->done.wait();
  }
}

AnalysisService::Response AnalysisService::list_policies() const {
  ordered_json out = ordered_json::array();
  for (const auto& [id, p] : policies_) {
    ordered_json entry;
    entry["id"] = id;
    entry["node_count"] = p.graph.node_count();
    entry["edge_count"] = p.graph.edge_count();
    out.push_back(std::move(entry));
  }
  return json_response(200, out);
}

AnalysisService::Response AnalysisService::policy_graph(std::string_view policy_id) const {
  auto it = policies_.find(policy_id);
  if (it == policies_.end()) return error_response(404, "unknown policy id");
  return {200, "application/json", export_graph_json(it->second.graph, degree_summary(it->second.graph))};
}

AnalysisService::Response AnalysisService::submit_run(std::string_view policy_id, std::string_view body) {
  auto pit = policies_.find(policy_id);
  if (pit == policies_.end()) return error_response(404, "unknown policy id");

  json req;
  try {
    req = json::parse(body);
  } catch (const json::exception& e) {
    return error_response(422, std::string("malformed JSON body: ") + e.what(), "body");
  }
  if (!req.is_object()) return error_response(422, "request body must be an object", "body");

  DrMethod dr;
  ClusterMethod method;
  if (!req.contains("dr") || !req.at("dr").is_string()) return error_response(422, "missing method tag", "dr");
  try {
    dr = dr_method_from_string(req.at("dr").get<std::string>());
  } catch (const Error& e) {
    return error_response(422, e.what(), "dr");
  }
  if (!req.contains("clustering") || !req.at("clustering").is_string()) {
    return error_response(422, "missing method tag", "clustering");
  }
  try {
    method = cluster_method_from_string(req.at("clustering").get<std::string>());
  } catch (const Error& e) {
    return error_response(422, e.what(), "clustering");
  }
  if (!req.contains("seed") || !(req.at("seed").is_number_unsigned() ||
                                 (req.at("seed").is_number_integer() && req.at("seed").get<long long>() >= 0))) {
    return error_response(422, "a non-negative integer seed is mandatory", "seed");
  }
  const auto seed = req.at("seed").get<std::uint64_t>();

  json params = req.value("params", json::object());
  if (!params.is_object()) return error_response(422, "params must be an object", "params");

  RunConfig rc = config_;
  rc.seed = seed;
  rc.dr = {dr};
  rc.clustering = {method};
  try {
    json cluster_part = params;
    cluster_part.erase("tsne");
    cluster_part.erase("umap");
    rc.cluster = cluster_params_from_json(cluster_part, config_.cluster);
    validate(rc.cluster);
    if (params.contains("tsne")) rc.tsne = tsne_params_from_json(params.at("tsne"), config_.tsne);
    if (params.contains("umap")) rc.umap = umap_params_from_json(params.at("umap"), config_.umap);
  } catch (const std::exception& e) {
    return error_response(422, e.what(), "params");
  }

  if (std::find(config_.dr.begin(), config_.dr.end(), dr) == config_.dr.end()) {
    return error_response(409, "DR method not enabled by the server configuration", "dr");
  }
  if (std::find(config_.clustering.begin(), config_.clustering.end(), method) == config_.clustering.end()) {
    return error_response(409, "clustering method not enabled by the server configuration", "clustering");
  }

  // Normalized parameters make equivalent requests share a run id.
  json key;
  key["policy"] = std::string(policy_id);
  key["dr"] = std::string(to_string(dr));
  key["clustering"] = std::string(to_string(method));
  key["seed"] = seed;
  key["params"] = to_json(rc, false);
  key["params"].erase("inputs");
  key["params"].erase("workers");
  const std::string run_id = sha256_hex(key.dump()).substr(0, 32);

  ordered_json ack;
  ack["run_id"] = run_id;

  std::lock_guard lock(registry_mutex_);
  if (auto it = jobs_.find(run_id); it != jobs_.end()) return json_response(200, ack);

  auto job = std::make_shared<Job>();
  job->run_id = run_id;
  job->policy_id = std::string(policy_id);
  const PolicyGraph* graph = &pit->second.graph;
  ++computations_;
  job->done = std::async(std::launch::async, [job, graph, rc = std::move(rc), dr, method] {
                compute_slots().acquire();
                ordered_json payload;
                std::string svg;
                std::string error;
                try {
                  PolicyAnalysis a = analyze_policy(job->policy_id, *graph, rc);
                  const CellResult& cell = a.cells.at(0);
                  if (!cell.ok()) throw Error(ErrorCode::DegenerateInput, cell.error);
                  const Projection& y = a.projections.at(dr);
                  payload["status"] = "done";
                  payload["run_id"] = job->run_id;
                  payload["policy"] = job->policy_id;
                  payload["dr"] = std::string(to_string(dr));
                  payload["clustering"] = std::string(to_string(method));
                  ordered_json positions = ordered_json::array();
                  for (Eigen::Index i = 0; i < y.data.rows(); ++i) {
                    ordered_json p;
                    p["id"] = y.node_order[static_cast<std::size_t>(i)];
                    p["x"] = y.data(i, 0);
                    p["y"] = y.data(i, 1);
                    positions.push_back(std::move(p));
                  }
                  payload["positions"] = std::move(positions);
                  payload["labels"] = cell.assignment->labels;
                  ordered_json metrics;
                  metrics["silhouette"] = optional_number(cell.metrics.silhouette);
                  metrics["davies_bouldin"] = optional_number(cell.metrics.davies_bouldin);
                  metrics["n_evaluated"] = cell.metrics.n_evaluated;
                  metrics["noise_fraction"] = cell.metrics.noise_fraction;
                  payload["metrics"] = std::move(metrics);
                  payload["annotations"] = ordered_json::parse(annotations_to_json(cell.annotations));
                  svg = cell.svg;
                } catch (const std::exception& e) {
                  error = e.what();
                }
                compute_slots().release();
                std::lock_guard jl(job->mutex);
                if (error.empty()) {
                  job->payload = payload.dump() + "\n";
                  job->svg = std::move(svg);
                  job->state = JobState::Done;
                } else {
                  spdlog::warn("run {} failed: {}", job->run_id, error);
                  job->error = std::move(error);
                  job->state = JobState::Failed;
                }
              }).share();
  jobs_.emplace(run_id, std::move(job));
  return json_response(200, ack);
}

std::shared_ptr<AnalysisService::Job> AnalysisService::find_job(std::string_view run_id) const {
  std::lock_guard lock(registry_mutex_);
  auto it = jobs_.find(run_id);
  return it == jobs_.end() ? nullptr : it->second;
}

bool AnalysisService::wait(std::string_view run_id) const {
  auto job = find_job(run_id);
  if (!job) return false;
  job->done.wait();
  return true;
}

AnalysisService::Response AnalysisService::run_status(std::string_view run_id) const {
  auto job = find_job(run_id);
  if (!job) return error_response(404, "unknown run id");
  std::lock_guard lock(job->mutex);
  switch (job->state) {
    case JobState::Done: return {200, "application/json", job->payload};
    case JobState::Failed: {
      ordered_json body;
      body["status"] = "failed";
      body["run_id"] = job->run_id;
      body["error"] = job->error;
      return json_response(200, body);
    }
    case JobState::Pending: break;
  }
  ordered_json body;
  body["status"] = "pending";
  body["run_id"] = job->run_id;
  return json_response(200, body);
}

AnalysisService::Response AnalysisService::run_svg(std::string_view run_id) const {
  auto job = find_job(run_id);
  if (!job) return error_response(404, "unknown run id");
  std::lock_guard lock(job->mutex);
  switch (job->state) {
    case JobState::Done: return {200, "image/svg+xml", job->svg};
    case JobState::Failed: return error_response(422, job->error);
    case JobState::Pending: break;
  }
  ordered_json body;
  body["status"] = "pending";
  return json_response(202, body);
}

void AnalysisService::mount(httplib::Server& server) {
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get("/api/policies", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, list_policies());
  });
  server.Get(R"(/api/policies/([^/]+)/graph)", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, policy_graph(req.matches[1].str()));
  });
  server.Post(R"(/api/policies/([^/]+)/run)", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, submit_run(req.matches[1].str(), req.body));
  });
  server.Get(R"(/api/runs/([^/]+)/svg)", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, run_svg(req.matches[1].str()));
  });
  server.Get(R"(/api/runs/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, run_status(req.matches[1].str()));
  });
}

// ---------------------------------------------------------------- hosting

HttpHost::HttpHost(AnalysisService& service) : server_(std::make_unique<httplib::Server>()) {
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });
  service.mount(*server_);
}

HttpHost::~HttpHost() { stop(); }

int HttpHost::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound <= 0) throw Error(ErrorCode::BindFailure, "cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error(ErrorCode::BindFailure, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpHost::listen() { server_->listen_after_bind(); }

void HttpHost::start() {
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void HttpHost::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::pair<std::string, int> parse_bind_address(std::string_view address) {
  const auto colon = address.rfind(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::InvalidArgument, "bind address must be host:port");
  }
  std::string host(address.substr(0, colon));
  if (host.empty()) host = "0.0.0.0";
  const std::string_view port_text = address.substr(colon + 1);
  int port = -1;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || ptr != port_text.data() + port_text.size() || port < 0 || port > 65535) {
    throw Error(ErrorCode::InvalidArgument, "invalid port in bind address");
  }
  return {host, port};
}

void serve(const RunConfig& config, const std::string& bind_address) {
  const auto [host, port] = parse_bind_address(bind_address);
  AnalysisService service(config);
  HttpHost http(service);
  const int bound = http.bind(host, port);
  spdlog::info("serving {} policies on {}:{}", service.policy_count(), host, bound);
  http.listen();
}

}  // namespace ppkg
