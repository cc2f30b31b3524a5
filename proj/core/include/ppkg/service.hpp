#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>

#include "ppkg/graph.hpp"
#include "ppkg/pipeline.hpp"

namespace httplib {
class Server;
}

namespace ppkg {

/// Request handling behind the HTTP API, usable without a socket.
///
///   GET  /api/policies                 -> [{id, node_count, edge_count}]
///   GET  /api/policies/{id}/graph      -> graph export JSON
///   POST /api/policies/{id}/run        -> {run_id}; body {dr, clustering, params, seed}
///   GET  /api/runs/{run_id}            -> {status, positions, labels, metrics, annotations}
///   GET  /api/runs/{run_id}/svg        -> scatterplot (202 while pending)
///
/// Run ids digest the policy id, the normalized parameters and the seed, so
/// identical submissions share one computation.
class AnalysisService {
 public:
  struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
  };

  /// Loads every input of `config`; unparsable files are logged and skipped.
  explicit AnalysisService(RunConfig config);
  ~AnalysisService();

  AnalysisService(const AnalysisService&) = delete;
  AnalysisService& operator=(const AnalysisService&) = delete;

  Response list_policies() const;
  Response policy_graph(std::string_view policy_id) const;
  Response submit_run(std::string_view policy_id, std::string_view body);
  Response run_status(std::string_view run_id) const;
  Response run_svg(std::string_view run_id) const;

  /// Blocks until the run finishes; false for unknown ids.
  bool wait(std::string_view run_id) const;
  /// Number of distinct computations started.
  std::size_t computations() const noexcept { return computations_.load(); }
  std::size_t policy_count() const noexcept { return policies_.size(); }

  void mount(httplib::Server& server);

 private:
  struct Job;
  struct Policy {
    PolicyGraph graph;
    std::string input;
  };

  RunConfig config_;
  std::map<std::string, Policy, std::less<>> policies_;
  mutable std::mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Job>, std::less<>> jobs_;
  std::atomic<std::size_t> computations_{0};

  std::shared_ptr<Job> find_job(std::string_view run_id) const;
};

/// Owns an httplib server bound to `host:port` (port 0 picks a free one).
class HttpHost {
 public:
  explicit HttpHost(AnalysisService& service);
  ~HttpHost();

  /// Throws BindFailure. Returns the bound port.
  int bind(const std::string& host, int port);
  void listen();  // blocks
  void start();   // listens on a background thread
  void stop();

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

/// Parses "host:port" (host may be empty for 0.0.0.0). Throws InvalidArgument.
std::pair<std::string, int> parse_bind_address(std::string_view address);

/// Blocking service loop.
void serve(const RunConfig& config, const std::string& bind_address);

}  // namespace ppkg
