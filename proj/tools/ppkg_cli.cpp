#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "ppkg/error.hpp"
#include "ppkg/graph.hpp"
#include "ppkg/io.hpp"
#include "ppkg/pipeline.hpp"
#include "ppkg/service.hpp"

namespace {

int run_command(const std::string& config_path, const std::vector<std::string>& inputs, const std::string& out,
                std::optional<std::uint64_t> seed) {
  ppkg::RunConfig config = config_path.empty() ? ppkg::RunConfig{} : ppkg::load_run_config(config_path);
  if (!inputs.empty()) config.inputs = inputs;
  if (!out.empty()) config.output_dir = out;
  if (seed) config.seed = seed;
  const ppkg::RunArtifacts run = ppkg::run_pipeline(config);
  spdlog::info("{} policies, {} artifacts, {} failed inputs; manifest {}", run.policies.size(),
               run.artifacts.size(), run.errors.size(), run.manifest_path.string());
  return run.exit_code();
}

int export_command(const std::string& input, const std::string& out) {
  const ppkg::PolicyGraph g = ppkg::parse_graphml_file(input);
  const std::string json = ppkg::export_graph_json(g, ppkg::degree_summary(g));
  if (out.empty() || out == "-") {
    std::cout << json;
  } else {
    ppkg::io::write_file(out, json);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-policy knowledge graph clustering and visualization"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  std::string config_path;
  std::vector<std::string> inputs;
  std::string out;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run the analysis grid over a file or corpus directory");
  run->add_option("--config", config_path, "RunConfig JSON")->check(CLI::ExistingFile);
  run->add_option("--input", inputs, "GraphML file or directory (overrides config inputs)");
  run->add_option("--out", out, "Output directory (overrides config)");
  run->add_option("--seed", seed, "Seed (overrides config)");

  std::string serve_config;
  std::string bind = "127.0.0.1:8080";
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--config", serve_config, "RunConfig JSON")->required()->check(CLI::ExistingFile);
  serve->add_option("--bind", bind, "host:port")->capture_default_str();

  std::string export_input;
  std::string export_out;
  auto* exp = app.add_subcommand("export", "Convert GraphML to the explorer JSON");
  exp->add_option("--input", export_input, "GraphML file")->required()->check(CLI::ExistingFile);
  exp->add_option("--out", export_out, "Output JSON path ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
  spdlog::set_default_logger(spdlog::stderr_color_mt("ppkg"));

  try {
    if (*run) return run_command(config_path, inputs, out, seed);
    if (*serve) {
      ppkg::serve(ppkg::load_run_config(serve_config), bind);
      return 0;
    }
    if (*exp) return export_command(export_input, export_out);
  } catch (const ppkg::Error& e) {
    spdlog::error("{}: {}", ppkg::to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 1;
}
