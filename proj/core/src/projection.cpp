#include "ppkg/dimred.hpp"
#include "ppkg/io.hpp"

namespace ppkg {

std::string projection_to_csv(const Projection& y) {
  std::string out = "node_id,x,y\n";
  for (Eigen::Index i = 0; i < y.data.rows(); ++i) {
    out += io::csv_field(y.node_order[static_cast<std::size_t>(i)]);
    for (Eigen::Index c = 0; c < y.data.cols(); ++c) {
      out += ',';
      out += io::format_double(y.data(i, c));
    }
    out += '\n';
  }
  return out;
}

std::string projection_sidecar_json(const Projection& y) {
  nlohmann::json j;
  j["method"] = std::string(to_string(y.method));
  j["params"] = y.params;
  j["seed"] = y.params.contains("seed") ? y.params["seed"] : nlohmann::json(nullptr);
  j["n"] = y.data.rows();
  if (!y.explained_variance.empty()) j["explained_variance"] = y.explained_variance;
  if (!y.kl_trace.empty()) j["kl_trace"] = y.kl_trace;
  return j.dump(2) + "\n";
}

nlohmann::json to_json(const TsneParams& p) {
  return {{"perplexity", p.perplexity},
          {"learning_rate", p.learning_rate},
          {"n_iter", p.n_iter},
          {"early_exaggeration", p.early_exaggeration},
          {"exaggeration_iters", p.exaggeration_iters},
          {"initial_momentum", p.initial_momentum},
          {"final_momentum", p.final_momentum},
          {"seed", p.seed}};
}

nlohmann::json to_json(const UmapParams& p) {
  return {{"n_neighbors", p.n_neighbors},       {"min_dist", p.min_dist}, {"spread", p.spread},
          {"n_epochs", p.n_epochs},             {"negative_sample_rate", p.negative_sample_rate},
          {"seed", p.seed}};
}

TsneParams tsne_params_from_json(const nlohmann::json& j, TsneParams d) {
  d.perplexity = j.value("perplexity", d.perplexity);
  d.learning_rate = j.value("learning_rate", d.learning_rate);
  d.n_iter = j.value("n_iter", d.n_iter);
  d.early_exaggeration = j.value("early_exaggeration", d.early_exaggeration);
  d.exaggeration_iters = j.value("exaggeration_iters", d.exaggeration_iters);
  d.initial_momentum = j.value("initial_momentum", d.initial_momentum);
  d.final_momentum = j.value("final_momentum", d.final_momentum);
  d.seed = j.value("seed", d.seed);
  return d;
}

UmapParams umap_params_from_json(const nlohmann::json& j, UmapParams d) {
  d.n_neighbors = j.value("n_neighbors", d.n_neighbors);
  d.min_dist = j.value("min_dist", d.min_dist);
  d.spread = j.value("spread", d.spread);
  d.n_epochs = j.value("n_epochs", d.n_epochs);
  d.negative_sample_rate = j.value("negative_sample_rate", d.negative_sample_rate);
  d.seed = j.value("seed", d.seed);
  return d;
}

}  // namespace ppkg
