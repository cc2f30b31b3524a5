// Runs every primary acceptance criterion and prints one PASS/FAIL line each.
// Exit status is non-zero when any criterion fails.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "fixtures.hpp"
#include "ppkg/cluster.hpp"
#include "ppkg/dimred.hpp"
#include "ppkg/io.hpp"
#include "ppkg/metrics.hpp"
#include "ppkg/pipeline.hpp"

namespace fs = std::filesystem;
using namespace ppkg;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PPKG_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::current_path() / "acceptance_work" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// ---------------------------------------------------------------- criteria

void metric_oracles(Outcome& o) {
  const auto t0 = Clock::now();
  Rng rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(3 + rng.below(198));
    const int k = 2 + static_cast<int>(rng.below(7));
    const Matrix x = fixtures::random_matrix(static_cast<Eigen::Index>(n), 2, rng, 4.0);
    auto labels = fixtures::random_labels(n, k, rng);
    labels[0] = 0;
    labels[1] = 1;
    worst = std::max(worst, std::abs(*silhouette(x, labels) - fixtures::silhouette_oracle(x, labels)));
    worst = std::max(worst, std::abs(*davies_bouldin(x, labels) - fixtures::davies_bouldin_oracle(x, labels)));
  }
  Matrix four(4, 2);
  four << 0, 0, 0, 1, 10, 0, 10, 1;
  const std::vector<int> l{0, 0, 1, 1};
  const double s = *silhouette(four, l);
  const double d = *davies_bouldin(four, l);
  const double t = seconds_since(t0);
  o.detail << "max |diff| " << worst << ", fixture sil " << s << " dbi " << d << ", " << t << " s";
  o.require(worst <= 1e-9, "oracle difference");
  o.require(std::abs(s - 0.9002) <= 1e-4, "fixture silhouette");
  o.require(std::abs(d - 0.1) <= 1e-9, "fixture DBI");
  o.require(t < 10.0, "runtime");
}

void pca_oracle(Outcome& o) {
  const auto t0 = Clock::now();
  Rng rng(2002);
  double worst_var = 0.0, worst_proj = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.below(198));
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.below(9));
    Matrix x = fixtures::random_matrix(n, d, rng);
    for (Eigen::Index j = 0; j < d; ++j) x.col(j) *= 1.0 + static_cast<double>(j);
    const Projection y = pca(fixtures::embedding(x), 2);
    const auto [values, vectors] = fixtures::jacobi_eigen(fixtures::covariance(x));
    const Eigen::RowVectorXd mean = x.colwise().mean();
    for (int c = 0; c < 2; ++c) {
      worst_var = std::max(worst_var, std::abs(y.explained_variance[static_cast<std::size_t>(c)] -
                                               values[static_cast<std::size_t>(c)]));
      Eigen::VectorXd v(d);
      for (Eigen::Index r = 0; r < d; ++r) v(r) = vectors[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      const Eigen::VectorXd ref = (x.rowwise() - mean) * v;
      worst_proj = std::max(worst_proj, std::min((y.data.col(c) - ref).cwiseAbs().maxCoeff(),
                                                 (y.data.col(c) + ref).cwiseAbs().maxCoeff()));
    }
  }
  const double t = seconds_since(t0);
  o.detail << "max variance diff " << worst_var << ", max projection diff " << worst_proj << ", " << t << " s";
  o.require(worst_var <= 1e-8, "explained variance");
  o.require(worst_proj <= 1e-8, "projection");
  o.require(t < 5.0, "runtime");
}

void nonlinear_recovery(Outcome& o) {
  const auto blobs = fixtures::three_blobs();
  auto t0 = Clock::now();
  TsneParams tp;
  tp.seed = 3;
  const Projection ty = tsne(fixtures::embedding(blobs.x), tp);
  const double tt = seconds_since(t0);
  t0 = Clock::now();
  UmapParams up;
  up.seed = 3;
  const Projection uy = umap(fixtures::embedding(blobs.x), up);
  const double ut = seconds_since(t0);
  const double tari = adjusted_rand(lloyd_kmeans(ty.data, 3, 5).labels, blobs.labels);
  const double uari = adjusted_rand(lloyd_kmeans(uy.data, 3, 5).labels, blobs.labels);
  o.detail << "t-SNE ARI " << tari << " (" << tt << " s), UMAP ARI " << uari << " (" << ut << " s)";
  o.require(tari >= 0.95, "t-SNE ARI");
  o.require(uari >= 0.95, "UMAP ARI");
  o.require(tt < 30.0 && ut < 30.0, "runtime");
}

void full_grid(Outcome& o) {
  const auto blobs = fixtures::three_blobs();
  const std::vector<std::vector<std::string>> vocab{{"device", "identifier", "advertising", "hardware"},
                                                    {"location", "gps", "precise", "region"},
                                                    {"email", "contact", "name", "phone"}};
  Rng rng(4);
  std::vector<std::vector<std::string>> docs;
  std::vector<std::string> names;
  for (int l : blobs.labels) {
    const auto& v = vocab[static_cast<std::size_t>(l)];
    std::vector<std::string> doc;
    for (int t = 0; t < 6; ++t) doc.push_back(v[rng.below(v.size())]);
    docs.push_back(doc);
    names.push_back(v[rng.below(v.size())] + " " + v[rng.below(v.size())]);
  }
  RunConfig c;
  c.seed = 4;
  c.cluster.k = 3;
  c.cluster.n_topics = 3;
  const PolicyAnalysis a = analyze_embedding("blobs", fixtures::embedding(blobs.x), docs, names, c);
  const std::string csv = a.report.to_csv();
  std::vector<std::string> lines;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  const bool layout = lines.size() >= 14 && lines[0] == "silhouette" && lines[1] == "clustering,t-SNE,UMAP,PCA" &&
                      lines[7] == "davies_bouldin" && lines[8] == "clustering,t-SNE,UMAP,PCA" &&
                      lines[2].rfind("MB K-means,", 0) == 0 && lines[6].rfind("LDA,", 0) == 0;
  bool numeric = true;
  for (std::size_t i : {2u, 3u, 4u, 5u, 6u, 9u, 10u, 11u, 12u, 13u}) {
    if (i >= lines.size() || lines[i].find("undef") != std::string::npos ||
        lines[i].find("n/a") != std::string::npos)
      numeric = false;
  }
  o.detail << a.report.size() << " cells, " << a.report.defined_count() << " defined";
  o.require(a.report.size() == 15, "cell count");
  o.require(a.report.defined_count() == 15, "all defined");
  o.require(layout, "table layout");
  o.require(numeric, "numeric cells");
}

void spectral_rings(Outcome& o) {
  const auto rings = fixtures::rings();
  ClusterParams p;
  p.k = 2;
  p.affinity.kind = Affinity::Kind::Knn;
  p.affinity.neighbors = 10;
  p.seed = 6;
  const double sari = adjusted_rand(spectral_fit(rings.x, p).labels, rings.labels);
  const double kari = adjusted_rand(lloyd_kmeans(rings.x, 2, 6).labels, rings.labels);
  o.detail << "spectral ARI " << sari << ", k-means ARI " << kari;
  o.require(sari == 1.0, "spectral ARI");
  o.require(kari < 0.5, "k-means ARI");
}

void density_methods(Outcome& o) {
  Matrix x(11, 2);
  for (int i = 0; i < 5; ++i) {
    x.row(i) << 0.1 * i, 0.05 * (i % 2);
    x.row(5 + i) << 100.0 + 0.1 * i, 0.05 * (i % 2);
  }
  x.row(10) << 50.0, 50.0;
  const auto db = dbscan_labels(x, 0.5, 3);
  const bool exact = db == std::vector<int>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1, -1};

  const auto blobs = fixtures::three_blobs_2d(12);
  Matrix y(blobs.x.rows() + 5, 2);
  y.topRows(blobs.x.rows()) = blobs.x;
  const double far[5][2] = {{200, 200}, {-200, 150}, {150, -220}, {-180, -190}, {400, 0}};
  for (int i = 0; i < 5; ++i) y.row(blobs.x.rows() + i) << far[i][0], far[i][1];
  const auto hl = hdbscan_labels(y, 5);
  bool outliers = true;
  for (int i = 0; i < 5; ++i) outliers = outliers && hl[static_cast<std::size_t>(blobs.x.rows() + i)] == -1;
  std::vector<int> kept, truth;
  for (std::size_t i = 0; i < blobs.labels.size(); ++i) {
    if (hl[i] >= 0) {
      kept.push_back(hl[i]);
      truth.push_back(blobs.labels[i]);
    }
  }
  const double ari = kept.empty() ? 0.0 : adjusted_rand(kept, truth);
  o.detail << "DBSCAN exact " << (exact ? "yes" : "no") << ", HDBSCAN outliers noise " << (outliers ? "yes" : "no")
           << ", ARI " << ari << " on " << kept.size() << " points";
  o.require(exact, "DBSCAN labels");
  o.require(outliers, "HDBSCAN outliers");
  o.require(ari >= 0.95, "HDBSCAN ARI");
}

void minibatch_quality(Outcome& o) {
  const auto blobs = fixtures::three_blobs_2d(13);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ClusterParams p;
    p.k = 3;
    p.seed = seed;
    const double mb = minibatch_kmeans_fit(blobs.x, p).inertia;
    const double full = lloyd_kmeans(blobs.x, 3, seed).inertia;
    worst = std::max(worst, mb / full - 1.0);
  }
  o.detail << "worst relative excess " << worst;
  o.require(worst <= 0.05, "inertia ratio");
}

void determinism(Outcome& o) {
  const fs::path dir = scratch("determinism");
  io::write_file(dir / "corpus" / "offerup.graphml", io::read_file(PPKG_TEST_DATA "/offerup.graphml"));
  io::write_file(dir / "corpus" / "synthetic.graphml", fixtures::to_graphml(fixtures::synthetic_policy(80, 160, 5)));
  io::write_file(dir / "config.json", "{\"seed\": 20240501, \"inputs\": [\"" + (dir / "corpus").string() +
                                          "\"], \"output_dir\": \"" + (dir / "out").string() + "\"}\n");
  const int rc1 = run_cli("run --config " + (dir / "config.json").string());
  fs::rename(dir / "out", dir / "first");
  const int rc2 = run_cli("run --config " + (dir / "config.json").string());
  std::size_t compared = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir / "first")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dir / "first");
    ++compared;
    if (!fs::exists(dir / "out" / rel) || io::read_file(entry.path()) != io::read_file(dir / "out" / rel)) ++differing;
  }
  std::size_t second_count = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir / "out")) second_count += entry.is_regular_file();
  o.detail << "exit codes " << rc1 << "/" << rc2 << ", " << compared << " files compared, " << differing
           << " differ";
  o.require(rc1 == 0 && rc2 == 0, "exit codes");
  o.require(compared > 0 && compared == second_count, "file sets");
  o.require(differing == 0, "byte identity");
}

void end_to_end_scale(Outcome& o) {
  const fs::path dir = scratch("scale");
  io::write_file(dir / "large.graphml", fixtures::to_graphml(fixtures::synthetic_policy(1000, 2000, 9)));
  const auto t0 = Clock::now();
  const int rc = run_cli("run --input " + (dir / "large.graphml").string() + " --out " + (dir / "out").string() +
                         " --seed 9");
  const double t = seconds_since(t0);
  std::size_t svgs = 0, errors = 99;
  std::size_t missing = 0;
  if (fs::exists(dir / "out" / "manifest.json")) {
    const auto m = nlohmann::json::parse(io::read_file(dir / "out" / "manifest.json"));
    errors = m["policies"][0]["cell_errors"].size();
    for (const auto& a : m["artifacts"]) {
      const std::string path = a["path"];
      if (path.size() > 4 && path.substr(path.size() - 4) == ".svg") ++svgs;
      if (!fs::exists(dir / "out" / path)) ++missing;
    }
  }
  o.detail << "exit " << rc << ", " << t << " s, " << svgs << " scatterplots, " << errors << " cell errors";
  o.require(rc == 0, "exit code");
  o.require(t < 120.0, "runtime");
  o.require(svgs == 15 && errors == 0 && missing == 0, "artifacts");
}

void graphml_robustness(Outcome& o) {
  const fs::path dir = scratch("robustness");
  io::write_file(dir / "corpus" / "a_offerup.graphml", io::read_file(PPKG_TEST_DATA "/offerup.graphml"));
  io::write_file(dir / "corpus" / "b_broken.graphml", io::read_file(PPKG_TEST_DATA "/corrupt.graphml"));
  io::write_file(dir / "corpus" / "c_synthetic.graphml", fixtures::to_graphml(fixtures::synthetic_policy(40, 70, 3)));
  const int rc = run_cli("run --input " + (dir / "corpus").string() + " --out " + (dir / "out").string() +
                         " --seed 10");
  const bool a = fs::exists(dir / "out" / "a_offerup" / "metrics.csv");
  const bool c = fs::exists(dir / "out" / "c_synthetic" / "metrics.csv");
  const bool b = fs::exists(dir / "out" / "b_broken");
  std::size_t recorded = 0;
  if (fs::exists(dir / "out" / "manifest.json")) {
    recorded = nlohmann::json::parse(io::read_file(dir / "out" / "manifest.json"))["errors"].size();
  }
  o.detail << "exit " << rc << ", valid outputs " << (a && c ? "present" : "missing") << ", errors recorded "
           << recorded;
  o.require(rc == 2, "exit code");
  o.require(a && c && !b, "artifacts");
  o.require(recorded == 1, "manifest errors");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"metric oracles", metric_oracles},
      {"PCA oracle", pca_oracle},
      {"nonlinear DR recovery", nonlinear_recovery},
      {"full grid report", full_grid},
      {"spectral rings", spectral_rings},
      {"density methods", density_methods},
      {"mini-batch k-means quality", minibatch_quality},
      {"determinism", determinism},
      {"end-to-end scale", end_to_end_scale},
      {"GraphML robustness", graphml_robustness},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail.str()
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
