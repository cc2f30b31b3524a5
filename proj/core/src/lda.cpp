#include <algorithm>
#include <map>

#include "ppkg/error.hpp"
#include "ppkg/topics.hpp"

namespace ppkg {

GibbsLda::GibbsLda(std::span<const std::vector<std::string>> docs, int n_topics, double alpha, double beta,
                   std::uint64_t seed)
    : n_topics_(n_topics), alpha_(alpha), beta_(beta), rng_(seed) {
  if (n_topics < 1) throw Error(ErrorCode::InvalidArgument, "n_topics must be positive");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha and beta must be positive");

  std::map<std::string, int> vocab_index;
  for (const auto& doc : docs) {
    for (const auto& w : doc) vocab_index.emplace(w, 0);
  }
  if (vocab_index.empty()) throw Error(ErrorCode::EmptyVocabulary, "no tokens in any document");
  for (auto& [w, id] : vocab_index) {
    id = static_cast<int>(vocab_.size());
    vocab_.push_back(w);
  }

  const auto k = static_cast<std::size_t>(n_topics);
  const std::size_t v = vocab_.size();
  doc_lengths_.resize(docs.size(), 0);
  doc_topic_counts_.assign(docs.size() * k, 0);
  topic_word_counts_.assign(k * v, 0);
  topic_counts_.assign(k, 0);
  weights_.resize(k);

  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& w : docs[d]) {
      const int word = vocab_index.at(w);
      const auto topic = static_cast<int>(rng_.below(k));
      doc_of_token_.push_back(static_cast<int>(d));
      word_of_token_.push_back(word);
      topic_of_token_.push_back(topic);
      ++doc_lengths_[d];
      ++doc_topic_counts_[d * k + static_cast<std::size_t>(topic)];
      ++topic_word_counts_[static_cast<std::size_t>(topic) * v + static_cast<std::size_t>(word)];
      ++topic_counts_[static_cast<std::size_t>(topic)];
    }
  }
}

void GibbsLda::sweep() {
  const auto k = static_cast<std::size_t>(n_topics_);
  const std::size_t v = vocab_.size();
  const double v_beta = static_cast<double>(v) * beta_;
  for (std::size_t t = 0; t < topic_of_token_.size(); ++t) {
    const auto d = static_cast<std::size_t>(doc_of_token_[t]);
    const auto w = static_cast<std::size_t>(word_of_token_[t]);
    auto old_topic = static_cast<std::size_t>(topic_of_token_[t]);
    --doc_topic_counts_[d * k + old_topic];
    --topic_word_counts_[old_topic * v + w];
    --topic_counts_[old_topic];

    double total = 0.0;
    for (std::size_t z = 0; z < k; ++z) {
      total += (doc_topic_counts_[d * k + z] + alpha_) * (topic_word_counts_[z * v + w] + beta_) /
               (topic_counts_[z] + v_beta);
      weights_[z] = total;
    }
    const double u = rng_.uniform() * total;
    std::size_t topic = k - 1;
    for (std::size_t z = 0; z < k; ++z) {
      if (u < weights_[z]) {
        topic = z;
        break;
      }
    }
    topic_of_token_[t] = static_cast<int>(topic);
    ++doc_topic_counts_[d * k + topic];
    ++topic_word_counts_[topic * v + w];
    ++topic_counts_[topic];
  }
  ++sweeps_;
}

bool GibbsLda::counts_consistent() const {
  const auto k = static_cast<std::size_t>(n_topics_);
  const std::size_t v = vocab_.size();
  std::vector<int> dt(doc_topic_counts_.size(), 0);
  std::vector<int> tw(topic_word_counts_.size(), 0);
  std::vector<int> tc(topic_counts_.size(), 0);
  for (std::size_t t = 0; t < topic_of_token_.size(); ++t) {
    const auto z = static_cast<std::size_t>(topic_of_token_[t]);
    ++dt[static_cast<std::size_t>(doc_of_token_[t]) * k + z];
    ++tw[z * v + static_cast<std::size_t>(word_of_token_[t])];
    ++tc[z];
  }
  const auto total = static_cast<long long>(topic_of_token_.size());
  return dt == doc_topic_counts_ && tw == topic_word_counts_ && tc == topic_counts_ &&
         topic_word_total() == total && doc_topic_total() == total;
}

long long GibbsLda::topic_word_total() const {
  long long s = 0;
  for (int c : topic_word_counts_) s += c;
  return s;
}

long long GibbsLda::doc_topic_total() const {
  long long s = 0;
  for (int c : doc_topic_counts_) s += c;
  return s;
}

Matrix GibbsLda::doc_topic() const {
  const auto n_docs = static_cast<Eigen::Index>(doc_lengths_.size());
  const auto k = static_cast<std::size_t>(n_topics_);
  Matrix theta = Matrix::Zero(n_docs, n_topics_);
  for (Eigen::Index d = 0; d < n_docs; ++d) {
    const int len = doc_lengths_[static_cast<std::size_t>(d)];
    if (len == 0) continue;
    const double denom = len + n_topics_ * alpha_;
    for (std::size_t z = 0; z < k; ++z) {
      theta(d, static_cast<Eigen::Index>(z)) = (doc_topic_counts_[static_cast<std::size_t>(d) * k + z] + alpha_) / denom;
    }
  }
  return theta;
}

Matrix GibbsLda::topic_word() const {
  const std::size_t v = vocab_.size();
  Matrix phi(n_topics_, static_cast<Eigen::Index>(v));
  for (int z = 0; z < n_topics_; ++z) {
    const double denom = topic_counts_[static_cast<std::size_t>(z)] + static_cast<double>(v) * beta_;
    for (std::size_t w = 0; w < v; ++w) {
      phi(z, static_cast<Eigen::Index>(w)) = (topic_word_counts_[static_cast<std::size_t>(z) * v + w] + beta_) / denom;
    }
  }
  return phi;
}

std::vector<int> GibbsLda::labels() const {
  const auto k = static_cast<std::size_t>(n_topics_);
  std::vector<int> out(doc_lengths_.size(), kNoise);
  for (std::size_t d = 0; d < doc_lengths_.size(); ++d) {
    if (doc_lengths_[d] == 0) continue;
    int best = 0;
    for (std::size_t z = 1; z < k; ++z) {
      if (doc_topic_counts_[d * k + z] > doc_topic_counts_[d * k + static_cast<std::size_t>(best)]) {
        best = static_cast<int>(z);
      }
    }
    out[d] = best;
  }
  return out;
}

LdaResult lda_cluster(std::span<const std::vector<std::string>> docs, const ClusterParams& p,
                      std::vector<std::string> node_order) {
  validate(p);
  GibbsLda model(docs, p.n_topics, p.alpha, p.beta, p.seed);
  for (int it = 0; it < p.gibbs_iters; ++it) model.sweep();

  LdaResult r;
  r.doc_topic = model.doc_topic();
  r.topic_word = model.topic_word();
  r.vocabulary = model.vocabulary();
  r.assignment = make_assignment(model.labels(), ClusterMethod::LDA, to_json(p), std::move(node_order));
  return r;
}

}  // namespace ppkg
