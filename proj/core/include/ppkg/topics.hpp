#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppkg/cluster.hpp"
#include "ppkg/graph.hpp"

namespace ppkg {

/// Lowercased words split on anything that is not an ASCII letter, digit or
/// a non-ASCII byte; English stop-words and pure numbers are dropped.
std::vector<std::string> tokenize(std::string_view text);
bool is_stop_word(std::string_view word);

/// Per-node token lists: the node label plus the text of every incident edge
/// (a self-loop contributes its text once).
std::vector<std::vector<std::string>> node_documents(const PolicyGraph& g);

/// Collapsed Gibbs sampler for LDA. Exposed as a class so callers can step it
/// and inspect the count tables between sweeps.
class GibbsLda {
 public:
  GibbsLda(std::span<const std::vector<std::string>> docs, int n_topics, double alpha, double beta,
           std::uint64_t seed);

  void sweep();
  int sweeps_done() const noexcept { return sweeps_; }

  /// Every count table agrees with the token assignments.
  bool counts_consistent() const;

  int n_topics() const noexcept { return n_topics_; }
  const std::vector<std::string>& vocabulary() const noexcept { return vocab_; }
  std::size_t total_tokens() const noexcept { return topic_of_token_.size(); }
  /// Current topic of every token, documents in order, tokens in order.
  const std::vector<int>& token_topics() const noexcept { return topic_of_token_; }

  /// (n_dk + alpha) / (N_d + K alpha); rows of empty documents are zero.
  Matrix doc_topic() const;
  /// (n_kw + beta) / (n_k + V beta).
  Matrix topic_word() const;

  /// argmax doc_topic row, ties to the lowest topic; kNoise for empty docs.
  std::vector<int> labels() const;

  long long topic_word_total() const;
  long long doc_topic_total() const;

 private:
  int n_topics_;
  double alpha_;
  double beta_;
  Rng rng_;
  int sweeps_ = 0;
  std::vector<std::string> vocab_;
  std::vector<int> doc_of_token_;
  std::vector<int> word_of_token_;
  std::vector<int> topic_of_token_;
  std::vector<int> doc_lengths_;
  std::vector<int> doc_topic_counts_;   // n_docs x K
  std::vector<int> topic_word_counts_;  // K x V
  std::vector<int> topic_counts_;       // K
  std::vector<double> weights_;
};

struct LdaResult {
  ClusterAssignment assignment;
  Matrix doc_topic;
  Matrix topic_word;
  std::vector<std::string> vocabulary;
};

/// Throws EmptyVocabulary when no document has a token.
LdaResult lda_cluster(std::span<const std::vector<std::string>> docs, const ClusterParams& p,
                      std::vector<std::string> node_order = {});

using Annotations = std::map<int, std::vector<std::string>>;

/// Top `top_n` label terms per cluster by TF-IDF, each cluster one document:
/// tf = count / cluster token total, idf = ln(n_clusters / df). Ties break
/// lexicographically. Noise is not annotated.
Annotations annotate_labels(std::span<const int> labels, std::span<const std::string> node_labels, int top_n);
Annotations annotate_clusters(const ClusterAssignment& a, const PolicyGraph& g, int top_n);

std::string annotations_to_json(const Annotations& a);

}  // namespace ppkg
