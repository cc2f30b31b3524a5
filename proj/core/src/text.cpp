#include <algorithm>
#include <array>
#include <cctype>

#include "ppkg/topics.hpp"

namespace ppkg {

namespace {

// Sorted for binary search.
constexpr std::array<std::string_view, 129> kStopWords = {
    "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any", "are", "as", "at",
    "be", "because", "been", "before", "being", "below", "between", "both", "but", "by", "can", "could", "did",
    "do", "does", "doing", "down", "during", "each", "etc", "few", "for", "from", "further", "had", "has",
    "have", "having", "he", "her", "here", "hers", "herself", "him", "himself", "his", "how", "if", "in",
    "into", "is", "it", "its", "itself", "just", "may", "me", "might", "more", "most", "must", "my", "myself",
    "no", "nor", "not", "now", "of", "off", "on", "once", "only", "or", "other", "our", "ours", "ourselves",
    "out", "over", "own", "same", "shall", "she", "should", "so", "some", "such", "than", "that", "the",
    "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this", "those", "through", "to",
    "too", "under", "until", "up", "us", "very", "was", "we", "were", "what", "when", "where", "which", "while",
    "who", "whom", "why", "will", "with", "would", "you", "your", "yours"};

static_assert(std::is_sorted(kStopWords.begin(), kStopWords.end()));

bool word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

bool all_digits(std::string_view w) {
  return std::all_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

bool is_stop_word(std::string_view word) {
  return std::binary_search(kStopWords.begin(), kStopWords.end(), word);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string word;
  auto flush = [&] {
    if (word.size() > 1 && !all_digits(word) && !is_stop_word(word)) out.push_back(word);
    word.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (word_byte(c)) {
      word += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::vector<std::vector<std::string>> node_documents(const PolicyGraph& g) {
  std::vector<std::vector<std::string>> docs(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) docs[i] = tokenize(g.nodes()[i].label);
  for (const auto& e : g.edges()) {
    const auto toks = tokenize(e.text);
    const std::size_t s = *g.index_of(e.source);
    const std::size_t t = *g.index_of(e.target);
    docs[s].insert(docs[s].end(), toks.begin(), toks.end());
    if (t != s) docs[t].insert(docs[t].end(), toks.begin(), toks.end());
  }
  return docs;
}

}  // namespace ppkg
