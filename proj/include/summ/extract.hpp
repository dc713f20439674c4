#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "summ/wordnet.hpp"

namespace summ::extract {

struct CandidateWord {
  std::string token;
  int position = 0;     // 0-based index in the sentence
  int sense_count = 0;  // always >= 2 after filtering
};

struct RankedSentence {
  int doc_index = 0;
  std::vector<CandidateWord> kept_words;
  std::vector<int> keyword_weights;
  double weight_avg = 0.0;
};

struct ExtractConfig {
  int n_win = 5;
  int n_top = 3;
};

// Filters stop words and unambiguous tokens, keeping sentence order.
inline std::vector<CandidateWord> content_words(const std::vector<std::string>& sentence,
                                                const wordnet::Lexicon& lex) {
  std::vector<CandidateWord> out;
  for (int i = 0; i < static_cast<int>(sentence.size()); ++i) {
    const std::string& tok = sentence[i];
    if (lex.is_stop(tok)) continue;
    int sc = lex.sense_count(tok);
    if (sc < 2) continue;
    out.push_back({tok, i, sc});
  }
  return out;
}

// Sorts descending by sense count (ties keep sentence order) and keeps
// the first n_sav = min(m, n_win) words.
inline std::vector<CandidateWord> select_window(std::vector<CandidateWord> candidates,
                                                int n_win) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const CandidateWord& a, const CandidateWord& b) {
                     return a.sense_count > b.sense_count;
                   });
  if (static_cast<int>(candidates.size()) > n_win) candidates.resize(n_win);
  return candidates;
}

// Scores each sense of the keyword by summed gloss overlap against every
// sense of every other kept word; the best sense's score is the weight.
inline int keyword_weight(const CandidateWord& keyword,
                          const std::vector<CandidateWord>& others,
                          const wordnet::Lexicon& lex) {
  int best = 0;
  for (const wordnet::Synset* sense : lex.senses(keyword.token)) {
    int score = 0;
    for (const CandidateWord& other : others) {
      for (const wordnet::Synset* other_sense : lex.senses(other.token)) {
        score += wordnet::gloss_overlap(*sense, *other_sense);
      }
    }
    best = std::max(best, score);
  }
  return best;
}

inline RankedSentence sentence_weight(const std::vector<std::string>& sentence,
                                      int doc_index, const wordnet::Lexicon& lex,
                                      const ExtractConfig& cfg = {}) {
  RankedSentence rs;
  rs.doc_index = doc_index;
  rs.kept_words = select_window(content_words(sentence, lex), cfg.n_win);
  long total = 0;
  for (size_t k = 0; k < rs.kept_words.size(); ++k) {
    std::vector<CandidateWord> others;
    for (size_t j = 0; j < rs.kept_words.size(); ++j) {
      if (j != k) others.push_back(rs.kept_words[j]);
    }
    int w = keyword_weight(rs.kept_words[k], others, lex);
    rs.keyword_weights.push_back(w);
    total += w;
  }
  rs.weight_avg = rs.kept_words.empty()
                      ? 0.0
                      : static_cast<double>(total) / static_cast<double>(rs.kept_words.size());
  return rs;
}

// Top n_top sentences by average weight (ties favor earlier position),
// returned in original document order.
inline std::vector<RankedSentence> rank_document(
    const std::vector<std::vector<std::string>>& doc, const wordnet::Lexicon& lex,
    const ExtractConfig& cfg = {}) {
  std::vector<RankedSentence> ranked;
  for (int i = 0; i < static_cast<int>(doc.size()); ++i) {
    ranked.push_back(sentence_weight(doc[i], i, lex, cfg));
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedSentence& a, const RankedSentence& b) {
                     return a.weight_avg > b.weight_avg;
                   });
  if (static_cast<int>(ranked.size()) > cfg.n_top) ranked.resize(cfg.n_top);
  std::sort(ranked.begin(), ranked.end(),
            [](const RankedSentence& a, const RankedSentence& b) {
              return a.doc_index < b.doc_index;
            });
  return ranked;
}

inline std::vector<std::vector<std::string>> lead_k(
    const std::vector<std::vector<std::string>>& doc, int k) {
  if (k < 1) throw std::invalid_argument("lead_k: k must be >= 1");
  std::vector<std::vector<std::string>> out;
  for (int i = 0; i < static_cast<int>(doc.size()) && i < k; ++i) out.push_back(doc[i]);
  return out;
}

}  // namespace summ::extract
