#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "summ/text.hpp"

namespace summ {

// Fixed-size token vocabulary with reserved control ids.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kStart = 2;
  static constexpr int kStop = 3;

  Vocabulary() { reserve_controls(); }

  // Most frequent tokens up to max_size; frequency ties break
  // lexicographically.
  static Vocabulary build(const std::map<std::string, long>& counts, int max_size) {
    if (max_size <= 4) throw std::invalid_argument("vocabulary max_size must exceed 4");
    std::vector<std::pair<std::string, long>> by_freq(counts.begin(), counts.end());
    std::sort(by_freq.begin(), by_freq.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    Vocabulary v;
    for (const auto& [tok, cnt] : by_freq) {
      if (v.size() >= max_size) break;
      if (v.tok2id_.count(tok)) continue;
      v.push(tok, cnt);
    }
    return v;
  }

  int id(const std::string& tok) const {
    auto it = tok2id_.find(tok);
    return it == tok2id_.end() ? kUnk : it->second;
  }
  bool contains(const std::string& tok) const { return tok2id_.count(tok) > 0; }
  const std::string& token(int id) const {
    if (id < 0 || id >= size()) throw std::out_of_range("vocabulary id " + std::to_string(id));
    return id2tok_[id];
  }
  int size() const { return static_cast<int>(id2tok_.size()); }

  // token<TAB>count, line order = id order.
  void save(std::ostream& out) const {
    for (int i = 0; i < size(); ++i) out << id2tok_[i] << '\t' << counts_[i] << '\n';
  }

  static Vocabulary load(std::istream& in) {
    Vocabulary v;
    v.id2tok_.clear();
    v.counts_.clear();
    v.tok2id_.clear();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw std::runtime_error("vocab line " + std::to_string(lineno) + ": missing tab");
      }
      v.push(line.substr(0, tab), std::stol(line.substr(tab + 1)));
    }
    if (v.size() < 4 || v.id2tok_[kPad] != "<pad>" || v.id2tok_[kUnk] != "<unk>" ||
        v.id2tok_[kStart] != "<s>" || v.id2tok_[kStop] != "</s>") {
      throw std::runtime_error("vocab file missing reserved tokens");
    }
    return v;
  }

 private:
  void reserve_controls() {
    push("<pad>", 0);
    push("<unk>", 0);
    push("<s>", 0);
    push("</s>", 0);
  }
  void push(const std::string& tok, long count) {
    tok2id_[tok] = static_cast<int>(id2tok_.size());
    id2tok_.push_back(tok);
    counts_.push_back(count);
  }

  std::vector<std::string> id2tok_;
  std::vector<long> counts_;
  std::unordered_map<std::string, int> tok2id_;
};

struct Example {
  std::vector<std::string> article_tokens;  // <= max_article after truncation
  std::vector<std::string> summary_tokens;  // <= max_summary
  std::vector<std::string> extract_tokens;
};

inline Example make_example(std::vector<std::string> article,
                            std::vector<std::string> summary,
                            std::vector<std::string> extract,
                            int max_article = 400, int max_summary = 100) {
  if (static_cast<int>(article.size()) > max_article) article.resize(max_article);
  if (static_cast<int>(summary.size()) > max_summary) summary.resize(max_summary);
  return {std::move(article), std::move(summary), std::move(extract)};
}

struct EncodedExample {
  std::vector<int> source_ids;           // vocabulary ids, OOV -> UNK
  std::vector<int> source_extended_ids;  // OOV -> vocab_size + j
  std::vector<std::string> oov_list;     // unique article OOVs, first-occurrence order
  std::vector<int> extract_ids;
  std::vector<int> target_ids;  // extended ids, STOP-terminated
  int n_s = 0;
  int n_e = 0;
};

inline EncodedExample encode_example(const Example& ex, const Vocabulary& vocab) {
  EncodedExample enc;
  const int V = vocab.size();
  std::unordered_map<std::string, int> oov_id;
  for (const auto& tok : ex.article_tokens) {
    int id = vocab.id(tok);
    enc.source_ids.push_back(id);
    if (id == Vocabulary::kUnk) {
      auto it = oov_id.find(tok);
      if (it == oov_id.end()) {
        it = oov_id.emplace(tok, V + static_cast<int>(enc.oov_list.size())).first;
        enc.oov_list.push_back(tok);
      }
      enc.source_extended_ids.push_back(it->second);
    } else {
      enc.source_extended_ids.push_back(id);
    }
  }
  for (const auto& tok : ex.extract_tokens) enc.extract_ids.push_back(vocab.id(tok));
  for (const auto& tok : ex.summary_tokens) {
    int id = vocab.id(tok);
    if (id == Vocabulary::kUnk) {
      auto it = oov_id.find(tok);
      if (it != oov_id.end()) id = it->second;
    }
    enc.target_ids.push_back(id);
  }
  enc.target_ids.push_back(Vocabulary::kStop);
  enc.n_s = static_cast<int>(enc.source_ids.size());
  enc.n_e = static_cast<int>(enc.extract_ids.size());
  return enc;
}

// Extended ids >= vocab_size surface the article's OOV tokens.
inline std::vector<std::string> decode_ids(const std::vector<int>& ids,
                                           const Vocabulary& vocab,
                                           const std::vector<std::string>& oov_list) {
  std::vector<std::string> out;
  for (int id : ids) {
    if (id < vocab.size()) {
      out.push_back(vocab.token(id));
    } else {
      int j = id - vocab.size();
      if (j >= static_cast<int>(oov_list.size())) {
        throw std::out_of_range("extended id " + std::to_string(id) +
                                " exceeds oov list of " + std::to_string(oov_list.size()));
      }
      out.push_back(oov_list[j]);
    }
  }
  return out;
}

}  // namespace summ
