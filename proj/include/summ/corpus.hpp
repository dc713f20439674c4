#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "summ/text.hpp"

namespace summ {

struct Document {
  std::string id;
  std::string article;
  std::string summary;
};

// JSONL corpus: one {"article": ..., "summary": ...} object per line.
// Missing "id" falls back to the 0-based line position.
inline std::vector<Document> load_jsonl_corpus(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
    Document d;
    d.id = j.contains("id") ? std::string(j.at("id")) : std::to_string(docs.size());
    d.article = j.value("article", "");
    d.summary = j.value("summary", "");
    docs.push_back(std::move(d));
  }
  return docs;
}

inline std::map<std::string, long> count_tokens(const std::vector<Document>& docs) {
  std::map<std::string, long> counts;
  for (const auto& d : docs) {
    for (const auto& t : tokenize(d.article)) ++counts[t];
    for (const auto& t : tokenize(d.summary)) ++counts[t];
  }
  return counts;
}

}  // namespace summ
