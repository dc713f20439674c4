#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace summ {

namespace detail {
inline bool is_split_punct(char c) {
  switch (c) {
    case '.': case ',': case '!': case '?': case ';': case ':':
    case '"': case '(': case ')':
      return true;
    default:
      return false;
  }
}
}  // namespace detail

// Lowercases, splits on whitespace, and breaks punctuation marks out
// into their own tokens. Idempotent on its own space-joined output.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  };
  for (char raw : text) {
    unsigned char u = static_cast<unsigned char>(raw);
    char c = static_cast<char>(std::tolower(u));
    if (std::isspace(u)) {
      flush();
    } else if (detail::is_split_punct(c)) {
      flush();
      out.emplace_back(1, c);
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

inline bool is_sentence_end(const std::string& tok) {
  return tok == "." || tok == "!" || tok == "?";
}

// Splits tokenized text into sentences after . ! ? tokens.
// Never returns an empty sentence.
inline std::vector<std::vector<std::string>> split_sentences(std::string_view text) {
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> cur;
  for (auto& tok : tokenize(text)) {
    cur.push_back(tok);
    if (is_sentence_end(tok)) {
      sentences.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) sentences.push_back(std::move(cur));
  return sentences;
}

inline std::string join_tokens(const std::vector<std::string>& toks) {
  std::string s;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (i) s.push_back(' ');
    s += toks[i];
  }
  return s;
}

}  // namespace summ
