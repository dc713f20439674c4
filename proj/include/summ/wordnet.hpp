#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "summ/stopwords.hpp"

namespace summ::wordnet {

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what),
        line(line_) {}
};

struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SynsetId {
  char pos = 0;
  long offset = 0;
  auto operator<=>(const SynsetId&) const = default;
};

// Lowercase, split on non-alphanumeric runs, drop stop words, deduplicate.
inline std::set<std::string> normalize_gloss(const std::string& raw,
                                             const std::set<std::string>& stopwords) {
  std::set<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && !stopwords.count(cur)) out.insert(cur);
    cur.clear();
  };
  for (char raw_c : raw) {
    unsigned char u = static_cast<unsigned char>(raw_c);
    if (std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

struct Synset {
  SynsetId id;
  std::vector<std::string> lemmas;
  std::string gloss_raw;
  std::set<std::string> gloss_tokens;
};

inline int gloss_overlap(const Synset& a, const Synset& b) {
  int n = 0;
  for (const auto& t : a.gloss_tokens) n += b.gloss_tokens.count(t);
  return n;
}

// Senses aggregate across parts of speech in fixed order: noun, verb,
// adjective, adverb (then anything else).
inline int pos_rank(char pos) {
  switch (pos) {
    case 'n': return 0;
    case 'v': return 1;
    case 'a': case 's': return 2;
    case 'r': return 3;
    default: return 4;
  }
}

class Lexicon {
 public:
  explicit Lexicon(std::set<std::string> stopwords = default_stopwords())
      : stopwords_(std::move(stopwords)) {}

  const std::set<std::string>& stopwords() const { return stopwords_; }
  bool is_stop(const std::string& tok) const { return stopwords_.count(tok) > 0; }

  void add_synset(Synset s) { synsets_[s.id] = std::move(s); }

  const Synset* find(SynsetId id) const {
    auto it = synsets_.find(id);
    return it == synsets_.end() ? nullptr : &it->second;
  }

  void add_index_entry(const std::string& lemma, char pos, std::vector<SynsetId> ids) {
    for (SynsetId id : ids) {
      if (!synsets_.count(id)) {
        throw IntegrityError("index references synset " + std::string(1, id.pos) +
                             std::to_string(id.offset) + " absent from data (lemma '" +
                             lemma + "')");
      }
    }
    auto& slot = index_[{lemma, pos}];
    slot.insert(slot.end(), ids.begin(), ids.end());
  }

  // All synsets for a lemma across parts of speech, POS order then
  // index order; empty if the lemma is unknown.
  std::vector<const Synset*> senses(const std::string& lemma) const {
    std::vector<std::pair<char, SynsetId>> found;
    auto lo = index_.lower_bound({lemma, '\0'});
    for (auto it = lo; it != index_.end() && it->first.first == lemma; ++it) {
      for (SynsetId id : it->second) found.emplace_back(it->first.second, id);
    }
    std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
      return pos_rank(a.first) < pos_rank(b.first);
    });
    std::vector<const Synset*> out;
    std::set<SynsetId> seen;
    for (auto& [pos, id] : found) {
      if (seen.insert(id).second) out.push_back(&synsets_.at(id));
    }
    return out;
  }

  int sense_count(const std::string& lemma) const {
    std::set<SynsetId> ids;
    auto lo = index_.lower_bound({lemma, '\0'});
    for (auto it = lo; it != index_.end() && it->first.first == lemma; ++it) {
      ids.insert(it->second.begin(), it->second.end());
    }
    return static_cast<int>(ids.size());
  }

  size_t synset_count() const { return synsets_.size(); }

 private:
  std::map<SynsetId, Synset> synsets_;
  std::map<std::pair<std::string, char>, std::vector<SynsetId>> index_;
  std::set<std::string> stopwords_;
};

namespace detail {

inline bool is_license_line(const std::string& line) {
  return line.size() >= 2 && line[0] == ' ' && line[1] == ' ';
}

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// WNDB word fields may carry a syntactic marker, e.g. "galore(ip)".
inline std::string strip_marker(const std::string& w) {
  auto p = w.find('(');
  return p == std::string::npos ? w : w.substr(0, p);
}

}  // namespace detail

// Parses a WordNet 3.0 data.<pos> file into `lex`. Glosses follow the
// `|` separator; the two-space license header is skipped.
inline void parse_wndb_data(Lexicon& lex, const std::string& data_text, char pos) {
  std::istringstream in(data_text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || detail::is_license_line(line)) continue;
    std::string head = line, gloss;
    if (auto bar = line.find('|'); bar != std::string::npos) {
      head = line.substr(0, bar);
      gloss = line.substr(bar + 1);
      while (!gloss.empty() && gloss.front() == ' ') gloss.erase(gloss.begin());
    }
    std::istringstream fields(head);
    long offset;
    int lex_filenum;
    std::string ss_type, wcnt_hex;
    if (!(fields >> offset >> lex_filenum >> ss_type >> wcnt_hex)) {
      throw ParseError(lineno, "malformed data line header");
    }
    int wcnt;
    try {
      wcnt = std::stoi(wcnt_hex, nullptr, 16);
    } catch (const std::exception&) {
      throw ParseError(lineno, "bad word count '" + wcnt_hex + "'");
    }
    if (wcnt < 1) throw ParseError(lineno, "synset with no words");
    Synset syn;
    syn.id = {pos, offset};
    for (int i = 0; i < wcnt; ++i) {
      std::string word, lex_id;
      if (!(fields >> word >> lex_id)) {
        throw ParseError(lineno, "truncated word list");
      }
      syn.lemmas.push_back(detail::lower(detail::strip_marker(word)));
    }
    syn.gloss_raw = gloss;
    syn.gloss_tokens = normalize_gloss(gloss, lex.stopwords());
    lex.add_synset(std::move(syn));
  }
}

// Parses a WordNet 3.0 index.<pos> file against already-parsed data.
inline void parse_wndb_index(Lexicon& lex, const std::string& index_text, char pos) {
  std::istringstream in(index_text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || detail::is_license_line(line)) continue;
    std::istringstream fields(line);
    std::string lemma, file_pos;
    int synset_cnt, p_cnt;
    if (!(fields >> lemma >> file_pos >> synset_cnt >> p_cnt)) {
      throw ParseError(lineno, "malformed index line");
    }
    std::string skip;
    for (int i = 0; i < p_cnt; ++i) {
      if (!(fields >> skip)) throw ParseError(lineno, "truncated pointer symbols");
    }
    int sense_cnt, tagsense_cnt;
    if (!(fields >> sense_cnt >> tagsense_cnt)) {
      throw ParseError(lineno, "missing sense counts");
    }
    std::vector<SynsetId> ids;
    for (int i = 0; i < synset_cnt; ++i) {
      long off;
      if (!(fields >> off)) throw ParseError(lineno, "truncated offset list");
      ids.push_back({pos, off});
    }
    lex.add_index_entry(detail::lower(lemma), pos, std::move(ids));
  }
}

inline Lexicon parse_wndb(const std::string& index_text, const std::string& data_text,
                          char pos,
                          std::set<std::string> stopwords = default_stopwords()) {
  Lexicon lex(std::move(stopwords));
  parse_wndb_data(lex, data_text, pos);
  parse_wndb_index(lex, index_text, pos);
  return lex;
}

// Fixture format: `lemma<TAB>pos<TAB>gloss`, one sense per line; repeated
// lemma lines add senses in file order.
inline Lexicon parse_fixture_lexicon(const std::string& text,
                                     std::set<std::string> stopwords = default_stopwords()) {
  Lexicon lex(std::move(stopwords));
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::map<char, long> next_offset;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3) {
      throw ParseError(lineno, "expected 3 tab-separated fields, got " +
                                   std::to_string(fields.size()));
    }
    const std::string lemma = detail::lower(fields[0]);
    if (lemma.empty()) throw ParseError(lineno, "empty lemma");
    if (fields[1].size() != 1 || std::string("nvar").find(fields[1][0]) == std::string::npos) {
      throw ParseError(lineno, "bad part-of-speech tag '" + fields[1] + "'");
    }
    const char pos = fields[1][0];
    Synset syn;
    syn.id = {pos, ++next_offset[pos]};
    syn.lemmas = {lemma};
    syn.gloss_raw = fields[2];
    syn.gloss_tokens = normalize_gloss(fields[2], lex.stopwords());
    SynsetId id = syn.id;
    lex.add_synset(std::move(syn));
    lex.add_index_entry(lemma, pos, {id});
  }
  return lex;
}

}  // namespace summ::wordnet
