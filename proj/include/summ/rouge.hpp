#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace summ::rouge {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline RougeScore from_counts(double overlap, double cand_total, double ref_total) {
  RougeScore s;
  if (cand_total > 0) s.precision = overlap / cand_total;
  if (ref_total > 0) s.recall = overlap / ref_total;
  if (s.precision + s.recall > 0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

// Clipped n-gram multiset overlap; an empty side scores zero.
inline RougeScore rouge_n(const std::vector<std::string>& candidate,
                          const std::vector<std::string>& reference, int n) {
  if (n < 1) throw std::invalid_argument("rouge_n: n must be >= 1");
  auto grams = [n](const std::vector<std::string>& toks) {
    std::map<std::vector<std::string>, int> g;
    for (int i = 0; i + n <= static_cast<int>(toks.size()); ++i) {
      ++g[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
    }
    return g;
  };
  auto cg = grams(candidate);
  auto rg = grams(reference);
  long cand_total = 0, ref_total = 0, overlap = 0;
  for (auto& [k, v] : cg) cand_total += v;
  for (auto& [k, v] : rg) ref_total += v;
  for (auto& [k, v] : cg) {
    auto it = rg.find(k);
    if (it != rg.end()) overlap += std::min(v, it->second);
  }
  if (cand_total == 0 || ref_total == 0) return {};
  return from_counts(static_cast<double>(overlap), static_cast<double>(cand_total),
                     static_cast<double>(ref_total));
}

namespace detail {

// Positions in `ref` matched by one LCS of (ref, cand).
inline std::vector<int> lcs_ref_positions(const std::vector<std::string>& ref,
                                          const std::vector<std::string>& cand) {
  const int n = static_cast<int>(ref.size()), m = static_cast<int>(cand.size());
  std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= m; ++j) {
      dp[i][j] = ref[i - 1] == cand[j - 1] ? dp[i - 1][j - 1] + 1
                                           : std::max(dp[i - 1][j], dp[i][j - 1]);
    }
  }
  std::vector<int> pos;
  int i = n, j = m;
  while (i > 0 && j > 0) {
    if (ref[i - 1] == cand[j - 1]) {
      pos.push_back(i - 1);
      --i;
      --j;
    } else if (dp[i - 1][j] >= dp[i][j - 1]) {
      --i;
    } else {
      --j;
    }
  }
  std::reverse(pos.begin(), pos.end());
  return pos;
}

}  // namespace detail

// Summary-level ROUGE-L: union-LCS of each reference sentence against the
// candidate sentences, per Lin (2004).
inline RougeScore rouge_l(const std::vector<std::vector<std::string>>& candidate_sentences,
                          const std::vector<std::vector<std::string>>& reference_sentences) {
  long cand_total = 0, ref_total = 0, union_hits = 0;
  for (const auto& c : candidate_sentences) cand_total += static_cast<long>(c.size());
  for (const auto& r : reference_sentences) ref_total += static_cast<long>(r.size());
  for (const auto& r : reference_sentences) {
    std::vector<char> hit(r.size(), 0);
    for (const auto& c : candidate_sentences) {
      for (int p : detail::lcs_ref_positions(r, c)) hit[p] = 1;
    }
    for (char h : hit) union_hits += h;
  }
  if (cand_total == 0 || ref_total == 0) return {};
  return from_counts(static_cast<double>(union_hits), static_cast<double>(cand_total),
                     static_cast<double>(ref_total));
}

struct CorpusScores {
  RougeScore rouge1, rouge2, rougeL;
};

struct ScoredPair {
  std::vector<std::string> candidate;
  std::vector<std::string> reference;
  std::vector<std::vector<std::string>> candidate_sentences;
  std::vector<std::vector<std::string>> reference_sentences;
};

inline CorpusScores corpus_eval(const std::vector<ScoredPair>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("corpus_eval: empty corpus");
  CorpusScores mean;
  auto acc = [](RougeScore& m, const RougeScore& s) {
    m.precision += s.precision;
    m.recall += s.recall;
    m.f1 += s.f1;
  };
  for (const auto& p : pairs) {
    acc(mean.rouge1, rouge_n(p.candidate, p.reference, 1));
    acc(mean.rouge2, rouge_n(p.candidate, p.reference, 2));
    acc(mean.rougeL, rouge_l(p.candidate_sentences, p.reference_sentences));
  }
  auto div = [&](RougeScore& m) {
    m.precision /= pairs.size();
    m.recall /= pairs.size();
    m.f1 /= pairs.size();
  };
  div(mean.rouge1);
  div(mean.rouge2);
  div(mean.rougeL);
  return mean;
}

}  // namespace summ::rouge
