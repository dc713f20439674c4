#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "summ/model.hpp"

namespace summ::beam {

struct Hypothesis {
  std::vector<int> ids;  // extended ids, no START/STOP
  double logp = 0.0;
  model::LstmState state;
  ad::Tensor cg_prev;
  ad::Tensor coverage;  // invalid when coverage is off
  std::vector<std::vector<double>> alphas;  // per-step alpha_s, for inspection
  bool finished = false;

  double normalized() const {
    return logp / std::max<size_t>(1, ids.size());
  }
};

struct BeamConfig {
  int beam_size = 4;
  int min_len = 35;
  int max_len = 100;
};

struct DecodeResult {
  std::vector<int> ids;
  double logp = 0.0;
  std::vector<std::vector<double>> alphas;
};

// Beam search over the extended vocabulary. STOP is masked while the
// hypothesis is shorter than min_len; finished hypotheses are ranked by
// length-normalized log-probability.
inline DecodeResult beam_search(const model::Model& m, const EncodedExample& ex,
                                const BeamConfig& cfg = {}) {
  ad::Graph g;
  model::EncoderStates enc = m.encode(g, ex.source_ids, ex.extract_ids);
  const int n_oov = static_cast<int>(ex.oov_list.size());
  const bool cov_on = m.cfg.use_coverage;

  Hypothesis root;
  root.state = enc.decoder_init;
  root.cg_prev = g.zeros({2 * m.cfg.hidden_dim});
  if (cov_on) root.coverage = g.zeros({ex.n_s});
  std::vector<Hypothesis> live{root};
  std::vector<Hypothesis> finished;

  for (int t = 0; t < cfg.max_len && !live.empty(); ++t) {
    struct Cand {
      size_t hyp;
      int token;
      double logp;
      model::StepOutput step;
    };
    std::vector<Cand> cands;
    std::vector<model::StepOutput> steps(live.size());
    for (size_t h = 0; h < live.size(); ++h) {
      Hypothesis& hyp = live[h];
      int prev = hyp.ids.empty() ? Vocabulary::kStart : hyp.ids.back();
      steps[h] = m.step(g, enc, prev, hyp.state, hyp.cg_prev, hyp.coverage,
                        ex.source_extended_ids, n_oov);
      const auto& dist = steps[h].dist.values();
      const int len = static_cast<int>(hyp.ids.size());
      // Top 2*beam_size tokens from this hypothesis.
      std::vector<int> idx(dist.size());
      for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
      size_t keep = std::min<size_t>(idx.size(), 2 * cfg.beam_size);
      std::partial_sort(idx.begin(), idx.begin() + keep, idx.end(),
                        [&](int a, int b) { return dist[a] > dist[b]; });
      for (size_t r = 0; r < keep; ++r) {
        int tok = idx[r];
        if (tok == Vocabulary::kStop && len < cfg.min_len) continue;
        if (tok == Vocabulary::kPad || tok == Vocabulary::kStart) continue;
        cands.push_back({h, tok, hyp.logp + std::log(dist[tok] + 1e-12), steps[h]});
      }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.logp != b.logp) return a.logp > b.logp;
      if (a.hyp != b.hyp) return a.hyp < b.hyp;  // deterministic tie-break
      return a.token < b.token;
    });
    std::vector<Hypothesis> next;
    for (const Cand& c : cands) {
      if (static_cast<int>(next.size()) >= cfg.beam_size) break;
      const Hypothesis& parent = live[c.hyp];
      Hypothesis h = parent;
      h.logp = c.logp;
      h.state = c.step.state;
      h.cg_prev = c.step.c_g;
      h.alphas.push_back(c.step.alpha_s.values());
      if (cov_on) h.coverage = ad::add(parent.coverage, c.step.alpha_s);
      if (c.token == Vocabulary::kStop) {
        h.finished = true;
        finished.push_back(std::move(h));
      } else {
        h.ids.push_back(c.token);
        next.push_back(std::move(h));
      }
    }
    live = std::move(next);
    if (static_cast<int>(finished.size()) >= cfg.beam_size) break;
  }

  const Hypothesis* best = nullptr;
  for (const auto& h : finished) {
    if (!best || h.normalized() > best->normalized()) best = &h;
  }
  if (!best) {
    for (const auto& h : live) {
      if (!best || h.normalized() > best->normalized()) best = &h;
    }
  }
  if (!best) throw std::runtime_error("beam_search: no hypothesis produced");
  return {best->ids, best->logp, best->alphas};
}

inline std::string detokenize(const std::vector<int>& ids, const Vocabulary& vocab,
                              const std::vector<std::string>& oov_list) {
  return join_tokens(decode_ids(ids, vocab, oov_list));
}

}  // namespace summ::beam
