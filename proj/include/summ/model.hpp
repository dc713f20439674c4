#pragma once

#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "summ/autodiff.hpp"
#include "summ/vocab.hpp"

namespace summ::model {

using ad::Graph;
using ad::Param;
using ad::ParamStore;
using ad::Tensor;

struct ModelConfig {
  int emb_dim = 128;
  int hidden_dim = 256;
  int vocab_size = 0;
  bool use_dual = true;
  bool use_pgn = true;
  bool use_coverage = true;
  double lambda_cov = 1.0;
  unsigned long seed = 13;
  // Test hook: overrides the learned generation switch with a constant.
  std::optional<double> force_p_gen;
};

struct LstmState {
  Tensor h, c;
};

struct EncoderStates {
  Tensor h_source;   // [n_s, 2H]
  Tensor h_extract;  // [n_e, 2H], invalid when use_dual is off
  LstmState decoder_init;
};

struct StepOutput {
  LstmState state;
  Tensor decoder_input;  // combined decoder input (embedding fused with prior context)
  Tensor alpha_s;
  Tensor alpha_e;  // invalid when use_dual is off
  Tensor c_s, c_e, c_g;
  Tensor p_gen;    // invalid when use_pgn is off
  Tensor p_vocab;  // [V]
  Tensor dist;     // [V + n_oov]
  Tensor coverage_in;  // coverage used at this step (sum of prior alpha_s)
};

class Model {
 public:
  ModelConfig cfg;
  ParamStore params;

  explicit Model(ModelConfig config) : cfg(config) {
    const int E = cfg.emb_dim, H = cfg.hidden_dim, V = cfg.vocab_size;
    if (V < 4) throw std::invalid_argument("model: vocab_size must cover reserved ids");
    params.add("embedding", {V, E});
    add_lstm("src_fwd", E, H);
    add_lstm("src_bwd", E, H);
    if (cfg.use_dual) {
      add_lstm("ext_fwd", E, H);
      add_lstm("ext_bwd", E, H);
    }
    add_lstm("dec", E, H);
    params.add("red_h_w", {H, 2 * H});
    params.add("red_h_b", {H});
    params.add("red_c_w", {H, 2 * H});
    params.add("red_c_b", {H});
    params.add("attn_s_w1", {H, H});
    params.add("attn_s_w2", {H, 2 * H});
    params.add("attn_s_w3", {H});
    params.add("attn_s_v", {H});
    params.add("attn_s_b", {H});
    if (cfg.use_dual) {
      params.add("attn_e_w1", {H, H});
      params.add("attn_e_w2", {H, 2 * H});
      params.add("attn_e_v", {H});
      params.add("attn_e_b", {H});
      params.add("gate_w", {2 * H, 4 * H});
      params.add("gate_b", {2 * H});
    }
    params.add("in_w1", {E, E});
    params.add("in_w2", {E, 2 * H});
    params.add("in_b", {E});
    params.add("out_w1", {V, H});
    params.add("out_w2", {V, 2 * H});
    params.add("out_b", {V});
    if (cfg.use_pgn) {
      params.add("pgen_wc", {2 * H});
      params.add("pgen_ws", {H});
      params.add("pgen_wx", {E});
      params.add("pgen_b", {1});
    }
    init_weights();
  }

  // ---- graph building ----

  EncoderStates encode(Graph& g, const std::vector<int>& source_ids,
                       const std::vector<int>& extract_ids) const {
    if (source_ids.empty()) throw std::invalid_argument("encode: empty source");
    Tensor table = g.leaf(p("embedding"));
    EncoderStates enc;
    LstmState fwd_last, bwd_first;
    enc.h_source = bilstm(g, table, source_ids, "src", &fwd_last, &bwd_first);
    if (cfg.use_dual) {
      if (extract_ids.empty()) throw std::invalid_argument("encode: empty extract channel");
      enc.h_extract = bilstm(g, table, extract_ids, "ext", nullptr, nullptr);
    }
    Tensor cat = ad::concat(fwd_last.h, bwd_first.h);
    enc.decoder_init.h =
        ad::tanh_t(ad::add(ad::matvec(g.leaf(p("red_h_w")), cat), g.leaf(p("red_h_b"))));
    Tensor cat_c = ad::concat(fwd_last.c, bwd_first.c);
    enc.decoder_init.c =
        ad::tanh_t(ad::add(ad::matvec(g.leaf(p("red_c_w")), cat_c), g.leaf(p("red_c_b"))));
    return enc;
  }

  // One teacher-forced / decode step. `coverage` is the sum of previous
  // alpha_s vectors; pass an invalid tensor when coverage is off.
  StepOutput step(Graph& g, const EncoderStates& enc, int y_prev_id, LstmState prev,
                  Tensor cg_prev, Tensor coverage, const std::vector<int>& ext_ids,
                  int n_oov) const {
    const int V = cfg.vocab_size;
    StepOutput out;
    out.coverage_in = coverage;
    Tensor table = g.leaf(p("embedding"));
    int feed = y_prev_id < V ? y_prev_id : Vocabulary::kUnk;
    Tensor emb = ad::embedding(table, feed);
    Tensor x = ad::add(ad::add(ad::matvec(g.leaf(p("in_w1")), emb),
                               ad::matvec(g.leaf(p("in_w2")), cg_prev)),
                       g.leaf(p("in_b")));
    out.decoder_input = x;
    out.state = lstm_step(g, "dec", x, prev);
    std::tie(out.alpha_s, out.c_s) = attend(g, "attn_s", out.state.h, enc.h_source, coverage);
    if (cfg.use_dual) {
      std::tie(out.alpha_e, out.c_e) =
          attend(g, "attn_e", out.state.h, enc.h_extract, Tensor{});
      Tensor gate = ad::sigmoid_t(
          ad::add(ad::matvec(g.leaf(p("gate_w")), ad::concat(out.c_s, out.c_e)),
                  g.leaf(p("gate_b"))));
      Tensor ones = g.constant({gate.size()}, std::vector<double>(gate.size(), 1.0));
      out.c_g = ad::add(ad::mul(gate, out.c_s), ad::mul(ad::sub(ones, gate), out.c_e));
    } else {
      out.c_g = out.c_s;
    }
    out.p_vocab = ad::softmax(ad::add(ad::add(ad::matvec(g.leaf(p("out_w1")), out.state.h),
                                              ad::matvec(g.leaf(p("out_w2")), out.c_g)),
                                      g.leaf(p("out_b"))));
    if (cfg.use_pgn) {
      if (cfg.force_p_gen) {
        out.p_gen = g.scalar(*cfg.force_p_gen);
      } else {
        Tensor pre = ad::add(ad::add(ad::dot(g.leaf(p("pgen_wc")), out.c_s),
                                     ad::dot(g.leaf(p("pgen_ws")), out.state.h)),
                             ad::add(ad::dot(g.leaf(p("pgen_wx")), x), g.leaf(p("pgen_b"))));
        out.p_gen = ad::sigmoid_t(pre);
      }
      out.dist = ad::pointer_combine(out.p_gen, out.p_vocab, out.alpha_s, ext_ids, V + n_oov);
    } else {
      out.dist = ad::pad_zeros(out.p_vocab, V + n_oov);
    }
    return out;
  }

  struct SequenceLoss {
    Tensor total;     // mean over timesteps of nll + lambda * covloss
    double nll = 0.0;  // per-token mean, forward value
    double covloss = 0.0;
    std::vector<StepOutput> steps;
  };

  // Teacher-forced loss over one encoded example.
  SequenceLoss sequence_loss(Graph& g, const EncodedExample& ex, bool coverage_on) const {
    if (coverage_on && !cfg.use_coverage) {
      throw std::invalid_argument("sequence_loss: coverage requested on a model built "
                                  "without coverage");
    }
    EncoderStates enc = encode(g, ex.source_ids, ex.extract_ids);
    const int n_s = ex.n_s;
    const int n_oov = static_cast<int>(ex.oov_list.size());
    LstmState state = enc.decoder_init;
    Tensor cg_prev = g.zeros({2 * cfg.hidden_dim});
    Tensor cov = coverage_on ? g.zeros({n_s}) : Tensor{};
    int prev_id = Vocabulary::kStart;
    SequenceLoss out;
    Tensor acc;
    double nll_sum = 0.0, cov_sum = 0.0;
    for (int target : ex.target_ids) {
      StepOutput so = step(g, enc, prev_id, state, cg_prev, cov, ex.source_extended_ids,
                           n_oov);
      Tensor nll = ad::scale(ad::pick_log(so.dist, target), -1.0);
      Tensor loss_t = nll;
      nll_sum += nll.value();
      if (coverage_on) {
        Tensor covloss = ad::sum(ad::emin(so.alpha_s, cov));
        cov_sum += covloss.value();
        loss_t = ad::add(loss_t, ad::scale(covloss, cfg.lambda_cov));
        cov = ad::add(cov, so.alpha_s);
      }
      acc = acc.valid() ? ad::add(acc, loss_t) : loss_t;
      state = so.state;
      cg_prev = so.c_g;
      prev_id = target;
      out.steps.push_back(std::move(so));
    }
    const double T = static_cast<double>(ex.target_ids.size());
    out.total = ad::scale(acc, 1.0 / T);
    out.nll = nll_sum / T;
    out.covloss = cov_sum / T;
    return out;
  }

  // ---- checkpointing ----

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["format"] = "summ-checkpoint-v1";
    j["wordnet_version"] = "3.0";
    j["config"] = {{"emb_dim", cfg.emb_dim},       {"hidden_dim", cfg.hidden_dim},
                   {"vocab_size", cfg.vocab_size}, {"use_dual", cfg.use_dual},
                   {"use_pgn", cfg.use_pgn},       {"use_coverage", cfg.use_coverage},
                   {"lambda_cov", cfg.lambda_cov}, {"seed", cfg.seed}};
    nlohmann::json arrays = nlohmann::json::object();
    for (const auto& [name, param] : params) {
      arrays[name] = {{"shape", param.shape}, {"values", param.value}, {"acc", param.acc}};
    }
    j["params"] = std::move(arrays);
    return j;
  }

  static Model from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "summ-checkpoint-v1") {
      throw std::runtime_error("checkpoint: unknown format");
    }
    const auto& c = j.at("config");
    ModelConfig cfg;
    cfg.emb_dim = c.at("emb_dim");
    cfg.hidden_dim = c.at("hidden_dim");
    cfg.vocab_size = c.at("vocab_size");
    cfg.use_dual = c.at("use_dual");
    cfg.use_pgn = c.at("use_pgn");
    cfg.use_coverage = c.at("use_coverage");
    cfg.lambda_cov = c.at("lambda_cov");
    cfg.seed = c.at("seed");
    Model m(cfg);
    for (auto& [name, param] : m.params) {
      const auto& entry = j.at("params").at(name);
      std::vector<double> vals = entry.at("values");
      if (vals.size() != param.value.size()) {
        throw std::runtime_error("checkpoint: size mismatch for '" + name + "'");
      }
      param.value = std::move(vals);
      if (entry.contains("acc")) {
        std::vector<double> acc = entry.at("acc");
        param.acc = std::move(acc);
      }
    }
    return m;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path);
    out << to_json();
  }

  static Model load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read checkpoint " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
  }

 private:
  Param& p(const std::string& name) const { return const_cast<ParamStore&>(params).at(name); }

  void add_lstm(const std::string& name, int input_dim, int hidden) {
    params.add(name + "_w", {4 * hidden, input_dim + hidden});
    params.add(name + "_b", {4 * hidden});
  }

  // Uniform [-0.02, 0.02]; forget-gate bias rows start at 1.0.
  void init_weights() {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-0.02, 0.02);
    for (auto& [name, param] : params) {
      for (double& v : param.value) v = u(rng);
    }
    const int H = cfg.hidden_dim;
    for (const char* lstm : {"src_fwd", "src_bwd", "ext_fwd", "ext_bwd", "dec"}) {
      std::string bname = std::string(lstm) + "_b";
      if (!cfg.use_dual && bname.rfind("ext", 0) == 0) continue;
      auto& b = params.at(bname).value;
      for (int i = H; i < 2 * H; ++i) b[i] = 1.0;
    }
  }

  // Gate order: input, forget, output, candidate.
  LstmState lstm_step(Graph& g, const std::string& name, Tensor x, LstmState prev) const {
    const int H = cfg.hidden_dim;
    Tensor z = ad::add(ad::matvec(g.leaf(p(name + "_w")), ad::concat(x, prev.h)),
                       g.leaf(p(name + "_b")));
    Tensor in_gate = ad::sigmoid_t(ad::slice(z, 0, H));
    Tensor forget = ad::sigmoid_t(ad::slice(z, H, H));
    Tensor out_gate = ad::sigmoid_t(ad::slice(z, 2 * H, H));
    Tensor cand = ad::tanh_t(ad::slice(z, 3 * H, H));
    LstmState next;
    next.c = ad::add(ad::mul(forget, prev.c), ad::mul(in_gate, cand));
    next.h = ad::mul(out_gate, ad::tanh_t(next.c));
    return next;
  }

  // h_i = [forward_i; backward_i], stacked into [n, 2H].
  Tensor bilstm(Graph& g, Tensor table, const std::vector<int>& ids,
                const std::string& prefix, LstmState* fwd_last, LstmState* bwd_first) const {
    const int H = cfg.hidden_dim;
    const int n = static_cast<int>(ids.size());
    std::vector<Tensor> embs;
    for (int id : ids) embs.push_back(ad::embedding(table, id));
    std::vector<Tensor> fwd(n), bwd(n);
    LstmState state{g.zeros({H}), g.zeros({H})};
    for (int i = 0; i < n; ++i) {
      state = lstm_step(g, prefix + "_fwd", embs[i], state);
      fwd[i] = state.h;
    }
    if (fwd_last) *fwd_last = state;
    state = {g.zeros({H}), g.zeros({H})};
    for (int i = n - 1; i >= 0; --i) {
      state = lstm_step(g, prefix + "_bwd", embs[i], state);
      bwd[i] = state.h;
    }
    if (bwd_first) *bwd_first = state;
    std::vector<Tensor> rows;
    for (int i = 0; i < n; ++i) rows.push_back(ad::concat(fwd[i], bwd[i]));
    return ad::stack(rows);
  }

  // Bahdanau scoring with optional coverage term on the source channel.
  std::pair<Tensor, Tensor> attend(Graph& g, const std::string& prefix, Tensor s, Tensor h,
                                   Tensor coverage) const {
    Tensor pre = ad::add_rows(ad::rows_linear(h, g.leaf(p(prefix + "_w2"))),
                              ad::add(ad::matvec(g.leaf(p(prefix + "_w1")), s),
                                      g.leaf(p(prefix + "_b"))));
    if (coverage.valid()) {
      pre = ad::add(pre, ad::outer(coverage, g.leaf(p(prefix + "_w3"))));
    }
    Tensor scores = ad::matvec(ad::tanh_t(pre), g.leaf(p(prefix + "_v")));
    Tensor alpha = ad::softmax(scores);
    Tensor context = ad::matvec_t(h, alpha);
    return {alpha, context};
  }
};

}  // namespace summ::model
