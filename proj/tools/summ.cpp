// Command-line front end for the summarization toolkit: extraction,
// training, decoding, ROUGE evaluation, gradient checking, and lexicon
// inspection.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "summ/beam.hpp"
#include "summ/corpus.hpp"
#include "summ/extract.hpp"
#include "summ/model.hpp"
#include "summ/rouge.hpp"
#include "summ/stopwords.hpp"
#include "summ/text.hpp"
#include "summ/train.hpp"
#include "summ/vocab.hpp"
#include "summ/wordnet.hpp"

using nlohmann::json;

namespace {

struct RunConfig {
  // Extraction
  int n_win = 5;
  int n_top = 3;
  std::string method = "wordnet";  // wordnet | lead3
  std::string lexicon_path;
  std::vector<std::string> wndb;  // pos:index:data triples
  std::string stopwords_path;
  // Text limits
  int max_article = 400;
  int max_summary = 100;
  // Model
  int emb_dim = 128;
  int hidden_dim = 256;
  int vocab_size = 2000;  // reference runs use 40-50k; desk default stays small
  bool single_encoder = false;
  bool no_pgn = false;
  bool no_coverage = false;
  double lambda_cov = 1.0;
  // Training
  double lr = 0.15;
  double adagrad_init_acc = 0.1;
  double clip_norm = 2.0;
  int batch_size = 4;
  int steps = 1000;
  int coverage_steps = 0;
  int checkpoint_every = 0;
  // Decoding
  int beam = 4;
  int min_len = 35;
  int max_len = 100;
  unsigned long seed = 13;

  json to_json() const {
    return {{"n_win", n_win},
            {"n_top", n_top},
            {"method", method},
            {"max_article", max_article},
            {"max_summary", max_summary},
            {"emb_dim", emb_dim},
            {"hidden_dim", hidden_dim},
            {"vocab_size", vocab_size},
            {"single_encoder", single_encoder},
            {"no_pgn", no_pgn},
            {"no_coverage", no_coverage},
            {"lambda_cov", lambda_cov},
            {"lr", lr},
            {"adagrad_init_acc", adagrad_init_acc},
            {"clip_norm", clip_norm},
            {"batch_size", batch_size},
            {"steps", steps},
            {"coverage_steps", coverage_steps},
            {"beam", beam},
            {"min_len", min_len},
            {"max_len", max_len},
            {"wordnet_version", "3.0"},
            {"seed", seed}};
  }

  void apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file " + path);
    json j;
    in >> j;
    auto get = [&](const char* key, auto& slot) {
      if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    };
    get("n_win", n_win);
    get("n_top", n_top);
    get("method", method);
    get("lexicon", lexicon_path);
    get("stopwords", stopwords_path);
    get("max_article", max_article);
    get("max_summary", max_summary);
    get("emb_dim", emb_dim);
    get("hidden_dim", hidden_dim);
    get("vocab_size", vocab_size);
    get("single_encoder", single_encoder);
    get("no_pgn", no_pgn);
    get("no_coverage", no_coverage);
    get("lambda_cov", lambda_cov);
    get("lr", lr);
    get("adagrad_init_acc", adagrad_init_acc);
    get("clip_norm", clip_norm);
    get("batch_size", batch_size);
    get("steps", steps);
    get("coverage_steps", coverage_steps);
    get("beam", beam);
    get("min_len", min_len);
    get("max_len", max_len);
    get("seed", seed);
  }
};

std::set<std::string> resolve_stopwords(const RunConfig& rc) {
  if (rc.stopwords_path.empty()) return summ::default_stopwords();
  std::ifstream in(rc.stopwords_path);
  if (!in) throw std::runtime_error("cannot read stopword file " + rc.stopwords_path);
  return summ::load_stopwords(in);
}

summ::wordnet::Lexicon load_lexicon(const RunConfig& rc) {
  auto stops = resolve_stopwords(rc);
  if (!rc.lexicon_path.empty()) {
    std::ifstream in(rc.lexicon_path);
    if (!in) throw std::runtime_error("cannot read lexicon " + rc.lexicon_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return summ::wordnet::parse_fixture_lexicon(ss.str(), stops);
  }
  if (!rc.wndb.empty()) {
    summ::wordnet::Lexicon lex(stops);
    for (const auto& triple : rc.wndb) {
      auto c1 = triple.find(':');
      auto c2 = triple.find(':', c1 == std::string::npos ? 0 : c1 + 1);
      if (c1 == std::string::npos || c2 == std::string::npos || c1 != 1) {
        throw std::runtime_error("--wndb expects pos:index_file:data_file, got " + triple);
      }
      char pos = triple[0];
      auto slurp = [](const std::string& path) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("cannot read " + path);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
      };
      summ::wordnet::parse_wndb_data(lex, slurp(triple.substr(c2 + 1)), pos);
      summ::wordnet::parse_wndb_index(lex, slurp(triple.substr(c1 + 1, c2 - c1 - 1)), pos);
    }
    return lex;
  }
  throw std::runtime_error("no lexicon given: pass --lexicon or --wndb");
}

std::vector<summ::Document> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read corpus " + path);
  return summ::load_jsonl_corpus(in);
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

std::vector<std::string> extract_channel_tokens(const summ::Document& doc,
                                                const RunConfig& rc,
                                                const summ::wordnet::Lexicon* lex) {
  auto sentences = summ::split_sentences(doc.article);
  std::vector<std::vector<std::string>> chosen;
  if (rc.method == "lead3") {
    chosen = summ::extract::lead_k(sentences, rc.n_top);
  } else {
    summ::extract::ExtractConfig ec{rc.n_win, rc.n_top};
    for (const auto& rs : summ::extract::rank_document(sentences, *lex, ec)) {
      chosen.push_back(sentences[rs.doc_index]);
    }
  }
  std::vector<std::string> toks;
  for (const auto& s : chosen) toks.insert(toks.end(), s.begin(), s.end());
  if (toks.empty()) toks.push_back("<pad>");
  return toks;
}

summ::Vocabulary resolve_vocab(const RunConfig& rc, const std::string& vocab_path,
                               const std::string& save_vocab_path,
                               const std::vector<summ::Document>& docs) {
  if (!vocab_path.empty()) {
    std::ifstream in(vocab_path);
    if (!in) throw std::runtime_error("cannot read vocab " + vocab_path);
    return summ::Vocabulary::load(in);
  }
  auto vocab = summ::Vocabulary::build(summ::count_tokens(docs), rc.vocab_size);
  if (!save_vocab_path.empty()) {
    std::ofstream out(save_vocab_path);
    if (!out) throw std::runtime_error("cannot write vocab " + save_vocab_path);
    vocab.save(out);
  }
  return vocab;
}

summ::model::ModelConfig model_config(const RunConfig& rc, int vocab_size) {
  summ::model::ModelConfig mc;
  mc.emb_dim = rc.emb_dim;
  mc.hidden_dim = rc.hidden_dim;
  mc.vocab_size = vocab_size;
  mc.use_dual = !rc.single_encoder;
  mc.use_pgn = !rc.no_pgn;
  mc.use_coverage = !rc.no_coverage;
  mc.lambda_cov = rc.lambda_cov;
  mc.seed = rc.seed;
  return mc;
}

std::vector<summ::EncodedExample> encode_corpus(const std::vector<summ::Document>& docs,
                                                const summ::Vocabulary& vocab,
                                                const RunConfig& rc,
                                                const summ::wordnet::Lexicon* lex,
                                                bool need_extract) {
  std::vector<summ::EncodedExample> out;
  for (const auto& doc : docs) {
    auto article = summ::tokenize(doc.article);
    if (article.empty()) {
      std::cerr << "warning: skipping empty article (id " << doc.id << ")\n";
      continue;
    }
    std::vector<std::string> extract;
    if (need_extract) extract = extract_channel_tokens(doc, rc, lex);
    auto ex = summ::make_example(article, summ::tokenize(doc.summary), extract,
                                 rc.max_article, rc.max_summary);
    out.push_back(summ::encode_example(ex, vocab));
  }
  return out;
}

int cmd_extract(const RunConfig& rc, const std::string& corpus_path,
                const std::string& out_path) {
  auto docs = load_corpus(corpus_path);
  std::optional<summ::wordnet::Lexicon> lex;
  if (rc.method != "lead3") lex = load_lexicon(rc);
  std::ofstream file;
  std::ostream& out = open_out(file, out_path);
  out << json{{"meta", rc.to_json()}} << "\n";
  for (const auto& doc : docs) {
    auto sentences = summ::split_sentences(doc.article);
    if (rc.method == "lead3") {
      auto lead = summ::extract::lead_k(sentences, rc.n_top);
      for (size_t i = 0; i < lead.size(); ++i) {
        out << json{{"doc_id", doc.id},
                    {"sentence_index", i},
                    {"weight", 0.0},
                    {"text", summ::join_tokens(lead[i])}}
            << "\n";
      }
    } else {
      summ::extract::ExtractConfig ec{rc.n_win, rc.n_top};
      for (const auto& rs : summ::extract::rank_document(sentences, *lex, ec)) {
        out << json{{"doc_id", doc.id},
                    {"sentence_index", rs.doc_index},
                    {"weight", rs.weight_avg},
                    {"text", summ::join_tokens(sentences[rs.doc_index])}}
            << "\n";
      }
    }
  }
  return 0;
}

int cmd_train(const RunConfig& rc, const std::string& corpus_path,
              const std::string& vocab_path, const std::string& save_vocab_path,
              const std::string& checkpoint_path, const std::string& trace_path) {
  auto docs = load_corpus(corpus_path);
  auto vocab = resolve_vocab(rc, vocab_path, save_vocab_path, docs);
  std::optional<summ::wordnet::Lexicon> lex;
  const bool dual = !rc.single_encoder;
  if (dual && rc.method != "lead3") lex = load_lexicon(rc);
  auto corpus = encode_corpus(docs, vocab, rc, lex ? &*lex : nullptr, dual);

  summ::model::Model model(model_config(rc, vocab.size()));
  summ::train::TrainConfig tc;
  tc.lr = rc.lr;
  tc.adagrad_init_acc = rc.adagrad_init_acc;
  tc.clip_norm = rc.clip_norm;
  tc.batch_size = rc.batch_size;
  tc.max_steps = rc.steps;
  tc.coverage_phase_steps = rc.coverage_steps;
  tc.lambda_cov = rc.lambda_cov;
  tc.seed = rc.seed;
  tc.checkpoint_every = rc.checkpoint_every;
  tc.checkpoint_path = checkpoint_path;
  tc.on_step = [](int step, double loss, double covloss) {
    if (step % 50 == 0) {
      std::cerr << "step " << step << " loss " << loss << " covloss " << covloss << "\n";
    }
  };
  auto trace = summ::train::train(model, corpus, tc);
  model.save(checkpoint_path);
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) throw std::runtime_error("cannot write trace " + trace_path);
    summ::train::save_trace(trace, out, rc.to_json().dump());
  }
  std::cerr << "saved checkpoint to " << checkpoint_path << "\n";
  return 0;
}

int cmd_decode(const RunConfig& rc, const std::string& corpus_path,
               const std::string& vocab_path, const std::string& checkpoint_path,
               const std::string& out_path) {
  auto docs = load_corpus(corpus_path);
  std::ifstream vin(vocab_path);
  if (!vin) throw std::runtime_error("cannot read vocab " + vocab_path);
  auto vocab = summ::Vocabulary::load(vin);
  auto model = summ::model::Model::load(checkpoint_path);
  std::optional<summ::wordnet::Lexicon> lex;
  if (model.cfg.use_dual && rc.method != "lead3") lex = load_lexicon(rc);
  std::ofstream file;
  std::ostream& out = open_out(file, out_path);
  out << json{{"meta", rc.to_json()}} << "\n";
  summ::beam::BeamConfig bc{rc.beam, rc.min_len, rc.max_len};
  for (const auto& doc : docs) {
    auto article = summ::tokenize(doc.article);
    if (article.empty()) {
      std::cerr << "warning: skipping empty article (id " << doc.id << ")\n";
      continue;
    }
    std::vector<std::string> extract;
    if (model.cfg.use_dual) {
      extract = extract_channel_tokens(doc, rc, lex ? &*lex : nullptr);
    }
    auto ex = summ::encode_example(
        summ::make_example(article, {}, extract, rc.max_article, rc.max_summary), vocab);
    auto res = summ::beam::beam_search(model, ex, bc);
    out << json{{"id", doc.id},
                {"summary", summ::beam::detokenize(res.ids, vocab, ex.oov_list)},
                {"logprob", res.logp}}
        << "\n";
  }
  return 0;
}

int cmd_evaluate(const RunConfig& rc, const std::string& hyp_path,
                 const std::string& ref_path, const std::string& out_path) {
  auto read_jsonl = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::map<std::string, std::string> by_id;
    std::string line;
    long n = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line);
      if (j.contains("meta")) continue;
      std::string id = j.contains("id") ? std::string(j.at("id")) : std::to_string(n);
      std::string text;
      for (const char* key : {"summary", "text", "reference"}) {
        if (j.contains(key)) {
          text = j.at(key);
          break;
        }
      }
      by_id[id] = text;
      ++n;
    }
    return by_id;
  };
  auto hyps = read_jsonl(hyp_path);
  auto refs = read_jsonl(ref_path);
  std::vector<summ::rouge::ScoredPair> pairs;
  for (const auto& [id, hyp] : hyps) {
    auto it = refs.find(id);
    if (it == refs.end()) continue;
    summ::rouge::ScoredPair p;
    p.candidate = summ::tokenize(hyp);
    p.reference = summ::tokenize(it->second);
    p.candidate_sentences = summ::split_sentences(hyp);
    p.reference_sentences = summ::split_sentences(it->second);
    pairs.push_back(std::move(p));
  }
  auto scores = summ::rouge::corpus_eval(pairs);
  auto to_j = [](const summ::rouge::RougeScore& s) {
    return json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
  };
  json result{{"config", rc.to_json()},
              {"pairs", pairs.size()},
              {"rouge_1", to_j(scores.rouge1)},
              {"rouge_2", to_j(scores.rouge2)},
              {"rouge_l", to_j(scores.rougeL)}};
  std::ofstream file;
  std::ostream& out = open_out(file, out_path);
  out << result.dump(2) << "\n";
  return 0;
}

// Builds the reference tiny dual-attention + pointer + coverage model and
// checks analytic gradients against central finite differences.
int cmd_gradcheck(const RunConfig& rc) {
  summ::model::ModelConfig mc;
  mc.emb_dim = 4;
  mc.hidden_dim = 4;
  mc.vocab_size = 20;
  mc.use_dual = true;
  mc.use_pgn = true;
  mc.use_coverage = true;
  mc.lambda_cov = rc.lambda_cov;
  mc.seed = rc.seed;
  summ::model::Model model(mc);
  summ::EncodedExample ex;
  ex.source_ids = {4, 5, 1, 6, 7, 1};
  ex.source_extended_ids = {4, 5, 20, 6, 7, 21};
  ex.oov_list = {"aa", "bb"};
  ex.extract_ids = {4, 6, 7};
  ex.target_ids = {5, 20, 3};
  ex.n_s = 6;
  ex.n_e = 3;
  auto report = summ::ad::grad_check(
      model.params,
      [&](summ::ad::Graph& g) { return model.sequence_loss(g, ex, true).total; }, 1e-3);
  std::cout << "max_relative_error " << report.max_rel_err << " (param "
            << report.worst_param << "[" << report.worst_index << "])\n";
  return report.max_rel_err < 1e-4 ? 0 : 1;
}

int cmd_wordnet_inspect(const RunConfig& rc, const std::string& lemma) {
  auto lex = load_lexicon(rc);
  auto senses = lex.senses(lemma);
  std::cout << lemma << ": " << senses.size() << " sense(s)\n";
  for (const auto* s : senses) {
    std::cout << "  [" << s->id.pos << s->id.offset << "]";
    for (const auto& l : s->lemmas) std::cout << " " << l;
    std::cout << " | " << s->gloss_raw << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig rc;
  // The config file provides defaults; explicit flags override it.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        rc.apply_file(argv[i + 1]);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
      }
    }
  }

  CLI::App app{"WordNet-guided extractive + dual-attention abstractive summarizer"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file with defaults");
  app.add_option("--seed", rc.seed, "random seed")->capture_default_str();

  auto add_lexicon_opts = [&](CLI::App* cmd) {
    cmd->add_option("--lexicon", rc.lexicon_path, "fixture lexicon (lemma<TAB>pos<TAB>gloss)");
    cmd->add_option("--wndb", rc.wndb, "WNDB source as pos:index_file:data_file (repeatable)");
    cmd->add_option("--stopwords", rc.stopwords_path, "stop-word list, one token per line");
  };
  auto add_extract_opts = [&](CLI::App* cmd) {
    cmd->add_option("--method", rc.method, "extraction method: wordnet | lead3")
        ->capture_default_str();
    cmd->add_option("--n-win", rc.n_win, "sense window size")->capture_default_str();
    cmd->add_option("--n-top", rc.n_top, "sentences to extract")->capture_default_str();
    add_lexicon_opts(cmd);
  };

  std::string corpus_path, out_path, vocab_path, save_vocab_path, checkpoint_path,
      trace_path, hyp_path, ref_path, lemma;

  CLI::App* ext = app.add_subcommand("extract", "rank and extract sentences");
  ext->add_option("corpus", corpus_path, "JSONL corpus")->required();
  ext->add_option("--out", out_path, "output JSONL (default stdout)");
  add_extract_opts(ext);

  CLI::App* tr = app.add_subcommand("train", "train the abstractive model");
  tr->add_option("corpus", corpus_path, "JSONL corpus")->required();
  tr->add_option("--vocab", vocab_path, "existing vocab file");
  tr->add_option("--save-vocab", save_vocab_path, "write the built vocab here");
  tr->add_option("--vocab-size", rc.vocab_size, "max vocabulary size")->capture_default_str();
  tr->add_option("--checkpoint", checkpoint_path, "checkpoint output path")->required();
  tr->add_option("--trace", trace_path, "loss trace CSV path");
  tr->add_option("--emb", rc.emb_dim, "embedding dimension")->capture_default_str();
  tr->add_option("--hidden", rc.hidden_dim, "LSTM hidden dimension")->capture_default_str();
  tr->add_flag("--single-encoder", rc.single_encoder, "disable the extractive encoder");
  tr->add_flag("--no-pgn", rc.no_pgn, "disable the pointer-generator");
  tr->add_flag("--no-coverage", rc.no_coverage, "disable coverage");
  tr->add_option("--lr", rc.lr, "Adagrad learning rate")->capture_default_str();
  tr->add_option("--acc", rc.adagrad_init_acc, "Adagrad initial accumulator")
      ->capture_default_str();
  tr->add_option("--clip", rc.clip_norm, "max global gradient norm")->capture_default_str();
  tr->add_option("--batch", rc.batch_size, "batch size (reference setting 16)")
      ->capture_default_str();
  tr->add_option("--steps", rc.steps, "training steps before coverage")
      ->capture_default_str();
  tr->add_option("--coverage-steps", rc.coverage_steps, "coverage fine-tuning steps")
      ->capture_default_str();
  tr->add_option("--lambda", rc.lambda_cov, "coverage loss weight")->capture_default_str();
  tr->add_option("--max-article", rc.max_article, "article token limit")
      ->capture_default_str();
  tr->add_option("--max-summary", rc.max_summary, "summary token limit")
      ->capture_default_str();
  tr->add_option("--checkpoint-every", rc.checkpoint_every, "periodic checkpoint interval");
  add_extract_opts(tr);

  CLI::App* dec = app.add_subcommand("decode", "beam-search decode summaries");
  dec->add_option("corpus", corpus_path, "JSONL corpus")->required();
  dec->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();
  dec->add_option("--vocab", vocab_path, "vocab file")->required();
  dec->add_option("--out", out_path, "output JSONL (default stdout)");
  dec->add_option("--beam", rc.beam, "beam size")->capture_default_str();
  dec->add_option("--min-len", rc.min_len, "minimum summary length")->capture_default_str();
  dec->add_option("--max-len", rc.max_len, "maximum summary length")->capture_default_str();
  dec->add_option("--max-article", rc.max_article, "article token limit")
      ->capture_default_str();
  add_extract_opts(dec);

  CLI::App* ev = app.add_subcommand("evaluate", "ROUGE-score hypotheses against references");
  ev->add_option("hypotheses", hyp_path, "JSONL hypotheses")->required();
  ev->add_option("references", ref_path, "JSONL references")->required();
  ev->add_option("--out", out_path, "metrics JSON output (default stdout)");

  CLI::App* gc = app.add_subcommand("gradcheck",
                                    "finite-difference check on the reference tiny model");
  gc->add_option("--lambda", rc.lambda_cov, "coverage loss weight")->capture_default_str();

  CLI::App* wi = app.add_subcommand("wordnet-inspect", "list senses and glosses of a lemma");
  wi->add_option("lemma", lemma, "lemma to look up")->required();
  add_lexicon_opts(wi);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(ext)) return cmd_extract(rc, corpus_path, out_path);
    if (app.got_subcommand(tr)) {
      return cmd_train(rc, corpus_path, vocab_path, save_vocab_path, checkpoint_path,
                       trace_path);
    }
    if (app.got_subcommand(dec)) {
      return cmd_decode(rc, corpus_path, vocab_path, checkpoint_path, out_path);
    }
    if (app.got_subcommand(ev)) return cmd_evaluate(rc, hyp_path, ref_path, out_path);
    if (app.got_subcommand(gc)) return cmd_gradcheck(rc);
    if (app.got_subcommand(wi)) return cmd_wordnet_inspect(rc, lemma);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
