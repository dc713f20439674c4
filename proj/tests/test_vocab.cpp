#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "summ/corpus.hpp"
#include "summ/vocab.hpp"

using namespace summ;

TEST_CASE("build_vocab") {
  SECTION("empty corpus gives only the reserved tokens") {
    auto v = Vocabulary::build({}, 10);
    CHECK(v.size() == 4);
    CHECK(v.token(Vocabulary::kPad) == "<pad>");
    CHECK(v.token(Vocabulary::kUnk) == "<unk>");
    CHECK(v.token(Vocabulary::kStart) == "<s>");
    CHECK(v.token(Vocabulary::kStop) == "</s>");
  }
  SECTION("frequency order with lexicographic ties") {
    auto v = Vocabulary::build({{"a", 3}, {"b", 1}}, 6);
    CHECK(v.size() == 6);
    CHECK(v.id("a") == 4);
    CHECK(v.id("b") == 5);
  }
  SECTION("eviction at max size") {
    auto v = Vocabulary::build({{"a", 3}, {"b", 1}}, 5);
    CHECK(v.size() == 5);
    CHECK(v.contains("a"));
    CHECK_FALSE(v.contains("b"));
    CHECK(v.id("b") == Vocabulary::kUnk);
  }
  SECTION("max_size must exceed the reserved tokens") {
    CHECK_THROWS_AS(Vocabulary::build({{"a", 1}}, 4), std::invalid_argument);
  }
}

TEST_CASE("vocabulary save/load round trip") {
  auto v = Vocabulary::build({{"cat", 5}, {"dog", 3}, {"eel", 3}}, 8);
  std::stringstream ss;
  v.save(ss);
  auto v2 = Vocabulary::load(ss);
  CHECK(v2.size() == v.size());
  for (int i = 0; i < v.size(); ++i) CHECK(v2.token(i) == v.token(i));
}

TEST_CASE("encode_example") {
  auto v = Vocabulary::build({{"alice", 1}, {"met", 9}, {"bob", 1}, {"x", 1}}, 5);
  // vocab: reserved + "met"; alice/bob/x are OOV
  REQUIRE(v.contains("met"));
  REQUIRE_FALSE(v.contains("alice"));
  const int V = v.size();

  SECTION("no OOVs") {
    auto ex = make_example({"met", "met"}, {"met"}, {});
    auto enc = encode_example(ex, v);
    CHECK(enc.source_extended_ids == enc.source_ids);
    CHECK(enc.oov_list.empty());
  }
  SECTION("first-occurrence extended ids") {
    auto ex = make_example({"alice", "met", "bob"}, {"bob", "met", "carol"}, {});
    auto enc = encode_example(ex, v);
    CHECK(enc.source_ids ==
          std::vector<int>{Vocabulary::kUnk, v.id("met"), Vocabulary::kUnk});
    CHECK(enc.source_extended_ids == std::vector<int>{V, v.id("met"), V + 1});
    CHECK(enc.oov_list == std::vector<std::string>{"alice", "bob"});
    // summary OOV present in article copies its extended id; absent one is UNK
    REQUIRE(enc.target_ids.size() == 4);
    CHECK(enc.target_ids[0] == V + 1);
    CHECK(enc.target_ids[1] == v.id("met"));
    CHECK(enc.target_ids[2] == Vocabulary::kUnk);
    CHECK(enc.target_ids[3] == Vocabulary::kStop);
  }
  SECTION("article truncation to 400 tokens") {
    std::vector<std::string> long_article(450, "met");
    auto ex = make_example(long_article, {}, {});
    CHECK(ex.article_tokens.size() == 400);
    auto enc = encode_example(ex, v);
    CHECK(enc.n_s == 400);
  }
  SECTION("summary truncation to 100 tokens") {
    auto ex = make_example({"met"}, std::vector<std::string>(150, "met"), {});
    CHECK(ex.summary_tokens.size() == 100);
  }
}

TEST_CASE("decode restores in-vocabulary and article-OOV tokens exactly") {
  auto v = Vocabulary::build({{"met", 5}, {"at", 4}, {"noon", 3}}, 7);
  std::mt19937 rng(99);
  const char* pool[] = {"met", "at", "noon", "zork", "quux", "fred"};
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::string> article, summary;
    for (int i = 0; i < 8; ++i) article.push_back(pool[rng() % std::size(pool)]);
    // summary drawn from the article: decoding must restore it verbatim
    for (int i = 0; i < 5; ++i) summary.push_back(article[rng() % article.size()]);
    auto enc = encode_example(make_example(article, summary, {}), v);
    std::vector<int> target_no_stop(enc.target_ids.begin(), enc.target_ids.end() - 1);
    CHECK(decode_ids(target_no_stop, v, enc.oov_list) == summary);
    CHECK(decode_ids(enc.source_extended_ids, v, enc.oov_list) == article);
    // oov_list is duplicate-free
    std::set<std::string> uniq(enc.oov_list.begin(), enc.oov_list.end());
    CHECK(uniq.size() == enc.oov_list.size());
  }
}

TEST_CASE("decode_ids rejects out-of-range extended ids") {
  auto v = Vocabulary::build({{"a", 1}}, 5);
  CHECK_THROWS_AS(decode_ids({v.size() + 1}, v, {"only"}), std::out_of_range);
}

TEST_CASE("jsonl corpus loading") {
  std::stringstream ss;
  ss << R"({"article": "A cat.", "summary": "cat"})" << "\n";
  ss << R"({"id": "doc7", "article": "Dogs bark.", "summary": "bark"})" << "\n";
  auto docs = load_jsonl_corpus(ss);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].id == "0");
  CHECK(docs[1].id == "doc7");
  CHECK(docs[1].article == "Dogs bark.");

  std::stringstream bad("not json\n");
  CHECK_THROWS(load_jsonl_corpus(bad));
}
