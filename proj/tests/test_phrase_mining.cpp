#include <doctest.h>

#include <cmath>
#include <random>

#include "factmine/error.hpp"
#include "factmine/phrase_mining.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace factmine;
using namespace factmine::mining;

namespace {

std::vector<TokenSeq> random_corpus(std::mt19937& rng, int max_clauses,
                                    int vocab) {
  const int n = 1 + static_cast<int>(rng() % max_clauses);
  std::vector<TokenSeq> clauses(n);
  for (auto& clause : clauses) {
    const int len = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < len; ++i)
      clause.push_back("w" + std::to_string(rng() % vocab));
  }
  return clauses;
}

}  // namespace

TEST_SUITE_BEGIN("mining");

TEST_CASE("build_stats counts a trivial corpus") {
  const auto stats = build_stats({{"a", "b"}, {"a", "b"}});
  CHECK(stats.total_tokens == 4);
  CHECK(stats.unigram_counts.at("a") == 2);
  CHECK(stats.bigram_counts.at({"a", "b"}).count == 2);
}

TEST_CASE("build_stats on a single token has no bigrams") {
  const auto stats = build_stats({{"a"}});
  CHECK(stats.total_tokens == 1);
  CHECK(stats.bigram_counts.empty());
}

TEST_CASE("build_stats rejects an empty corpus") {
  CHECK_THROWS_AS(build_stats({}), ValidationError);
  CHECK_THROWS_AS(build_stats({{}}), ValidationError);
}

TEST_CASE("stats invariants hold on random corpora") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto clauses = random_corpus(rng, 40, 6);
    const auto stats = build_stats(clauses);
    std::int64_t unigram_sum = 0;
    for (const auto& [tok, c] : stats.unigram_counts) unigram_sum += c;
    CHECK(unigram_sum == stats.total_tokens);
    for (const auto& [b, bs] : stats.bigram_counts) {
      CHECK(stats.unigram_counts.count(b.first));
      CHECK(stats.unigram_counts.count(b.second));
      std::int64_t left = 0, right = 0;
      for (const auto& [tok, c] : bs.left_contexts) left += c;
      for (const auto& [tok, c] : bs.right_contexts) right += c;
      CHECK(left <= bs.count);
      CHECK(right <= bs.count);
    }
  }
}

TEST_CASE("pmi hand examples") {
  CHECK(pmi(build_stats({{"a", "b"}}), {"a", "b"}) == doctest::Approx(1.0));
  const auto stats = build_stats(
      {{"safety", "inspection", "not"}, {"safety", "inspection", "bad"}});
  CHECK(pmi(stats, {"safety", "inspection"}) ==
        doctest::Approx(std::log2(3.0)));
}

TEST_CASE("pmi of a planted independent bigram is zero") {
  // C(a)=2, C(b)=2, C(a,b)=1, N=4: P(a,b) = 1/4 = (2/4)(2/4).
  const auto stats = build_stats({{"a", "b"}, {"b", "a"}});
  CHECK(std::abs(pmi(stats, {"a", "b"})) < 1e-9);
}

TEST_CASE("pmi rejects an unseen bigram") {
  const auto stats = build_stats({{"a", "b"}});
  CHECK_THROWS_AS(pmi(stats, {"b", "a"}), DomainError);
}

TEST_CASE("boundary_entropy examples") {
  // x a b / x a b / x a b: deterministic left neighbor {x:3}.
  const auto det = build_stats({{"x", "a", "b"}, {"x", "a", "b"}, {"x", "a", "b"}});
  CHECK(boundary_entropy(det, {"a", "b"}, Side::left) == doctest::Approx(0.0));

  const auto two = build_stats({{"x", "a", "b"}, {"y", "a", "b"}});
  CHECK(boundary_entropy(two, {"a", "b"}, Side::left) == doctest::Approx(1.0));

  const auto four = build_stats(
      {{"x", "a", "b"}, {"y", "a", "b"}, {"z", "a", "b"}, {"w", "a", "b"}});
  CHECK(boundary_entropy(four, {"a", "b"}, Side::left) == doctest::Approx(2.0));
}

TEST_CASE("boundary_entropy is zero for an empty context set") {
  const auto stats = build_stats({{"a", "b"}});
  CHECK(boundary_entropy(stats, {"a", "b"}, Side::left) == 0.0);
  CHECK(boundary_entropy(stats, {"a", "b"}, Side::right) == 0.0);
}

TEST_CASE("entropy is non-negative and zero only when deterministic or empty") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto clauses = random_corpus(rng, 50, 5);
    const auto stats = build_stats(clauses);
    for (const auto& [b, bs] : stats.bigram_counts) {
      for (const Side side : {Side::left, Side::right}) {
        const double h = boundary_entropy(stats, b, side);
        CHECK(h >= 0.0);
        const auto& ctx =
            side == Side::left ? bs.left_contexts : bs.right_contexts;
        if (ctx.size() <= 1)
          CHECK(h == doctest::Approx(0.0));
        else
          CHECK(h > 0.0);
      }
    }
  }
}

TEST_CASE("score_bigram picks the weaker side") {
  // Left contexts of (a,b): {x,y} equiprobable -> 1 bit; right: {p,q,r,s} -> 2.
  const auto stats = build_stats({{"x", "a", "b", "p"},
                                  {"y", "a", "b", "q"},
                                  {"x", "a", "b", "r"},
                                  {"y", "a", "b", "s"}});
  const double expected = pmi(stats, {"a", "b"}) + 1.0;
  CHECK(score_bigram(stats, {"a", "b"}) == doctest::Approx(expected));
}

TEST_CASE("score equals pmi when both entropies vanish") {
  const auto stats = build_stats({{"a", "b"}, {"a", "b"}});
  CHECK(score_bigram(stats, {"a", "b"}) ==
        doctest::Approx(pmi(stats, {"a", "b"})));
}

TEST_CASE("scores match the brute-force oracle on random corpora") {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto clauses = random_corpus(rng, 60, 5);
    const auto stats = build_stats(clauses);
    for (const auto& [b, bs] : stats.bigram_counts) {
      CHECK(pmi(stats, b) ==
            doctest::Approx(oracles::oracle_pmi(clauses, b.first, b.second))
                .epsilon(1e-9));
      CHECK(boundary_entropy(stats, b, Side::left) ==
            doctest::Approx(
                oracles::oracle_boundary_entropy(clauses, b.first, b.second, true))
                .epsilon(1e-9));
      CHECK(score_bigram(stats, b) ==
            doctest::Approx(oracles::oracle_score(clauses, b.first, b.second))
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("mine_phrases merges a strongly connected bigram in round 1") {
  std::vector<TokenSeq> clauses;
  const std::vector<std::string> left = {"市", "县", "区", "镇"};
  const std::vector<std::string> right = {"混乱", "松散", "薄弱", "缺失"};
  for (size_t i = 0; i < left.size(); ++i)
    clauses.push_back({left[i], "物业", "管理", right[i]});
  MiningConfig config;
  config.rounds = 1;
  const auto lexicon = mine_phrases(clauses, config);
  REQUIRE(!lexicon.entries.empty());
  CHECK(lexicon.entries[0].phrase == TokenSeq{"物业", "管理"});
  CHECK(lexicon.entries[0].round == 1);
}

TEST_CASE("round 2 builds a three-token phrase") {
  std::vector<TokenSeq> clauses;
  const std::vector<std::string> ctx = {"x", "y", "z", "w"};
  for (const auto& c : ctx) clauses.push_back({c, "松原", "天山", "物业"});
  MiningConfig config;
  config.rounds = 2;
  config.top_k = 1;
  const auto lexicon = mine_phrases(clauses, config);
  REQUIRE(lexicon.rounds_run == 2);
  bool found = false;
  for (const auto& entry : lexicon.entries) {
    if (entry.phrase == TokenSeq{"松原", "天山", "物业"}) {
      CHECK(entry.round == 2);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("unique tokens leave the lexicon empty") {
  const auto lexicon = mine_phrases({{"a", "b", "c", "d"}});
  CHECK(lexicon.entries.empty());
  CHECK(lexicon.rounds_run == 0);
}

TEST_CASE("a merge round shrinks N by the number of merges") {
  std::vector<TokenSeq> clauses = {{"x", "a", "b", "p"},
                                   {"y", "a", "b", "q"},
                                   {"a", "a", "b", "b"}};
  MiningConfig config;
  config.rounds = 1;
  config.top_k = 1;
  config.min_count = 3;
  const auto before = build_stats(clauses).total_tokens;
  const auto lexicon = mine_phrases(clauses, config);
  REQUIRE(lexicon.entries.size() == 1);

  // Re-run the merge by hand: (a,b) occurs three times, none overlapping.
  std::vector<TokenSeq> merged = {{"x", "ab", "p"}, {"y", "ab", "q"}, {"a", "ab", "b"}};
  CHECK(before - 3 == build_stats(merged).total_tokens);
}

TEST_CASE("overlapping merges are greedy left-to-right") {
  // Both (a,a) pairs in "a a a" cannot merge; only the leftmost does.
  std::vector<TokenSeq> clauses = {{"a", "a", "a"}, {"a", "a", "a"}};
  MiningConfig config;
  config.rounds = 1;
  const auto lexicon = mine_phrases(clauses, config);
  REQUIRE(lexicon.entries.size() == 1);
  CHECK(lexicon.entries[0].phrase == TokenSeq{"a", "a"});
}

TEST_CASE("ranking is invariant under corpus duplication") {
  std::mt19937 rng(13);
  const auto clauses = random_corpus(rng, 40, 4);
  const auto stats = build_stats(clauses);

  std::vector<TokenSeq> doubled;
  for (int k = 0; k < 3; ++k)
    doubled.insert(doubled.end(), clauses.begin(), clauses.end());
  const auto stats2 = build_stats(doubled);

  for (const auto& [b, bs] : stats.bigram_counts) {
    CHECK(score_bigram(stats, b) ==
          doctest::Approx(score_bigram(stats2, b)).epsilon(1e-12));
  }
  // Same eligible set on both sides: min_count scales with the corpus.
  MiningConfig config;
  config.rounds = 1;
  config.min_count = 2;
  const auto lex1 = mine_phrases(clauses, config);
  config.min_count = 6;
  const auto lex2 = mine_phrases(doubled, config);
  REQUIRE(lex1.entries.size() == lex2.entries.size());
  for (size_t i = 0; i < lex2.entries.size(); ++i)
    CHECK(lex2.entries[i].phrase == lex1.entries[i].phrase);
}

TEST_CASE("entries within a round are sorted by descending score") {
  std::mt19937 rng(15);
  const auto clauses = random_corpus(rng, 80, 5);
  MiningConfig config;
  config.rounds = 3;
  const auto lexicon = mine_phrases(clauses, config);
  int last_round = 0;
  double last_score = 0.0;
  for (const auto& entry : lexicon.entries) {
    CHECK(entry.phrase.size() >= 2);
    CHECK(entry.round >= last_round);
    if (entry.round == last_round) CHECK(entry.score <= last_score);
    last_round = entry.round;
    last_score = entry.score;
  }
}

TEST_CASE("export_user_lexicon writes one phrase per line in rank order") {
  testutil::TempDir dir;
  PhraseLexicon lexicon;
  lexicon.entries.push_back({{"安全", "检查"}, 3.0, 1});
  lexicon.entries.push_back({{"落实", "不到位"}, 2.0, 1});
  const std::string path = dir.str("lexicon.txt");
  export_user_lexicon(lexicon, path);
  CHECK(dir.read("lexicon.txt") == "安全检查\n落实不到位\n");

  PhraseLexicon empty;
  export_user_lexicon(empty, dir.str("empty.txt"));
  CHECK(dir.read("empty.txt").empty());
}

TEST_CASE("exported lexicon round-trips through mining output") {
  std::vector<TokenSeq> clauses;
  const std::vector<std::string> ctx = {"x", "y", "z", "w"};
  for (const auto& c : ctx) {
    clauses.push_back({c, "安全", "检查"});
    clauses.push_back({"落实", "不", "到位", c});
  }
  const auto lexicon = mine_phrases(clauses);
  REQUIRE(!lexicon.entries.empty());

  testutil::TempDir dir;
  export_user_lexicon(lexicon, dir.str("lexicon.txt"));
  std::istringstream in(dir.read("lexicon.txt"));
  std::string line;
  size_t i = 0;
  while (std::getline(in, line)) {
    REQUIRE(i < lexicon.entries.size());
    std::string joined;
    for (const auto& tok : lexicon.entries[i].phrase) joined += tok;
    CHECK(line == joined);
    ++i;
  }
  CHECK(i == lexicon.entries.size());
}

TEST_CASE("char_tokens splits scalars and drops whitespace") {
  CHECK(char_tokens("安全 ab") == TokenSeq{"安", "全", "a", "b"});
  CHECK(char_tokens("").empty());
}

TEST_SUITE_END();
