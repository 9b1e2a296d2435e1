#include "factmine/phrase_mining.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "factmine/error.hpp"
#include "factmine/text.hpp"

namespace factmine::mining {

namespace {

std::string bigram_str(const Bigram& b) {
  return "('" + b.first + "', '" + b.second + "')";
}

const BigramStats& require_bigram(const CorpusStats& stats, const Bigram& b) {
  auto it = stats.bigram_counts.find(b);
  if (it == stats.bigram_counts.end())
    throw DomainError("unseen bigram " + bigram_str(b));
  return it->second;
}

double entropy_of(const std::map<Token, std::int64_t>& contexts) {
  std::int64_t total = 0;
  for (const auto& [tok, c] : contexts) total += c;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (const auto& [tok, c] : contexts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

CorpusStats build_stats(const std::vector<TokenSeq>& clauses) {
  if (clauses.empty()) throw ValidationError("empty corpus");
  CorpusStats stats;
  std::int64_t occurrence_ordinal = 0;
  for (const auto& clause : clauses) {
    if (clause.empty()) throw ValidationError("empty clause in corpus");
    for (const auto& tok : clause) {
      ++stats.unigram_counts[tok];
      ++stats.total_tokens;
    }
    for (size_t k = 0; k + 1 < clause.size(); ++k) {
      Bigram b{clause[k], clause[k + 1]};
      auto [it, inserted] = stats.bigram_counts.try_emplace(b);
      BigramStats& bs = it->second;
      if (inserted) bs.first_seen = occurrence_ordinal;
      ++occurrence_ordinal;
      ++bs.count;
      if (k > 0) ++bs.left_contexts[clause[k - 1]];
      if (k + 2 < clause.size()) ++bs.right_contexts[clause[k + 2]];
    }
  }
  return stats;
}

double pmi(const CorpusStats& stats, const Bigram& b) {
  const BigramStats& bs = require_bigram(stats, b);
  const double n = static_cast<double>(stats.total_tokens);
  const double p_b = static_cast<double>(bs.count) / n;
  const double p_i =
      static_cast<double>(stats.unigram_counts.at(b.first)) / n;
  const double p_j =
      static_cast<double>(stats.unigram_counts.at(b.second)) / n;
  return std::log2(p_b / (p_i * p_j));
}

double boundary_entropy(const CorpusStats& stats, const Bigram& b, Side side) {
  const BigramStats& bs = require_bigram(stats, b);
  return entropy_of(side == Side::left ? bs.left_contexts : bs.right_contexts);
}

double score_bigram(const CorpusStats& stats, const Bigram& b) {
  const BigramStats& bs = require_bigram(stats, b);
  const double h = std::min(entropy_of(bs.left_contexts),
                            entropy_of(bs.right_contexts));
  return pmi(stats, b) + h;
}

PhraseLexicon mine_phrases(const std::vector<TokenSeq>& clauses,
                           const MiningConfig& config) {
  PhraseLexicon lexicon;
  std::vector<TokenSeq> work = clauses;
  // Constituent original tokens of every merged token.
  std::map<Token, TokenSeq> parts;
  auto flatten = [&parts](const Token& tok) -> TokenSeq {
    auto it = parts.find(tok);
    if (it != parts.end()) return it->second;
    return {tok};
  };

  for (int round = 1; round <= config.rounds; ++round) {
    const CorpusStats stats = build_stats(work);

    struct Scored {
      Bigram bigram;
      double score;
      std::int64_t first_seen;
    };
    std::vector<Scored> ranked;
    for (const auto& [b, bs] : stats.bigram_counts) {
      if (bs.count < config.min_count) continue;
      const double s = score_bigram(stats, b);
      if (config.score_threshold && s < *config.score_threshold) continue;
      ranked.push_back({b, s, bs.first_seen});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Scored& a, const Scored& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.first_seen < b.first_seen;
    });
    if (ranked.size() > static_cast<size_t>(config.top_k))
      ranked.resize(static_cast<size_t>(config.top_k));
    if (ranked.empty()) break;

    std::map<Bigram, std::int64_t> merges;
    std::map<Bigram, Token> merged_token;
    for (const auto& s : ranked) {
      merges[s.bigram] = 0;
      merged_token[s.bigram] = s.bigram.first + s.bigram.second;
    }

    for (auto& clause : work) {
      TokenSeq next;
      next.reserve(clause.size());
      size_t i = 0;
      while (i < clause.size()) {
        if (i + 1 < clause.size()) {
          auto it = merges.find({clause[i], clause[i + 1]});
          if (it != merges.end()) {
            const Bigram& b = it->first;
            const Token& merged = merged_token[b];
            if (!parts.count(merged)) {
              TokenSeq expanded = flatten(b.first);
              const TokenSeq right = flatten(b.second);
              expanded.insert(expanded.end(), right.begin(), right.end());
              parts[merged] = std::move(expanded);
            }
            next.push_back(merged);
            ++it->second;
            i += 2;
            continue;
          }
        }
        next.push_back(clause[i]);
        ++i;
      }
      clause = std::move(next);
    }

    bool merged_any = false;
    for (const auto& s : ranked) {
      if (merges[s.bigram] == 0) continue;  // fully shadowed by overlaps
      merged_any = true;
      TokenSeq phrase = flatten(s.bigram.first);
      const TokenSeq right = flatten(s.bigram.second);
      phrase.insert(phrase.end(), right.begin(), right.end());
      lexicon.entries.push_back({std::move(phrase), s.score, round});
    }
    if (!merged_any) break;
    lexicon.rounds_run = round;
  }
  return lexicon;
}

void export_user_lexicon(const PhraseLexicon& lexicon, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write lexicon file '" + path + "'");
  for (const auto& entry : lexicon.entries) {
    std::string line;
    for (const auto& tok : entry.phrase) line += tok;
    out << line << '\n';
  }
  if (!out) throw IoError("failed writing lexicon file '" + path + "'");
}

TokenSeq char_tokens(const std::string& clause_text) {
  TokenSeq out;
  for (char32_t cp : utf8_decode(clause_text)) {
    if (is_space_char(cp)) continue;
    out.push_back(utf8_encode_one(cp));
  }
  return out;
}

}  // namespace factmine::mining
