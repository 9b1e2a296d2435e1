#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace factmine::mining {

using Token = std::string;
using TokenSeq = std::vector<Token>;
using Bigram = std::pair<Token, Token>;

enum class Side { left, right };

struct BigramStats {
  std::int64_t count = 0;
  // Ordinal of the first sighting in corpus scan order; ranking tie-break.
  std::int64_t first_seen = 0;
  std::map<Token, std::int64_t> left_contexts;
  std::map<Token, std::int64_t> right_contexts;
};

// Exact corpus counts. Bigrams and their contexts never cross clause
// boundaries: the clause is the sense-group unit.
struct CorpusStats {
  std::int64_t total_tokens = 0;  // N
  std::map<Token, std::int64_t> unigram_counts;
  std::map<Bigram, BigramStats> bigram_counts;
};

CorpusStats build_stats(const std::vector<TokenSeq>& clauses);

// Pointwise mutual information, base-2 log over MLE probabilities.
// Throws DomainError for a bigram absent from the corpus.
double pmi(const CorpusStats& stats, const Bigram& b);

// Shannon entropy (base 2) of the adjacent-context distribution on the
// requested side; 0 for an empty context set.
double boundary_entropy(const CorpusStats& stats, const Bigram& b, Side side);

// Mixed score: inner connection plus the weaker outer independence,
// pmi(b) + min(H_left, H_right).
double score_bigram(const CorpusStats& stats, const Bigram& b);

struct MiningConfig {
  std::int64_t min_count = 2;  // bigrams below this never rank
  int top_k = 50;              // per-round selection cap
  int rounds = 2;
  std::optional<double> score_threshold;  // keep only scores >= threshold
};

struct PhraseEntry {
  TokenSeq phrase;  // flattened to the original tokens, length >= 2
  double score = 0.0;
  int round = 0;  // 1-based
};

struct PhraseLexicon {
  // Selection order: round ascending, then score descending, ties by
  // first occurrence in the corpus.
  std::vector<PhraseEntry> entries;
  int rounds_run = 0;
};

// Iterative merge mining: per round, score eligible bigrams, merge the
// selected ones into single tokens (greedy left-to-right, non-overlapping),
// rebuild stats and repeat. A round that merges nothing ends mining early.
PhraseLexicon mine_phrases(const std::vector<TokenSeq>& clauses,
                           const MiningConfig& config = {});

// One phrase per line, tokens joined without separator, UTF-8.
void export_user_lexicon(const PhraseLexicon& lexicon, const std::string& path);

// Splits clause text into single-scalar tokens, dropping whitespace.
// Default tokenization for corpora without an external word segmentation.
TokenSeq char_tokens(const std::string& clause_text);

}  // namespace factmine::mining
