#pragma once

#include <set>
#include <string>
#include <vector>

#include "factmine/corpus.hpp"

namespace factmine::extraction {

struct ClauseRef {
  std::string case_id;
  corpus::SectionKind section = corpus::SectionKind::causes;
  int index = 0;

  std::string str() const;
  static ClauseRef parse(const std::string& text);
  bool operator==(const ClauseRef&) const = default;
};

struct ParseNode {
  int position = 0;  // 1-based surface position
  std::string form;
  std::string pos_tag;
  int head = 0;  // 0 marks the root
  std::string relation;
};

// A rooted dependency tree over the phrases of one clause.
struct DependencyParse {
  ClauseRef clause_ref;
  std::vector<ParseNode> nodes;  // ordered by position

  int root_position() const;
};

// Validates root uniqueness, head ranges and acyclicity;
// throws ValidationError naming the clause otherwise.
void validate_parse(const DependencyParse& parse);

// Reads CoNLL-U: 10 tab-separated columns, blank-line-separated sentences,
// one `# clause_ref = case:section:index` comment per sentence.
std::vector<DependencyParse> load_parses(const std::string& path);

struct ExtractionConfig {
  // Arc labels treated as reverse syntax relations when the head precedes
  // its dependent. Configurable for other label inventories (obj/obl/...).
  std::set<std::string> reverse_labels{"dobj", "pobj", "acomp"};
  // Nodes with these POS tags are never picked as the nearest dependent.
  std::set<std::string> punct_tags{"PUNCT", "PU", "wp"};
};

enum class Provenance { root, rule1, rule2_head, rule2_dep };

std::string_view provenance_name(Provenance p);
Provenance provenance_from_name(std::string_view name);

struct CandidatePhrase {
  std::string form;
  int position = 0;
  Provenance provenance = Provenance::root;
};

// The at-most-four phrases selected from one parse, in surface order.
struct CandidatePhraseSet {
  ClauseRef clause_ref;
  std::vector<CandidatePhrase> phrases;

  // Concatenation of the phrase forms in surface order, no separator.
  std::string rendered() const;
};

// Heuristic selection over one parse:
//   root phrase; the root's nearest dependent; head and dependent of the
//   reverse arc (label in reverse_labels, head before dependent) whose
//   head lies nearest the root. Nearest is linear surface distance with
//   ties broken leftward; duplicates collapse to the strongest rule.
CandidatePhraseSet extract_candidate_set(const DependencyParse& parse,
                                         const ExtractionConfig& config = {});

// JSON-lines artifact: {"clause_ref","phrases","positions","provenance"}.
void write_candidates_jsonl(const std::vector<CandidatePhraseSet>& sets,
                            const std::string& path);
std::vector<CandidatePhraseSet> read_candidates_jsonl(const std::string& path);

}  // namespace factmine::extraction
