#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "factmine/clustering.hpp"
#include "factmine/corpus.hpp"
#include "factmine/extraction.hpp"

namespace factmine::analysis {

struct SourceCluster {
  int round = 0;    // 1-based
  int cluster = 0;  // index within the round
};

// One deduplicated causal-factor phrase set.
struct KeyphraseSet {
  std::vector<std::string> phrases;
  std::optional<SourceCluster> source;  // nullopt: kept unclustered singleton
  int member_count = 0;

  std::string rendered() const;
};

// Human noise judgment over a clustering run: clusters rejected as noise
// and unclustered sets kept as valid.
struct ClusterAnnotation {
  std::set<std::pair<int, int>> excluded_clusters;  // (round, cluster index)
  std::set<std::string> included_singletons;        // candidate-set ids
};

ClusterAnnotation load_annotation(const std::string& path);

// Emits every distinct rendered string (whitespace-normalized) of the
// non-excluded clusters once, in first-occurrence order, then the included
// singletons. member_count accumulates all members sharing the string.
std::vector<KeyphraseSet> dedup_keyphrase_sets(
    const clustering::ClusteringResult& result,
    const std::vector<extraction::CandidatePhraseSet>& sets,
    const ClusterAnnotation& annotation);

struct GoldLabels {
  std::vector<std::pair<std::string, std::string>> rows;  // (case_id, code)
};

// CSV `case_id,factor_code`; an optional header row is skipped.
GoldLabels load_gold_labels(const std::string& path);

struct CaseIdentification {
  std::string case_id;
  bool identified = false;
  std::optional<std::string> matched;  // rendered keyphrase set that hit
};

enum class RecallKind { coverage, recall };

struct RecallReport {
  RecallKind kind = RecallKind::coverage;
  double value = 0.0;
  int identified = 0;
  int total = 0;
  std::vector<CaseIdentification> per_case;
};

// A case identifies a factor when one clause contains every phrase of some
// keyphrase set as a substring. With gold labels the report is recall over
// labeled instances; without, it degrades to corpus coverage.
RecallReport compute_recall(const std::vector<corpus::CaseDocument>& cases,
                            const std::vector<KeyphraseSet>& keyphrases,
                            const std::vector<corpus::SectionKind>& sections,
                            const corpus::CleanConfig& clean,
                            const GoldLabels* gold);

struct SubFactor {
  std::string code;
  int main_id = 0;
  std::string main_name;
  std::string description;
};

struct FactorTaxonomy {
  std::map<int, std::string> main_factors;
  std::vector<SubFactor> sub_factors;

  bool has_code(const std::string& code) const;
};

// CSV `code,stakeholder_id,stakeholder,description` with quoting.
FactorTaxonomy load_taxonomy(const std::string& path);

// Orders factor codes numerically: main id, plain before role-mismatch
// (m-suffixed), then sub number.
bool code_less(const std::string& a, const std::string& b);

struct CooccurrenceRow {
  std::string anchor;
  int count = 0;  // cases containing the anchor
  std::vector<std::pair<std::string, int>> co;  // (other code, shared cases)
};

struct CooccurrenceTable {
  std::vector<CooccurrenceRow> rows;
};

// Per anchor code: occurrence count over cases and, for every other code,
// the number of cases containing both. Codes must exist in the taxonomy.
CooccurrenceTable build_cooccurrence(
    const std::map<std::string, std::set<std::string>>& labels_by_case,
    const FactorTaxonomy& taxonomy);

void write_cooccurrence_csv(const CooccurrenceTable& table,
                            const std::string& path);
void write_recall_csv(const RecallReport& report, const std::string& path);

}  // namespace factmine::analysis
