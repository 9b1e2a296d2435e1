#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "factmine/analysis.hpp"
#include "factmine/clustering.hpp"
#include "factmine/corpus.hpp"
#include "factmine/extraction.hpp"
#include "factmine/phrase_mining.hpp"
#include "factmine/similarity.hpp"

namespace factmine::pipeline {

enum class Stage { mine, extract, cluster, report, all };

std::string_view stage_name(Stage stage);

struct PipelineConfig {
  // inputs
  std::string cases_dir;
  std::string parses_path;
  std::string tokens_path;       // pre-tokenized clauses, one per line
  std::string annotation_path;   // optional cluster annotation
  std::string gold_labels_path;  // optional gold labels
  std::string taxonomy_path;     // required with gold labels
  std::string matrix_in;         // reuse a persisted matrix

  // outputs; relative paths resolve under out_dir
  std::string out_dir = ".";
  std::string lexicon_out = "lexicon.txt";
  std::string candidates_out = "candidates.jsonl";
  std::string matrix_out;  // optional
  std::string clusters_out = "clusters.json";
  std::string curve_out;   // optional eps/cluster-count CSV
  std::string report_out = "report.json";
  std::string recall_csv_out;      // optional
  std::string cooccurrence_out;    // optional, needs gold labels

  // parameters
  std::vector<corpus::SectionKind> sections{corpus::SectionKind::details,
                                            corpus::SectionKind::causes};
  corpus::CleanConfig clean = corpus::CleanConfig::defaults();
  mining::MiningConfig mining;
  extraction::ExtractionConfig extraction;
  similarity::MetricKind metric = similarity::MetricKind::offset_normalized;
  clustering::ClusteringConfig clustering;

  std::string resolve_out(const std::string& path) const;
};

// Runs one stage (or all four in order), reading earlier stages' artifacts
// from disk. Throws ValidationError/IoError; `log`, when set, receives
// one-line progress summaries.
void run_stage(const PipelineConfig& config, Stage stage,
               std::ostream* log = nullptr);

// CLI wrapper: catches errors, reports them on `err`, returns the exit code.
int run_pipeline(const PipelineConfig& config, Stage stage, std::ostream& out,
                 std::ostream& err);

}  // namespace factmine::pipeline
