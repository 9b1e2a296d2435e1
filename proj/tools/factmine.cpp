#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "factmine/error.hpp"
#include "factmine/pipeline.hpp"
#include "factmine/text.hpp"

using factmine::pipeline::PipelineConfig;
using factmine::pipeline::Stage;

namespace {

std::vector<std::string> comma_list(const std::string& value) {
  std::vector<std::string> out;
  for (auto& item : factmine::split(value, ',')) {
    auto t = factmine::trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "factmine - mines causal-factor keyphrase sets from structured Chinese "
      "accident case texts"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a key=value file");

  PipelineConfig cfg;
  std::string metric = "offset_normalized";
  std::string sections = "details,causes";
  std::string reverse_labels = "dobj,pobj,acomp";
  std::string punct_tags = "PUNCT,PU,wp";
  std::string noise_chars;
  bool keep_numbering = false;
  double score_threshold = 0.0;

  app.add_option("--cases", cfg.cases_dir, "directory of case files");
  app.add_option("--parses", cfg.parses_path, "CoNLL-U dependency parses");
  app.add_option("--tokens", cfg.tokens_path,
                 "pre-tokenized clauses for mining (one per line)");
  app.add_option("--annotation", cfg.annotation_path,
                 "cluster annotation JSON");
  app.add_option("--gold-labels", cfg.gold_labels_path,
                 "gold labels CSV (case_id,factor_code)");
  app.add_option("--taxonomy", cfg.taxonomy_path, "factor taxonomy CSV");
  app.add_option("--matrix-in", cfg.matrix_in,
                 "reuse a persisted distance matrix");

  app.add_option("--out-dir", cfg.out_dir,
                 "directory for relative output paths");
  app.add_option("--lexicon-out", cfg.lexicon_out, "user lexicon output");
  app.add_option("--candidates-out", cfg.candidates_out,
                 "candidate phrase sets (JSON lines)");
  app.add_option("--matrix-out", cfg.matrix_out, "distance matrix CSV");
  app.add_option("--clusters-out", cfg.clusters_out, "round report JSON");
  app.add_option("--emit-curve", cfg.curve_out,
                 "write the per-round (eps, cluster count) CSV");
  app.add_option("--report-out", cfg.report_out, "pipeline report JSON");
  app.add_option("--recall-csv", cfg.recall_csv_out, "per-case recall CSV");
  app.add_option("--cooccurrence-out", cfg.cooccurrence_out,
                 "factor co-occurrence CSV");

  app.add_option("--sections", sections,
                 "sections feeding the pipeline (comma list)");
  app.add_option("--noise-chars", noise_chars,
                 "override the default noise character set");
  app.add_flag("--keep-numbering", keep_numbering,
               "do not strip numbering bullets");

  app.add_option("--min-count", cfg.mining.min_count,
                 "minimum bigram count for ranking");
  app.add_option("--top-k", cfg.mining.top_k, "bigrams merged per round");
  app.add_option("--rounds", cfg.mining.rounds, "phrase-mining rounds");
  auto* thr = app.add_option("--score-threshold", score_threshold,
                             "minimum score for merging");

  app.add_option("--reverse-labels", reverse_labels,
                 "reverse relation labels (comma list)");
  app.add_option("--punct-tags", punct_tags,
                 "POS tags treated as punctuation (comma list)");

  app.add_option("--metric", metric, "raw or offset_normalized")
      ->check(CLI::IsMember({"raw", "offset_normalized"}));
  app.add_option("--min-pts", cfg.clustering.min_pts, "DBSCAN minPts");
  app.add_option("--eps-lo", cfg.clustering.eps_lo, "epsilon sweep lower bound");
  app.add_option("--eps-hi", cfg.clustering.eps_hi, "epsilon sweep upper bound");
  app.add_option("--eps-step", cfg.clustering.eps_step, "epsilon sweep step");
  app.add_option("--max-rounds", cfg.clustering.max_rounds,
                 "multi-density round cap");

  app.add_subcommand("mine", "mine the phrase lexicon from the corpus");
  app.add_subcommand("extract",
                     "extract candidate phrase sets from dependency parses");
  app.add_subcommand("cluster", "build the distance matrix and cluster it");
  app.add_subcommand("report", "dedup keyphrases and write reports");
  app.add_subcommand("all", "run every stage in order");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  cfg.metric = factmine::similarity::metric_from_name(metric);
  if (thr->count() > 0) cfg.mining.score_threshold = score_threshold;
  if (!noise_chars.empty()) cfg.clean.noise_chars = factmine::utf8_decode(noise_chars);
  cfg.clean.strip_numbering = !keep_numbering;

  cfg.extraction.reverse_labels.clear();
  for (auto& label : comma_list(reverse_labels))
    cfg.extraction.reverse_labels.insert(label);
  cfg.extraction.punct_tags.clear();
  for (auto& tag : comma_list(punct_tags)) cfg.extraction.punct_tags.insert(tag);

  cfg.sections.clear();
  for (auto& name : comma_list(sections)) {
    auto kind = factmine::corpus::section_from_name(name);
    if (!kind) {
      std::cerr << "factmine: unknown section '" << name << "'\n";
      return 1;
    }
    cfg.sections.push_back(*kind);
  }

  Stage stage = Stage::all;
  if (app.got_subcommand("mine")) stage = Stage::mine;
  else if (app.got_subcommand("extract")) stage = Stage::extract;
  else if (app.got_subcommand("cluster")) stage = Stage::cluster;
  else if (app.got_subcommand("report")) stage = Stage::report;

  return factmine::pipeline::run_pipeline(cfg, stage, std::cout, std::cerr);
}
