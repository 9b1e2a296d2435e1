#include "factmine/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "factmine/error.hpp"
#include "factmine/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace factmine::pipeline {

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::mine: return "mine";
    case Stage::extract: return "extract";
    case Stage::cluster: return "cluster";
    case Stage::report: return "report";
    case Stage::all: return "all";
  }
  return "all";
}

std::string PipelineConfig::resolve_out(const std::string& path) const {
  if (path.empty() || fs::path(path).is_absolute() || out_dir.empty() ||
      out_dir == ".")
    return path;
  return (fs::path(out_dir) / path).string();
}

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

std::vector<mining::TokenSeq> load_token_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open tokens file '" + path + "'");
  std::vector<mining::TokenSeq> clauses;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    mining::TokenSeq toks;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) toks.push_back(tok);
    if (!toks.empty()) clauses.push_back(std::move(toks));
  }
  return clauses;
}

corpus::CaseLoadResult load_corpus(const PipelineConfig& config,
                                   std::ostream* log) {
  auto loaded = corpus::load_cases(config.cases_dir);
  if (log != nullptr) {
    for (const auto& skip : loaded.skipped)
      *log << "skipped case " << skip.case_id << " (" << skip.file_name
           << "): " << skip.reason << '\n';
  }
  return loaded;
}

void run_mine(const PipelineConfig& config, std::ostream* log) {
  require(!config.tokens_path.empty() || !config.cases_dir.empty(),
          "either --cases or --tokens is required");

  std::vector<mining::TokenSeq> clauses;
  if (!config.tokens_path.empty()) {
    clauses = load_token_file(config.tokens_path);
  } else {
    const auto loaded = load_corpus(config, log);
    for (const auto& doc : loaded.cases) {
      for (const auto& clause :
           corpus::candidate_clauses(doc, config.sections, config.clean)) {
        auto toks = mining::char_tokens(clause.text);
        if (!toks.empty()) clauses.push_back(std::move(toks));
      }
    }
  }
  const auto lexicon = mining::mine_phrases(clauses, config.mining);
  const std::string out = config.resolve_out(config.lexicon_out);
  mining::export_user_lexicon(lexicon, out);
  if (log != nullptr)
    *log << "mine: " << clauses.size() << " clauses -> " << lexicon.entries.size()
         << " phrases in " << lexicon.rounds_run << " rounds -> " << out << '\n';
}

void run_extract(const PipelineConfig& config, std::ostream* log) {
  require(!config.parses_path.empty(), "--parses is required");
  const auto parses = extraction::load_parses(config.parses_path);
  std::vector<extraction::CandidatePhraseSet> sets;
  sets.reserve(parses.size());
  for (const auto& parse : parses)
    sets.push_back(extraction::extract_candidate_set(parse, config.extraction));
  const std::string out = config.resolve_out(config.candidates_out);
  extraction::write_candidates_jsonl(sets, out);
  if (log != nullptr)
    *log << "extract: " << parses.size() << " parses -> " << sets.size()
         << " candidate sets -> " << out << '\n';
}

void run_cluster(const PipelineConfig& config, std::ostream* log) {
  const std::string candidates_path = config.resolve_out(config.candidates_out);
  const auto sets = extraction::read_candidates_jsonl(candidates_path);
  require(!sets.empty(),
          "no candidate sets in '" + candidates_path + "'");

  similarity::DistanceMatrix matrix;
  if (!config.matrix_in.empty()) {
    matrix = similarity::DistanceMatrix::load_csv(config.matrix_in);
    require(matrix.kind() == config.metric,
            "matrix file metric does not match --metric");
    require(matrix.size() == sets.size(),
            "matrix file does not cover the candidate sets");
    for (size_t i = 0; i < sets.size(); ++i)
      require(matrix.items()[i] == sets[i].clause_ref.str(),
              "matrix ids do not match the candidate sets");
  } else {
    matrix = similarity::build_matrix(sets, config.metric);
  }
  if (!config.matrix_out.empty())
    matrix.save_csv(config.resolve_out(config.matrix_out));

  std::vector<std::string> rendered;
  rendered.reserve(sets.size());
  for (const auto& s : sets) rendered.push_back(s.rendered());

  const auto result =
      clustering::cluster_multi_density(matrix, rendered, config.clustering);
  const std::string out = config.resolve_out(config.clusters_out);
  clustering::write_rounds_json(result, matrix, config.clustering, out);
  if (!config.curve_out.empty())
    clustering::write_curve_csv(result, config.resolve_out(config.curve_out));

  if (log != nullptr) {
    size_t total = 0;
    for (const auto& round : result.rounds) total += round.clusters.size();
    *log << "cluster: " << result.rounds.size() << " rounds, " << total
         << " clusters, " << result.unclustered.size() << " unclustered -> "
         << out << '\n';
  }
}

json keyphrases_json(const std::vector<analysis::KeyphraseSet>& keyphrases) {
  json arr = json::array();
  for (const auto& ks : keyphrases) {
    json j;
    j["phrases"] = ks.phrases;
    j["round"] = ks.source ? ks.source->round : -1;
    j["cluster"] = ks.source ? ks.source->cluster : -1;
    j["member_count"] = ks.member_count;
    arr.push_back(std::move(j));
  }
  return arr;
}

json identification_json(const analysis::RecallReport& report) {
  json j;
  j["kind"] =
      report.kind == analysis::RecallKind::recall ? "recall" : "coverage";
  j["value"] = report.value;
  j["identified"] = report.identified;
  j["total"] = report.total;
  json per_case = json::array();
  for (const auto& ident : report.per_case) {
    json c;
    c["case"] = ident.case_id;
    c["identified"] = ident.identified;
    if (ident.matched)
      c["matched"] = *ident.matched;
    else
      c["matched"] = nullptr;
    per_case.push_back(std::move(c));
  }
  j["per_case"] = std::move(per_case);
  return j;
}

void run_report(const PipelineConfig& config, std::ostream* log) {
  require(!config.cases_dir.empty(), "--cases is required");
  const std::string candidates_path = config.resolve_out(config.candidates_out);
  const auto sets = extraction::read_candidates_jsonl(candidates_path);
  std::vector<std::string> ids;
  ids.reserve(sets.size());
  for (const auto& s : sets) ids.push_back(s.clause_ref.str());

  const std::string clusters_path = config.resolve_out(config.clusters_out);
  const auto result = clustering::read_rounds_json(clusters_path, ids);

  analysis::ClusterAnnotation annotation;
  if (!config.annotation_path.empty())
    annotation = analysis::load_annotation(config.annotation_path);

  const auto keyphrases =
      analysis::dedup_keyphrase_sets(result, sets, annotation);

  const auto loaded = load_corpus(config, log);

  analysis::GoldLabels gold;
  const bool has_gold = !config.gold_labels_path.empty();
  if (has_gold) gold = analysis::load_gold_labels(config.gold_labels_path);

  const auto recall =
      analysis::compute_recall(loaded.cases, keyphrases, config.sections,
                               config.clean, has_gold ? &gold : nullptr);

  json report;
  size_t total_clusters = 0;
  json rounds = json::array();
  for (const auto& round : result.rounds) {
    total_clusters += round.clusters.size();
    json r;
    r["round"] = round.round;
    r["eps"] = round.eps;
    r["clusters"] = round.clusters.size();
    r["noise"] = round.noise.size();
    rounds.push_back(std::move(r));
  }
  size_t clause_count = 0;
  for (const auto& doc : loaded.cases)
    clause_count +=
        corpus::candidate_clauses(doc, config.sections, config.clean).size();

  json skipped = json::array();
  for (const auto& skip : loaded.skipped) {
    json s;
    s["case"] = skip.case_id;
    s["file"] = skip.file_name;
    s["reason"] = skip.reason;
    skipped.push_back(std::move(s));
  }

  json summary;
  summary["cases"] = loaded.cases.size();
  summary["skipped_cases"] = loaded.skipped.size();
  summary["clauses"] = clause_count;
  summary["candidate_sets"] = sets.size();
  summary["rounds"] = result.rounds.size();
  summary["clusters"] = total_clusters;
  summary["keyphrase_sets"] = keyphrases.size();
  summary["terminated_by_rule"] = result.terminated_by_rule;
  report["summary"] = std::move(summary);
  report["skipped"] = std::move(skipped);
  report["rounds"] = std::move(rounds);
  report["keyphrase_sets"] = keyphrases_json(keyphrases);
  report["identification"] = identification_json(recall);

  if (has_gold) {
    require(!config.taxonomy_path.empty(),
            "--taxonomy is required with --gold-labels");
    const auto taxonomy = analysis::load_taxonomy(config.taxonomy_path);
    std::map<std::string, std::set<std::string>> labels_by_case;
    for (const auto& [case_id, code] : gold.rows)
      labels_by_case[case_id].insert(code);
    const auto table = analysis::build_cooccurrence(labels_by_case, taxonomy);
    json co = json::array();
    for (const auto& row : table.rows) {
      json r;
      r["anchor"] = row.anchor;
      r["count"] = row.count;
      json others = json::array();
      for (const auto& [code, count] : row.co) {
        json o;
        o["code"] = code;
        o["count"] = count;
        others.push_back(std::move(o));
      }
      r["co"] = std::move(others);
      co.push_back(std::move(r));
    }
    report["cooccurrence"] = std::move(co);
    if (!config.cooccurrence_out.empty())
      analysis::write_cooccurrence_csv(
          table, config.resolve_out(config.cooccurrence_out));
  }

  const std::string out = config.resolve_out(config.report_out);
  {
    std::ofstream file(out, std::ios::binary);
    if (!file) throw IoError("cannot write report file '" + out + "'");
    file << report.dump(2) << '\n';
    if (!file) throw IoError("failed writing report file '" + out + "'");
  }
  if (!config.recall_csv_out.empty())
    analysis::write_recall_csv(recall, config.resolve_out(config.recall_csv_out));

  if (log != nullptr)
    *log << "report: " << keyphrases.size() << " keyphrase sets, "
         << (recall.kind == analysis::RecallKind::recall ? "recall" : "coverage")
         << " " << recall.identified << "/" << recall.total << " -> " << out
         << '\n';
}

}  // namespace

void run_stage(const PipelineConfig& config, Stage stage, std::ostream* log) {
  const auto wrap = [&](Stage s, auto&& fn) {
    try {
      fn();
    } catch (const IoError& e) {
      throw IoError(std::string(stage_name(s)) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(stage_name(s)) + ": " + e.what());
    }
  };
  switch (stage) {
    case Stage::mine:
      wrap(stage, [&] { run_mine(config, log); });
      break;
    case Stage::extract:
      wrap(stage, [&] { run_extract(config, log); });
      break;
    case Stage::cluster:
      wrap(stage, [&] { run_cluster(config, log); });
      break;
    case Stage::report:
      wrap(stage, [&] { run_report(config, log); });
      break;
    case Stage::all:
      wrap(Stage::mine, [&] { run_mine(config, log); });
      wrap(Stage::extract, [&] { run_extract(config, log); });
      wrap(Stage::cluster, [&] { run_cluster(config, log); });
      wrap(Stage::report, [&] { run_report(config, log); });
      break;
  }
}

int run_pipeline(const PipelineConfig& config, Stage stage, std::ostream& out,
                 std::ostream& err) {
  try {
    run_stage(config, stage, &out);
  } catch (const std::exception& e) {
    err << "factmine: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace factmine::pipeline
