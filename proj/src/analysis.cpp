#include "factmine/analysis.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "factmine/error.hpp"
#include "factmine/text.hpp"

using nlohmann::json;

namespace factmine::analysis {

namespace {

// Collapse whitespace runs and trim: the dedup key normalization.
std::string normalize_rendered(const std::string& s) {
  std::u32string out;
  for (char32_t c : utf8_decode(s)) {
    if (is_space_char(c)) {
      if (!out.empty() && out.back() != U' ') out.push_back(U' ');
    } else {
      out.push_back(c);
    }
  }
  if (!out.empty() && out.back() == U' ') out.pop_back();
  return utf8_encode(out);
}

// Minimal CSV field splitting with double-quote handling.
std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

struct CodeKey {
  int main = 0;
  int mismatch = 0;
  int sub = 0;
};

CodeKey parse_code(const std::string& code) {
  const size_t dash = code.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 >= code.size())
    throw ValidationError("malformed factor code '" + code + "'");
  CodeKey key;
  char* end = nullptr;
  key.main = static_cast<int>(std::strtol(code.c_str(), &end, 10));
  if (end != code.c_str() + dash)
    throw ValidationError("malformed factor code '" + code + "'");
  std::string sub = code.substr(dash + 1);
  if (!sub.empty() && sub[0] == 'm') {
    key.mismatch = 1;
    sub = sub.substr(1);
  }
  if (sub.empty())
    throw ValidationError("malformed factor code '" + code + "'");
  key.sub = static_cast<int>(std::strtol(sub.c_str(), &end, 10));
  if (end != sub.c_str() + sub.size())
    throw ValidationError("malformed factor code '" + code + "'");
  return key;
}

}  // namespace

std::string KeyphraseSet::rendered() const {
  std::string out;
  for (const auto& p : phrases) out += p;
  return out;
}

ClusterAnnotation load_annotation(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open annotation file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("annotation file '" + path + "': " + e.what());
  }
  ClusterAnnotation annotation;
  try {
    if (j.contains("excluded_clusters")) {
      for (const auto& e : j.at("excluded_clusters")) {
        annotation.excluded_clusters.emplace(e.at("round").get<int>(),
                                             e.at("cluster").get<int>());
      }
    }
    if (j.contains("included_singletons")) {
      for (const auto& id : j.at("included_singletons"))
        annotation.included_singletons.insert(id.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ValidationError("annotation file '" + path + "': " + e.what());
  }
  return annotation;
}

std::vector<KeyphraseSet> dedup_keyphrase_sets(
    const clustering::ClusteringResult& result,
    const std::vector<extraction::CandidatePhraseSet>& sets,
    const ClusterAnnotation& annotation) {
  for (const auto& [round, cluster] : annotation.excluded_clusters) {
    if (round < 1 || round > static_cast<int>(result.rounds.size()))
      throw ValidationError("annotation excludes unknown round " +
                            std::to_string(round));
    const auto& r = result.rounds[round - 1];
    if (cluster < 0 || cluster >= static_cast<int>(r.clusters.size()))
      throw ValidationError("annotation excludes unknown cluster " +
                            std::to_string(cluster) + " in round " +
                            std::to_string(round));
  }

  std::map<std::string, int> index_of_id;
  for (size_t i = 0; i < sets.size(); ++i)
    index_of_id[sets[i].clause_ref.str()] = static_cast<int>(i);
  std::set<int> unclustered(result.unclustered.begin(),
                            result.unclustered.end());

  std::vector<KeyphraseSet> out;
  std::map<std::string, size_t> index_of_key;
  auto feed = [&](int member, std::optional<SourceCluster> source) {
    const auto& set = sets[member];
    const std::string key = normalize_rendered(set.rendered());
    auto it = index_of_key.find(key);
    if (it != index_of_key.end()) {
      ++out[it->second].member_count;
      return;
    }
    KeyphraseSet ks;
    for (const auto& p : set.phrases) ks.phrases.push_back(p.form);
    ks.source = source;
    ks.member_count = 1;
    index_of_key[key] = out.size();
    out.push_back(std::move(ks));
  };

  for (const auto& round : result.rounds) {
    for (size_t c = 0; c < round.clusters.size(); ++c) {
      if (annotation.excluded_clusters.count(
              {round.round, static_cast<int>(c)}))
        continue;
      for (int member : round.clusters[c])
        feed(member, SourceCluster{round.round, static_cast<int>(c)});
    }
  }
  for (const auto& id : annotation.included_singletons) {
    auto it = index_of_id.find(id);
    if (it == index_of_id.end())
      throw ValidationError("annotation includes unknown candidate set '" +
                            id + "'");
    if (!unclustered.count(it->second))
      throw ValidationError("annotation includes '" + id +
                            "' which is not unclustered");
    feed(it->second, std::nullopt);
  }
  return out;
}

GoldLabels load_gold_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open gold labels file '" + path + "'");
  GoldLabels gold;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (line_no == 1 && line == "case_id,factor_code") continue;
    const auto fields = csv_fields(line);
    if (fields.size() != 2)
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": expected 'case_id,factor_code'");
    gold.rows.emplace_back(trim(fields[0]), trim(fields[1]));
  }
  return gold;
}

RecallReport compute_recall(const std::vector<corpus::CaseDocument>& cases,
                            const std::vector<KeyphraseSet>& keyphrases,
                            const std::vector<corpus::SectionKind>& sections,
                            const corpus::CleanConfig& clean,
                            const GoldLabels* gold) {
  if (keyphrases.empty())
    throw ValidationError("cannot compute recall with no keyphrase sets");

  RecallReport report;
  std::map<std::string, bool> identified_by_case;
  for (const auto& doc : cases) {
    const auto clauses = corpus::candidate_clauses(doc, sections, clean);
    CaseIdentification ident;
    ident.case_id = doc.id;
    for (const auto& clause : clauses) {
      for (const auto& ks : keyphrases) {
        bool all = true;
        for (const auto& phrase : ks.phrases) {
          if (clause.text.find(phrase) == std::string::npos) {
            all = false;
            break;
          }
        }
        if (all) {
          ident.identified = true;
          ident.matched = ks.rendered();
          break;
        }
      }
      if (ident.identified) break;
    }
    identified_by_case[doc.id] = ident.identified;
    report.per_case.push_back(std::move(ident));
  }

  if (gold != nullptr) {
    if (gold->rows.empty())
      throw ValidationError("gold labels file has no rows");
    report.kind = RecallKind::recall;
    report.total = static_cast<int>(gold->rows.size());
    for (const auto& [case_id, code] : gold->rows) {
      auto it = identified_by_case.find(case_id);
      if (it == identified_by_case.end())
        throw ValidationError("gold labels reference unknown case '" +
                              case_id + "'");
      if (it->second) ++report.identified;
    }
  } else {
    report.kind = RecallKind::coverage;
    report.total = static_cast<int>(cases.size());
    for (const auto& ident : report.per_case)
      if (ident.identified) ++report.identified;
  }
  report.value = report.total == 0
                     ? 0.0
                     : static_cast<double>(report.identified) / report.total;
  return report;
}

bool FactorTaxonomy::has_code(const std::string& code) const {
  for (const auto& sub : sub_factors)
    if (sub.code == code) return true;
  return false;
}

FactorTaxonomy load_taxonomy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open taxonomy file '" + path + "'");
  FactorTaxonomy taxonomy;
  std::string line;
  int line_no = 0;
  std::set<std::string> codes;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (line_no == 1 && line.rfind("code,", 0) == 0) continue;
    const auto fields = csv_fields(line);
    if (fields.size() != 4)
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": expected 4 fields");
    SubFactor sub;
    sub.code = trim(fields[0]);
    sub.main_id = std::atoi(fields[1].c_str());
    sub.main_name = trim(fields[2]);
    sub.description = fields[3];
    const CodeKey key = parse_code(sub.code);
    if (key.main != sub.main_id)
      throw ValidationError(path + ": code '" + sub.code +
                            "' does not match stakeholder id " + fields[1]);
    if (!codes.insert(sub.code).second)
      throw ValidationError(path + ": duplicate code '" + sub.code + "'");
    auto it = taxonomy.main_factors.find(sub.main_id);
    if (it == taxonomy.main_factors.end())
      taxonomy.main_factors[sub.main_id] = sub.main_name;
    else if (it->second != sub.main_name)
      throw ValidationError(path + ": stakeholder id " + fields[1] +
                            " maps to two names");
    taxonomy.sub_factors.push_back(std::move(sub));
  }
  if (taxonomy.sub_factors.empty())
    throw ValidationError(path + ": no taxonomy entries");
  return taxonomy;
}

bool code_less(const std::string& a, const std::string& b) {
  const CodeKey ka = parse_code(a);
  const CodeKey kb = parse_code(b);
  if (ka.main != kb.main) return ka.main < kb.main;
  if (ka.mismatch != kb.mismatch) return ka.mismatch < kb.mismatch;
  return ka.sub < kb.sub;
}

CooccurrenceTable build_cooccurrence(
    const std::map<std::string, std::set<std::string>>& labels_by_case,
    const FactorTaxonomy& taxonomy) {
  std::map<std::string, int> occurrences;
  std::map<std::pair<std::string, std::string>, int> pair_counts;
  for (const auto& [case_id, codes] : labels_by_case) {
    for (const auto& code : codes) {
      if (!taxonomy.has_code(code))
        throw ValidationError("unknown factor code '" + code + "' for case '" +
                              case_id + "'");
      ++occurrences[code];
    }
    for (auto i = codes.begin(); i != codes.end(); ++i) {
      for (auto j = std::next(i); j != codes.end(); ++j) {
        ++pair_counts[{*i, *j}];
        ++pair_counts[{*j, *i}];
      }
    }
  }

  std::vector<std::string> anchors;
  for (const auto& [code, count] : occurrences) anchors.push_back(code);
  std::sort(anchors.begin(), anchors.end(), code_less);

  CooccurrenceTable table;
  for (const auto& anchor : anchors) {
    CooccurrenceRow row;
    row.anchor = anchor;
    row.count = occurrences[anchor];
    std::vector<std::string> others;
    for (const auto& [pair, count] : pair_counts)
      if (pair.first == anchor) others.push_back(pair.second);
    std::sort(others.begin(), others.end(), code_less);
    for (const auto& other : others)
      row.co.emplace_back(other, pair_counts[{anchor, other}]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_cooccurrence_csv(const CooccurrenceTable& table,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write co-occurrence file '" + path + "'");
  out << "anchor,anchor_count,other,co_count\n";
  for (const auto& row : table.rows) {
    if (row.co.empty()) {
      out << csv_quote(row.anchor) << ',' << row.count << ",,0\n";
      continue;
    }
    for (const auto& [other, count] : row.co) {
      out << csv_quote(row.anchor) << ',' << row.count << ','
          << csv_quote(other) << ',' << count << '\n';
    }
  }
  if (!out) throw IoError("failed writing co-occurrence file '" + path + "'");
}

void write_recall_csv(const RecallReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write recall file '" + path + "'");
  out << "case_id,identified,matched\n";
  for (const auto& ident : report.per_case) {
    out << csv_quote(ident.case_id) << ','
        << (ident.identified ? "true" : "false") << ','
        << csv_quote(ident.matched.value_or("")) << '\n';
  }
  if (!out) throw IoError("failed writing recall file '" + path + "'");
}

}  // namespace factmine::analysis
