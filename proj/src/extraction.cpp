#include "factmine/extraction.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "factmine/error.hpp"
#include "factmine/text.hpp"

using nlohmann::json;

namespace factmine::extraction {

std::string ClauseRef::str() const {
  return case_id + ":" + std::string(corpus::section_name(section)) + ":" +
         std::to_string(index);
}

ClauseRef ClauseRef::parse(const std::string& text) {
  const size_t last = text.rfind(':');
  const size_t mid = last == std::string::npos ? std::string::npos
                                               : text.rfind(':', last - 1);
  if (mid == std::string::npos || last == std::string::npos || mid == 0 ||
      last + 1 >= text.size())
    throw ValidationError("malformed clause_ref '" + text + "'");
  ClauseRef ref;
  ref.case_id = text.substr(0, mid);
  const std::string section = text.substr(mid + 1, last - mid - 1);
  auto kind = corpus::section_from_name(section);
  if (!kind)
    throw ValidationError("clause_ref '" + text + "' has unknown section '" +
                          section + "'");
  ref.section = *kind;
  char* end = nullptr;
  const std::string idx = text.substr(last + 1);
  const long value = std::strtol(idx.c_str(), &end, 10);
  if (end == idx.c_str() || *end != '\0' || value < 0)
    throw ValidationError("clause_ref '" + text + "' has bad index '" + idx + "'");
  ref.index = static_cast<int>(value);
  return ref;
}

int DependencyParse::root_position() const {
  for (const auto& node : nodes)
    if (node.head == 0) return node.position;
  return 0;
}

void validate_parse(const DependencyParse& parse) {
  const std::string where = "clause " + parse.clause_ref.str();
  const int n = static_cast<int>(parse.nodes.size());
  if (n == 0) throw ValidationError(where + ": empty parse");

  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const ParseNode& node = parse.nodes[i];
    if (node.position != i + 1)
      throw ValidationError(where + ": node positions are not consecutive");
    if (node.head < 0 || node.head > n)
      throw ValidationError(where + ": head " + std::to_string(node.head) +
                            " out of range");
    if (node.head == node.position)
      throw ValidationError(where + ": node is its own head");
    if (node.head == 0) ++roots;
  }
  if (roots != 1)
    throw ValidationError(where + ": expected exactly one root, found " +
                          std::to_string(roots));

  // Every head chain must reach the root within n steps.
  for (const auto& node : parse.nodes) {
    int cur = node.head;
    int steps = 0;
    while (cur != 0) {
      if (++steps > n) throw ValidationError(where + ": cycle in head chain");
      cur = parse.nodes[cur - 1].head;
    }
  }
}

std::vector<DependencyParse> load_parses(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open parses file '" + path + "'");

  std::vector<DependencyParse> parses;
  DependencyParse cur;
  bool has_ref = false;
  bool has_content = false;
  int sentence_no = 1;
  int line_no = 0;

  auto finish = [&]() {
    if (!has_content) return;
    if (!has_ref)
      throw ValidationError(path + ": sentence " + std::to_string(sentence_no) +
                            " is missing the '# clause_ref = ...' comment");
    validate_parse(cur);
    parses.push_back(std::move(cur));
    cur = DependencyParse{};
    has_ref = false;
    has_content = false;
    ++sentence_no;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      finish();
      continue;
    }
    if (line[0] == '#') {
      const std::string comment = trim(line.substr(1));
      const size_t eq = comment.find('=');
      if (eq != std::string::npos &&
          trim(comment.substr(0, eq)) == "clause_ref") {
        cur.clause_ref = ClauseRef::parse(trim(comment.substr(eq + 1)));
        has_ref = true;
        has_content = true;
      }
      continue;
    }
    const std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 10)
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": expected 10 tab-separated columns, got " +
                            std::to_string(cols.size()));
    // Skip multiword-token ranges and empty nodes.
    if (cols[0].find('-') != std::string::npos ||
        cols[0].find('.') != std::string::npos)
      continue;
    ParseNode node;
    try {
      node.position = std::stoi(cols[0]);
      node.head = std::stoi(cols[6]);
    } catch (const std::exception&) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": bad ID or HEAD field");
    }
    node.form = cols[1];
    node.pos_tag = cols[3] == "_" ? cols[4] : cols[3];
    node.relation = cols[7];
    cur.nodes.push_back(std::move(node));
    has_content = true;
  }
  finish();
  return parses;
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::root: return "root";
    case Provenance::rule1: return "rule1";
    case Provenance::rule2_head: return "rule2-head";
    case Provenance::rule2_dep: return "rule2-dep";
  }
  return "root";
}

Provenance provenance_from_name(std::string_view name) {
  if (name == "root") return Provenance::root;
  if (name == "rule1") return Provenance::rule1;
  if (name == "rule2-head") return Provenance::rule2_head;
  if (name == "rule2-dep") return Provenance::rule2_dep;
  throw ValidationError("unknown provenance '" + std::string(name) + "'");
}

std::string CandidatePhraseSet::rendered() const {
  std::string out;
  for (const auto& p : phrases) out += p.form;
  return out;
}

CandidatePhraseSet extract_candidate_set(const DependencyParse& parse,
                                         const ExtractionConfig& config) {
  validate_parse(parse);
  const int root = parse.root_position();

  // position -> provenance, first (strongest) rule wins.
  std::map<int, Provenance> picked;
  picked.emplace(root, Provenance::root);

  // Rule 1: nearest dependent of the root, ties leftward, punctuation skipped.
  int best = 0;
  for (const auto& node : parse.nodes) {
    if (node.head != root) continue;
    if (config.punct_tags.count(node.pos_tag)) continue;
    if (best == 0 ||
        std::abs(node.position - root) < std::abs(best - root))
      best = node.position;
  }
  if (best != 0) picked.emplace(best, Provenance::rule1);

  // Rule 2: the reverse arc (head before dependent, label configured)
  // whose head lies nearest the root.
  const ParseNode* arc = nullptr;
  for (const auto& node : parse.nodes) {
    if (node.head == 0 || node.head >= node.position) continue;
    if (!config.reverse_labels.count(node.relation)) continue;
    if (arc == nullptr ||
        std::abs(node.head - root) < std::abs(arc->head - root) ||
        (std::abs(node.head - root) == std::abs(arc->head - root) &&
         (node.head < arc->head ||
          (node.head == arc->head && node.position < arc->position))))
      arc = &node;
  }
  if (arc != nullptr) {
    picked.emplace(arc->head, Provenance::rule2_head);
    picked.emplace(arc->position, Provenance::rule2_dep);
  }

  CandidatePhraseSet set;
  set.clause_ref = parse.clause_ref;
  for (const auto& [pos, prov] : picked) {
    set.phrases.push_back({parse.nodes[pos - 1].form, pos, prov});
  }
  return set;
}

void write_candidates_jsonl(const std::vector<CandidatePhraseSet>& sets,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write candidate sets file '" + path + "'");
  for (const auto& set : sets) {
    json j;
    j["clause_ref"] = set.clause_ref.str();
    json phrases = json::array();
    json positions = json::array();
    json provenance = json::array();
    for (const auto& p : set.phrases) {
      phrases.push_back(p.form);
      positions.push_back(p.position);
      provenance.push_back(std::string(provenance_name(p.provenance)));
    }
    j["phrases"] = std::move(phrases);
    j["positions"] = std::move(positions);
    j["provenance"] = std::move(provenance);
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing candidate sets file '" + path + "'");
}

std::vector<CandidatePhraseSet> read_candidates_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open candidate sets file '" + path + "'");
  std::vector<CandidatePhraseSet> sets;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " +
                            e.what());
    }
    CandidatePhraseSet set;
    try {
      set.clause_ref = ClauseRef::parse(j.at("clause_ref").get<std::string>());
      const auto& phrases = j.at("phrases");
      const auto& positions = j.at("positions");
      const auto& provenance = j.at("provenance");
      if (phrases.size() != positions.size() ||
          phrases.size() != provenance.size())
        throw ValidationError("parallel arrays differ in length");
      for (size_t i = 0; i < phrases.size(); ++i) {
        set.phrases.push_back(
            {phrases[i].get<std::string>(), positions[i].get<int>(),
             provenance_from_name(provenance[i].get<std::string>())});
      }
    } catch (const json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " +
                            e.what());
    }
    if (!seen.insert(set.clause_ref.str()).second)
      throw ValidationError(path + ": duplicate clause_ref '" +
                            set.clause_ref.str() + "'");
    sets.push_back(std::move(set));
  }
  return sets;
}

}  // namespace factmine::extraction
