#include "factmine/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "factmine/error.hpp"
#include "factmine/text.hpp"

namespace fs = std::filesystem;

namespace factmine::corpus {

namespace {

constexpr std::array<std::string_view, 6> kSectionNames = {
    "profile", "details", "causes", "severity", "liabilities", "prevention"};

bool open_bracket(char32_t c, char32_t& close) {
  switch (c) {
    case U'（': close = U'）'; return true;
    case U'(':  close = U')';  return true;
    case U'【': close = U'】'; return true;
    case U'[':  close = U']';  return true;
    default:    return false;
  }
}

bool digit_char(char32_t c) {
  return (c >= U'0' && c <= U'9') || (c >= U'０' && c <= U'９');
}

bool circled_number(char32_t c) { return c >= U'①' && c <= U'⑳'; }

std::u32string clean_pass(const std::u32string& in, const CleanConfig& cfg) {
  std::u32string out;
  out.reserve(in.size());
  size_t i = 0;
  const size_t n = in.size();
  while (i < n) {
    const char32_t c = in[i];
    if (cfg.strip_numbering) {
      char32_t close = 0;
      if (open_bracket(c, close)) {
        size_t j = i + 1;
        while (j < n && digit_char(in[j])) ++j;
        if (j > i + 1 && j < n && in[j] == close) {
          i = j + 1;
          continue;
        }
      }
      if (circled_number(c)) {
        ++i;
        continue;
      }
      if (digit_char(c)) {
        size_t j = i;
        while (j < n && digit_char(in[j])) ++j;
        if (j < n && in[j] == U'、') {
          i = j + 1;
          continue;
        }
      }
    }
    if (cfg.noise_chars.find(c) != std::u32string::npos) {
      ++i;
      continue;
    }
    if (is_space_char(c)) {
      out.push_back(U' ');
      while (i < n && is_space_char(in[i])) ++i;
      continue;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

}  // namespace

std::string_view section_name(SectionKind kind) {
  return kSectionNames[static_cast<size_t>(kind)];
}

std::optional<SectionKind> section_from_name(std::string_view name) {
  for (size_t i = 0; i < kSectionNames.size(); ++i) {
    if (kSectionNames[i] == name) return static_cast<SectionKind>(i);
  }
  return std::nullopt;
}

CleanConfig CleanConfig::defaults() {
  CleanConfig cfg;
  cfg.noise_chars = U"（）()【】[]《》〈〉「」『』{}“”‘’\"'";
  cfg.strip_numbering = true;
  return cfg;
}

std::string clean_text(const std::string& raw, const CleanConfig& cfg) {
  std::u32string cur = utf8_decode(raw);
  // A removal pass can create new bullet patterns by adjacency; iterate
  // to the fixpoint so the operation is idempotent.
  while (true) {
    std::u32string next = clean_pass(cur, cfg);
    if (next == cur) break;
    cur = std::move(next);
  }
  return utf8_encode(cur);
}

bool is_clause_boundary(char32_t cp) {
  return cp == U'，' || cp == U'；' || cp == U'。' || cp == U',' ||
         cp == U';' || cp == U'.';
}

std::vector<std::string> segment_clauses(const std::string& text) {
  const std::u32string cps = utf8_decode(text);
  std::vector<std::string> out;
  std::u32string cur;
  auto flush = [&]() {
    size_t b = 0, e = cur.size();
    while (b < e && is_space_char(cur[b])) ++b;
    while (e > b && is_space_char(cur[e - 1])) --e;
    if (e > b) out.push_back(utf8_encode(std::u32string_view(cur).substr(b, e - b)));
    cur.clear();
  };
  for (char32_t c : cps) {
    if (is_clause_boundary(c)) {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

CaseDocument parse_case_file(const std::string& id, const std::string& body,
                             const std::string& source_path) {
  CaseDocument doc;
  doc.id = id;
  doc.source_path = source_path;

  std::istringstream in(body);
  std::string line;
  bool first = true;
  std::optional<SectionKind> current;
  std::map<SectionKind, std::string> sections;

  auto marker_of = [](const std::string& s) -> std::optional<std::string> {
    const std::string t = trim(s);
    if (t.size() < 5 || t.substr(0, 2) != "==" || t.substr(t.size() - 2) != "==")
      return std::nullopt;
    return trim(t.substr(2, t.size() - 4));
  };

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      doc.title = trim(line);
      first = false;
      continue;
    }
    if (auto name = marker_of(line)) {
      auto kind = section_from_name(*name);
      if (!kind) throw ValidationError("unknown section '" + *name + "'");
      if (sections.count(*kind))
        throw ValidationError("duplicate section '" + *name + "'");
      sections[*kind] = "";
      current = *kind;
      continue;
    }
    if (!current) {
      if (!trim(line).empty())
        throw ValidationError("content before first section marker");
      continue;
    }
    sections[*current] += line;
    sections[*current] += '\n';
  }
  if (first) throw ValidationError("empty file");

  auto causes = sections.find(SectionKind::causes);
  if (causes == sections.end() || trim(causes->second).empty())
    throw ValidationError("missing or empty causes section");

  doc.sections = std::move(sections);
  return doc;
}

CaseLoadResult load_cases(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw IoError("cannot open case directory '" + dir + "'");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (!name.empty() && name[0] == '.') continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  CaseLoadResult result;
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read case file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string id = path.stem().string();
    try {
      result.cases.push_back(parse_case_file(id, buf.str(), path.string()));
    } catch (const ValidationError& e) {
      result.skipped.push_back({id, path.filename().string(), e.what()});
    }
  }
  return result;
}

std::vector<Clause> candidate_clauses(const CaseDocument& doc,
                                      const std::vector<SectionKind>& sections,
                                      const CleanConfig& cfg) {
  std::vector<Clause> out;
  for (SectionKind kind : kSectionOrder) {
    if (std::find(sections.begin(), sections.end(), kind) == sections.end())
      continue;
    auto it = doc.sections.find(kind);
    if (it == doc.sections.end()) continue;
    const std::string cleaned = clean_text(it->second, cfg);
    int index = 0;
    for (auto& text : segment_clauses(cleaned)) {
      out.push_back({doc.id, kind, index++, std::move(text)});
    }
  }
  return out;
}

}  // namespace factmine::corpus
