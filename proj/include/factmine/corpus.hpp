#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace factmine::corpus {

enum class SectionKind { profile, details, causes, severity, liabilities, prevention };

constexpr std::array<SectionKind, 6> kSectionOrder = {
    SectionKind::profile,    SectionKind::details,     SectionKind::causes,
    SectionKind::severity,   SectionKind::liabilities, SectionKind::prevention,
};

std::string_view section_name(SectionKind kind);
std::optional<SectionKind> section_from_name(std::string_view name);

// One accident case. The causes section is mandatory and non-empty;
// profile and prevention are optional.
struct CaseDocument {
  std::string id;
  std::string title;
  std::map<SectionKind, std::string> sections;
  std::string source_path;

  bool has_section(SectionKind kind) const { return sections.count(kind) > 0; }
};

// A sense-group segment: free of boundary punctuation, indexed
// consecutively from 0 within its (case, section).
struct Clause {
  std::string case_id;
  SectionKind section = SectionKind::causes;
  int index = 0;
  std::string text;
};

struct CleanConfig {
  // Individual codepoints dropped from the text (brackets and quotes).
  std::u32string noise_chars;
  // Remove numbering bullets: bracketed digits, circled digits, digits
  // followed by the enumeration comma.
  bool strip_numbering = true;

  static CleanConfig defaults();
};

// Removes noise symbols and collapses whitespace runs to a single space.
// Clause-boundary punctuation is preserved. Idempotent.
std::string clean_text(const std::string& raw,
                       const CleanConfig& cfg = CleanConfig::defaults());

// Splits cleaned text at commas, semicolons and full stops (full-width
// and ASCII), trimming whitespace and dropping empty segments.
std::vector<std::string> segment_clauses(const std::string& text);

bool is_clause_boundary(char32_t cp);

struct SkippedCase {
  std::string case_id;
  std::string file_name;
  std::string reason;
};

struct CaseLoadResult {
  std::vector<CaseDocument> cases;     // sorted by file name
  std::vector<SkippedCase> skipped;    // malformed files, with reasons
};

// Loads every regular file in `dir` as a case document. Files that fail
// validation (missing/empty causes section, unknown section marker, ...)
// are reported in `skipped` rather than aborting the load. Unreadable
// files throw IoError.
CaseLoadResult load_cases(const std::string& dir);

// Parses a single case file body; throws ValidationError on malformed input.
CaseDocument parse_case_file(const std::string& id, const std::string& body,
                             const std::string& source_path);

// Cleans and segments the requested sections into indexed clauses,
// iterating sections in kSectionOrder.
std::vector<Clause> candidate_clauses(const CaseDocument& doc,
                                      const std::vector<SectionKind>& sections,
                                      const CleanConfig& cfg = CleanConfig::defaults());

}  // namespace factmine::corpus
