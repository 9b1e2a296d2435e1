#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "factmine/extraction.hpp"

namespace factmine::similarity {

// Minimum insertions/deletions/substitutions between two strings,
// compared as sequences of Unicode scalar values.
int levenshtein(std::u32string_view a, std::u32string_view b);
int levenshtein(std::string_view a, std::string_view b);

enum class MetricKind { raw, offset_normalized };

std::string_view metric_name(MetricKind kind);
MetricKind metric_from_name(std::string_view name);

// raw: plain edit distance. offset_normalized: 1 + lev/max(|a|,|b|),
// range [1, 2], with 1 for two empty strings; identical strings sit at
// the metric's lower bound either way.
double string_distance(std::string_view a, std::string_view b, MetricKind kind);

double set_distance(const extraction::CandidatePhraseSet& a,
                    const extraction::CandidatePhraseSet& b, MetricKind kind);

// Symmetric pairwise distances, condensed upper-triangle storage.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::vector<std::string> items, MetricKind kind);

  size_t size() const { return items_.size(); }
  const std::vector<std::string>& items() const { return items_; }
  MetricKind kind() const { return kind_; }

  double at(size_t i, size_t j) const { return values_[index(i, j)]; }
  void set(size_t i, size_t j, double v) { values_[index(i, j)] = v; }

  void save_csv(const std::string& path) const;
  static DistanceMatrix load_csv(const std::string& path);

 private:
  size_t index(size_t i, size_t j) const {
    if (i > j) std::swap(i, j);
    return i * items_.size() - i * (i - 1) / 2 + (j - i);
  }

  std::vector<std::string> items_;
  MetricKind kind_ = MetricKind::offset_normalized;
  std::vector<double> values_;
};

// All pairwise distances over the rendered candidate sets; each unordered
// pair is computed once. Parallelizes over rows for large inputs.
DistanceMatrix build_matrix(const std::vector<extraction::CandidatePhraseSet>& sets,
                            MetricKind kind);
DistanceMatrix build_matrix_from_strings(std::vector<std::string> ids,
                                         const std::vector<std::string>& rendered,
                                         MetricKind kind);

}  // namespace factmine::similarity
