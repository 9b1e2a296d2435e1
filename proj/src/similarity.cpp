#include "factmine/similarity.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include "factmine/error.hpp"
#include "factmine/text.hpp"

namespace factmine::similarity {

int levenshtein(std::u32string_view a, std::u32string_view b) {
  const size_t m = a.size();
  const size_t n = b.size();
  if (m == 0) return static_cast<int>(n);
  if (n == 0) return static_cast<int>(m);

  std::vector<int> prev(n + 1);
  std::vector<int> cur(n + 1);
  for (size_t j = 0; j <= n; ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= m; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= n; ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

int levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(utf8_decode(a), utf8_decode(b));
}

std::string_view metric_name(MetricKind kind) {
  return kind == MetricKind::raw ? "raw" : "offset_normalized";
}

MetricKind metric_from_name(std::string_view name) {
  if (name == "raw") return MetricKind::raw;
  if (name == "offset_normalized") return MetricKind::offset_normalized;
  throw ValidationError("unknown metric '" + std::string(name) + "'");
}

namespace {

double distance_of(const std::u32string& a, const std::u32string& b,
                   MetricKind kind) {
  const int lev = levenshtein(a, b);
  if (kind == MetricKind::raw) return static_cast<double>(lev);
  const size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 + static_cast<double>(lev) / static_cast<double>(longest);
}

}  // namespace

double string_distance(std::string_view a, std::string_view b, MetricKind kind) {
  return distance_of(utf8_decode(a), utf8_decode(b), kind);
}

double set_distance(const extraction::CandidatePhraseSet& a,
                    const extraction::CandidatePhraseSet& b, MetricKind kind) {
  return string_distance(a.rendered(), b.rendered(), kind);
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> items, MetricKind kind)
    : items_(std::move(items)),
      kind_(kind),
      values_(items_.size() * (items_.size() + 1) / 2, 0.0) {
  const double diag = kind_ == MetricKind::raw ? 0.0 : 1.0;
  for (size_t i = 0; i < items_.size(); ++i) set(i, i, diag);
}

DistanceMatrix build_matrix_from_strings(std::vector<std::string> ids,
                                         const std::vector<std::string>& rendered,
                                         MetricKind kind) {
  if (ids.empty()) throw ValidationError("cannot build an empty distance matrix");
  if (ids.size() != rendered.size())
    throw ValidationError("ids and rendered strings differ in length");
  {
    std::set<std::string> seen;
    for (const auto& id : ids)
      if (!seen.insert(id).second)
        throw ValidationError("duplicate candidate-set id '" + id + "'");
  }

  DistanceMatrix matrix(std::move(ids), kind);
  const size_t n = rendered.size();
  std::vector<std::u32string> decoded(n);
  for (size_t i = 0; i < n; ++i) decoded[i] = utf8_decode(rendered[i]);

  auto fill_rows = [&](size_t first, size_t stride) {
    for (size_t i = first; i < n; i += stride)
      for (size_t j = i + 1; j < n; ++j)
        matrix.set(i, j, distance_of(decoded[i], decoded[j], kind));
  };

  const size_t workers =
      n >= 128 ? std::max<size_t>(1, std::thread::hardware_concurrency()) : 1;
  if (workers <= 1) {
    fill_rows(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < workers; ++t)
      pool.emplace_back(fill_rows, t, workers);
    for (auto& th : pool) th.join();
  }
  return matrix;
}

DistanceMatrix build_matrix(const std::vector<extraction::CandidatePhraseSet>& sets,
                            MetricKind kind) {
  std::vector<std::string> ids;
  std::vector<std::string> rendered;
  ids.reserve(sets.size());
  rendered.reserve(sets.size());
  for (const auto& s : sets) {
    ids.push_back(s.clause_ref.str());
    rendered.push_back(s.rendered());
  }
  return build_matrix_from_strings(std::move(ids), rendered, kind);
}

void DistanceMatrix::save_csv(const std::string& path) const {
  for (const auto& id : items_) {
    if (id.find(',') != std::string::npos || id.find('\n') != std::string::npos ||
        id.find('\r') != std::string::npos)
      throw ValidationError("candidate-set id '" + id +
                            "' cannot be stored in CSV");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write matrix file '" + path + "'");
  out << "metric," << metric_name(kind_) << '\n';
  out << "id";
  for (const auto& id : items_) out << ',' << id;
  out << '\n';
  char buf[32];
  const size_t n = items_.size();
  for (size_t i = 0; i < n; ++i) {
    out << items_[i];
    for (size_t j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", at(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing matrix file '" + path + "'");
}

DistanceMatrix DistanceMatrix::load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open matrix file '" + path + "'");
  auto fail = [&path](const std::string& what) -> ValidationError {
    return ValidationError("matrix file '" + path + "': " + what);
  };

  std::string line;
  if (!std::getline(in, line)) throw fail("missing metric line");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto head = split(line, ',');
  if (head.size() != 2 || head[0] != "metric") throw fail("bad metric line");
  const MetricKind kind = metric_from_name(head[1]);

  if (!std::getline(in, line)) throw fail("missing header line");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto cols = split(line, ',');
  if (cols.size() < 2 || cols[0] != "id") throw fail("bad header line");
  std::vector<std::string> ids(cols.begin() + 1, cols.end());

  DistanceMatrix matrix(ids, kind);
  const size_t n = ids.size();
  for (size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw fail("missing row " + std::to_string(i));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split(line, ',');
    if (fields.size() != n + 1) throw fail("row " + ids[i] + " has wrong arity");
    if (fields[0] != ids[i]) throw fail("row order differs from header");
    for (size_t j = 0; j < n; ++j) {
      char* end = nullptr;
      const double v = std::strtod(fields[j + 1].c_str(), &end);
      if (end == fields[j + 1].c_str() || *end != '\0')
        throw fail("bad value in row " + ids[i]);
      if (j < i) {
        if (matrix.at(i, j) != v) throw fail("matrix is not symmetric");
      } else {
        matrix.set(i, j, v);
      }
    }
  }
  return matrix;
}

}  // namespace factmine::similarity
