#include "factmine/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <numeric>

#include <json.hpp>

#include "factmine/error.hpp"
#include "factmine/text.hpp"

using nlohmann::json;

namespace factmine::clustering {

void ClusteringConfig::validate(similarity::MetricKind kind) const {
  if (min_pts < 2) throw ValidationError("min_pts must be at least 2");
  if (eps_step <= 0.0) throw ValidationError("eps_step must be positive");
  if (eps_lo > eps_hi)
    throw ValidationError("degenerate epsilon range: lo > hi");
  if (max_rounds < 1) throw ValidationError("max_rounds must be at least 1");
  const double floor = kind == similarity::MetricKind::offset_normalized ? 1.0 : 0.0;
  if (eps_lo < floor)
    throw ValidationError("eps_lo below the metric's lower bound");
}

DbscanResult dbscan_subset(const similarity::DistanceMatrix& matrix,
                           const std::vector<int>& subset, double eps,
                           int min_pts) {
  const size_t k = subset.size();
  std::vector<std::vector<int>> neighbors(k);
  for (size_t a = 0; a < k; ++a) {
    for (size_t b = 0; b < k; ++b) {
      if (a == b || matrix.at(subset[a], subset[b]) <= eps)
        neighbors[a].push_back(static_cast<int>(b));
    }
  }

  std::vector<char> core(k, 0);
  for (size_t a = 0; a < k; ++a)
    core[a] = neighbors[a].size() >= static_cast<size_t>(min_pts);

  constexpr int kUnassigned = -1;
  std::vector<int> label(k, kUnassigned);
  int cluster_count = 0;
  for (size_t a = 0; a < k; ++a) {
    if (!core[a] || label[a] != kUnassigned) continue;
    const int cid = cluster_count++;
    label[a] = cid;
    std::deque<int> queue{static_cast<int>(a)};
    while (!queue.empty()) {
      const int cur = queue.front();
      queue.pop_front();
      for (int b : neighbors[cur]) {
        if (label[b] != kUnassigned) continue;
        label[b] = cid;
        if (core[b]) queue.push_back(b);
      }
    }
  }

  DbscanResult result;
  result.clusters.resize(cluster_count);
  for (size_t a = 0; a < k; ++a) {
    if (label[a] == kUnassigned)
      result.noise.push_back(subset[a]);
    else
      result.clusters[label[a]].push_back(subset[a]);
  }
  return result;
}

DbscanResult dbscan(const similarity::DistanceMatrix& matrix, double eps,
                    int min_pts) {
  std::vector<int> all(matrix.size());
  std::iota(all.begin(), all.end(), 0);
  return dbscan_subset(matrix, all, eps, min_pts);
}

SweepResult sweep_epsilon_subset(const similarity::DistanceMatrix& matrix,
                                 const std::vector<int>& subset, double eps_lo,
                                 double eps_hi, double eps_step, int min_pts) {
  if (eps_lo > eps_hi)
    throw ValidationError("degenerate epsilon range: lo > hi");
  if (eps_step <= 0.0) throw ValidationError("eps_step must be positive");

  SweepResult result;
  const int steps =
      static_cast<int>(std::floor((eps_hi - eps_lo) / eps_step + 1e-9));
  result.eps = eps_lo;
  result.cluster_count = -1;
  for (int s = 0; s <= steps; ++s) {
    const double eps = eps_lo + s * eps_step;
    const auto db = dbscan_subset(matrix, subset, eps, min_pts);
    const int count = static_cast<int>(db.clusters.size());
    result.curve.push_back({eps, count});
    if (count > result.cluster_count) {
      result.cluster_count = count;
      result.eps = eps;
    }
  }
  return result;
}

SweepResult sweep_epsilon(const similarity::DistanceMatrix& matrix,
                          double eps_lo, double eps_hi, double eps_step,
                          int min_pts) {
  std::vector<int> all(matrix.size());
  std::iota(all.begin(), all.end(), 0);
  return sweep_epsilon_subset(matrix, all, eps_lo, eps_hi, eps_step, min_pts);
}

bool terminal_check(const std::vector<int>& cluster,
                    const std::vector<std::string>& rendered) {
  std::vector<std::u32string> decoded(cluster.size());
  for (size_t i = 0; i < cluster.size(); ++i)
    decoded[i] = utf8_decode(rendered[cluster[i]]);
  for (size_t i = 0; i < decoded.size(); ++i) {
    for (size_t j = i + 1; j < decoded.size(); ++j) {
      const int lev = similarity::levenshtein(decoded[i], decoded[j]);
      const size_t longest = std::max(decoded[i].size(), decoded[j].size());
      if (static_cast<size_t>(lev) == longest) return true;
    }
  }
  return false;
}

ClusteringResult cluster_multi_density(const similarity::DistanceMatrix& matrix,
                                       const std::vector<std::string>& rendered,
                                       const ClusteringConfig& config) {
  config.validate(matrix.kind());
  if (rendered.size() != matrix.size())
    throw ValidationError("rendered strings do not match the matrix");

  ClusteringResult result;
  std::vector<int> remaining(matrix.size());
  std::iota(remaining.begin(), remaining.end(), 0);

  double sweep_lo = config.eps_lo;
  while (!remaining.empty() &&
         static_cast<int>(result.rounds.size()) < config.max_rounds) {
    const auto sweep = sweep_epsilon_subset(matrix, remaining, sweep_lo,
                                            config.eps_hi, config.eps_step,
                                            config.min_pts);
    if (sweep.cluster_count <= 0) break;  // no new cluster forms

    const auto db =
        dbscan_subset(matrix, remaining, sweep.eps, config.min_pts);
    ClusterRound round;
    round.round = static_cast<int>(result.rounds.size()) + 1;
    round.eps = sweep.eps;
    round.clusters = db.clusters;
    round.noise = db.noise;
    round.curve = sweep.curve;
    result.rounds.push_back(std::move(round));

    remaining = db.noise;  // clustered ids leave the pool

    bool terminal = false;
    for (const auto& cluster : db.clusters) {
      if (terminal_check(cluster, rendered)) {
        terminal = true;
        break;
      }
    }
    if (terminal) {
      result.terminated_by_rule = true;
      break;
    }
    sweep_lo = sweep.eps;  // enforces strictly increasing eps
  }
  result.unclustered = remaining;
  return result;
}

namespace {

json ids_json(const std::vector<int>& indices,
              const std::vector<std::string>& items) {
  json arr = json::array();
  for (int i : indices) arr.push_back(items[i]);
  return arr;
}

std::vector<int> indices_of(const json& arr,
                            const std::map<std::string, int>& index_of,
                            const std::string& path) {
  std::vector<int> out;
  for (const auto& v : arr) {
    const std::string id = v.get<std::string>();
    auto it = index_of.find(id);
    if (it == index_of.end())
      throw ValidationError("clusters file '" + path + "' names unknown id '" +
                            id + "'");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

void write_rounds_json(const ClusteringResult& result,
                       const similarity::DistanceMatrix& matrix,
                       const ClusteringConfig& config, const std::string& path) {
  json j;
  j["metric"] = std::string(similarity::metric_name(matrix.kind()));
  j["min_pts"] = config.min_pts;
  j["eps_step"] = config.eps_step;
  j["terminated_by_rule"] = result.terminated_by_rule;
  json rounds = json::array();
  for (const auto& round : result.rounds) {
    json r;
    r["round"] = round.round;
    r["eps"] = round.eps;
    json curve = json::array();
    for (const auto& p : round.curve)
      curve.push_back(json::array({p.eps, p.cluster_count}));
    r["curve"] = std::move(curve);
    json clusters = json::array();
    for (const auto& cluster : round.clusters)
      clusters.push_back(ids_json(cluster, matrix.items()));
    r["clusters"] = std::move(clusters);
    r["noise"] = ids_json(round.noise, matrix.items());
    rounds.push_back(std::move(r));
  }
  j["rounds"] = std::move(rounds);
  j["unclustered"] = ids_json(result.unclustered, matrix.items());

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write clusters file '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing clusters file '" + path + "'");
}

ClusteringResult read_rounds_json(const std::string& path,
                                  const std::vector<std::string>& ids) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open clusters file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("clusters file '" + path + "': " + e.what());
  }

  std::map<std::string, int> index_of;
  for (size_t i = 0; i < ids.size(); ++i)
    index_of[ids[i]] = static_cast<int>(i);

  ClusteringResult result;
  try {
    result.terminated_by_rule = j.at("terminated_by_rule").get<bool>();
    for (const auto& r : j.at("rounds")) {
      ClusterRound round;
      round.round = r.at("round").get<int>();
      round.eps = r.at("eps").get<double>();
      for (const auto& p : r.at("curve"))
        round.curve.push_back({p.at(0).get<double>(), p.at(1).get<int>()});
      for (const auto& cluster : r.at("clusters"))
        round.clusters.push_back(indices_of(cluster, index_of, path));
      round.noise = indices_of(r.at("noise"), index_of, path);
      result.rounds.push_back(std::move(round));
    }
    result.unclustered = indices_of(j.at("unclustered"), index_of, path);
  } catch (const json::exception& e) {
    throw ValidationError("clusters file '" + path + "': " + e.what());
  }
  return result;
}

void write_curve_csv(const ClusteringResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write curve file '" + path + "'");
  out << "round,eps,clusters\n";
  char buf[32];
  for (const auto& round : result.rounds) {
    for (const auto& p : round.curve) {
      std::snprintf(buf, sizeof(buf), "%.12g", p.eps);
      out << round.round << ',' << buf << ',' << p.cluster_count << '\n';
    }
  }
  if (!out) throw IoError("failed writing curve file '" + path + "'");
}

}  // namespace factmine::clustering
