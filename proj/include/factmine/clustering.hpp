#pragma once

#include <string>
#include <vector>

#include "factmine/similarity.hpp"

namespace factmine::clustering {

struct ClusteringConfig {
  int min_pts = 5;
  double eps_lo = 1.0;
  double eps_hi = 2.0;
  double eps_step = 0.01;
  int max_rounds = 10;

  // min_pts >= 2, eps_step > 0, lo <= hi, and lo >= 1 under the
  // offset_normalized metric (identical sets sit at distance 1).
  void validate(similarity::MetricKind kind) const;
};

struct DbscanResult {
  std::vector<std::vector<int>> clusters;  // discovery order, members ascending
  std::vector<int> noise;                  // ascending
};

// Density clustering over the precomputed matrix. A point is core iff its
// closed eps-neighborhood (the point always counts itself) holds at least
// min_pts points; border points joining several clusters go to the cluster
// discovered first in ascending index order.
DbscanResult dbscan(const similarity::DistanceMatrix& matrix, double eps,
                    int min_pts);

// Same, restricted to `subset` (global matrix indices, ascending).
DbscanResult dbscan_subset(const similarity::DistanceMatrix& matrix,
                           const std::vector<int>& subset, double eps,
                           int min_pts);

struct CurvePoint {
  double eps = 0.0;
  int cluster_count = 0;
};

struct SweepResult {
  double eps = 0.0;       // argmax of cluster count, smallest eps on ties
  int cluster_count = 0;  // count at the chosen eps
  std::vector<CurvePoint> curve;
};

SweepResult sweep_epsilon(const similarity::DistanceMatrix& matrix,
                          double eps_lo, double eps_hi, double eps_step,
                          int min_pts);
SweepResult sweep_epsilon_subset(const similarity::DistanceMatrix& matrix,
                                 const std::vector<int>& subset, double eps_lo,
                                 double eps_hi, double eps_step, int min_pts);

// True iff the cluster holds a fully disjoint pair: raw Levenshtein equal
// to the longer length, i.e. no aligned character survives. Signals an
// over-wide eps and stops the multi-density loop.
bool terminal_check(const std::vector<int>& cluster,
                    const std::vector<std::string>& rendered);

struct ClusterRound {
  int round = 0;  // 1-based
  double eps = 0.0;
  std::vector<std::vector<int>> clusters;
  std::vector<int> noise;  // this round's input left unclustered
  std::vector<CurvePoint> curve;
};

struct ClusteringResult {
  std::vector<ClusterRound> rounds;  // eps strictly increasing
  std::vector<int> unclustered;      // remaining after termination
  bool terminated_by_rule = false;
};

// Repeated DBSCAN over the residual points: sweep eps (the next round's
// sweep starts at the previous round's choice), cluster, remove clustered
// ids, until the terminal rule fires (that round's clusters are kept), no
// new cluster forms, or max_rounds is reached.
ClusteringResult cluster_multi_density(const similarity::DistanceMatrix& matrix,
                                       const std::vector<std::string>& rendered,
                                       const ClusteringConfig& config);

void write_rounds_json(const ClusteringResult& result,
                       const similarity::DistanceMatrix& matrix,
                       const ClusteringConfig& config, const std::string& path);

// Rebuilds a result against `ids` (the candidate-set ids backing the run).
ClusteringResult read_rounds_json(const std::string& path,
                                  const std::vector<std::string>& ids);

// Per-round (eps, cluster count) sweep curves as CSV.
void write_curve_csv(const ClusteringResult& result, const std::string& path);

// Flat `round,cluster,id,text` CSV of every cluster member plus the
// unclustered leftovers (round -1), for human noise review; feeds the
// annotation file.
void write_review_csv(const ClusteringResult& result,
                      const std::vector<std::string>& ids,
                      const std::vector<std::string>& rendered,
                      const std::string& path);

}  // namespace factmine::clustering
