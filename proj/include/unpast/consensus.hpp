#pragma once

#include "unpast/bicluster.hpp"
#include "unpast/binarization.hpp"
#include "unpast/matrix.hpp"

#include <span>
#include <utility>
#include <vector>

namespace unpast {

struct MatchedPair {
  std::size_t first = 0;   // index in run A
  std::size_t second = 0;  // index in run B
  double adjusted_pvalue = 1.0;
  double ari = 0.0;
  double jaccard = 0.0;  // sample sets, after inversion when the match was inverted
};

/// Significant best matches between two runs' sample sets, with run A in the
/// role of the ground truth (see best_match_performance). Exact ties go to
/// the pair with the larger feature-set Jaccard.
std::vector<MatchedPair> match_bicluster_sets(std::span<const Bicluster> run_a,
                                              std::span<const Bicluster> run_b,
                                              std::size_t n_samples, double alpha = 0.05);

struct ConsensusParams {
  double j_min = 0.3;
  double j_max = 0.9;
  double cutoff_step = 0.05;
  double min_frequency = 1.0 / 3.0;
  double resolution = 1.0;
  double alpha = 0.05;
  BinarizationMethod method = BinarizationMethod::two_means;
  std::size_t min_bicluster_size = 5;
  std::uint64_t seed = 0;
};

struct BiclusterRef {
  std::size_t run = 0;
  std::size_t index = 0;
};

struct ConsensusResult {
  std::vector<Bicluster> biclusters;
  /// Parallel to biclusters: the run biclusters that formed each one.
  std::vector<std::vector<BiclusterRef>> groups;
  std::vector<double> cutoffs;
  /// Number of groups with at least two biclusters at each cutoff.
  std::vector<std::size_t> group_counts;
  double selected_cutoff = 0.0;
};

/// Elbow of a non-increasing count curve: the interior point with the largest
/// discrete second difference (ties to the lowest index). Returns 0 when fewer
/// than three points exist.
std::size_t elbow_index(std::span<const std::size_t> counts);

/// Combines biclusters of n >= 2 seeded runs: pairwise best matching, Louvain
/// grouping of the matched-Jaccard graph at an elbow-selected cutoff, feature
/// frequency filtering, and a fresh subspace split of the samples.
ConsensusResult consensus_biclusters(const std::vector<std::vector<Bicluster>>& runs,
                                     const ExpressionMatrix& m, const ConsensusParams& params);

} // namespace unpast
