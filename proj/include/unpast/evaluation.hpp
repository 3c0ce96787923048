#pragma once

#include "unpast/bicluster.hpp"
#include "unpast/stats.hpp"
#include "unpast/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace unpast {

/// Known, possibly overlapping sample sets over a universe of n samples.
struct GroundTruth {
  std::vector<std::string> names;
  std::vector<IndexSet> members;
  std::size_t n_samples = 0;
};

void validate(const GroundTruth& truth);

/// Statistics of one (truth, predicted) comparison.
struct PairMatch {
  std::size_t truth = 0;
  std::size_t predicted = 0;
  bool inverted = false;      // predicted set replaced by its complement
  double pvalue = 1.0;        // two-tailed Fisher
  double log_pvalue = 0.0;
  double adjusted_pvalue = 1.0;
  double ari = 0.0;
  bool candidate = false;     // predicted set's lowest p is against this truth
};

struct TruthMatch {
  std::string name;
  std::optional<std::size_t> best_match;
  bool inverted = false;
  double adjusted_pvalue = 1.0;
  double ari = 0.0;
  double weight = 0.0;
};

struct PerformanceReport {
  std::vector<TruthMatch> truths;
  std::vector<PairMatch> pairs;  // truth-major order
  double total = 0.0;
};

/// Weighted sum of ARIs between each truth set and its statistically
/// significant best-matching predicted set:
///  1. Fisher test for every (truth, predicted) pair; a predicted set that is
///     under-represented in the truth set is complemented; Bonferroni over all
///     pairs.
///  2. A predicted set is a candidate only for the truth set where its
///     p-value is lowest.
///  3. Among candidates with adjusted p < alpha, the highest ARI wins.
/// Ties in steps 2 and 3 prefer a direct over a complemented match.
/// Weights are |truth_i| / sum_k |truth_k|; unmatched truths contribute 0.
PerformanceReport best_match_performance(const GroundTruth& truth,
                                         std::span<const IndexSet> predicted,
                                         std::size_t n_samples, double alpha = 0.05);

struct RedundancyPair {
  std::size_t first = 0;
  std::size_t second = 0;
  double jaccard = 0.0;  // over (feature, sample) cells
  double statistic = 0.0;
  double pvalue = 1.0;
  double adjusted_pvalue = 1.0;
  bool significant = false;
};

struct RedundancyReport {
  double fsp = 0.0;
  std::vector<RedundancyPair> pairs;
};

/// Fraction of bicluster pairs whose cell overlap is significant (chi-squared
/// on the cell-membership 2x2 table, Bonferroni over all pairs, positive
/// association only). Throws std::invalid_argument for fewer than two biclusters.
RedundancyReport fsp(std::span<const Bicluster> biclusters, std::size_t n_features,
                     std::size_t n_samples, double alpha = 0.05);

} // namespace unpast
