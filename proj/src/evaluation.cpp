#include "unpast/evaluation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace unpast {

void validate(const GroundTruth& truth) {
  if (truth.members.empty()) throw std::invalid_argument("ground truth has no sets");
  if (truth.names.size() != truth.members.size()) {
    throw std::invalid_argument("ground truth names and sets differ in length");
  }
  for (std::size_t i = 0; i < truth.members.size(); ++i) {
    const auto& s = truth.members[i];
    if (s.empty()) throw std::invalid_argument(fmt::format("truth set \"{}\" is empty", truth.names[i]));
    if (s.back() >= truth.n_samples) {
      throw std::invalid_argument(fmt::format("truth set \"{}\" leaves the universe", truth.names[i]));
    }
  }
}

PerformanceReport best_match_performance(const GroundTruth& truth,
                                         std::span<const IndexSet> predicted,
                                         std::size_t n_samples, double alpha) {
  validate(truth);
  const std::size_t m = truth.members.size();
  const std::size_t k = predicted.size();
  const double dn = static_cast<double>(n_samples);
  PerformanceReport report;
  report.pairs.resize(m * k);

  // Step 1: Fisher tests with inversion of under-represented predictions.
  std::vector<double> raw(m * k);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& t = truth.members[i];
    for (std::size_t j = 0; j < k; ++j) {
      const auto& p = predicted[j];
      if (p.empty() || p.back() >= n_samples) {
        throw std::invalid_argument(fmt::format("predicted set {} is empty or leaves the universe", j));
      }
      const std::uint64_t a = intersection_size(t, p);
      const std::uint64_t b = t.size() - a;
      const std::uint64_t c = p.size() - a;
      const std::uint64_t d = n_samples - a - b - c;
      const auto fr = fisher_exact(a, b, c, d);
      auto& pm = report.pairs[i * k + j];
      pm.truth = i;
      pm.predicted = j;
      pm.inverted = fr.right > fr.left;
      pm.pvalue = fr.two_tailed;
      pm.log_pvalue = fr.log_two_tailed;
      // ARI of bipartitions is unchanged by complementing the prediction.
      pm.ari = (p.size() < n_samples) ? ari_bipartition(t, p, n_samples) : 0.0;
      raw[i * k + j] = fr.two_tailed;
    }
  }
  const auto adjusted = adjust(raw, Adjustment::bonferroni);
  for (std::size_t x = 0; x < raw.size(); ++x) report.pairs[x].adjusted_pvalue = adjusted[x];

  // Step 2: each prediction competes only for the truth it matches best.
  for (std::size_t j = 0; j < k; ++j) {
    // Ties within rounding prefer a direct over a complemented match, so a
    // set and its complement pair up with their own counterparts.
    std::size_t best = 0;
    double best_log = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const auto& pm = report.pairs[i * k + j];
      const double tol = 1e-12 * std::max(1.0, std::abs(pm.log_pvalue));
      const bool tie = std::abs(pm.log_pvalue - best_log) <= tol;
      if ((!tie && pm.log_pvalue < best_log) || (tie && report.pairs[best * k + j].inverted && !pm.inverted)) {
        best_log = pm.log_pvalue;
        best = i;
      }
    }
    if (m > 0) report.pairs[best * k + j].candidate = true;
  }

  // Step 3: highest ARI among significant candidates.
  double weight_sum = 0.0;
  for (const auto& t : truth.members) weight_sum += static_cast<double>(t.size());
  for (std::size_t i = 0; i < m; ++i) {
    TruthMatch tm;
    tm.name = truth.names[i];
    tm.weight = static_cast<double>(truth.members[i].size()) / weight_sum;
    for (std::size_t j = 0; j < k; ++j) {
      const auto& pm = report.pairs[i * k + j];
      if (!pm.candidate || !(pm.adjusted_pvalue < alpha)) continue;
      if (!tm.best_match || pm.ari > tm.ari || (pm.ari == tm.ari && tm.inverted && !pm.inverted)) {
        tm.best_match = j;
        tm.ari = pm.ari;
        tm.adjusted_pvalue = pm.adjusted_pvalue;
        tm.inverted = pm.inverted;
      }
    }
    if (tm.best_match) report.total += tm.ari * tm.weight;
    report.truths.push_back(std::move(tm));
  }
  (void)dn;
  return report;
}

RedundancyReport fsp(std::span<const Bicluster> biclusters, std::size_t n_features,
                     std::size_t n_samples, double alpha) {
  const std::size_t b = biclusters.size();
  if (b < 2) throw std::invalid_argument("fsp needs at least two biclusters");
  const double cells = static_cast<double>(n_features) * static_cast<double>(n_samples);
  RedundancyReport report;
  std::vector<double> raw;
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = i + 1; j < b; ++j) {
      const auto& x = biclusters[i];
      const auto& y = biclusters[j];
      const double size_x = static_cast<double>(x.features.size() * x.samples.size());
      const double size_y = static_cast<double>(y.features.size() * y.samples.size());
      const double shared = static_cast<double>(intersection_size(x.features, y.features)) *
                            static_cast<double>(intersection_size(x.samples, y.samples));
      RedundancyPair rp;
      rp.first = i;
      rp.second = j;
      const double uni = size_x + size_y - shared;
      rp.jaccard = uni > 0.0 ? shared / uni : 0.0;
      const double a = shared;
      const double bb = size_x - shared;
      const double c = size_y - shared;
      const double d = cells - uni;
      rp.statistic = chi2_statistic(a, bb, c, d);
      rp.pvalue = chi2_2x2(a, bb, c, d);
      // Only overlap above chance expectation counts as similarity.
      rp.significant = a * cells > size_x * size_y;
      raw.push_back(rp.pvalue);
      report.pairs.push_back(rp);
    }
  }
  const auto adjusted = adjust(raw, Adjustment::bonferroni);
  std::size_t n_sig = 0;
  for (std::size_t p = 0; p < report.pairs.size(); ++p) {
    auto& rp = report.pairs[p];
    rp.adjusted_pvalue = adjusted[p];
    rp.significant = rp.significant && adjusted[p] < alpha;
    if (rp.significant) ++n_sig;
  }
  report.fsp = static_cast<double>(n_sig) / static_cast<double>(report.pairs.size());
  return report;
}

} // namespace unpast
