#pragma once

#include "unpast/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace unpast {

/// Tail probabilities of Fisher's exact test on the 2x2 table [[a, b], [c, d]].
///
/// `left` is P(X <= a), `right` is P(X >= a) under the hypergeometric null with
/// fixed margins; `two_tailed` sums all tables no more probable than the
/// observed one. The log_* members carry the same quantities in natural log
/// so that p-values far below the double range can still be ranked.
struct FisherResult {
  double left = 1.0;
  double right = 1.0;
  double two_tailed = 1.0;
  double log_left = 0.0;
  double log_right = 0.0;
  double log_two_tailed = 0.0;
};

FisherResult fisher_exact(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);

/// Pearson chi-squared statistic (no continuity correction) on a 2x2 table.
/// Returns 0 when any margin is empty.
double chi2_statistic(double a, double b, double c, double d);

/// p-value of the 1-df chi-squared test; 1 when any margin is empty.
double chi2_2x2(double a, double b, double c, double d);

enum class Adjustment { bh, bonferroni };

std::vector<double> adjust(std::span<const double> pvalues, Adjustment method);

/// Adjusted Rand index between the bipartitions {A, S\A} and {B, S\B} of a
/// universe of n items. Throws std::invalid_argument if either set is empty
/// or covers the whole universe.
double ari_bipartition(const IndexSet& a, const IndexSet& b, std::size_t n);

struct WelchResult {
  double statistic = 0.0;
  double df = 0.0;
  double pvalue = 1.0;
};

/// Two-sided Welch two-sample t-test (population means differ).
WelchResult welch_t_test(std::span<const double> x, std::span<const double> y);

} // namespace unpast
