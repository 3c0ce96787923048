#include "unpast/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace unpast {

namespace {

// Probabilities within this relative distance of the observed table count as
// "as extreme" in the two-tailed sum; absorbs rounding in the recurrences.
constexpr double kTieTolerance = 1e-7;

double log_sum_exp(std::span<const double> terms, double shift) {
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - shift);
  return shift + std::log(acc);
}

} // namespace

FisherResult fisher_exact(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  FisherResult out;
  const std::int64_t r1 = static_cast<std::int64_t>(a + b);
  const std::int64_t r2 = static_cast<std::int64_t>(c + d);
  const std::int64_t c1 = static_cast<std::int64_t>(a + c);
  const std::int64_t lo = std::max<std::int64_t>(0, c1 - r2);
  const std::int64_t hi = std::min(r1, c1);
  if (lo == hi) return out;

  // Log-probabilities of every table relative to x = lo, built from the
  // ratio p(x+1)/p(x); normalized afterwards so no factorials are needed.
  const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> rel(len, 0.0);
  for (std::int64_t x = lo; x < hi; ++x) {
    const double num = static_cast<double>(r1 - x) * static_cast<double>(c1 - x);
    const double den = static_cast<double>(x + 1) * static_cast<double>(r2 - c1 + x + 1);
    rel[static_cast<std::size_t>(x - lo + 1)] = rel[static_cast<std::size_t>(x - lo)] + std::log(num / den);
  }
  const double peak = *std::max_element(rel.begin(), rel.end());
  const double log_total = log_sum_exp(rel, peak);

  const std::size_t obs = static_cast<std::size_t>(static_cast<std::int64_t>(a) - lo);
  std::span<const double> all(rel);
  // Left tail's largest term is the one closest to the mode: either obs or the peak.
  const double left_shift = *std::max_element(rel.begin(), rel.begin() + static_cast<std::ptrdiff_t>(obs) + 1);
  const double right_shift = *std::max_element(rel.begin() + static_cast<std::ptrdiff_t>(obs), rel.end());
  out.log_left = std::min(0.0, log_sum_exp(all.subspan(0, obs + 1), left_shift) - log_total);
  out.log_right = std::min(0.0, log_sum_exp(all.subspan(obs), right_shift) - log_total);

  const double cutoff = rel[obs] + std::log1p(kTieTolerance);
  std::vector<double> extreme;
  extreme.reserve(len);
  for (double r : rel) {
    if (r <= cutoff) extreme.push_back(r);
  }
  out.log_two_tailed = std::min(0.0, log_sum_exp(extreme, rel[obs]) - log_total);

  out.left = std::exp(out.log_left);
  out.right = std::exp(out.log_right);
  out.two_tailed = std::exp(out.log_two_tailed);
  return out;
}

double chi2_statistic(double a, double b, double c, double d) {
  const double r1 = a + b;
  const double r2 = c + d;
  const double c1 = a + c;
  const double c2 = b + d;
  if (r1 <= 0 || r2 <= 0 || c1 <= 0 || c2 <= 0) return 0.0;
  const double n = r1 + r2;
  // Expressed through ratios so that grids of ~1e8 cells do not overflow.
  const double diff = a * d - b * c;
  return n * (diff / r1) * (diff / r2) / c1 / c2;
}

double chi2_2x2(double a, double b, double c, double d) {
  if (a + b <= 0 || c + d <= 0 || a + c <= 0 || b + d <= 0) return 1.0;
  const double stat = chi2_statistic(a, b, c, d);
  return std::erfc(std::sqrt(stat / 2.0));
}

std::vector<double> adjust(std::span<const double> pvalues, Adjustment method) {
  const std::size_t m = pvalues.size();
  std::vector<double> out(m);
  if (m == 0) return out;
  const double dm = static_cast<double>(m);
  if (method == Adjustment::bonferroni) {
    for (std::size_t i = 0; i < m; ++i) out[i] = std::min(1.0, pvalues[i] * dm);
    return out;
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return pvalues[x] < pvalues[y]; });
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    const std::size_t i = order[r];
    running = std::min(running, pvalues[i] * dm / static_cast<double>(r + 1));
    out[i] = running;
  }
  return out;
}

double ari_bipartition(const IndexSet& a, const IndexSet& b, std::size_t n) {
  if (a.empty() || b.empty() || a.size() >= n || b.size() >= n) {
    throw std::invalid_argument("ari_bipartition: sets must be non-empty proper subsets");
  }
  const auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
  const double n11 = static_cast<double>(intersection_size(a, b));
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double dn = static_cast<double>(n);
  const double n10 = na - n11;
  const double n01 = nb - n11;
  const double n00 = dn - na - nb + n11;
  const double index = pairs(n11) + pairs(n10) + pairs(n01) + pairs(n00);
  const double sum_a = pairs(na) + pairs(dn - na);
  const double sum_b = pairs(nb) + pairs(dn - nb);
  const double expected = sum_a * sum_b / pairs(dn);
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

WelchResult welch_t_test(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2 || y.size() < 2) {
    throw std::invalid_argument("welch_t_test: each group needs at least two values");
  }
  const auto moments = [](std::span<const double> v) {
    double mean = 0.0;
    for (double e : v) mean += e;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double e : v) ss += (e - mean) * (e - mean);
    return std::pair{mean, ss / static_cast<double>(v.size() - 1)};
  };
  const auto [mx, vx] = moments(x);
  const auto [my, vy] = moments(y);
  const double sx = vx / static_cast<double>(x.size());
  const double sy = vy / static_cast<double>(y.size());
  const double se2 = sx + sy;
  WelchResult out;
  if (se2 <= 0.0) {
    out.statistic = mx == my ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), mx - my);
    out.df = static_cast<double>(x.size() + y.size() - 2);
    out.pvalue = mx == my ? 1.0 : 0.0;
    return out;
  }
  out.statistic = (mx - my) / std::sqrt(se2);
  out.df = se2 * se2 /
           (sx * sx / static_cast<double>(x.size() - 1) + sy * sy / static_cast<double>(y.size() - 1));
  boost::math::students_t dist(out.df);
  out.pvalue = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.statistic))));
  return out;
}

} // namespace unpast
