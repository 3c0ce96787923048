#include "unpast/binarization.hpp"

#include "unpast/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <set>
#include <stdexcept>

namespace unpast {

namespace {

// Sorted positions of `values` (ties broken by index so the order is total).
std::vector<std::size_t> argsort(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b] || (values[a] == values[b] && a < b);
  });
  return order;
}

TwoGroupPartition split_sorted(const std::vector<std::size_t>& order, std::size_t cut) {
  TwoGroupPartition parts;
  parts.low.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
  parts.high.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
  std::sort(parts.low.begin(), parts.low.end());
  std::sort(parts.high.begin(), parts.high.end());
  return parts;
}

// Exact 1-D 2-means: the optimal partition is a threshold, so scan every gap
// between distinct sorted values and keep the one with the smallest
// within-cluster sum of squares.
std::optional<TwoGroupPartition> two_means(std::span<const double> values,
                                           const std::vector<std::size_t>& order) {
  const std::size_t n = values.size();
  std::vector<double> prefix(n + 1, 0.0);
  // Centering keeps the sum-of-squares formula numerically benign.
  double center = 0.0;
  for (double v : values) center += v;
  center /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + (values[order[i]] - center);
  const double total = prefix[n];

  std::size_t best_cut = 0;
  double best_gain = -1.0;
  for (std::size_t cut = 1; cut < n; ++cut) {
    if (!(values[order[cut - 1]] < values[order[cut]])) continue;
    const double sl = prefix[cut];
    const double sh = total - sl;
    // SSE = sum x^2 - sl^2/nl - sh^2/nh, so maximize the subtracted part.
    const double gain = sl * sl / static_cast<double>(cut) + sh * sh / static_cast<double>(n - cut);
    if (gain > best_gain) {
      best_gain = gain;
      best_cut = cut;
    }
  }
  if (best_cut == 0) return std::nullopt;
  return split_sorted(order, best_cut);
}

// Agglomerative Ward clustering of 1-D data cut at two clusters. In one
// dimension the cheapest Ward merge is always between neighbouring intervals
// of the sorted values, so only adjacent pairs are kept in the queue.
std::optional<TwoGroupPartition> ward(std::span<const double> values,
                                      const std::vector<std::size_t>& order) {
  const std::size_t n = values.size();
  if (values[order.front()] == values[order.back()]) return std::nullopt;

  // Clusters are identified by the sorted position of their first element.
  std::vector<std::size_t> size(n, 1), next(n), prev(n);
  std::vector<double> mean(n);
  std::vector<bool> alive(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    mean[i] = values[order[i]];
    next[i] = i + 1;
    prev[i] = i == 0 ? n : i - 1;
  }
  const auto cost = [&](std::size_t l, std::size_t r) {
    const double nl = static_cast<double>(size[l]);
    const double nr = static_cast<double>(size[r]);
    const double d = mean[l] - mean[r];
    return nl * nr / (nl + nr) * d * d;
  };
  std::set<std::pair<double, std::size_t>> queue;
  std::vector<double> pair_cost(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    pair_cost[i] = cost(i, i + 1);
    queue.emplace(pair_cost[i], i);
  }

  std::size_t clusters = n;
  while (clusters > 2) {
    const auto [c, left] = *queue.begin();
    queue.erase(queue.begin());
    const std::size_t right = next[left];
    if (next[right] < n) queue.erase({pair_cost[right], right});
    if (prev[left] < n) queue.erase({pair_cost[prev[left]], prev[left]});

    const double nl = static_cast<double>(size[left]);
    const double nr = static_cast<double>(size[right]);
    mean[left] = (mean[left] * nl + mean[right] * nr) / (nl + nr);
    size[left] += size[right];
    alive[right] = false;
    next[left] = next[right];
    if (next[left] < n) prev[next[left]] = left;
    --clusters;

    if (next[left] < n) {
      pair_cost[left] = cost(left, next[left]);
      queue.emplace(pair_cost[left], left);
    }
    if (prev[left] < n) {
      pair_cost[prev[left]] = cost(prev[left], left);
      queue.emplace(pair_cost[prev[left]], prev[left]);
    }
  }
  // The second surviving cluster starts at the cut.
  return split_sorted(order, next[0]);
}

double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Two-component 1-D Gaussian mixture fit by EM. Means start at the 25th and
// 75th percentiles, weights at 1/2, variances at the overall variance; stops
// when the log-likelihood gains less than 1e-6 or after 300 iterations.
std::optional<TwoGroupPartition> gmm(std::span<const double> values,
                                     const std::vector<std::size_t>& order) {
  const std::size_t n = values.size();
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = values[order[i]];
  if (sorted.front() == sorted.back()) return std::nullopt;

  const auto [overall_mean, overall_sd] = population_stats(values);
  (void)overall_mean;
  const double overall_var = overall_sd * overall_sd;
  const double var_floor = std::max(1e-6 * overall_var, 1e-300);

  double mu[2] = {percentile(sorted, 0.25), percentile(sorted, 0.75)};
  if (mu[0] == mu[1]) {
    mu[0] = sorted.front();
    mu[1] = sorted.back();
  }
  double var[2] = {overall_var, overall_var};
  double w[2] = {0.5, 0.5};
  std::vector<double> resp(n);  // posterior of component 1

  constexpr double kLog2Pi = 1.8378770664093453;
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 300; ++iter) {
    double ll = 0.0;
    double base[2], half_inv[2];
    for (int c = 0; c < 2; ++c) {
      base[c] = std::log(w[c]) - 0.5 * (kLog2Pi + std::log(var[c]));
      half_inv[c] = 0.5 / var[c];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double d0 = values[i] - mu[0], d1 = values[i] - mu[1];
      const double lp0 = base[0] - d0 * d0 * half_inv[0];
      const double lp1 = base[1] - d1 * d1 * half_inv[1];
      const double diff = lp1 - lp0;
      const double e = std::exp(-std::abs(diff));
      resp[i] = diff >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
      ll += std::max(lp0, lp1) + std::log1p(e);
    }
    double r1 = 0.0, s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r1 += resp[i];
      s1 += resp[i] * values[i];
      s0 += (1.0 - resp[i]) * values[i];
    }
    const double r0 = static_cast<double>(n) - r1;
    if (r0 <= 1e-12 || r1 <= 1e-12) break;
    mu[0] = s0 / r0;
    mu[1] = s1 / r1;
    double q0 = 0.0, q1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      q0 += (1.0 - resp[i]) * (values[i] - mu[0]) * (values[i] - mu[0]);
      q1 += resp[i] * (values[i] - mu[1]) * (values[i] - mu[1]);
    }
    var[0] = std::max(q0 / r0, var_floor);
    var[1] = std::max(q1 / r1, var_floor);
    w[0] = r0 / static_cast<double>(n);
    w[1] = r1 / static_cast<double>(n);
    if (ll - prev_ll < 1e-6) break;
    prev_ll = ll;
  }

  const int high = mu[1] >= mu[0] ? 1 : 0;
  TwoGroupPartition parts;
  for (std::size_t i = 0; i < n; ++i) {
    const double p_high = high == 1 ? resp[i] : 1.0 - resp[i];
    (p_high >= 0.5 ? parts.high : parts.low).push_back(i);
  }
  if (parts.low.empty() || parts.high.empty()) {
    // Degenerate fit (one component absorbed everything): use the exact
    // 2-means threshold instead.
    return two_means(values, order);
  }
  return parts;
}

} // namespace

std::string_view to_string(BinarizationMethod m) {
  switch (m) {
  case BinarizationMethod::two_means:
    return "kmeans";
  case BinarizationMethod::ward:
    return "ward";
  case BinarizationMethod::gmm:
    return "gmm";
  }
  return "kmeans";
}

BinarizationMethod parse_binarization_method(std::string_view s) {
  if (s == "kmeans" || s == "two_means" || s == "2means") return BinarizationMethod::two_means;
  if (s == "ward") return BinarizationMethod::ward;
  if (s == "gmm") return BinarizationMethod::gmm;
  throw std::invalid_argument(fmt::format("unknown binarization method \"{}\"", s));
}

double snr(std::span<const double> values, const IndexSet& subset) {
  const std::size_t n = values.size();
  if (subset.empty() || subset.size() >= n) {
    throw std::invalid_argument("snr: subset must be non-empty and smaller than the vector");
  }
  std::vector<char> in(n, 0);
  for (auto i : subset) {
    if (i >= n) throw std::invalid_argument("snr: subset index out of range");
    in[i] = 1;
  }
  const double k_in = static_cast<double>(subset.size());
  const double k_out = static_cast<double>(n - subset.size());
  double sum_in = 0.0, sum_out = 0.0;
  for (std::size_t i = 0; i < n; ++i) (in[i] ? sum_in : sum_out) += values[i];
  const double mean_in = sum_in / k_in;
  const double mean_out = sum_out / k_out;
  double ss_in = 0.0, ss_out = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (in[i]) {
      ss_in += (values[i] - mean_in) * (values[i] - mean_in);
    } else {
      ss_out += (values[i] - mean_out) * (values[i] - mean_out);
    }
  }
  const double num = std::abs(mean_in - mean_out);
  if (num == 0.0) return 0.0;
  const double den = std::sqrt(ss_in / k_in) + std::sqrt(ss_out / k_out);
  if (den == 0.0) return kSnrCap;
  return std::min(num / den, kSnrCap);
}

std::optional<TwoGroupPartition> partition_values(std::span<const double> values,
                                                  BinarizationMethod method) {
  if (values.size() < 2) return std::nullopt;
  const auto order = argsort(values);
  if (values[order.front()] == values[order.back()]) return std::nullopt;
  switch (method) {
  case BinarizationMethod::two_means:
    return two_means(values, order);
  case BinarizationMethod::ward:
    return ward(values, order);
  case BinarizationMethod::gmm:
    return gmm(values, order);
  }
  return std::nullopt;
}

FeatureSplit choose_minority(const TwoGroupPartition& parts, std::uint64_t seed) {
  bool take_high;
  if (parts.high.size() != parts.low.size()) {
    take_high = parts.high.size() < parts.low.size();
  } else {
    Rng rng(seed);
    take_high = (rng() >> 63) != 0;
  }
  if (take_high) return {parts.high, Direction::up};
  return {parts.low, Direction::down};
}

std::optional<FeatureSplit> binarize_feature(std::span<const double> values,
                                             BinarizationMethod method, std::uint64_t seed) {
  auto parts = partition_values(values, method);
  if (!parts) return std::nullopt;
  return choose_minority(*parts, seed);
}

void validate(const BinarizationParams& p) {
  if (!(p.p_threshold > 0.0 && p.p_threshold < 1.0)) {
    throw std::invalid_argument("p_threshold must lie in (0, 1)");
  }
  if (p.min_bicluster_size < 2) {
    throw std::invalid_argument("min_bicluster_size must be at least 2");
  }
}

std::uint64_t feature_seed(std::uint64_t master_seed, std::string_view feature_id) {
  return mix_seed(master_seed, hash_string(feature_id));
}

std::vector<BinarizedFeature> binarize_all(const StandardizedMatrix& m,
                                           const BinarizationParams& params,
                                           const std::optional<std::filesystem::path>& cache_dir) {
  validate(params);
  const std::size_t n_features = m.n_features();
  const std::size_t n = m.n_samples();
  const auto& ids = m.matrix().feature_ids();

  std::vector<std::optional<BinarizedFeature>> slots(n_features);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t fi = 0; fi < static_cast<std::ptrdiff_t>(n_features); ++fi) {
    const auto f = static_cast<std::size_t>(fi);
    auto values = m.row(f);
    auto split = binarize_feature(values, params.method, feature_seed(params.master_seed, ids[f]));
    if (!split || split->minority.size() < params.min_bicluster_size) continue;
    BinarizedFeature bf;
    bf.feature_index = f;
    bf.snr = snr(values, split->minority);
    if (bf.snr <= 0.0) continue;
    bf.minority = std::move(split->minority);
    bf.direction = split->direction;
    slots[f] = std::move(bf);
  }

  std::set<std::size_t> size_set;
  for (const auto& s : slots) {
    if (s) size_set.insert(s->minority.size());
  }
  if (size_set.empty()) return {};
  const std::vector<std::size_t> sizes(size_set.begin(), size_set.end());
  const std::size_t n_draws = null_draw_count(params.p_threshold);

  std::optional<NullSnrModel> model;
  std::filesystem::path cache_file;
  if (cache_dir) {
    cache_file = *cache_dir / fmt::format("null_snr_n{}_{}_N{}_seed{}.bin", n,
                                          to_string(params.method), n_draws, params.null_seed);
    model = load_null_model(cache_file, n, params.method, n_draws, params.null_seed, sizes);
  }
  if (!model) {
    model = build_null_model(n, sizes, params.p_threshold, params.method, params.null_seed);
    if (cache_dir) {
      std::filesystem::create_directories(*cache_dir);
      save_null_model(cache_file, *model);
    }
  }

  std::vector<BinarizedFeature> out;
  for (auto& s : slots) {
    if (!s) continue;
    s->pvalue = empirical_pvalue(*model, s->minority.size(), s->snr);
    if (s->pvalue <= params.p_threshold) out.push_back(std::move(*s));
  }
  return out;
}

} // namespace unpast
