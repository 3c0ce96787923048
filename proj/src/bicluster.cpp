#include "unpast/bicluster.hpp"

#include "unpast/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace unpast {

namespace {

double mean_difference(std::span<const double> row, const IndexSet& samples) {
  double in = 0.0, all = 0.0;
  for (double v : row) all += v;
  for (auto s : samples) in += row[s];
  const double k = static_cast<double>(samples.size());
  const double rest = static_cast<double>(row.size()) - k;
  return in / k - (all - in) / rest;
}

} // namespace

void finalize_bicluster(const ExpressionMatrix& m, Bicluster& b) {
  std::vector<int> dirs;
  dirs.reserve(b.features.size());
  double snr_sum = 0.0;
  for (auto f : b.features) {
    auto row = m.row(f);
    dirs.push_back(mean_difference(row, b.samples) < 0.0 ? -1 : 1);
    snr_sum += snr(row, b.samples);
  }
  b.snr = b.features.empty() ? 0.0 : snr_sum / static_cast<double>(b.features.size());
  const bool all_up = std::all_of(dirs.begin(), dirs.end(), [](int d) { return d > 0; });
  const bool all_down = std::all_of(dirs.begin(), dirs.end(), [](int d) { return d < 0; });
  if (all_up || all_down) {
    b.direction = all_up ? Direction::up : Direction::down;
    b.signs.assign(b.features.size(), 1);
  } else {
    b.direction = Direction::mixed;
    b.signs = std::move(dirs);
  }
}

void check_bicluster_invariants(const ExpressionMatrix& m, const Bicluster& b,
                                std::size_t min_bicluster_size) {
  const auto fail = [](const std::string& what) { throw std::logic_error("bicluster invariant: " + what); };
  if (b.features.size() < 2) fail("fewer than two features");
  if (b.signs.size() != b.features.size()) fail("signs not parallel to features");
  if (!std::is_sorted(b.features.begin(), b.features.end()) ||
      std::adjacent_find(b.features.begin(), b.features.end()) != b.features.end()) {
    fail("features not sorted/unique");
  }
  if (!std::is_sorted(b.samples.begin(), b.samples.end()) ||
      std::adjacent_find(b.samples.begin(), b.samples.end()) != b.samples.end()) {
    fail("samples not sorted/unique");
  }
  if (b.samples.size() < min_bicluster_size || 2 * b.samples.size() > m.n_samples()) {
    fail(fmt::format("sample count {} outside [{}, {}]", b.samples.size(), min_bicluster_size,
                     m.n_samples() / 2));
  }
  double snr_sum = 0.0;
  bool all_positive = true;
  for (std::size_t i = 0; i < b.features.size(); ++i) {
    auto row = m.row(b.features[i]);
    snr_sum += snr(row, b.samples);
    all_positive = all_positive && b.signs[i] == 1;
    const double diff = mean_difference(row, b.samples);
    if (b.direction == Direction::up && diff < 0.0) fail("up bicluster has a lower feature");
    if (b.direction == Direction::down && diff > 0.0) fail("down bicluster has a higher feature");
    if (b.direction == Direction::mixed && diff * b.signs[i] < 0.0) fail("mixed sign disagrees with data");
  }
  const double expected = snr_sum / static_cast<double>(b.features.size());
  if (std::abs(expected - b.snr) > 1e-9 * std::max(1.0, expected)) {
    fail(fmt::format("snr {} differs from recomputed {}", b.snr, expected));
  }
  if ((b.direction != Direction::mixed) != all_positive) fail("signs inconsistent with direction");
}

std::vector<double> module_projection(const StandardizedMatrix& m,
                                      std::span<const std::size_t> features,
                                      std::span<const int> signs) {
  std::vector<double> proj(m.n_samples(), 0.0);
  for (std::size_t i = 0; i < features.size(); ++i) {
    auto row = m.row(features[i]);
    const double s = signs[i] < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < proj.size(); ++j) proj[j] += s * row[j];
  }
  const double k = static_cast<double>(features.size());
  for (auto& v : proj) v /= k;
  return proj;
}

std::optional<Bicluster> assemble_bicluster(const StandardizedMatrix& m,
                                            std::span<const std::size_t> features,
                                            std::span<const int> signs, BinarizationMethod method,
                                            std::size_t min_bicluster_size, std::uint64_t seed) {
  if (features.size() < 2 || signs.size() != features.size()) return std::nullopt;
  const auto proj = module_projection(m, features, signs);
  auto split = binarize_feature(proj, method, seed);
  if (!split || split->minority.size() < min_bicluster_size) return std::nullopt;

  Bicluster b;
  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto c) { return features[a] < features[c]; });
  for (auto i : order) b.features.push_back(features[i]);
  b.samples = std::move(split->minority);
  finalize_bicluster(m.matrix(), b);
  return b;
}

std::optional<Bicluster> assemble_bicluster(const StandardizedMatrix& m, const FeatureModule& module,
                                            std::span<const BinarizedFeature> features,
                                            BinarizationMethod method,
                                            std::size_t min_bicluster_size, std::uint64_t seed) {
  std::vector<std::size_t> rows;
  rows.reserve(module.members.size());
  for (auto pos : module.members) rows.push_back(features[pos].feature_index);
  return assemble_bicluster(m, rows, module.signs, method, min_bicluster_size, seed);
}

std::optional<Bicluster> de_verify(const ExpressionMatrix& m, const Bicluster& b, double lfc_min,
                                   double p_max) {
  const IndexSet background = complement(b.samples, m.n_samples());
  std::vector<double> pvalues, lfcs;
  std::vector<double> x(b.samples.size()), y(background.size());
  for (auto f : b.features) {
    auto row = m.row(f);
    for (std::size_t i = 0; i < b.samples.size(); ++i) x[i] = row[b.samples[i]];
    for (std::size_t i = 0; i < background.size(); ++i) y[i] = row[background[i]];
    const auto t = welch_t_test(x, y);
    pvalues.push_back(t.pvalue);
    lfcs.push_back(mean_difference(row, b.samples));
  }
  const auto adjusted = adjust(pvalues, Adjustment::bh);

  Bicluster out;
  out.samples = b.samples;
  for (std::size_t i = 0; i < b.features.size(); ++i) {
    if (std::abs(lfcs[i]) >= lfc_min && adjusted[i] <= p_max) {
      out.features.push_back(b.features[i]);
      out.feature_stats.push_back({b.features[i], lfcs[i], adjusted[i]});
    }
  }
  if (out.features.size() < 2) return std::nullopt;
  finalize_bicluster(m, out);
  return out;
}

std::vector<std::size_t> bicluster_order(std::span<const Bicluster> biclusters,
                                         const ExpressionMatrix& m) {
  const auto& ids = m.feature_ids();
  std::vector<std::string_view> anchor;
  anchor.reserve(biclusters.size());
  for (const auto& b : biclusters) {
    std::string_view a = ids[b.features.front()];
    for (auto f : b.features) a = std::min<std::string_view>(a, ids[f]);
    anchor.push_back(a);
  }
  std::vector<std::size_t> order(biclusters.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (biclusters[x].snr != biclusters[y].snr) return biclusters[x].snr > biclusters[y].snr;
    return anchor[x] < anchor[y];
  });
  return order;
}

void sort_biclusters(std::vector<Bicluster>& biclusters, const ExpressionMatrix& m) {
  const auto order = bicluster_order(biclusters, m);
  std::vector<Bicluster> sorted;
  sorted.reserve(biclusters.size());
  for (auto i : order) sorted.push_back(std::move(biclusters[i]));
  biclusters = std::move(sorted);
}

} // namespace unpast
