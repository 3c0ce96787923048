#include "unpast/matrix.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace unpast {

namespace {

void check_ids(const std::vector<std::string>& ids, const char* what) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(ids.size());
  for (const auto& id : ids) {
    if (id.empty()) {
      throw ValidationError(fmt::format("empty {} id", what));
    }
    if (!seen.insert(id).second) {
      throw ValidationError(fmt::format("duplicate {} id \"{}\"", what, id));
    }
  }
}

} // namespace

std::string_view to_string(Direction d) {
  switch (d) {
  case Direction::up:
    return "up";
  case Direction::down:
    return "down";
  case Direction::mixed:
    return "mixed";
  }
  return "mixed";
}

Direction parse_direction(std::string_view s) {
  if (s == "up") return Direction::up;
  if (s == "down") return Direction::down;
  if (s == "mixed") return Direction::mixed;
  throw ParseError(fmt::format("unknown direction \"{}\"", s));
}

std::size_t intersection_size(const IndexSet& a, const IndexSet& b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

IndexSet complement(const IndexSet& a, std::size_t n) {
  IndexSet out;
  out.reserve(n - std::min(n, a.size()));
  auto it = a.begin();
  for (std::size_t i = 0; i < n; ++i) {
    if (it != a.end() && *it == i) {
      ++it;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

double jaccard(const IndexSet& a, const IndexSet& b) {
  const std::size_t inter = intersection_size(a, b);
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

ExpressionMatrix::ExpressionMatrix(std::vector<std::string> feature_ids,
                                   std::vector<std::string> sample_ids,
                                   std::vector<double> values)
    : feature_ids_(std::move(feature_ids)),
      sample_ids_(std::move(sample_ids)),
      values_(std::move(values)) {
  check_ids(feature_ids_, "feature");
  check_ids(sample_ids_, "sample");
  if (values_.size() != feature_ids_.size() * sample_ids_.size()) {
    throw ValidationError(fmt::format(
        "matrix has {} values, expected {} features x {} samples",
        values_.size(), feature_ids_.size(), sample_ids_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      const std::size_t f = i / sample_ids_.size();
      const std::size_t s = i % sample_ids_.size();
      throw ValidationError(fmt::format("non-finite value at feature \"{}\", sample \"{}\"",
                                        feature_ids_[f], sample_ids_[s]));
    }
  }
}

ExpressionMatrix ExpressionMatrix::select_samples(std::span<const std::size_t> order) const {
  std::vector<std::string> ids;
  ids.reserve(order.size());
  for (auto s : order) ids.push_back(sample_ids_.at(s));
  std::vector<double> v;
  v.reserve(n_features() * order.size());
  for (std::size_t f = 0; f < n_features(); ++f) {
    for (auto s : order) v.push_back((*this)(f, s));
  }
  return {feature_ids_, std::move(ids), std::move(v)};
}

ExpressionMatrix ExpressionMatrix::select_features(std::span<const std::size_t> order) const {
  std::vector<std::string> ids;
  ids.reserve(order.size());
  std::vector<double> v;
  v.reserve(order.size() * n_samples());
  for (auto f : order) {
    ids.push_back(feature_ids_.at(f));
    auto r = row(f);
    v.insert(v.end(), r.begin(), r.end());
  }
  return {std::move(ids), sample_ids_, std::move(v)};
}

MeanStd population_stats(std::span<const double> values) {
  if (values.empty()) return {};
  double sum = 0.0;
  for (double x : values) sum += x;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double x : values) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

StandardizedMatrix zscore_rows(const ExpressionMatrix& m) {
  std::vector<double> out(m.values().size(), 0.0);
  const std::size_t n = m.n_samples();
  for (std::size_t f = 0; f < m.n_features(); ++f) {
    auto r = m.row(f);
    const auto [mean, sd] = population_stats(r);
    // Rows whose spread is at rounding level are treated as constant.
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) continue;
    for (std::size_t s = 0; s < n; ++s) {
      out[f * n + s] = (r[s] - mean) / sd;
    }
  }
  return StandardizedMatrix(ExpressionMatrix(m.feature_ids(), m.sample_ids(), std::move(out)));
}

} // namespace unpast
