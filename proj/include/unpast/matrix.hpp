#pragma once

#include "unpast/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace unpast {

/// Dense features x samples matrix with named rows and columns.
///
/// Values are stored row-major so that a feature's profile is a contiguous
/// span. The constructor validates ids (unique, non-empty), the shape, and
/// that every value is finite; the object is immutable afterwards.
class ExpressionMatrix {
public:
  ExpressionMatrix() = default;
  ExpressionMatrix(std::vector<std::string> feature_ids,
                   std::vector<std::string> sample_ids,
                   std::vector<double> values);

  std::size_t n_features() const { return feature_ids_.size(); }
  std::size_t n_samples() const { return sample_ids_.size(); }

  const std::vector<std::string>& feature_ids() const { return feature_ids_; }
  const std::vector<std::string>& sample_ids() const { return sample_ids_; }
  const std::vector<double>& values() const { return values_; }

  std::span<const double> row(std::size_t feature) const {
    return {values_.data() + feature * n_samples(), n_samples()};
  }
  double operator()(std::size_t feature, std::size_t sample) const {
    return values_[feature * n_samples() + sample];
  }

  /// New matrix with columns reordered: column j of the result is column
  /// order[j] of this one.
  ExpressionMatrix select_samples(std::span<const std::size_t> order) const;
  ExpressionMatrix select_features(std::span<const std::size_t> order) const;

private:
  std::vector<std::string> feature_ids_;
  std::vector<std::string> sample_ids_;
  std::vector<double> values_;
};

/// Row-standardized matrix (population standard deviation, constant rows
/// become all zeros). Kept as a distinct type so pipeline stages that expect
/// z-scores cannot be handed raw values by accident.
class StandardizedMatrix {
public:
  explicit StandardizedMatrix(ExpressionMatrix standardized)
      : m_(std::move(standardized)) {}

  const ExpressionMatrix& matrix() const { return m_; }
  std::size_t n_features() const { return m_.n_features(); }
  std::size_t n_samples() const { return m_.n_samples(); }
  std::span<const double> row(std::size_t f) const { return m_.row(f); }
  double operator()(std::size_t f, std::size_t s) const { return m_(f, s); }

private:
  ExpressionMatrix m_;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Population mean and standard deviation (divides by n).
MeanStd population_stats(std::span<const double> values);

StandardizedMatrix zscore_rows(const ExpressionMatrix& m);

} // namespace unpast
