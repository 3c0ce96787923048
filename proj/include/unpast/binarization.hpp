#pragma once

#include "unpast/matrix.hpp"
#include "unpast/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace unpast {

enum class BinarizationMethod { two_means, ward, gmm };

std::string_view to_string(BinarizationMethod m);
/// Accepts "kmeans", "two_means", "2means", "ward", "gmm".
BinarizationMethod parse_binarization_method(std::string_view s);

/// SNR assigned to perfectly separated splits (both groups constant).
inline constexpr double kSnrCap = 1e6;

/// |mean_in - mean_out| / (sd_in + sd_out) with population standard deviations.
/// Throws std::invalid_argument when the subset is empty, covers every value,
/// or holds an out-of-range index.
double snr(std::span<const double> values, const IndexSet& subset);

/// Two groups produced by a 1-D clustering, labelled by which side has the
/// higher mean.
struct TwoGroupPartition {
  IndexSet low;
  IndexSet high;
};

/// Splits values into two non-empty groups with the chosen 1-D method.
/// Returns nullopt when all values are equal.
std::optional<TwoGroupPartition> partition_values(std::span<const double> values,
                                                  BinarizationMethod method);

struct FeatureSplit {
  IndexSet minority;
  Direction direction = Direction::up;
};

/// Minority = the smaller group; on an exact size tie a coin seeded by `seed`
/// decides between the high and the low side.
FeatureSplit choose_minority(const TwoGroupPartition& parts, std::uint64_t seed);

std::optional<FeatureSplit> binarize_feature(std::span<const double> values,
                                             BinarizationMethod method, std::uint64_t seed);

struct BinarizedFeature {
  std::size_t feature_index = 0;
  IndexSet minority;
  Direction direction = Direction::up;
  double snr = 0.0;
  double pvalue = 1.0;
};

struct BinarizationParams {
  BinarizationMethod method = BinarizationMethod::two_means;
  double p_threshold = 0.01;
  std::size_t min_bicluster_size = 5;
  std::uint64_t master_seed = 0;
  /// Seed of the null distribution; fixed so cached null models are reusable
  /// across runs with different master seeds.
  std::uint64_t null_seed = 42;
};

void validate(const BinarizationParams& p);

/// Null SNR draws per minority-group size, from splitting sorted standard
/// normal vectors into their top-k values and the rest.
class NullSnrModel {
public:
  NullSnrModel() = default;
  NullSnrModel(std::size_t n_samples, BinarizationMethod method, std::size_t n_draws,
               std::uint64_t seed, std::map<std::size_t, std::vector<double>> draws);

  std::size_t n_samples() const { return n_samples_; }
  BinarizationMethod method() const { return method_; }
  std::size_t n_draws() const { return n_draws_; }
  std::uint64_t seed() const { return seed_; }
  bool has_size(std::size_t k) const { return draws_.contains(k); }
  const std::vector<double>& draws(std::size_t k) const;
  const std::map<std::size_t, std::vector<double>>& all_draws() const { return draws_; }

private:
  std::size_t n_samples_ = 0;
  BinarizationMethod method_ = BinarizationMethod::two_means;
  std::size_t n_draws_ = 0;
  std::uint64_t seed_ = 0;
  std::map<std::size_t, std::vector<double>> draws_;
};

/// max(10000, ceil(10 / p_threshold)).
std::size_t null_draw_count(double p_threshold);

NullSnrModel build_null_model(std::size_t n_samples, std::span<const std::size_t> group_sizes,
                              double p_threshold, BinarizationMethod method, std::uint64_t seed);

/// (#draws >= observed + 1) / (N + 1). Throws std::out_of_range for an unknown size.
double empirical_pvalue(const NullSnrModel& model, std::size_t k, double observed_snr);

/// Binary cache: magic, format version, n_samples, method, N, seed, then
/// per-size sorted draws.
void save_null_model(const std::filesystem::path& path, const NullSnrModel& model);

/// Loads a cached model if the file exists and its key (n_samples, method, N,
/// seed) matches and it holds every requested size; nullopt otherwise.
std::optional<NullSnrModel> load_null_model(const std::filesystem::path& path,
                                            std::size_t n_samples, BinarizationMethod method,
                                            std::size_t n_draws, std::uint64_t seed,
                                            std::span<const std::size_t> group_sizes);

/// Per-feature seed: keyed on the feature id so results do not depend on the
/// row order or on the thread schedule.
std::uint64_t feature_seed(std::uint64_t master_seed, std::string_view feature_id);

/// Binarizes every feature, scores it against the null model and keeps those
/// with p <= p_threshold. When `cache_dir` is given the null model is read
/// from / written to a file there.
std::vector<BinarizedFeature> binarize_all(
    const StandardizedMatrix& m, const BinarizationParams& params,
    const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

} // namespace unpast
