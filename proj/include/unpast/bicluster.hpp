#pragma once

#include "unpast/binarization.hpp"
#include "unpast/matrix.hpp"
#include "unpast/modules.hpp"
#include "unpast/types.hpp"

#include <optional>
#include <vector>

namespace unpast {

struct FeatureStat {
  std::size_t feature = 0;
  double log_fold_change = 0.0;  // mean(bicluster) - mean(background), log-scale input
  double adjusted_pvalue = 1.0;
};

/// A set of features together with the samples they separate from the rest.
///
/// For up and down biclusters every sign is +1. In a mixed bicluster a sign of
/// +1 marks a feature that is higher in the bicluster samples and -1 one that
/// is lower.
struct Bicluster {
  std::vector<std::size_t> features;  // sorted matrix row indices
  std::vector<int> signs;             // parallel to features
  IndexSet samples;
  Direction direction = Direction::up;
  double snr = 0.0;
  std::vector<FeatureStat> feature_stats;
};

/// Recomputes direction, signs and SNR of a bicluster whose features and
/// samples are set. Used after every change to either set.
void finalize_bicluster(const ExpressionMatrix& m, Bicluster& b);

/// Throws std::logic_error describing the first violated invariant.
void check_bicluster_invariants(const ExpressionMatrix& m, const Bicluster& b,
                                std::size_t min_bicluster_size);

/// Mean over features of sign * standardized value, per sample.
std::vector<double> module_projection(const StandardizedMatrix& m,
                                      std::span<const std::size_t> features,
                                      std::span<const int> signs);

/// Splits samples in the module's feature subspace: the signed mean z-score
/// is binarized with `method` and its minority becomes the bicluster. Returns
/// nullopt when the split fails or leaves fewer than `min_bicluster_size`
/// samples. `features` are matrix rows, `signs` parallel to them.
std::optional<Bicluster> assemble_bicluster(const StandardizedMatrix& m,
                                            std::span<const std::size_t> features,
                                            std::span<const int> signs, BinarizationMethod method,
                                            std::size_t min_bicluster_size, std::uint64_t seed);

/// Same, for a detected module whose members index into `features`.
std::optional<Bicluster> assemble_bicluster(const StandardizedMatrix& m, const FeatureModule& module,
                                            std::span<const BinarizedFeature> features,
                                            BinarizationMethod method,
                                            std::size_t min_bicluster_size, std::uint64_t seed);

/// Keeps features whose Welch test between bicluster and background samples
/// passes |mean difference| >= lfc_min and BH-adjusted p <= p_max. Samples are
/// never changed. Returns nullopt when fewer than two features survive.
std::optional<Bicluster> de_verify(const ExpressionMatrix& m, const Bicluster& b, double lfc_min,
                                   double p_max);

/// Output order: descending SNR; ties by the lexicographically smallest
/// member feature id. Returns the permutation, then the in-place variant.
std::vector<std::size_t> bicluster_order(std::span<const Bicluster> biclusters,
                                         const ExpressionMatrix& m);
void sort_biclusters(std::vector<Bicluster>& biclusters, const ExpressionMatrix& m);

} // namespace unpast
