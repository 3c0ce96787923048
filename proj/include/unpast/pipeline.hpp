#pragma once

#include "unpast/bicluster.hpp"
#include "unpast/binarization.hpp"
#include "unpast/matrix.hpp"
#include "unpast/modules.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace unpast {

struct DeParams {
  bool enabled = true;
  double lfc_min = 1.0;
  double p_max = 0.05;
};

struct UnpastParams {
  BinarizationParams binarization;
  ClusteringParams clustering;
  DeParams de;
  std::optional<std::filesystem::path> null_cache_dir;

  /// Sets every stage's seed from one master seed.
  void set_seed(std::uint64_t seed);
};

struct UnpastResult {
  std::vector<BinarizedFeature> binarized;
  /// Modules with members translated to matrix rows.
  std::vector<FeatureModule> modules;
  std::vector<Bicluster> biclusters;
};

/// zscore -> binarize -> similarity graph(s) -> modules -> subspace split ->
/// optional DE check. Output sorted by descending SNR.
UnpastResult run_unpast(const ExpressionMatrix& m, const UnpastParams& params);

} // namespace unpast
