#include "unpast/pipeline.hpp"

#include "unpast/rng.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace unpast {

void UnpastParams::set_seed(std::uint64_t seed) {
  binarization.master_seed = seed;
  clustering.seed = seed;
}

UnpastResult run_unpast(const ExpressionMatrix& m, const UnpastParams& params) {
  validate(params.binarization);
  validate(params.clustering);
  const std::size_t n_s = params.binarization.min_bicluster_size;
  if (m.n_samples() < 2 * n_s) {
    throw ValidationError(fmt::format("{} samples is fewer than twice the minimum bicluster size {}",
                                      m.n_samples(), n_s));
  }

  UnpastResult result;
  const StandardizedMatrix z = zscore_rows(m);
  result.binarized = binarize_all(z, params.binarization, params.null_cache_dir);

  const auto& ids = m.feature_ids();
  std::vector<std::uint64_t> keys;
  keys.reserve(result.binarized.size());
  for (const auto& bf : result.binarized) keys.push_back(hash_string(ids[bf.feature_index]));
  auto modules = detect_modules(result.binarized, params.clustering, keys);

  std::vector<std::optional<Bicluster>> slots(modules.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t mi = 0; mi < static_cast<std::ptrdiff_t>(modules.size()); ++mi) {
    const auto& mod = modules[static_cast<std::size_t>(mi)];
    std::string_view anchor = ids[result.binarized[mod.members.front()].feature_index];
    for (auto pos : mod.members) anchor = std::min<std::string_view>(anchor, ids[result.binarized[pos].feature_index]);
    const std::uint64_t seed = mix_seed(params.binarization.master_seed, hash_string(anchor) ^ 0xb1c1u);
    auto b = assemble_bicluster(z, mod, result.binarized, params.binarization.method, n_s, seed);
    if (b && params.de.enabled) {
      b = de_verify(m, *b, params.de.lfc_min, params.de.p_max);
      // Re-split on the verified features until samples and features agree.
      // Features only shrink, so this terminates.
      while (b) {
        auto again = assemble_bicluster(z, b->features, b->signs, params.binarization.method, n_s, seed);
        if (!again) {
          b.reset();
        } else if (again->samples == b->samples) {
          break;
        } else {
          b = de_verify(m, *again, params.de.lfc_min, params.de.p_max);
        }
      }
    }
    slots[static_cast<std::size_t>(mi)] = std::move(b);
  }
  for (auto& s : slots) {
    if (s) result.biclusters.push_back(std::move(*s));
  }
  sort_biclusters(result.biclusters, m);

  for (auto& mod : modules) {
    for (auto& pos : mod.members) pos = result.binarized[pos].feature_index;
  }
  result.modules = std::move(modules);
  return result;
}

} // namespace unpast
