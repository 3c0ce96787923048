#include "unpast/binarization.hpp"

#include "unpast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace unpast {

namespace {

constexpr char kMagic[8] = {'U', 'N', 'P', 'S', 'N', 'U', 'L', 'L'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::istream& is, T& v) {
  return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

} // namespace

NullSnrModel::NullSnrModel(std::size_t n_samples, BinarizationMethod method, std::size_t n_draws,
                           std::uint64_t seed, std::map<std::size_t, std::vector<double>> draws)
    : n_samples_(n_samples), method_(method), n_draws_(n_draws), seed_(seed),
      draws_(std::move(draws)) {}

const std::vector<double>& NullSnrModel::draws(std::size_t k) const {
  auto it = draws_.find(k);
  if (it == draws_.end()) {
    throw std::out_of_range("null model has no draws for group size " + std::to_string(k));
  }
  return it->second;
}

std::size_t null_draw_count(double p_threshold) {
  const double needed = std::ceil(10.0 / p_threshold - 1e-9);
  return std::max<std::size_t>(10000, static_cast<std::size_t>(needed));
}

NullSnrModel build_null_model(std::size_t n_samples, std::span<const std::size_t> group_sizes,
                              double p_threshold, BinarizationMethod method, std::uint64_t seed) {
  for (auto k : group_sizes) {
    if (k == 0 || 2 * k > n_samples) {
      throw std::invalid_argument("null model group size must satisfy 1 <= k <= n/2");
    }
  }
  const std::size_t n_draws = null_draw_count(p_threshold);
  std::vector<std::size_t> sizes(group_sizes.begin(), group_sizes.end());
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  std::vector<std::vector<double>> columns(sizes.size(), std::vector<double>(n_draws));
  const std::uint64_t base = mix_seed(seed, n_samples);

  // Every draw is one sorted standard-normal vector; the SNR of its top-k
  // values against the rest is read off prefix sums for all requested k at
  // once. Each draw owns its RNG stream, so scheduling cannot change values.
#pragma omp parallel
  {
    std::vector<double> x(n_samples);
    std::vector<double> top_sum(n_samples + 1), top_sq(n_samples + 1);
#pragma omp for schedule(static)
    for (std::ptrdiff_t di = 0; di < static_cast<std::ptrdiff_t>(n_draws); ++di) {
      const auto d = static_cast<std::size_t>(di);
      Rng rng(mix_seed(base, d));
      std::normal_distribution<double> normal(0.0, 1.0);
      for (auto& v : x) v = normal(rng);
      std::sort(x.begin(), x.end(), std::greater<>());
      top_sum[0] = top_sq[0] = 0.0;
      for (std::size_t i = 0; i < n_samples; ++i) {
        top_sum[i + 1] = top_sum[i] + x[i];
        top_sq[i + 1] = top_sq[i] + x[i] * x[i];
      }
      for (std::size_t s = 0; s < sizes.size(); ++s) {
        const std::size_t k = sizes[s];
        const double kin = static_cast<double>(k);
        const double kout = static_cast<double>(n_samples - k);
        const double mean_in = top_sum[k] / kin;
        const double mean_out = (top_sum[n_samples] - top_sum[k]) / kout;
        const double var_in = std::max(0.0, top_sq[k] / kin - mean_in * mean_in);
        const double var_out =
            std::max(0.0, (top_sq[n_samples] - top_sq[k]) / kout - mean_out * mean_out);
        const double den = std::sqrt(var_in) + std::sqrt(var_out);
        columns[s][d] = den > 0.0 ? std::abs(mean_in - mean_out) / den : kSnrCap;
      }
    }
  }

  std::map<std::size_t, std::vector<double>> draws;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    std::sort(columns[s].begin(), columns[s].end());
    draws.emplace(sizes[s], std::move(columns[s]));
  }
  return {n_samples, method, n_draws, seed, std::move(draws)};
}

double empirical_pvalue(const NullSnrModel& model, std::size_t k, double observed_snr) {
  const auto& d = model.draws(k);
  const auto first_ge = std::lower_bound(d.begin(), d.end(), observed_snr);
  const auto count = static_cast<double>(d.end() - first_ge);
  return (count + 1.0) / (static_cast<double>(d.size()) + 1.0);
}

void save_null_model(const std::filesystem::path& path, const NullSnrModel& model) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write null model cache " + tmp.string());
    os.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(os, kFormatVersion);
    put<std::uint64_t>(os, model.n_samples());
    put<std::uint32_t>(os, static_cast<std::uint32_t>(model.method()));
    put<std::uint64_t>(os, model.n_draws());
    put<std::uint64_t>(os, model.seed());
    put<std::uint64_t>(os, model.all_draws().size());
    for (const auto& [k, draws] : model.all_draws()) {
      put<std::uint64_t>(os, k);
      os.write(reinterpret_cast<const char*>(draws.data()),
               static_cast<std::streamsize>(draws.size() * sizeof(double)));
    }
    if (!os) throw std::runtime_error("failed writing null model cache " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::optional<NullSnrModel> load_null_model(const std::filesystem::path& path,
                                            std::size_t n_samples, BinarizationMethod method,
                                            std::size_t n_draws, std::uint64_t seed,
                                            std::span<const std::size_t> group_sizes) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    return std::nullopt;
  }
  std::uint32_t version = 0, method_tag = 0;
  std::uint64_t n = 0, draws_per_size = 0, file_seed = 0, n_sizes = 0;
  if (!get(is, version) || version != kFormatVersion) return std::nullopt;
  if (!get(is, n) || !get(is, method_tag) || !get(is, draws_per_size) || !get(is, file_seed) ||
      !get(is, n_sizes)) {
    return std::nullopt;
  }
  if (n != n_samples || method_tag != static_cast<std::uint32_t>(method) ||
      draws_per_size != n_draws || file_seed != seed) {
    return std::nullopt;
  }
  std::map<std::size_t, std::vector<double>> draws;
  for (std::uint64_t i = 0; i < n_sizes; ++i) {
    std::uint64_t k = 0;
    if (!get(is, k)) return std::nullopt;
    std::vector<double> v(n_draws);
    if (!is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n_draws * sizeof(double)))) {
      return std::nullopt;
    }
    draws.emplace(k, std::move(v));
  }
  for (auto k : group_sizes) {
    if (!draws.contains(k)) return std::nullopt;
  }
  return NullSnrModel(n_samples, method, n_draws, seed, std::move(draws));
}

} // namespace unpast
