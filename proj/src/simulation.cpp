#include "unpast/simulation.hpp"

#include "unpast/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace unpast {

std::string_view to_string(Scenario s) {
  switch (s) {
  case Scenario::A:
    return "A";
  case Scenario::B:
    return "B";
  case Scenario::C:
    return "C";
  }
  return "A";
}

Scenario parse_scenario(std::string_view s) {
  if (s == "A" || s == "a") return Scenario::A;
  if (s == "B" || s == "b") return Scenario::B;
  if (s == "C" || s == "c") return Scenario::C;
  throw std::invalid_argument(fmt::format("unknown scenario \"{}\"", s));
}

std::size_t SimulationSpec::resolved_coexpr_modules() const {
  if (coexpr_modules) return *coexpr_modules;
  return scenario == Scenario::C ? 4 : 0;
}

void validate(const SimulationSpec& spec) {
  if (spec.n_samples == 0 || spec.n_features == 0) throw std::invalid_argument("empty matrix requested");
  if (spec.subtype_sizes.empty()) throw std::invalid_argument("no subtypes requested");
  std::size_t total = 0;
  for (auto s : spec.subtype_sizes) {
    if (s == 0 || s > spec.n_samples) throw std::invalid_argument("subtype size outside [1, n_samples]");
    total += s;
  }
  if (spec.scenario == Scenario::A && total > spec.n_samples) {
    throw std::invalid_argument("scenario A needs the subtype sizes to fit disjointly in the samples");
  }
  const std::size_t planted = spec.n_biomarkers * spec.subtype_sizes.size();
  const std::size_t coexpr = spec.resolved_coexpr_modules() * spec.coexpr_size;
  if (spec.n_biomarkers == 0) throw std::invalid_argument("n_biomarkers must be positive");
  if (planted + coexpr > spec.n_features) {
    throw std::invalid_argument(fmt::format(
        "{} biomarker and {} co-expression features do not fit in {} features", planted, coexpr,
        spec.n_features));
  }
  if (spec.resolved_coexpr_modules() > 0 && spec.coexpr_size < 2) {
    throw std::invalid_argument("co-expression modules need at least two features");
  }
  if (!(spec.coexpr_r >= -1.0 && spec.coexpr_r <= 1.0)) throw std::invalid_argument("coexpr_r outside [-1, 1]");
  if (!(spec.signal_std >= 0.0)) throw std::invalid_argument("signal_std must be non-negative");
}

namespace {

// First `k` entries of a uniformly shuffled 0..n-1, sorted.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

} // namespace

SimulatedData generate(const SimulationSpec& spec) {
  validate(spec);
  const std::size_t nf = spec.n_features;
  const std::size_t ns = spec.n_samples;
  const std::size_t n_sub = spec.subtype_sizes.size();
  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> values(nf * ns);
  for (auto& v : values) v = normal(rng);

  // Biomarkers: one shuffle of all rows, consecutive blocks per subtype; the
  // next blocks feed co-expression modules, so all sets are disjoint.
  const std::size_t n_modules = spec.resolved_coexpr_modules();
  const auto rows = sample_without_replacement(
      nf, n_sub * spec.n_biomarkers + n_modules * spec.coexpr_size, rng);

  SimulatedData out;
  out.truth.n_samples = ns;
  if (spec.scenario == Scenario::A) {
    std::size_t total = 0;
    for (auto s : spec.subtype_sizes) total += s;
    const auto chosen = sample_without_replacement(ns, total, rng);
    std::size_t at = 0;
    for (auto s : spec.subtype_sizes) {
      IndexSet set(chosen.begin() + static_cast<std::ptrdiff_t>(at),
                   chosen.begin() + static_cast<std::ptrdiff_t>(at + s));
      std::sort(set.begin(), set.end());
      out.truth.members.push_back(std::move(set));
      at += s;
    }
  } else {
    for (auto s : spec.subtype_sizes) {
      auto set = sample_without_replacement(ns, s, rng);
      std::sort(set.begin(), set.end());
      out.truth.members.push_back(std::move(set));
    }
  }
  for (std::size_t t = 0; t < n_sub; ++t) out.truth.names.push_back(fmt::format("subtype_{}", t + 1));

  std::normal_distribution<double> signal(spec.signal_mean, spec.signal_std);
  for (std::size_t t = 0; t < n_sub; ++t) {
    std::vector<std::size_t> markers(rows.begin() + static_cast<std::ptrdiff_t>(t * spec.n_biomarkers),
                                     rows.begin() + static_cast<std::ptrdiff_t>((t + 1) * spec.n_biomarkers));
    std::sort(markers.begin(), markers.end());
    for (auto f : markers) {
      for (auto s : out.truth.members[t]) values[f * ns + s] = signal(rng);
    }
    out.biomarkers.push_back(std::move(markers));
  }

  const double keep = std::sqrt(1.0 - spec.coexpr_r * spec.coexpr_r);
  for (std::size_t k = 0; k < n_modules; ++k) {
    const std::size_t base = n_sub * spec.n_biomarkers + k * spec.coexpr_size;
    std::vector<std::size_t> module(rows.begin() + static_cast<std::ptrdiff_t>(base),
                                    rows.begin() + static_cast<std::ptrdiff_t>(base + spec.coexpr_size));
    const std::size_t f0 = module.front();
    for (std::size_t i = 1; i < module.size(); ++i) {
      const std::size_t fi = module[i];
      for (std::size_t s = 0; s < ns; ++s) {
        values[fi * ns + s] = values[f0 * ns + s] * spec.coexpr_r + values[fi * ns + s] * keep;
      }
    }
    out.coexpr_modules.push_back(std::move(module));
  }

  std::vector<std::string> feature_ids(nf), sample_ids(ns);
  for (std::size_t f = 0; f < nf; ++f) feature_ids[f] = fmt::format("g{}", f);
  for (std::size_t s = 0; s < ns; ++s) sample_ids[s] = fmt::format("s{}", s);
  out.matrix = ExpressionMatrix(std::move(feature_ids), std::move(sample_ids), std::move(values));
  return out;
}

std::vector<SimulationSpec> suite_specs(std::uint64_t base_seed) {
  std::vector<SimulationSpec> specs;
  for (Scenario sc : {Scenario::A, Scenario::B, Scenario::C}) {
    for (std::size_t nb : {std::size_t{5}, std::size_t{50}, std::size_t{500}}) {
      SimulationSpec spec;
      spec.scenario = sc;
      spec.n_biomarkers = nb;
      spec.seed = mix_seed(base_seed, static_cast<std::uint64_t>(sc) * 1000 + nb);
      specs.push_back(spec);
    }
  }
  return specs;
}

std::vector<SimulatedData> generate_suite(std::uint64_t base_seed) {
  const auto specs = suite_specs(base_seed);
  std::vector<SimulatedData> out(specs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(specs.size()); ++i) {
    out[static_cast<std::size_t>(i)] = generate(specs[static_cast<std::size_t>(i)]);
  }
  return out;
}

} // namespace unpast
