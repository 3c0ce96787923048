#pragma once

#include "unpast/evaluation.hpp"
#include "unpast/matrix.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace unpast {

enum class Scenario { A, B, C };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view s);

struct SimulationSpec {
  std::size_t n_features = 10000;
  std::size_t n_samples = 200;
  std::vector<std::size_t> subtype_sizes = {10, 20, 50, 100};
  std::size_t n_biomarkers = 500;
  Scenario scenario = Scenario::A;
  double signal_mean = 4.0;
  double signal_std = 1.0;
  /// Number of co-expression modules; unset means 4 in scenario C, else 0.
  std::optional<std::size_t> coexpr_modules;
  std::size_t coexpr_size = 500;
  double coexpr_r = 0.5;
  std::uint64_t seed = 0;

  std::size_t resolved_coexpr_modules() const;
};

/// Throws std::invalid_argument if the spec cannot be realized.
void validate(const SimulationSpec& spec);

struct SimulatedData {
  ExpressionMatrix matrix;
  GroundTruth truth;
  std::vector<std::vector<std::size_t>> biomarkers;      // per subtype, sorted rows
  std::vector<std::vector<std::size_t>> coexpr_modules;  // rows; first entry is the source f0
};

/// Standard-normal background; disjoint random biomarker sets per subtype
/// whose values in the subtype's samples are redrawn from
/// N(signal_mean, signal_std); in scenario A subtypes are disjoint sample
/// sets, in B and C each is drawn independently. Scenario C adds
/// co-expression modules f'_i = f_0 r + f_i sqrt(1 - r^2) on untouched
/// background features.
SimulatedData generate(const SimulationSpec& spec);

/// The 3 x 3 grid of scenarios {A, B, C} x biomarker counts {5, 50, 500}
/// with default sizes, each with a seed derived from base_seed.
std::vector<SimulationSpec> suite_specs(std::uint64_t base_seed);
std::vector<SimulatedData> generate_suite(std::uint64_t base_seed);

} // namespace unpast
