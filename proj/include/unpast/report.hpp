#pragma once

#include "unpast/consensus.hpp"
#include "unpast/evaluation.hpp"
#include "unpast/pipeline.hpp"
#include "unpast/simulation.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace unpast {

using Json = nlohmann::ordered_json;

Json to_json(const PerformanceReport& report);
Json to_json(const RedundancyReport& report);
Json to_json(const SimulationSpec& spec);
Json to_json(const UnpastParams& params);
Json to_json(const ConsensusParams& params);

/// Consensus provenance; `run_names` labels the input runs.
Json to_json(const ConsensusResult& result, const std::vector<std::string>& run_names,
             const std::vector<std::string>& feature_ids, const std::vector<std::string>& sample_ids);

/// Per-pair match table: truth, predicted, inverted, pvalue, adjusted_pvalue, ari, candidate.
void write_match_table(std::ostream& out, const PerformanceReport& report);
/// Per-pair redundancy table: first, second, jaccard, statistic, pvalue, adjusted_pvalue, significant.
void write_redundancy_table(std::ostream& out, const RedundancyReport& report);

/// Indented dump with a trailing newline.
std::string dump(const Json& j);

} // namespace unpast
