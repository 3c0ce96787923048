#include "unpast/report.hpp"

#include <fmt/format.h>

#include <ostream>

namespace unpast {

namespace {

std::string g(double v) { return fmt::format("{:.17g}", v); }

Json ids(const std::vector<std::size_t>& idx, const std::vector<std::string>& names) {
  Json arr = Json::array();
  for (auto i : idx) arr.push_back(names[i]);
  return arr;
}

} // namespace

Json to_json(const PerformanceReport& report) {
  Json j;
  j["total"] = report.total;
  Json truths = Json::array();
  for (const auto& t : report.truths) {
    Json e;
    e["name"] = t.name;
    e["weight"] = t.weight;
    if (t.best_match) {
      e["best_match"] = *t.best_match;
    } else {
      e["best_match"] = nullptr;
    }
    e["inverted"] = t.inverted;
    e["adjusted_pvalue"] = t.adjusted_pvalue;
    e["ari"] = t.ari;
    truths.push_back(std::move(e));
  }
  j["truths"] = std::move(truths);
  return j;
}

Json to_json(const RedundancyReport& report) {
  Json j;
  j["fsp"] = report.fsp;
  j["n_pairs"] = report.pairs.size();
  std::size_t sig = 0;
  for (const auto& p : report.pairs) sig += p.significant ? 1 : 0;
  j["n_significant"] = sig;
  return j;
}

Json to_json(const SimulationSpec& spec) {
  Json j;
  j["scenario"] = std::string(to_string(spec.scenario));
  j["n_features"] = spec.n_features;
  j["n_samples"] = spec.n_samples;
  j["subtype_sizes"] = spec.subtype_sizes;
  j["n_biomarkers"] = spec.n_biomarkers;
  j["signal_mean"] = spec.signal_mean;
  j["signal_std"] = spec.signal_std;
  j["coexpr_modules"] = spec.resolved_coexpr_modules();
  j["coexpr_size"] = spec.coexpr_size;
  j["coexpr_r"] = spec.coexpr_r;
  j["seed"] = spec.seed;
  return j;
}

Json to_json(const UnpastParams& p) {
  Json j;
  j["binarization"] = std::string(to_string(p.binarization.method));
  j["pval"] = p.binarization.p_threshold;
  j["min_n_samples"] = p.binarization.min_bicluster_size;
  j["seed"] = p.binarization.master_seed;
  j["null_seed"] = p.binarization.null_seed;
  j["clustering"] = std::string(to_string(p.clustering.algorithm));
  j["directions"] = std::string(to_string(p.clustering.direction_mode));
  j["edge_threshold"] = p.clustering.edge_threshold;
  j["resolution"] = p.clustering.louvain_resolution;
  j["tom_cutoffs"] = p.clustering.tom_candidate_cutoffs;
  j["de"] = p.de.enabled;
  j["de_lfc"] = p.de.lfc_min;
  j["de_pval"] = p.de.p_max;
  return j;
}

Json to_json(const ConsensusParams& p) {
  Json j;
  j["j_min"] = p.j_min;
  j["j_max"] = p.j_max;
  j["cutoff_step"] = p.cutoff_step;
  j["min_frequency"] = p.min_frequency;
  j["resolution"] = p.resolution;
  j["alpha"] = p.alpha;
  j["binarization"] = std::string(to_string(p.method));
  j["min_n_samples"] = p.min_bicluster_size;
  j["seed"] = p.seed;
  return j;
}

Json to_json(const ConsensusResult& result, const std::vector<std::string>& run_names,
             const std::vector<std::string>& feature_ids, const std::vector<std::string>& sample_ids) {
  Json j;
  j["runs"] = run_names;
  j["cutoffs"] = result.cutoffs;
  j["group_counts"] = result.group_counts;
  j["selected_cutoff"] = result.selected_cutoff;
  Json bics = Json::array();
  for (std::size_t i = 0; i < result.biclusters.size(); ++i) {
    const auto& b = result.biclusters[i];
    Json e;
    e["id"] = i;
    e["direction"] = std::string(to_string(b.direction));
    e["snr"] = b.snr;
    e["features"] = ids(b.features, feature_ids);
    e["samples"] = ids(b.samples, sample_ids);
    Json members = Json::array();
    for (const auto& r : result.groups[i]) {
      members.push_back(Json{{"run", run_names[r.run]}, {"index", r.index}});
    }
    e["members"] = std::move(members);
    bics.push_back(std::move(e));
  }
  j["biclusters"] = std::move(bics);
  return j;
}

void write_match_table(std::ostream& out, const PerformanceReport& report) {
  out << "truth\tpredicted\tinverted\tpvalue\tadjusted_pvalue\tari\tcandidate\n";
  for (const auto& p : report.pairs) {
    out << report.truths[p.truth].name << '\t' << p.predicted << '\t' << (p.inverted ? 1 : 0) << '\t'
        << g(p.pvalue) << '\t' << g(p.adjusted_pvalue) << '\t' << g(p.ari) << '\t' << (p.candidate ? 1 : 0)
        << '\n';
  }
}

void write_redundancy_table(std::ostream& out, const RedundancyReport& report) {
  out << "first\tsecond\tjaccard\tstatistic\tpvalue\tadjusted_pvalue\tsignificant\n";
  for (const auto& p : report.pairs) {
    out << p.first << '\t' << p.second << '\t' << g(p.jaccard) << '\t' << g(p.statistic) << '\t' << g(p.pvalue)
        << '\t' << g(p.adjusted_pvalue) << '\t' << (p.significant ? 1 : 0) << '\n';
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

} // namespace unpast
