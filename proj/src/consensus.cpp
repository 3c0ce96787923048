#include "unpast/consensus.hpp"

#include "unpast/evaluation.hpp"
#include "unpast/modules.hpp"
#include "unpast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace unpast {

std::vector<MatchedPair> match_bicluster_sets(std::span<const Bicluster> run_a,
                                              std::span<const Bicluster> run_b,
                                              std::size_t n_samples, double alpha) {
  std::vector<MatchedPair> out;
  if (run_a.empty() || run_b.empty()) return out;
  GroundTruth truth;
  truth.n_samples = n_samples;
  for (std::size_t i = 0; i < run_a.size(); ++i) {
    truth.names.push_back(std::to_string(i));
    truth.members.push_back(run_a[i].samples);
  }
  std::vector<IndexSet> predicted;
  predicted.reserve(run_b.size());
  for (const auto& b : run_b) predicted.push_back(b.samples);

  const auto report = best_match_performance(truth, predicted, n_samples, alpha);
  const std::size_t na = run_a.size(), nb = run_b.size();
  std::vector<double> feature_j(na * nb);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) feature_j[i * nb + j] = jaccard(run_a[i].features, run_b[j].features);
  }
  // Matching as in best_match_performance; exact ties, such as biclusters
  // sharing one sample set, go to the pair with more shared features.
  const auto same = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); };
  std::vector<char> candidate(na * nb, 0);
  for (std::size_t j = 0; j < nb; ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < na; ++i) {
      const auto& x = report.pairs[i * nb + j];
      const auto& y = report.pairs[best * nb + j];
      if (!same(x.log_pvalue, y.log_pvalue)) {
        if (x.log_pvalue < y.log_pvalue) best = i;
      } else if (x.inverted != y.inverted) {
        if (!x.inverted) best = i;
      } else if (feature_j[i * nb + j] > feature_j[best * nb + j]) {
        best = i;
      }
    }
    candidate[best * nb + j] = 1;
  }
  for (std::size_t i = 0; i < na; ++i) {
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < nb; ++j) {
      const auto& x = report.pairs[i * nb + j];
      if (!candidate[i * nb + j] || !(x.adjusted_pvalue < alpha)) continue;
      if (!best) {
        best = j;
        continue;
      }
      const auto& y = report.pairs[i * nb + *best];
      if (x.ari != y.ari) {
        if (x.ari > y.ari) best = j;
      } else if (x.inverted != y.inverted) {
        if (!x.inverted) best = j;
      } else if (feature_j[i * nb + j] > feature_j[i * nb + *best]) {
        best = j;
      }
    }
    if (!best) continue;
    const auto& x = report.pairs[i * nb + *best];
    const auto& matched = run_b[*best].samples;
    MatchedPair mp;
    mp.first = i;
    mp.second = *best;
    mp.adjusted_pvalue = x.adjusted_pvalue;
    mp.ari = x.ari;
    mp.jaccard = x.inverted ? jaccard(run_a[i].samples, complement(matched, n_samples))
                            : jaccard(run_a[i].samples, matched);
    out.push_back(mp);
  }
  return out;
}

std::size_t elbow_index(std::span<const std::size_t> counts) {
  if (counts.size() < 3) return 0;
  std::size_t best = 1;
  long long best_d2 = std::numeric_limits<long long>::min();
  for (std::size_t i = 1; i + 1 < counts.size(); ++i) {
    const long long d2 = static_cast<long long>(counts[i - 1]) - 2 * static_cast<long long>(counts[i]) +
                         static_cast<long long>(counts[i + 1]);
    if (d2 > best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

namespace {

std::uint64_t content_key(const Bicluster& b) {
  std::uint64_t h = 0x5eedULL;
  for (auto f : b.features) h = mix_seed(h, f);
  h = mix_seed(h, 0xfeedULL);
  for (auto s : b.samples) h = mix_seed(h, s);
  return h;
}

} // namespace

ConsensusResult consensus_biclusters(const std::vector<std::vector<Bicluster>>& runs,
                                     const ExpressionMatrix& m, const ConsensusParams& params) {
  const std::size_t n_runs = runs.size();
  if (n_runs < 2) throw std::invalid_argument("consensus needs at least two runs");
  if (!(params.j_min <= params.j_max) || !(params.cutoff_step > 0.0)) {
    throw std::invalid_argument("invalid consensus cutoff range");
  }
  const std::size_t n = m.n_samples();

  std::vector<BiclusterRef> nodes;
  std::vector<std::size_t> offset(n_runs + 1, 0);
  for (std::size_t r = 0; r < n_runs; ++r) {
    offset[r + 1] = offset[r] + runs[r].size();
    for (std::size_t i = 0; i < runs[r].size(); ++i) nodes.push_back({r, i});
  }

  // Matching is asymmetric, so both directions of every run pair contribute;
  // this keeps the similarity matrix independent of run order.
  std::map<std::pair<std::size_t, std::size_t>, double> similarity;
  for (std::size_t r = 0; r < n_runs; ++r) {
    for (std::size_t s = r + 1; s < n_runs; ++s) {
      const auto add = [&](std::size_t u, std::size_t v, double j) {
        auto key = std::minmax(u, v);
        auto& slot = similarity[{key.first, key.second}];
        slot = std::max(slot, j);
      };
      for (const auto& mp : match_bicluster_sets(runs[r], runs[s], n, params.alpha)) {
        add(offset[r] + mp.first, offset[s] + mp.second, mp.jaccard);
      }
      for (const auto& mp : match_bicluster_sets(runs[s], runs[r], n, params.alpha)) {
        add(offset[s] + mp.first, offset[r] + mp.second, mp.jaccard);
      }
    }
  }

  std::vector<std::uint64_t> keys;
  keys.reserve(nodes.size());
  for (const auto& ref : nodes) keys.push_back(content_key(runs[ref.run][ref.index]));

  const auto group_at = [&](double cutoff) {
    SimilarityGraph g(nodes.size(), keys);
    for (const auto& [edge, j] : similarity) {
      if (j > 0.0 && j >= cutoff - 1e-12) g.add_edge(edge.first, edge.second, j);
    }
    return louvain_modules(g, params.resolution, params.seed);
  };

  ConsensusResult result;
  const auto steps = static_cast<std::size_t>(std::llround((params.j_max - params.j_min) / params.cutoff_step));
  std::vector<std::vector<std::vector<std::size_t>>> grouping;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double cutoff = std::round((params.j_min + static_cast<double>(i) * params.cutoff_step) * 1e9) / 1e9;
    result.cutoffs.push_back(cutoff);
    grouping.push_back(group_at(cutoff));
    result.group_counts.push_back(grouping.back().size());
  }
  const std::size_t chosen = elbow_index(result.group_counts);
  result.selected_cutoff = result.cutoffs[chosen];

  const StandardizedMatrix z = zscore_rows(m);
  std::vector<std::pair<Bicluster, std::vector<BiclusterRef>>> built;
  for (const auto& group : grouping[chosen]) {
    std::map<std::size_t, std::pair<std::size_t, int>> tally;  // feature -> (count, orientation vote)
    std::vector<BiclusterRef> members;
    for (auto node : group) {
      const auto& ref = nodes[node];
      members.push_back(ref);
      const auto& b = runs[ref.run][ref.index];
      const int flip = b.direction == Direction::down ? -1 : 1;
      for (std::size_t i = 0; i < b.features.size(); ++i) {
        auto& t = tally[b.features[i]];
        ++t.first;
        t.second += b.signs[i] * flip;
      }
    }
    std::vector<std::size_t> features;
    std::vector<int> signs;
    for (const auto& [f, t] : tally) {
      if (static_cast<double>(t.first) / static_cast<double>(n_runs) >= params.min_frequency - 1e-12) {
        features.push_back(f);
        signs.push_back(t.second < 0 ? -1 : 1);
      }
    }
    if (features.size() < 2) continue;
    // Same orientation as a finalized bicluster: all +1 unless mixed.
    if (std::all_of(signs.begin(), signs.end(), [](int s) { return s < 0; })) {
      std::fill(signs.begin(), signs.end(), 1);
    }

    const auto proj = module_projection(z, features, signs);
    auto parts = partition_values(proj, params.method);
    if (!parts) continue;
    IndexSet samples;
    if (parts->low.size() != parts->high.size()) {
      samples = parts->low.size() < parts->high.size() ? parts->low : parts->high;
    } else {
      // Equal halves: keep the side the member biclusters agree with.
      std::size_t low_votes = 0, high_votes = 0;
      for (const auto& ref : members) {
        low_votes += intersection_size(runs[ref.run][ref.index].samples, parts->low);
        high_votes += intersection_size(runs[ref.run][ref.index].samples, parts->high);
      }
      if (low_votes != high_votes) {
        samples = low_votes > high_votes ? parts->low : parts->high;
      } else {
        std::uint64_t key = params.seed;
        for (auto f : features) key = mix_seed(key, f);
        samples = choose_minority(*parts, key).minority;
      }
    }
    if (samples.size() < params.min_bicluster_size) continue;

    Bicluster b;
    b.features = std::move(features);
    b.samples = std::move(samples);
    finalize_bicluster(m, b);
    built.emplace_back(std::move(b), std::move(members));
  }

  std::vector<Bicluster> unordered;
  for (const auto& e : built) unordered.push_back(e.first);
  for (auto i : bicluster_order(unordered, m)) {
    result.biclusters.push_back(std::move(built[i].first));
    result.groups.push_back(std::move(built[i].second));
  }
  return result;
}

} // namespace unpast
