#include "unpast/modules.hpp"

#include "unpast/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace unpast {

std::string_view to_string(ClusteringAlgorithm a) {
  return a == ClusteringAlgorithm::louvain ? "louvain" : "tom";
}

std::string_view to_string(DirectionMode m) {
  return m == DirectionMode::separate ? "separate" : "joint";
}

ClusteringAlgorithm parse_clustering_algorithm(std::string_view s) {
  if (s == "louvain") return ClusteringAlgorithm::louvain;
  if (s == "tom" || s == "wgcna") return ClusteringAlgorithm::tom;
  throw std::invalid_argument(fmt::format("unknown clustering algorithm \"{}\"", s));
}

DirectionMode parse_direction_mode(std::string_view s) {
  if (s == "separate") return DirectionMode::separate;
  if (s == "joint") return DirectionMode::joint;
  throw std::invalid_argument(fmt::format("unknown direction mode \"{}\"", s));
}

void validate(const ClusteringParams& p) {
  if (!(p.edge_threshold >= 0.0 && p.edge_threshold < 1.0)) {
    throw std::invalid_argument("edge_threshold must lie in [0, 1)");
  }
  if (!(p.louvain_resolution > 0.0)) {
    throw std::invalid_argument("louvain_resolution must be positive");
  }
}

SimilarityGraph::SimilarityGraph(std::size_t n_nodes) : adjacency_(n_nodes), keys_(n_nodes) {
  std::iota(keys_.begin(), keys_.end(), std::uint64_t{0});
}

SimilarityGraph::SimilarityGraph(std::size_t n_nodes, std::vector<std::uint64_t> keys)
    : adjacency_(n_nodes), keys_(std::move(keys)) {
  if (keys_.size() != n_nodes) throw std::invalid_argument("one key per node required");
}

void SimilarityGraph::add_edge(std::size_t a, std::size_t b, double weight) {
  if (a == b) throw std::invalid_argument("self loops are not allowed");
  adjacency_.at(a).push_back({b, weight});
  adjacency_.at(b).push_back({a, weight});
  ++n_edges_;
}

double SimilarityGraph::weight(std::size_t a, std::size_t b) const {
  for (const auto& e : adjacency_[a]) {
    if (e.to == b) return e.weight;
  }
  return 0.0;
}

double SimilarityGraph::degree(std::size_t a) const {
  double d = 0.0;
  for (const auto& e : adjacency_[a]) d += e.weight;
  return d;
}

double feature_similarity(const BinarizedFeature& a, const BinarizedFeature& b) {
  return jaccard(a.minority, b.minority);
}

namespace {

using Bits = std::vector<std::uint64_t>;

Bits to_bits(const IndexSet& s, std::size_t words) {
  Bits b(words, 0);
  for (auto i : s) b[i / 64] |= std::uint64_t{1} << (i % 64);
  return b;
}

SimilarityGraph build_graph(std::span<const BinarizedFeature> features,
                            const std::vector<std::size_t>& positions, double threshold,
                            std::vector<std::uint64_t> keys) {
  const std::size_t n = positions.size();
  std::size_t universe = 0;
  for (auto p : positions) {
    if (!features[p].minority.empty()) universe = std::max(universe, features[p].minority.back() + 1);
  }
  const std::size_t words = (universe + 63) / 64;
  std::vector<Bits> bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = to_bits(features[positions[i]].minority, words);

  std::vector<std::vector<SimilarityGraph::Edge>> rows(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double size_i = static_cast<double>(features[positions[i]].minority.size());
    for (std::size_t j = i + 1; j < n; ++j) {
      std::size_t inter = 0;
      for (std::size_t w = 0; w < words; ++w) inter += std::popcount(bits[i][w] & bits[j][w]);
      if (inter == 0) continue;
      const double size_j = static_cast<double>(features[positions[j]].minority.size());
      const double sim = static_cast<double>(inter) / (size_i + size_j - static_cast<double>(inter));
      if (sim > threshold) rows[i].push_back({j, sim});
    }
  }
  SimilarityGraph g(n, std::move(keys));
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& e : rows[i]) g.add_edge(i, e.to, e.weight);
  }
  return g;
}

// Working graph for one Louvain level: symmetric adjacency plus self loops
// carrying the weight already internal to each super-node.
struct LevelGraph {
  std::vector<std::vector<SimilarityGraph::Edge>> adj;
  std::vector<double> self_loop;
  std::vector<std::uint64_t> keys;

  std::size_t size() const { return adj.size(); }
  double node_degree(std::size_t i) const {
    double d = 2.0 * self_loop[i];
    for (const auto& e : adj[i]) d += e.weight;
    return d;
  }
};

// Local moving phase. Returns true if any node changed community.
bool move_nodes(const LevelGraph& g, double resolution, std::uint64_t seed,
                std::vector<std::size_t>& community) {
  const std::size_t n = g.size();
  std::vector<double> k(n), tot(n, 0.0);
  double m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = g.node_degree(i);
    m2 += k[i];
  }
  community.resize(n);
  std::iota(community.begin(), community.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) tot[i] = k[i];
  if (m2 <= 0.0) return false;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::uint64_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[i] = mix_seed(seed, g.keys[i]);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rank[a] != rank[b] ? rank[a] < rank[b] : g.keys[a] < g.keys[b];
  });

  std::vector<double> link(n, 0.0);
  std::vector<std::size_t> touched;
  bool any_move = false;
  for (int pass = 0; pass < 1000; ++pass) {
    bool moved = false;
    for (std::size_t i : order) {
      const std::size_t current = community[i];
      touched.clear();
      for (const auto& e : g.adj[i]) {
        const std::size_t c = community[e.to];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += e.weight;
      }
      tot[current] -= k[i];
      std::size_t best = current;
      double best_gain = link[current] - resolution * tot[current] * k[i] / m2;
      for (std::size_t c : touched) {
        const double gain = link[c] - resolution * tot[c] * k[i] / m2;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best = c;
        }
      }
      tot[best] += k[i];
      community[i] = best;
      if (best != current) moved = true;
      for (std::size_t c : touched) link[c] = 0.0;
      link[current] = 0.0;
    }
    if (!moved) break;
    any_move = true;
  }
  return any_move;
}

LevelGraph base_level(const SimilarityGraph& graph) {
  LevelGraph g;
  g.adj.resize(graph.size());
  g.self_loop.assign(graph.size(), 0.0);
  g.keys.resize(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    auto nb = graph.neighbors(i);
    g.adj[i].assign(nb.begin(), nb.end());
    g.keys[i] = graph.key(i);
  }
  return g;
}

// Relabels communities densely in order of first appearance.
std::size_t renumber(std::vector<std::size_t>& community) {
  std::vector<std::size_t> map(community.size(), community.size());
  std::size_t next = 0;
  for (auto& c : community) {
    if (map[c] == community.size()) map[c] = next++;
    c = map[c];
  }
  return next;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::size_t>& community,
                     std::size_t n_comm) {
  LevelGraph out;
  out.adj.resize(n_comm);
  out.self_loop.assign(n_comm, 0.0);
  out.keys.assign(n_comm, ~std::uint64_t{0});
  std::vector<std::vector<double>> dense;  // only used for small graphs
  std::vector<std::vector<std::pair<std::size_t, double>>> pending(n_comm);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t ci = community[i];
    out.keys[ci] = std::min(out.keys[ci], g.keys[i]);
    out.self_loop[ci] += g.self_loop[i];
    for (const auto& e : g.adj[i]) {
      const std::size_t cj = community[e.to];
      if (ci == cj) {
        if (i < e.to) out.self_loop[ci] += e.weight;
      } else {
        pending[ci].push_back({cj, e.weight});
      }
    }
  }
  for (std::size_t c = 0; c < n_comm; ++c) {
    auto& p = pending[c];
    std::sort(p.begin(), p.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < p.size();) {
      std::size_t j = i;
      double w = 0.0;
      while (j < p.size() && p[j].first == p[i].first) w += p[j++].second;
      out.adj[c].push_back({p[i].first, w});
      i = j;
    }
  }
  return out;
}

// Splits each group into connected pieces of the induced subgraph and keeps
// pieces with at least two nodes.
std::vector<std::vector<std::size_t>> connected_pieces(const SimilarityGraph& graph,
                                                       const std::vector<std::size_t>& labels,
                                                       std::size_t n_labels) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<char> seen(graph.size(), 0);
  (void)n_labels;
  for (std::size_t start = 0; start < graph.size(); ++start) {
    if (seen[start]) continue;
    std::vector<std::size_t> piece{start};
    seen[start] = 1;
    for (std::size_t q = 0; q < piece.size(); ++q) {
      for (const auto& e : graph.neighbors(piece[q])) {
        if (!seen[e.to] && labels[e.to] == labels[start]) {
          seen[e.to] = 1;
          piece.push_back(e.to);
        }
      }
    }
    if (piece.size() >= 2) {
      std::sort(piece.begin(), piece.end());
      out.push_back(std::move(piece));
    }
  }
  return out;
}

} // namespace

std::vector<FeatureGraph> build_similarity_graphs(std::span<const BinarizedFeature> features,
                                                  const ClusteringParams& params,
                                                  std::span<const std::uint64_t> node_keys) {
  validate(params);
  if (!node_keys.empty() && node_keys.size() != features.size()) {
    throw std::invalid_argument("node_keys must hold one key per feature");
  }
  const auto key_of = [&](std::size_t p) {
    return node_keys.empty() ? static_cast<std::uint64_t>(features[p].feature_index) : node_keys[p];
  };
  std::vector<std::vector<std::size_t>> groups;
  if (params.direction_mode == DirectionMode::joint) {
    groups.emplace_back(features.size());
    std::iota(groups[0].begin(), groups[0].end(), std::size_t{0});
  } else {
    groups.resize(2);
    for (std::size_t p = 0; p < features.size(); ++p) {
      groups[features[p].direction == Direction::up ? 0 : 1].push_back(p);
    }
  }
  std::vector<FeatureGraph> out;
  for (auto& positions : groups) {
    if (positions.empty()) continue;
    std::vector<std::uint64_t> keys;
    keys.reserve(positions.size());
    for (auto p : positions) keys.push_back(key_of(p));
    auto g = build_graph(features, positions, params.edge_threshold, std::move(keys));
    out.push_back({std::move(g), std::move(positions)});
  }
  return out;
}

std::vector<std::vector<std::size_t>> louvain_modules(const SimilarityGraph& graph,
                                                      double resolution, std::uint64_t seed) {
  const std::size_t n = graph.size();
  if (n == 0 || graph.edge_count() == 0) return {};
  std::vector<std::size_t> labels(n);
  std::iota(labels.begin(), labels.end(), std::size_t{0});

  LevelGraph level = base_level(graph);
  for (int depth = 0; depth < 64; ++depth) {
    std::vector<std::size_t> community;
    const bool moved = move_nodes(level, resolution, mix_seed(seed, static_cast<std::uint64_t>(depth)), community);
    if (!moved) break;
    const std::size_t n_comm = renumber(community);
    for (auto& l : labels) l = community[l];
    if (n_comm == level.size()) break;
    level = aggregate(level, community, n_comm);
  }
  return connected_pieces(graph, labels, level.size());
}

double modularity(const SimilarityGraph& graph, std::span<const std::size_t> labels,
                  double resolution) {
  const std::size_t n = graph.size();
  std::size_t n_labels = 0;
  for (auto l : labels) n_labels = std::max(n_labels, l + 1);
  std::vector<double> in(n_labels, 0.0), tot(n_labels, 0.0);
  double m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& e : graph.neighbors(i)) {
      m2 += e.weight;
      tot[labels[i]] += e.weight;
      if (labels[i] == labels[e.to]) in[labels[i]] += e.weight;
    }
  }
  if (m2 <= 0.0) return 0.0;
  double q = 0.0;
  for (std::size_t c = 0; c < n_labels; ++c) {
    q += in[c] / m2 - resolution * (tot[c] / m2) * (tot[c] / m2);
  }
  return q;
}

std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>> topological_overlap(
    const SimilarityGraph& graph) {
  const std::size_t n = graph.size();
  std::vector<double> deg(n);
  for (std::size_t i = 0; i < n; ++i) deg[i] = graph.degree(i);
  std::vector<double> row(n, 0.0);
  std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>> out;
  for (std::size_t a = 0; a < n; ++a) {
    for (const auto& e : graph.neighbors(a)) row[e.to] = e.weight;
    for (const auto& e : graph.neighbors(a)) {
      const std::size_t b = e.to;
      if (b < a) continue;
      double shared = 0.0;
      for (const auto& f : graph.neighbors(b)) {
        if (f.to != a) shared += row[f.to] * f.weight;
      }
      const double tom = (shared + e.weight) / (std::min(deg[a], deg[b]) + 1.0 - e.weight);
      out.push_back({{a, b}, tom});
    }
    for (const auto& e : graph.neighbors(a)) row[e.to] = 0.0;
  }
  std::sort(out.begin(), out.end());
  return out;
}

double scale_free_fit(std::span<const std::size_t> degrees) {
  if (degrees.empty()) return 0.0;
  std::vector<std::size_t> positive;
  for (auto d : degrees) {
    if (d > 0) positive.push_back(d);
  }
  std::sort(positive.begin(), positive.end());
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < positive.size();) {
    std::size_t j = i;
    while (j < positive.size() && positive[j] == positive[i]) ++j;
    xs.push_back(std::log10(static_cast<double>(positive[i])));
    ys.push_back(std::log10(static_cast<double>(j - i) / static_cast<double>(degrees.size())));
    i = j;
  }
  if (xs.size() < 3) return 0.0;
  const double k = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy * sxy / (sxx * syy);
}

TomSelection tom_modules(const SimilarityGraph& graph, std::span<const double> candidate_cutoffs) {
  TomSelection best;
  if (graph.size() == 0 || graph.edge_count() == 0) return best;
  const auto tom = topological_overlap(graph);
  bool first = true;
  for (double cutoff : candidate_cutoffs) {
    SimilarityGraph kept(graph.size());
    std::vector<std::size_t> deg(graph.size(), 0);
    for (const auto& [edge, value] : tom) {
      if (value > cutoff) {
        kept.add_edge(edge.first, edge.second, value);
        ++deg[edge.first];
        ++deg[edge.second];
      }
    }
    const double r2 = scale_free_fit(deg);
    const bool better = first || r2 > best.r_squared ||
                        (r2 == best.r_squared && cutoff < best.cutoff);
    if (!better) continue;
    first = false;
    best.cutoff = cutoff;
    best.r_squared = r2;
    best.modules = connected_pieces(kept, std::vector<std::size_t>(graph.size(), 0), 1);
  }
  return best;
}

std::vector<FeatureModule> detect_modules(std::span<const BinarizedFeature> features,
                                          const ClusteringParams& params,
                                          std::span<const std::uint64_t> node_keys) {
  std::vector<FeatureModule> out;
  if (features.empty()) return out;
  const auto graphs = build_similarity_graphs(features, params, node_keys);
  for (const auto& fg : graphs) {
    std::vector<std::vector<std::size_t>> groups;
    if (params.algorithm == ClusteringAlgorithm::louvain) {
      groups = louvain_modules(fg.graph, params.louvain_resolution, params.seed);
    } else {
      groups = tom_modules(fg.graph, params.tom_candidate_cutoffs).modules;
    }
    for (const auto& group : groups) {
      FeatureModule mod;
      std::size_t n_up = 0;
      for (auto node : group) {
        const std::size_t pos = fg.feature_positions[node];
        mod.members.push_back(pos);
        if (features[pos].direction == Direction::up) ++n_up;
      }
      std::sort(mod.members.begin(), mod.members.end());
      const std::size_t n_down = mod.members.size() - n_up;
      const Direction majority = n_up >= n_down ? Direction::up : Direction::down;
      mod.mode = (n_up > 0 && n_down > 0) ? Direction::mixed : majority;
      for (auto pos : mod.members) {
        mod.signs.push_back(features[pos].direction == majority ? 1 : -1);
      }
      out.push_back(std::move(mod));
    }
  }
  return out;
}

} // namespace unpast
