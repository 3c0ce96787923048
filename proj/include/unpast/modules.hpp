#pragma once

#include "unpast/binarization.hpp"
#include "unpast/types.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace unpast {

enum class ClusteringAlgorithm { louvain, tom };
enum class DirectionMode { separate, joint };

std::string_view to_string(ClusteringAlgorithm a);
std::string_view to_string(DirectionMode m);
ClusteringAlgorithm parse_clustering_algorithm(std::string_view s);
DirectionMode parse_direction_mode(std::string_view s);

struct ClusteringParams {
  ClusteringAlgorithm algorithm = ClusteringAlgorithm::louvain;
  DirectionMode direction_mode = DirectionMode::separate;
  double edge_threshold = 1.0 / 3.0;
  double louvain_resolution = 1.0;
  std::vector<double> tom_candidate_cutoffs = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::uint64_t seed = 0;
};

void validate(const ClusteringParams& p);

/// Undirected weighted graph without self loops. Each node carries a key
/// used to order visits, so results follow node identity rather than position.
class SimilarityGraph {
public:
  struct Edge {
    std::size_t to;
    double weight;
  };

  explicit SimilarityGraph(std::size_t n_nodes = 0);
  SimilarityGraph(std::size_t n_nodes, std::vector<std::uint64_t> keys);

  std::size_t size() const { return adjacency_.size(); }
  std::size_t edge_count() const { return n_edges_; }

  /// Adds the edge {a, b}; a != b and the edge must not exist yet.
  void add_edge(std::size_t a, std::size_t b, double weight);
  double weight(std::size_t a, std::size_t b) const;
  std::span<const Edge> neighbors(std::size_t a) const { return adjacency_[a]; }
  double degree(std::size_t a) const;
  std::uint64_t key(std::size_t a) const { return keys_[a]; }

private:
  std::vector<std::vector<Edge>> adjacency_;
  std::vector<std::uint64_t> keys_;
  std::size_t n_edges_ = 0;
};

/// Jaccard index of the two minority sample sets.
double feature_similarity(const BinarizedFeature& a, const BinarizedFeature& b);

/// One similarity graph plus, for each node, its position in the feature list
/// it was built from.
struct FeatureGraph {
  SimilarityGraph graph;
  std::vector<std::size_t> feature_positions;
};

/// Builds the thresholded similarity graph(s): two graphs (up features, then
/// down features) in separate mode, one graph in joint mode. `node_keys`, if
/// given, holds one key per feature; defaults to the feature index.
std::vector<FeatureGraph> build_similarity_graphs(std::span<const BinarizedFeature> features,
                                                  const ClusteringParams& params,
                                                  std::span<const std::uint64_t> node_keys = {});

/// Louvain modularity maximization. Returns the communities with at least two
/// members as sorted node lists; communities that end up internally
/// disconnected are split into their connected parts.
std::vector<std::vector<std::size_t>> louvain_modules(const SimilarityGraph& graph,
                                                          double resolution, std::uint64_t seed);

/// Modularity of a node -> community labelling at the given resolution.
double modularity(const SimilarityGraph& graph, std::span<const std::size_t> labels,
                  double resolution);

/// Unsigned topological overlap of every adjacent pair.
std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>> topological_overlap(
    const SimilarityGraph& graph);

/// R^2 of the log10(frequency) ~ log10(degree) fit of a degree sequence;
/// 0 when fewer than three distinct positive degrees exist.
double scale_free_fit(std::span<const std::size_t> degrees);

struct TomSelection {
  double cutoff = 0.0;
  double r_squared = 0.0;
  std::vector<std::vector<std::size_t>> modules;
};

/// Simplified WGCNA-style clustering: threshold topological overlap at each
/// candidate cutoff, score the resulting degree distribution by its
/// scale-free fit, and return the connected components (size >= 2) at the
/// best cutoff (ties go to the lower cutoff).
TomSelection tom_modules(const SimilarityGraph& graph, std::span<const double> candidate_cutoffs);

struct FeatureModule {
  /// Positions into the BinarizedFeature list the module was detected from.
  std::vector<std::size_t> members;
  /// +1 if the member's direction matches the module majority, else -1.
  std::vector<int> signs;
  Direction mode = Direction::up;
};

/// Full module detection: graph construction, clustering, and sign
/// assignment. `node_keys` as in build_similarity_graphs.
std::vector<FeatureModule> detect_modules(std::span<const BinarizedFeature> features,
                                          const ClusteringParams& params,
                                          std::span<const std::uint64_t> node_keys = {});

} // namespace unpast
