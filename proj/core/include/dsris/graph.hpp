#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dsris/channel.hpp"
#include "dsris/config.hpp"

namespace dsris {

struct Edge {
  std::size_t u = 0;  ///< u < v
  std::size_t v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected interaction graph over RIS elements with distance-decayed weights.
struct RISGraph {
  std::vector<std::size_t> vertex_ids;
  std::vector<double> positions;
  std::vector<Edge> edges;
  std::vector<double> weights;  ///< one per edge, w = exp(-w_decay * |p_u - p_v|)
  double w_decay = 0.0;

  [[nodiscard]] std::size_t size() const noexcept { return vertex_ids.size(); }
};

[[nodiscard]] double edge_weight(double distance, double w_decay);

/// Connects each vertex to its k nearest neighbours on the line (ties broken
/// toward the lower index). Positions must be strictly increasing.
[[nodiscard]] RISGraph build_graph(std::span<const double> positions, double w_decay,
                                   std::size_t k_neighbors);

/// Contiguous block of at most `cap` elements, optimized as one circuit.
struct SubgraphBlock {
  std::size_t block_id = 0;
  std::vector<std::size_t> vertex_ids;        ///< global element indices
  std::vector<Edge> edges;                    ///< local indices into vertex_ids
  std::vector<double> weights;                ///< initial weights of the local edges
  std::vector<std::size_t> boundary_vertices; ///< global ids that lost an edge to the cut

  [[nodiscard]] std::size_t size() const noexcept { return vertex_ids.size(); }
  [[nodiscard]] std::size_t qubits() const noexcept { return 2 * vertex_ids.size(); }
  /// Local adjacency lists.
  [[nodiscard]] std::vector<std::vector<std::size_t>> neighbors() const;
};

/// Blocks above this many elements exceed the 26-qubit statevector budget.
inline constexpr std::size_t kStatevectorBlockLimit = 13;

/// Greedy index-interval partition. Edges crossing a cut are dropped and their
/// endpoints recorded as boundary vertices.
[[nodiscard]] std::vector<SubgraphBlock> partition(const RISGraph& graph, std::size_t cap);

/// Re-estimates positions as prefix sums of mean activations,
/// p_n = d_min * sum_{k<n} <a_k>, and returns the matching edge weights.
[[nodiscard]] std::vector<double> refresh_weights(std::span<const Edge> edges,
                                                  std::span<const double> mean_activation,
                                                  double d_min, double w_decay);
[[nodiscard]] std::vector<double> refresh_weights(const RISGraph& graph,
                                                  std::span<const double> mean_activation,
                                                  double d_min, double w_decay);

struct BlockResult {
  std::vector<std::size_t> vertex_ids;
  std::vector<std::uint8_t> activation;
  std::vector<double> phases;
};

struct StitchedState {
  RISState state;
  Feasibility feasibility;
};

/// Assembles per-block decisions into the global state. Every element must be
/// covered exactly once; infeasible results are flagged, not repaired.
[[nodiscard]] StitchedState stitch(std::span<const BlockResult> blocks, std::size_t n_elements,
                                   const SystemConfig& config);

}  // namespace dsris
