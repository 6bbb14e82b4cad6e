#include "dsris/graph.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <string>
#include <utility>

#include "dsris/errors.hpp"

namespace dsris {

double edge_weight(double distance, double w_decay) { return std::exp(-w_decay * std::abs(distance)); }

RISGraph build_graph(std::span<const double> positions, double w_decay, std::size_t k_neighbors) {
  if (positions.empty()) throw DomainError("build_graph: empty position list");
  require(k_neighbors >= 1, "build_graph: k_neighbors must be at least 1");
  for (std::size_t i = 1; i < positions.size(); ++i) {
    require(positions[i] > positions[i - 1], "build_graph: positions must be strictly increasing");
  }
  const std::size_t n = positions.size();
  RISGraph g;
  g.w_decay = w_decay;
  g.positions.assign(positions.begin(), positions.end());
  g.vertex_ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.vertex_ids[i] = i;

  std::set<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(positions[a] - positions[i]) < std::abs(positions[b] - positions[i]);
    });
    std::size_t taken = 0;
    for (std::size_t j : order) {
      if (j == i) continue;
      if (taken++ == k_neighbors) break;
      edges.emplace(std::min(i, j), std::max(i, j));
    }
  }
  for (const auto& [u, v] : edges) {
    g.edges.push_back({u, v});
    g.weights.push_back(edge_weight(positions[v] - positions[u], w_decay));
  }
  return g;
}

std::vector<std::vector<std::size_t>> SubgraphBlock::neighbors() const {
  std::vector<std::vector<std::size_t>> adj(vertex_ids.size());
  for (const auto& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  return adj;
}

std::vector<SubgraphBlock> partition(const RISGraph& graph, std::size_t cap) {
  require(cap >= 1, "partition: cap must be at least 1");
  if (cap > kStatevectorBlockLimit) {
    std::clog << "warning: partition cap " << cap << " needs " << 2 * cap
              << " qubits per block, beyond the statevector budget of "
              << 2 * kStatevectorBlockLimit << '\n';
  }
  const std::size_t n = graph.size();
  std::vector<SubgraphBlock> blocks;
  std::vector<std::size_t> block_of(n);
  std::vector<std::size_t> local_of(n);
  for (std::size_t start = 0; start < n; start += cap) {
    SubgraphBlock b;
    b.block_id = blocks.size();
    for (std::size_t i = start; i < std::min(n, start + cap); ++i) {
      block_of[i] = b.block_id;
      local_of[i] = b.vertex_ids.size();
      b.vertex_ids.push_back(graph.vertex_ids[i]);
    }
    blocks.push_back(std::move(b));
  }
  std::vector<std::set<std::size_t>> boundary(blocks.size());
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto [u, v] = graph.edges[e];
    if (block_of[u] == block_of[v]) {
      auto& b = blocks[block_of[u]];
      b.edges.push_back({local_of[u], local_of[v]});
      b.weights.push_back(graph.weights[e]);
    } else {
      boundary[block_of[u]].insert(graph.vertex_ids[u]);
      boundary[block_of[v]].insert(graph.vertex_ids[v]);
    }
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    blocks[b].boundary_vertices.assign(boundary[b].begin(), boundary[b].end());
  }
  return blocks;
}

std::vector<double> refresh_weights(std::span<const Edge> edges, std::span<const double> mean_activation,
                                    double d_min, double w_decay) {
  std::vector<double> p_hat(mean_activation.size(), 0.0);
  for (std::size_t n = 1; n < p_hat.size(); ++n) {
    p_hat[n] = p_hat[n - 1] + mean_activation[n - 1] * d_min;
  }
  std::vector<double> w(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    require(edges[e].u < p_hat.size() && edges[e].v < p_hat.size(),
            "refresh_weights: edge endpoint out of range");
    w[e] = edge_weight(p_hat[edges[e].v] - p_hat[edges[e].u], w_decay);
  }
  return w;
}

std::vector<double> refresh_weights(const RISGraph& graph, std::span<const double> mean_activation,
                                    double d_min, double w_decay) {
  return refresh_weights(graph.edges, mean_activation, d_min, w_decay);
}

StitchedState stitch(std::span<const BlockResult> blocks, std::size_t n_elements,
                     const SystemConfig& config) {
  StitchedState out;
  out.state.activation.assign(n_elements, 0);
  out.state.phases.assign(n_elements, 0.0);
  std::vector<std::uint8_t> covered(n_elements, 0);
  for (const auto& b : blocks) {
    require(b.activation.size() == b.vertex_ids.size() && b.phases.size() == b.vertex_ids.size(),
            "stitch: block result arrays are mis-sized");
    for (std::size_t i = 0; i < b.vertex_ids.size(); ++i) {
      const std::size_t v = b.vertex_ids[i];
      require(v < n_elements, "stitch: vertex id " + std::to_string(v) + " out of range");
      require(covered[v] == 0, "stitch: vertex " + std::to_string(v) + " covered twice");
      covered[v] = 1;
      out.state.activation[v] = b.activation[i];
      out.state.phases[v] = b.phases[i];
    }
  }
  for (std::size_t v = 0; v < n_elements; ++v) {
    require(covered[v] != 0, "stitch: vertex " + std::to_string(v) + " not covered");
  }
  out.feasibility = feasibility(out.state.activation, config);
  return out;
}

}  // namespace dsris
