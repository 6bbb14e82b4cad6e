#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dsris/errors.hpp"
#include "dsris/graph.hpp"

namespace dsris {
namespace {

RISGraph grid_graph(std::size_t n, std::size_t k = 2, double d = 0.5) {
  return build_graph(grid_positions(n, d), 1.0 / d, k);
}

TEST(BuildGraph, TwoVertices) {
  const std::vector<double> pos{0.0, 0.3};
  const auto g = build_graph(pos, 2.0, 2);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges[0], (Edge{0, 1}));
  EXPECT_DOUBLE_EQ(g.weights[0], std::exp(-0.6));
}

TEST(BuildGraph, WeightUpperBoundAtZeroDistance) { EXPECT_EQ(edge_weight(0.0, 5.0), 1.0); }

TEST(BuildGraph, ChainWithOneNeighbourIsAPath) {
  const auto g = grid_graph(5, 1);
  ASSERT_EQ(g.edges.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(g.edges[i], (Edge{i, i + 1}));
}

TEST(BuildGraph, EdgeCountIsLinearAndWeightsInUnitInterval) {
  for (std::size_t n : {4u, 10u, 40u, 100u}) {
    const auto g = grid_graph(n, 2);
    EXPECT_LE(g.edges.size(), 2 * n);
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      EXPECT_LT(g.edges[e].u, g.edges[e].v);
      EXPECT_GT(g.weights[e], 0.0);
      EXPECT_LE(g.weights[e], 1.0);
      EXPECT_DOUBLE_EQ(g.weights[e], std::exp(-g.w_decay * (g.positions[g.edges[e].v] - g.positions[g.edges[e].u])));
    }
  }
  // two nearest on an evenly spaced line: interior ties go to the lower index
  const auto g = grid_graph(4, 2);
  EXPECT_EQ(g.edges, (std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}}));
}

TEST(BuildGraph, RejectsBadInput) {
  EXPECT_THROW((void)build_graph(std::vector<double>{}, 1.0, 2), DomainError);
  EXPECT_THROW((void)build_graph(std::vector<double>{0.0, 0.0}, 1.0, 2), ContractViolation);
  EXPECT_THROW((void)build_graph(std::vector<double>{0.0, 1.0}, 1.0, 0), ContractViolation);
}

TEST(BuildGraph, WeightDecreasesWithSeparation) {
  double previous = 1.0;
  for (double d = 0.1; d < 3.0; d += 0.1) {
    const double w = edge_weight(d, 1.7);
    EXPECT_LT(w, previous);
    previous = w;
  }
}

TEST(Partition, EvenSplit) {
  const auto blocks = partition(grid_graph(10), 5);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0].size(), 5u);
  EXPECT_EQ(blocks[1].size(), 5u);
  EXPECT_EQ(blocks[1].vertex_ids.front(), 5u);
  EXPECT_EQ(blocks[0].qubits(), 10u);
}

TEST(Partition, GreedyIntervals) {
  const auto blocks = partition(grid_graph(7), 3);
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(blocks[0].size(), 3u);
  EXPECT_EQ(blocks[1].size(), 3u);
  EXPECT_EQ(blocks[2].size(), 1u);
}

TEST(Partition, SmallGraphIsOneBlockWithEveryEdge) {
  const auto g = grid_graph(4);
  const auto blocks = partition(g, 6);
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(blocks[0].edges, g.edges);
  EXPECT_EQ(blocks[0].weights, g.weights);
  EXPECT_TRUE(blocks[0].boundary_vertices.empty());
}

TEST(Partition, BlocksAreDisjointAndCovering) {
  const auto g = grid_graph(23, 3);
  const auto blocks = partition(g, 4);
  std::vector<int> seen(23, 0);
  std::size_t kept = 0;
  for (const auto& b : blocks) {
    EXPECT_LE(b.size(), 4u);
    for (auto v : b.vertex_ids) ++seen[v];
    kept += b.edges.size();
    for (const auto& e : b.edges) {
      EXPECT_LT(e.u, b.size());
      EXPECT_LT(e.v, b.size());
    }
  }
  for (int s : seen) EXPECT_EQ(s, 1);
  EXPECT_LT(kept, g.edges.size());
  EXPECT_FALSE(blocks[0].boundary_vertices.empty());
}

TEST(RefreshWeights, FullyActiveRevertsToGrid) {
  const double d = 0.005;
  const auto g = build_graph(grid_positions(6, d), 1.0 / d, 2);
  const auto w = refresh_weights(g, std::vector<double>(6, 1.0), d, 1.0 / d);
  for (std::size_t e = 0; e < w.size(); ++e) EXPECT_NEAR(w[e], g.weights[e], 1e-12);
}

TEST(RefreshWeights, FullyInactiveCollapses) {
  const auto g = grid_graph(5);
  for (double w : refresh_weights(g, std::vector<double>(5, 0.0), 0.5, 2.0)) EXPECT_EQ(w, 1.0);
}

TEST(RefreshWeights, PrefixSumPositions) {
  // one edge between elements 0 and 1: p_hat_1 = 0.5 d_min
  const std::vector<Edge> edges{{0, 1}, {1, 2}};
  const auto w = refresh_weights(edges, std::vector<double>{0.5, 1.0, 0.3}, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(w[0], std::exp(-1.0));
  EXPECT_DOUBLE_EQ(w[1], std::exp(-2.0));
}

TEST(RefreshWeights, Idempotent) {
  const auto g = grid_graph(6);
  const std::vector<double> mean{0.2, 0.9, 0.4, 1.0, 0.0, 0.7};
  EXPECT_EQ(refresh_weights(g, mean, 0.5, 2.0), refresh_weights(g, mean, 0.5, 2.0));
}

TEST(Stitch, SingleBlockPassthrough) {
  const auto c = make_config(3, 1, 1);
  BlockResult b{{0, 1, 2}, {1, 0, 1}, {0.1, 0.2, 0.3}};
  const auto s = stitch(std::vector<BlockResult>{b}, 3, c);
  EXPECT_EQ(s.state.activation, b.activation);
  EXPECT_EQ(s.state.phases, b.phases);
  EXPECT_TRUE(s.feasibility.ok());
}

TEST(Stitch, ConcatenatesAndFlagsInfeasible) {
  auto c = make_config(4, 1, 1);
  const std::vector<BlockResult> blocks{{{0, 1}, {1, 0}, {0.0, 0.0}}, {{2, 3}, {0, 1}, {0.0, 0.0}}};
  const auto s = stitch(blocks, 4, c);
  EXPECT_EQ(s.state.activation, (std::vector<std::uint8_t>{1, 0, 0, 1}));
  c.n_min = 3;
  const auto flagged = stitch(blocks, 4, c);
  EXPECT_FALSE(flagged.feasibility.min_active);
  EXPECT_EQ(flagged.state.activation, (std::vector<std::uint8_t>{1, 0, 0, 1}));
}

TEST(Stitch, CoverageContract) {
  const auto c = make_config(3, 1, 1);
  EXPECT_THROW((void)stitch(std::vector<BlockResult>{{{0, 1}, {1, 1}, {0.0, 0.0}}}, 3, c), ContractViolation);
  EXPECT_THROW((void)stitch(std::vector<BlockResult>{{{0, 1}, {1, 1}, {0.0, 0.0}}, {{1, 2}, {1, 1}, {0.0, 0.0}}}, 3, c),
               ContractViolation);
}

TEST(Stitch, PartitionRoundTrip) {
  const std::size_t n = 11;
  const auto g = grid_graph(n);
  const auto c = make_config(n, 1, 1);
  Rng rng(5);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  RISState global = RISState::all_active(n);
  for (std::size_t i = 0; i < n; ++i) {
    global.activation[i] = static_cast<std::uint8_t>(i % 3 != 0);
    global.phases[i] = u(rng);
  }
  std::vector<BlockResult> pieces;
  for (const auto& b : partition(g, 4)) {
    BlockResult r{b.vertex_ids, {}, {}};
    for (auto v : b.vertex_ids) {
      r.activation.push_back(global.activation[v]);
      r.phases.push_back(global.phases[v]);
    }
    pieces.push_back(r);
  }
  EXPECT_EQ(stitch(pieces, n, c).state, global);
}

}  // namespace
}  // namespace dsris
