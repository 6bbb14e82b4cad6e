#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dsris/channel.hpp"
#include "dsris/circuit.hpp"
#include "dsris/config.hpp"
#include "dsris/graph.hpp"

namespace dsris {

struct TrainOptions {
  std::size_t layers = 2;
  std::size_t epochs = 30;
  double learning_rate = 0.01;
  CircuitOptions circuit;
  bool train_edge_thetas = true;
  bool softmin_weights = false;   ///< re-weight UEs toward the weakest rate each epoch
  double softmin_tau = 0.5;
  /// Track the best state over every decoded evaluation (forward and shifted),
  /// not only the forward pass.
  bool select_from_all_evaluations = true;
  double convergence_delta = 1e-3;
  std::size_t convergence_window = 5;
};

/// One block to optimize; elements outside the block keep their values in `base`.
struct BlockProblem {
  const ChannelSet& channels;
  const SystemConfig& config;
  const SubgraphBlock& block;
  RISState base;
};

struct BlockEvaluation {
  double loss = 0.0;
  RISState state;  ///< global state with the block decoded in; activation is effective
  Evaluation metrics;
  CircuitRun run;
};

/// Runs the block circuit, writes its decoded decisions into the base state and
/// scores the result.
[[nodiscard]] BlockEvaluation evaluate_block(const CircuitParams& params, const BlockProblem& problem,
                                             const TrainOptions& options, std::uint64_t seed,
                                             std::span<const double> ue_weights = {},
                                             std::optional<AngleShift> shift = {});

/// 1 where the flat parameter is trained. Edge thetas follow train_edge_thetas;
/// beta is frozen when activations are forced on.
[[nodiscard]] std::vector<std::uint8_t> trainable_mask(const CircuitParams& params,
                                                       const TrainOptions& options);

/// Gradient of the loss in every trainable parameter, two circuit evaluations
/// each. Activation-driving parameters use the +-pi/2 difference of the full
/// loss; the others chain the parameter-shift derivative of <Z_phase> with the
/// analytic phase gradient at the forward state. `observe` sees every shifted
/// evaluation.
[[nodiscard]] std::vector<double> loss_gradient(
    const CircuitParams& params, const BlockProblem& problem, const TrainOptions& options,
    std::uint64_t seed, std::span<const double> ue_weights, const BlockEvaluation& forward,
    std::span<const std::uint8_t> mask,
    const std::function<void(const BlockEvaluation&)>& observe = {});

struct TrainReport {
  std::vector<double> loss_trace;      ///< forward loss per epoch
  std::vector<double> min_rate_trace;  ///< best feasible min-rate seen in each epoch
  RISState best_state;
  double best_min_rate = 0.0;
  bool best_feasible = false;
  std::size_t convergence_epoch = 0;   ///< 1-based
  std::size_t circuit_evals = 0;
  double wall_time_s = 0.0;
  CircuitParams final_params;
};

/// First 1-based epoch e such that every loss in [e, e + window) lies within
/// delta of the minimum over epochs 1 .. e + window - 1; trace.size() otherwise.
[[nodiscard]] std::size_t detect_convergence(std::span<const double> loss_trace, double delta,
                                             std::size_t window);

/// softmax(-R_k / tau).
[[nodiscard]] std::vector<double> softmin_weights(std::span<const double> rates, double tau);

/// Gradient descent on one block's circuit parameters.
[[nodiscard]] TrainReport train(const BlockProblem& problem, const TrainOptions& options,
                                std::uint64_t seed);
/// Same, from given starting parameters.
[[nodiscard]] TrainReport train(const BlockProblem& problem, const TrainOptions& options,
                                std::uint64_t seed, CircuitParams initial);

struct QgcnResult {
  RISState state;
  Evaluation metrics;
  std::vector<TrainReport> block_reports;
  std::size_t circuit_evals = 0;
  std::size_t convergence_epoch = 0;  ///< latest over blocks
  double wall_time_s = 0.0;
};

/// Partitions the graph, trains the blocks in order (later blocks see the earlier
/// blocks' best decisions) and stitches the result.
[[nodiscard]] QgcnResult optimize_qgcn(const ChannelSet& channels, const SystemConfig& config,
                                       const RISGraph& graph, std::size_t block_cap,
                                       const TrainOptions& options, std::uint64_t seed);

}  // namespace dsris
