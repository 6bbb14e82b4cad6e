#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsris/channel.hpp"
#include "dsris/config.hpp"
#include "dsris/graph.hpp"
#include "dsris/trainer.hpp"

namespace dsris {

inline constexpr std::size_t kBruteForceMaxElements = 6;
inline constexpr unsigned kBruteForceMaxBits = 3;

struct OracleResult {
  RISState best_state;
  double best_min_rate = 0.0;
  std::size_t configurations_searched = 0;
  std::size_t feasible_patterns = 0;
};

/// Exhaustive search over feasible activation patterns (elements forced off by
/// the channel set stay off) and B-bit phases of the active elements. Throws
/// DomainError for N > 6 or B > 3.
[[nodiscard]] OracleResult brute_force(const ChannelSet& channels, const SystemConfig& config,
                                       unsigned phase_bits);

/// Activation patterns satisfying both feasibility constraints, as bitmasks.
[[nodiscard]] std::vector<std::uint32_t> feasible_patterns(const SystemConfig& config,
                                                           std::span<const std::uint8_t> forced_off = {});

/// Rounds every phase to the nearest of 2^B levels 2 pi t / 2^B.
[[nodiscard]] RISState project_phases(const RISState& state, unsigned phase_bits);

/// All elements active, uniform random phases.
[[nodiscard]] RISState random_phase_config(std::size_t n_elements, Rng& rng);

/// All elements active, phases co-phasing the cascade toward the UE with the
/// strongest channel.
[[nodiscard]] RISState fixed_spacing_config(const ChannelSet& channels, const SystemConfig& config);

/// Coordinate ascent on the min-rate over continuous phases, all elements
/// active, starting from fixed_spacing_config. Each coordinate step is a
/// golden-section search on [phi - pi, phi + pi].
[[nodiscard]] RISState continuous_phase_config(const ChannelSet& channels, const SystemConfig& config,
                                               std::size_t sweeps = 3, std::size_t evals_per_step = 16);

struct LabeledState {
  std::string label;
  RISState state;
};

/// "random", "fixed", "continuous" and "discrete" (continuous projected to B bits).
[[nodiscard]] std::vector<LabeledState> reference_configs(const ChannelSet& channels,
                                                          const SystemConfig& config, Rng& rng,
                                                          unsigned phase_bits);

struct BaselineReport {
  RISState state;
  Evaluation metrics;
  std::vector<double> loss_trace;
  std::vector<RISState> state_trace;  ///< state after each epoch's update
  std::size_t convergence_epoch = 0;
  double wall_time_s = 0.0;
};

/// Gradient descent on the phases of the active elements with the analytic loss
/// gradient. Activations stay at `initial` (forced-off elements removed).
[[nodiscard]] BaselineReport phase_gradient_descent(const ChannelSet& channels,
                                                    const SystemConfig& config,
                                                    const RISState& initial, std::size_t epochs,
                                                    double learning_rate);

struct GnnOptions {
  std::size_t rounds = 2;
  std::size_t epochs = 30;
  double learning_rate = 0.01;
  bool messages = true;        ///< false: no aggregation rounds, node features used directly
  bool train_logits = true;
  double initial_logit = 2.0;
  std::optional<std::vector<double>> initial_phases;  ///< default: U(-0.1, 0.1)
  double fd_step = 1e-6;
};

/// Classical message-passing baseline on the same graph. Node features are a
/// relaxed activation logit and a phase; each round adds
/// tanh(W [x_n ; mean_w(x_neighbours)] + b). Trained with central finite
/// differences on the relaxed loss; decoded by thresholding sigmoid at 0.5.
[[nodiscard]] BaselineReport classical_gnn(const ChannelSet& channels, const SystemConfig& config,
                                           const RISGraph& graph, const GnnOptions& options,
                                           std::uint64_t seed);

}  // namespace dsris
