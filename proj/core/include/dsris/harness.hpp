#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsris/channel.hpp"
#include "dsris/circuit.hpp"
#include "dsris/config.hpp"
#include "dsris/qsim.hpp"

namespace dsris {

enum class Method : std::uint8_t { Qgcn, Gnn, Gd, Random, Fixed, Continuous, Discrete, Oracle };
enum class AblationMode : std::uint8_t { Full, NoVirtualSpacing, NoDoubleSided };

[[nodiscard]] std::string to_string(Method m);
[[nodiscard]] std::string to_string(AblationMode m);
/// Throws ContractViolation on unknown names.
[[nodiscard]] Method parse_method(const std::string& name);
[[nodiscard]] AblationMode parse_ablation(const std::string& name);

struct ExperimentSpec {
  std::uint64_t seed_base = 1;
  std::size_t n_runs = 20;
  SystemConfig config = make_config(4, 2, 3);
  std::vector<Method> methods{Method::Qgcn, Method::Random};
  AblationMode ablation = AblationMode::Full;
  bool double_sided = true;
  std::optional<double> snr_db = 10.0;  ///< empty: keep config noise power

  // QGCN
  std::size_t layers = 2;
  std::size_t epochs = 30;
  double learning_rate = 0.01;
  CircuitForm form = CircuitForm::Equations;
  bool train_edge_thetas = true;
  bool softmin_weights = false;
  bool noise = false;
  qsim::NoiseModel noise_model = qsim::NoiseModel::ablation();
  bool exact = false;                   ///< infinite-shot expectations
  std::uint64_t shots = 2048;
  std::size_t trajectories = 32;
  std::size_t block_cap = 6;
  std::size_t k_neighbors = 2;

  // classical baselines
  unsigned phase_bits = 2;
  double gd_learning_rate = 0.05;
  double gnn_learning_rate = 0.05;
  bool grid_scoring = false;            ///< score every method after projecting to phase_bits

  bool record_timing = false;           ///< export wall_time (breaks byte-identical reruns)
};

/// Throws ContractViolation when the spec cannot be run.
void validate(const ExperimentSpec& spec);

struct ResultRow {
  std::string config;      ///< ablation configuration label
  std::size_t n_elements = 0;
  std::string method;
  std::uint64_t seed = 0;
  double min_rate = 0.0;   ///< bps/Hz
  double sum_rate = 0.0;   ///< bps/Hz
  std::vector<double> rates;
  std::size_t n_active = 0;
  bool feasible = false;
  std::size_t convergence_epoch = 0;
  std::size_t circuit_evals = 0;
  double wall_time_s = 0.0;
  std::string scenario_digest;
  RISState state;          ///< not exported
};

/// Angles U[-pi/3, pi/3], distances U[5, 50] m, sides uniform when
/// double-sided (elements alternate front/back), all front otherwise, then
/// the NLoS draws. Every element of a link shares the link's reference distance.
[[nodiscard]] Scenario generate_scenario(std::uint64_t seed, const SystemConfig& config,
                                         bool double_sided = true);

/// FNV-1a over the scenario's numeric content, as 16 hex digits.
[[nodiscard]] std::string scenario_digest(const Scenario& scenario);

/// Channel set for one ablation configuration of a scenario.
[[nodiscard]] ChannelSet ablation_channels(const Scenario& scenario, const SystemConfig& config,
                                           AblationMode mode);

/// Runs every method on one seed.
[[nodiscard]] std::vector<ResultRow> run_seed(const ExperimentSpec& spec, std::uint64_t seed);

/// n_runs seeds starting at seed_base, every method.
[[nodiscard]] std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

/// Full, no-virtual-spacing and no-double-sided on identical seeds.
[[nodiscard]] std::vector<ResultRow> run_ablation(const ExperimentSpec& spec);

/// Repeats run_experiment for each N; n_min and the aperture cap follow N.
[[nodiscard]] std::vector<ResultRow> run_sweep(const ExperimentSpec& spec,
                                               const std::vector<std::size_t>& n_values);

/// Brute-force oracle per seed next to the configured methods. With
/// grid_scoring every method is scored after projection to the oracle's grid.
[[nodiscard]] std::vector<ResultRow> run_oracle(const ExperimentSpec& spec);

struct SummaryRow {
  std::string config;
  std::size_t n_elements = 0;
  std::string method;
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double ci95 = 0.0;  ///< half-width, Student t
  double convergence_mean = 0.0;
  double feasible_fraction = 0.0;
};

/// Groups rows by (config, n_elements, method) in first-seen order.
[[nodiscard]] std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

struct TimingInputs {
  double coherence_time_ms = 1.5;
  double pilot_time_ms = 0.1;
  double opt_time_ms = 18.3;
  double switch_time_ms = 0.0;
  double doppler_hz = 280.0;
  double user_velocity_mps = 3.0;
  double symbol_duration_us = 10.0;
};

struct OverheadReport {
  CoherenceReport coherence;
  double coherence_symbols = 0.0;
  double overhead_symbols = 0.0;
  double overhead_fraction = 0.0;  ///< (T_p + T_opt + T_switch) / T_c
  double implied_doppler_hz = 0.0; ///< v f_c / c
};

[[nodiscard]] OverheadReport overhead_report(const TimingInputs& timing, double carrier_freq_hz);

}  // namespace dsris
