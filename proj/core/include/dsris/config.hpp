#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

namespace dsris {

inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Every stochastic operation takes an explicit engine so Monte Carlo runs can
/// own independent, seeded streams.
using Rng = std::mt19937_64;

[[nodiscard]] double db_to_linear(double db);
[[nodiscard]] double dbm_to_watts(double dbm);

/// Derives an independent 64-bit seed from a base seed and a stream label
/// (splitmix64 finalizer).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Coefficients of the training loss.
struct LossWeights {
  std::vector<double> ue;      ///< per-UE rate weights w_k; non-negative, sum to 1
  double phase_norm = 1e-4;    ///< weight on the squared phase norm of active elements
  double aperture = 10.0;      ///< indicator penalty when the aperture cap is exceeded
  double activation = 1.0;     ///< quadratic hinge on the active-element deficit
};

/// Physical constants and problem dimensions. Build through make_config() so
/// that the wavelength-derived quantities stay consistent.
struct SystemConfig {
  double carrier_freq_hz = 28e9;
  double wavelength_m = kSpeedOfLight / 28e9;
  double bandwidth_hz = 100e6;
  double rician_kappa = 10.0;  ///< linear LoS/NLoS power ratio
  std::vector<double> noise_power_w;
  std::vector<double> tx_power_w;
  std::size_t n_elements = 4;
  std::size_t n_aps = 2;
  std::size_t n_ues = 3;
  std::size_t n_min = 2;
  double d_min_m = 0.0;
  double d_total_m = 0.0;
  std::array<double, 2> path_loss_exponents{2.2, 3.8};  ///< AP-RIS, RIS-UE
  LossWeights loss;
  double w_decay_per_m = 0.0;       ///< edge-weight decay; defaults to 1/d_min
  double side_power_fraction = 0.1; ///< a side is powered above this share of LoS power
};

/// Defaults: 28 GHz carrier, 100 MHz bandwidth, kappa = 10 dB, -94 dBm noise,
/// 1 W per UE, d_min = lambda/2, aperture cap (N-1)*d_min, N_min = ceil(N/2),
/// uniform w_k.
[[nodiscard]] SystemConfig make_config(std::size_t n_elements, std::size_t n_aps,
                                       std::size_t n_ues, double carrier_freq_hz = 28e9);

/// Re-derives wavelength, d_min and w_decay after the carrier changes.
void set_carrier(SystemConfig& config, double carrier_freq_hz);

/// Throws DomainError when an invariant of SystemConfig does not hold.
void validate(const SystemConfig& config);

}  // namespace dsris
