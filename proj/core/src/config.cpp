#include "dsris/config.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "dsris/errors.hpp"

namespace dsris {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double dbm_to_watts(double dbm) { return db_to_linear(dbm) * 1e-3; }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void set_carrier(SystemConfig& config, double carrier_freq_hz) {
  config.carrier_freq_hz = carrier_freq_hz;
  config.wavelength_m = kSpeedOfLight / carrier_freq_hz;
  config.d_min_m = config.wavelength_m / 2.0;
  config.d_total_m =
      static_cast<double>(config.n_elements > 0 ? config.n_elements - 1 : 0) * config.d_min_m;
  config.w_decay_per_m = 1.0 / config.d_min_m;
}

SystemConfig make_config(std::size_t n_elements, std::size_t n_aps, std::size_t n_ues,
                         double carrier_freq_hz) {
  SystemConfig config;
  config.n_elements = n_elements;
  config.n_aps = n_aps;
  config.n_ues = n_ues;
  config.n_min = std::max<std::size_t>(1, (n_elements + 1) / 2);
  config.rician_kappa = db_to_linear(10.0);
  config.noise_power_w.assign(n_ues, dbm_to_watts(-94.0));
  config.tx_power_w.assign(n_ues, 1.0);
  config.loss.ue.assign(n_ues, n_ues > 0 ? 1.0 / static_cast<double>(n_ues) : 0.0);
  set_carrier(config, carrier_freq_hz);
  return config;
}

namespace {

void check(bool ok, const std::string& what) {
  if (!ok) throw DomainError("invalid SystemConfig: " + what);
}

}  // namespace

void validate(const SystemConfig& c) {
  check(c.carrier_freq_hz > 0.0 && c.wavelength_m > 0.0, "carrier and wavelength must be positive");
  check(c.bandwidth_hz > 0.0, "bandwidth must be positive");
  check(c.rician_kappa > 0.0, "rician_kappa must be positive");
  check(c.n_elements >= 1 && c.n_aps >= 1 && c.n_ues >= 1, "dimensions must be at least 1");
  check(c.n_min >= 1 && c.n_min <= c.n_elements, "need 1 <= n_min <= n_elements");
  check(c.d_min_m > 0.0, "d_min must be positive");
  check(c.d_total_m >= c.d_min_m * static_cast<double>(c.n_min - 1) * (1.0 - 1e-12),
        "d_total must cover n_min elements at d_min spacing");
  check(c.noise_power_w.size() == c.n_ues && c.tx_power_w.size() == c.n_ues,
        "per-UE noise and tx power vectors must have n_ues entries");
  for (double v : c.noise_power_w) check(v > 0.0, "noise powers must be positive");
  for (double v : c.tx_power_w) check(v > 0.0, "tx powers must be positive");
  check(c.loss.ue.size() == c.n_ues, "loss.ue must have n_ues entries");
  double sum = 0.0;
  for (double w : c.loss.ue) {
    check(w >= 0.0, "loss.ue weights must be non-negative");
    sum += w;
  }
  check(std::abs(sum - 1.0) < 1e-9, "loss.ue weights must sum to 1");
  check(c.loss.phase_norm >= 0.0 && c.loss.aperture >= 0.0 && c.loss.activation >= 0.0,
        "penalty coefficients must be non-negative");
  check(c.w_decay_per_m >= 0.0, "w_decay must be non-negative");
  check(c.side_power_fraction >= 0.0 && c.side_power_fraction < 1.0,
        "side_power_fraction must lie in [0, 1)");
}

}  // namespace dsris
