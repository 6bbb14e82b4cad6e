#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "dsris/channel.hpp"
#include "dsris/config.hpp"
#include "dsris/harness.hpp"

namespace dsris::testing {

/// Single-sided geometry with every element at the same link distances.
inline Scenario line_scenario(const SystemConfig& c, double ap_r = 10.0, double ue_r = 20.0,
                              std::uint64_t seed = 7) {
  Rng rng(seed);
  std::uniform_real_distribution<double> angle(-1.0, 1.0);
  Scenario s;
  s.ap_angles.resize(c.n_aps);
  s.ue_angles.resize(c.n_ues);
  for (auto& a : s.ap_angles) a = angle(rng);
  for (auto& a : s.ue_angles) a = angle(rng);
  s.ap_ris_distances = RMatrix(c.n_aps, c.n_elements);
  s.ris_ue_distances = RMatrix(c.n_elements, c.n_ues);
  for (auto& d : s.ap_ris_distances.data()) d = ap_r;
  for (auto& d : s.ris_ue_distances.data()) d = ue_r;
  s.element_sides.assign(c.n_elements, Side::Front);
  s.ap_sides.assign(c.n_aps, Side::Front);
  s.ue_sides.assign(c.n_ues, Side::Front);
  s.beta = composite_path_loss(s, c);
  draw_nlos(s, rng);
  return s;
}

/// Channel set with unit path loss and fresh CN(0,1) entries, for rate-model tests
/// that do not care about geometry.
inline ChannelSet gaussian_channels(std::size_t m, std::size_t n, std::size_t k, double wavelength,
                                    std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  ChannelSet ch;
  ch.ap_ris = CMatrix(m, n);
  ch.ris_ue = CMatrix(n, k);
  for (auto& v : ch.ap_ris.data()) v = {g(rng), g(rng)};
  for (auto& v : ch.ris_ue.data()) v = {g(rng), g(rng)};
  ch.beta.assign(k, 1.0);
  ch.positions = grid_positions(n, wavelength / 2.0);
  ch.forced_off.assign(n, 0);
  ch.wavelength_m = wavelength;
  return ch;
}

/// Config whose noise gives roughly 10 dB mean SNR on gaussian_channels.
inline SystemConfig unit_config(std::size_t n, std::size_t m, std::size_t k) {
  SystemConfig c = make_config(n, m, k);
  c.noise_power_w.assign(k, static_cast<double>(n * n * m) / 10.0);
  return c;
}

}  // namespace dsris::testing
