#include "dsris/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "dsris/errors.hpp"

namespace dsris {

namespace {

constexpr Complex kJ{0.0, 1.0};

Complex unit_phasor(double phase) { return {std::cos(phase), std::sin(phase)}; }

double free_space_amplitude(double r, double wavelength) {
  if (!(r > 0.0)) {
    throw DomainError("link distance must be strictly positive, got " + std::to_string(r));
  }
  return wavelength / (4.0 * std::numbers::pi * r);
}

std::vector<std::size_t> active_indices(std::span<const std::uint8_t> activation) {
  std::vector<std::size_t> idx;
  for (std::size_t n = 0; n < activation.size(); ++n) {
    if (activation[n] != 0) idx.push_back(n);
  }
  return idx;
}

void check_state(const RISState& state, const ChannelSet& channels) {
  require(state.activation.size() == channels.n_elements() &&
              state.phases.size() == channels.n_elements(),
          "RISState size does not match the number of RIS elements");
}

std::span<const double> pick_weights(std::span<const double> ue_weights, const SystemConfig& c) {
  return ue_weights.empty() ? std::span<const double>(c.loss.ue) : ue_weights;
}

double aperture_of(std::span<const std::uint8_t> activation, double d_min) {
  const auto idx = active_indices(activation);
  if (idx.size() < 2) return 0.0;
  return static_cast<double>(idx.back() - idx.front()) * d_min;
}

}  // namespace

ReflectionTerms reflection_terms(std::span<const std::uint8_t> activation, const ChannelSet& ch) {
  ReflectionTerms out;
  out.idx = active_indices(activation);
  const std::size_t na = out.idx.size();
  const std::size_t k_count = ch.n_ues();
  out.t = CMatrix(na, k_count);
  if (na == 0) return out;

  std::vector<double> pos(na);
  std::vector<Complex> u(na);
  for (std::size_t i = 0; i < na; ++i) {
    pos[i] = ch.positions[out.idx[i]];
    Complex acc{};
    for (std::size_t m = 0; m < ch.n_aps(); ++m) acc += std::conj(ch.ap_ris(m, out.idx[i]));
    u[i] = acc;
  }
  const CMatrix coupling = mutual_coupling(pos, ch.wavelength_m);
  for (std::size_t j = 0; j < na; ++j) {
    Complex c{};
    for (std::size_t i = 0; i < na; ++i) c += u[i] * coupling(i, j);
    for (std::size_t k = 0; k < k_count; ++k) {
      out.t(j, k) = std::sqrt(ch.beta[k]) * c * ch.ris_ue(out.idx[j], k);
    }
  }
  return out;
}

std::vector<Complex> effective_sums(const ReflectionTerms& terms, std::span<const double> phases,
                                    std::span<const double> amplitudes) {
  std::vector<Complex> s(terms.t.cols());
  for (std::size_t j = 0; j < terms.idx.size(); ++j) {
    Complex rot = unit_phasor(phases[terms.idx[j]]);
    if (!amplitudes.empty()) rot *= amplitudes[terms.idx[j]];
    for (std::size_t k = 0; k < s.size(); ++k) s[k] += terms.t(j, k) * rot;
  }
  return s;
}

std::vector<double> received_gains(const ReflectionTerms& terms, std::span<const double> phases,
                                   std::span<const double> amplitudes) {
  const auto s = effective_sums(terms, phases, amplitudes);
  std::vector<double> g(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) g[k] = std::norm(s[k]);
  return g;
}

RISState RISState::all_active(std::size_t n) {
  return RISState{std::vector<std::uint8_t>(n, 1), std::vector<double>(n, 0.0)};
}

double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

std::size_t active_count(std::span<const std::uint8_t> activation) {
  return static_cast<std::size_t>(
      std::count_if(activation.begin(), activation.end(), [](std::uint8_t a) { return a != 0; }));
}

std::vector<double> grid_positions(std::size_t n, double d_min) {
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(i) * d_min;
  return p;
}

LosComponents los_components(const Scenario& s, const SystemConfig& c) {
  const std::size_t m_count = s.ap_angles.size();
  const std::size_t k_count = s.ue_angles.size();
  const std::size_t n_count = c.n_elements;
  require(s.ap_ris_distances.rows() == m_count && s.ap_ris_distances.cols() == n_count,
          "ap_ris_distances must be M x N");
  require(s.ris_ue_distances.rows() == n_count && s.ris_ue_distances.cols() == k_count,
          "ris_ue_distances must be N x K");

  const double lambda = c.wavelength_m;
  const double k0 = kTwoPi / lambda;
  const auto pos = grid_positions(n_count, c.d_min_m);
  LosComponents out{CMatrix(m_count, n_count), CMatrix(n_count, k_count)};
  for (std::size_t m = 0; m < m_count; ++m) {
    const double steer = std::sin(s.ap_angles[m]);
    for (std::size_t n = 0; n < n_count; ++n) {
      const double r = s.ap_ris_distances(m, n);
      const double amp = free_space_amplitude(r, lambda);
      out.ap_ris(m, n) = amp * unit_phasor(-k0 * r) * unit_phasor(k0 * pos[n] * steer);
    }
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    const double steer = std::sin(s.ue_angles[k]);
    for (std::size_t n = 0; n < n_count; ++n) {
      const double r = s.ris_ue_distances(n, k);
      const double amp = free_space_amplitude(r, lambda);
      out.ris_ue(n, k) = amp * unit_phasor(-k0 * r) * unit_phasor(-k0 * pos[n] * steer);
    }
  }
  return out;
}

std::vector<double> composite_path_loss(const Scenario& s, const SystemConfig& c) {
  const auto& ap = s.ap_ris_distances;
  const auto& ue = s.ris_ue_distances;
  require(!ap.empty() && !ue.empty(), "scenario distances are empty");
  const double ap_mean =
      std::accumulate(ap.data().begin(), ap.data().end(), 0.0) / static_cast<double>(ap.data().size());
  if (!(ap_mean > 0.0)) throw DomainError("AP-RIS distances must be positive");
  std::vector<double> beta(ue.cols());
  for (std::size_t k = 0; k < ue.cols(); ++k) {
    double mean = 0.0;
    for (std::size_t n = 0; n < ue.rows(); ++n) mean += ue(n, k);
    mean /= static_cast<double>(ue.rows());
    if (!(mean > 0.0)) throw DomainError("RIS-UE distances must be positive");
    beta[k] = std::pow(ap_mean, -c.path_loss_exponents[0]) * std::pow(mean, -c.path_loss_exponents[1]);
  }
  return beta;
}

void draw_nlos(Scenario& s, Rng& rng) {
  // CN(0, 1): real and imaginary parts each N(0, 1/2).
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  const std::size_t m_count = s.ap_angles.size();
  const std::size_t k_count = s.ue_angles.size();
  const std::size_t n_count = s.element_sides.size();
  s.nlos_ap = CMatrix(m_count, n_count);
  s.nlos_ue = CMatrix(n_count, k_count);
  for (auto& v : s.nlos_ap.data()) {
    const double re = half(rng);
    v = Complex(re, half(rng));
  }
  for (auto& v : s.nlos_ue.data()) {
    const double re = half(rng);
    v = Complex(re, half(rng));
  }
}

std::vector<std::uint8_t> unpowered_elements(const Scenario& s, const SystemConfig& c) {
  const auto los = los_components(s, c);
  std::array<double, 2> power{0.0, 0.0};
  for (std::size_t n = 0; n < c.n_elements; ++n) {
    const auto side = s.element_sides[n];
    for (std::size_t m = 0; m < s.ap_sides.size(); ++m) {
      if (s.ap_sides[m] == side) power[static_cast<int>(side)] += std::norm(los.ap_ris(m, n));
    }
    for (std::size_t k = 0; k < s.ue_sides.size(); ++k) {
      if (s.ue_sides[k] == side) power[static_cast<int>(side)] += std::norm(los.ris_ue(n, k));
    }
  }
  const double total = power[0] + power[1];
  std::vector<std::uint8_t> off(c.n_elements, 0);
  for (std::size_t n = 0; n < c.n_elements; ++n) {
    const double p = power[static_cast<int>(s.element_sides[n])];
    off[n] = p <= c.side_power_fraction * total ? 1 : 0;
  }
  return off;
}

ChannelSet combine_channels(const Scenario& s, const SystemConfig& c) {
  const std::size_t m_count = s.ap_angles.size();
  const std::size_t k_count = s.ue_angles.size();
  const std::size_t n_count = c.n_elements;
  require(s.element_sides.size() == n_count, "element_sides must have N entries");
  require(s.ap_sides.size() == m_count && s.ue_sides.size() == k_count,
          "terminal side labels do not match the geometry");
  require(s.nlos_ap.rows() == m_count && s.nlos_ap.cols() == n_count &&
              s.nlos_ue.rows() == n_count && s.nlos_ue.cols() == k_count,
          "scenario NLoS draws are missing or mis-sized");
  if (!(c.rician_kappa > 0.0)) throw DomainError("rician_kappa must be positive");

  const auto los = los_components(s, c);
  const double w_los = std::sqrt(c.rician_kappa / (c.rician_kappa + 1.0));
  const double w_nlos = std::sqrt(1.0 / (c.rician_kappa + 1.0));

  ChannelSet ch;
  ch.ap_ris = CMatrix(m_count, n_count);
  ch.ris_ue = CMatrix(n_count, k_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    for (std::size_t n = 0; n < n_count; ++n) {
      if (s.ap_sides[m] != s.element_sides[n]) continue;
      const double amp = free_space_amplitude(s.ap_ris_distances(m, n), c.wavelength_m);
      ch.ap_ris(m, n) = w_los * los.ap_ris(m, n) + w_nlos * amp * s.nlos_ap(m, n);
    }
  }
  for (std::size_t n = 0; n < n_count; ++n) {
    for (std::size_t k = 0; k < k_count; ++k) {
      if (s.ue_sides[k] != s.element_sides[n]) continue;
      const double amp = free_space_amplitude(s.ris_ue_distances(n, k), c.wavelength_m);
      ch.ris_ue(n, k) = w_los * los.ris_ue(n, k) + w_nlos * amp * s.nlos_ue(n, k);
    }
  }
  ch.beta = s.beta.empty() ? composite_path_loss(s, c) : s.beta;
  require(ch.beta.size() == k_count, "beta must have K entries");
  ch.positions = grid_positions(n_count, c.d_min_m);
  ch.forced_off = unpowered_elements(s, c);
  ch.wavelength_m = c.wavelength_m;
  return ch;
}

ChannelSet sample_channels(const Scenario& scenario, const SystemConfig& config, Rng& rng) {
  Scenario fresh = scenario;
  draw_nlos(fresh, rng);
  return combine_channels(fresh, config);
}

CMatrix mutual_coupling(std::span<const double> positions, double wavelength_m) {
  require(!positions.empty(), "mutual_coupling needs at least one active element");
  const std::size_t n = positions.size();
  const double k0 = kTwoPi / wavelength_m;
  CMatrix c(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    c(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::abs(positions[i] - positions[j]);
      if (d == 0.0) throw DomainError("coincident element positions in coupling matrix");
      const double x = k0 * d;
      const Complex v = (std::sin(x) / x) * unit_phasor(-x);
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

std::vector<double> effective_spacings(std::span<const std::uint8_t> activation, double d_min) {
  const auto idx = active_indices(activation);
  std::vector<double> out;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    out.push_back(static_cast<double>(idx[i] - idx[i - 1]) * d_min);
  }
  return out;
}

std::vector<std::uint8_t> effective_activation(const RISState& state, const ChannelSet& channels) {
  check_state(state, channels);
  std::vector<std::uint8_t> a(state.activation.size());
  for (std::size_t n = 0; n < a.size(); ++n) {
    const bool off = !channels.forced_off.empty() && channels.forced_off[n] != 0;
    a[n] = (state.activation[n] != 0 && !off) ? 1 : 0;
  }
  return a;
}

CMatrix cascaded_gain(const RISState& state, const ChannelSet& ch, const SystemConfig&) {
  const auto a = effective_activation(state, ch);
  const auto idx = active_indices(a);
  CMatrix g(ch.n_aps(), ch.n_ues());
  if (idx.empty()) return g;
  std::vector<double> pos(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) pos[i] = ch.positions[idx[i]];
  const CMatrix coupling = mutual_coupling(pos, ch.wavelength_m);
  for (std::size_t m = 0; m < ch.n_aps(); ++m) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      Complex c{};
      for (std::size_t i = 0; i < idx.size(); ++i) c += std::conj(ch.ap_ris(m, idx[i])) * coupling(i, j);
      const Complex reflect = c * unit_phasor(state.phases[idx[j]]);
      for (std::size_t k = 0; k < ch.n_ues(); ++k) {
        g(m, k) += std::sqrt(ch.beta[k]) * reflect * ch.ris_ue(idx[j], k);
      }
    }
  }
  return g;
}

LinkQuality sinr_and_rates(std::span<const double> gains, const SystemConfig& c) {
  const std::size_t k_count = gains.size();
  require(c.tx_power_w.size() == k_count && c.noise_power_w.size() == k_count,
          "tx/noise power vectors do not match the number of UEs");
  LinkQuality q{std::vector<double>(k_count), std::vector<double>(k_count)};
  for (std::size_t k = 0; k < k_count; ++k) {
    const double desired = c.tx_power_w[k] * gains[k];
    double interference = 0.0;
    for (std::size_t i = 0; i < k_count; ++i) {
      if (i != k) interference += c.tx_power_w[i] * gains[i];
    }
    q.sinr[k] = desired / (interference + c.noise_power_w[k]);
    q.rates[k] = std::log2(1.0 + q.sinr[k]);
  }
  return q;
}

LinkQuality sinr_and_rates(const RISState& state, const ChannelSet& ch, const SystemConfig& c) {
  const auto terms = reflection_terms(effective_activation(state, ch), ch);
  const auto s = effective_sums(terms, state.phases, {});
  std::vector<double> gains(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) gains[k] = std::norm(s[k]);
  return sinr_and_rates(gains, c);
}

double objective_min_rate(const RISState& state, const ChannelSet& ch, const SystemConfig& c) {
  const auto q = sinr_and_rates(state, ch, c);
  return *std::min_element(q.rates.begin(), q.rates.end());
}

Feasibility feasibility(std::span<const std::uint8_t> activation, const SystemConfig& c) {
  Feasibility f;
  f.min_active = active_count(activation) >= c.n_min;
  f.aperture = aperture_of(activation, c.d_min_m) <= c.d_total_m * (1.0 + 1e-12);
  return f;
}

double loss_from_rates(std::span<const double> rates, std::span<const std::uint8_t> activation,
                       std::span<const double> phases, const SystemConfig& c,
                       std::span<const double> ue_weights) {
  const auto w = pick_weights(ue_weights, c);
  require(w.size() == rates.size(), "loss weights do not match the number of UEs");
  double value = 0.0;
  for (std::size_t k = 0; k < rates.size(); ++k) value -= w[k] * rates[k];
  double phase_sq = 0.0;
  for (std::size_t n = 0; n < activation.size(); ++n) {
    if (activation[n] != 0) phase_sq += phases[n] * phases[n];
  }
  value += c.loss.phase_norm * phase_sq;
  if (!feasibility(activation, c).aperture) value += c.loss.aperture;
  const double deficit =
      std::max(0.0, static_cast<double>(c.n_min) - static_cast<double>(active_count(activation)));
  value += c.loss.activation * deficit * deficit;
  return value;
}

double loss(const RISState& state, const ChannelSet& ch, const SystemConfig& c,
            std::span<const double> ue_weights) {
  return evaluate_state(state, ch, c, ue_weights).loss;
}

Evaluation evaluate_state(const RISState& state, const ChannelSet& ch, const SystemConfig& c,
                          std::span<const double> ue_weights) {
  Evaluation e;
  e.activation = effective_activation(state, ch);
  const auto terms = reflection_terms(e.activation, ch);
  const auto s = effective_sums(terms, state.phases, {});
  std::vector<double> gains(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) gains[k] = std::norm(s[k]);
  e.link = sinr_and_rates(gains, c);
  e.min_rate = *std::min_element(e.link.rates.begin(), e.link.rates.end());
  e.sum_rate = std::accumulate(e.link.rates.begin(), e.link.rates.end(), 0.0);
  e.loss = loss_from_rates(e.link.rates, e.activation, state.phases, c, ue_weights);
  e.feasible = feasibility(e.activation, c);
  return e;
}

std::vector<double> loss_phase_gradient(const RISState& state, const ChannelSet& ch,
                                        const SystemConfig& c, std::span<const double> ue_weights) {
  const auto w = pick_weights(ue_weights, c);
  const auto a = effective_activation(state, ch);
  const auto terms = reflection_terms(a, ch);
  const auto s = effective_sums(terms, state.phases, {});
  const std::size_t k_count = s.size();
  std::vector<double> g(k_count);
  double total = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    g[k] = std::norm(s[k]);
    total += c.tx_power_w[k] * g[k];
  }
  std::vector<double> grad(state.size(), 0.0);
  std::vector<double> dg(k_count);
  for (std::size_t j = 0; j < terms.idx.size(); ++j) {
    const std::size_t n = terms.idx[j];
    const Complex rot = unit_phasor(state.phases[n]);
    double dtotal = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      const Complex ds = kJ * terms.t(j, k) * rot;
      dg[k] = 2.0 * std::real(std::conj(s[k]) * ds);
      dtotal += c.tx_power_w[k] * dg[k];
    }
    double dl = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      const double desired = c.tx_power_w[k] * g[k];
      const double denom = std::max(0.0, total - desired) + c.noise_power_w[k];
      const double gamma = desired / denom;
      const double ddesired = c.tx_power_w[k] * dg[k];
      const double dinterf = dtotal - ddesired;
      const double dgamma = ddesired / denom - desired * dinterf / (denom * denom);
      dl -= w[k] * dgamma / ((1.0 + gamma) * std::numbers::ln2);
    }
    grad[n] = dl + 2.0 * c.loss.phase_norm * state.phases[n];
  }
  return grad;
}

double reference_noise_power(const ChannelSet& ch, const SystemConfig& c, double snr_db) {
  const auto ref = RISState::all_active(ch.n_elements());
  const auto terms = reflection_terms(effective_activation(ref, ch), ch);
  const auto s = effective_sums(terms, ref.phases, {});
  double mean = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) mean += c.tx_power_w[k] * std::norm(s[k]);
  mean /= static_cast<double>(s.size());
  return mean / db_to_linear(snr_db);
}

CoherenceReport coherence_report(double t_pilot_s, double t_opt_s, double t_switch_s,
                                 double t_coherence_s, double doppler_hz) {
  require(t_pilot_s >= 0.0 && t_opt_s >= 0.0 && t_switch_s >= 0.0 && t_coherence_s >= 0.0 &&
              doppler_hz >= 0.0,
          "coherence_report durations and Doppler must be non-negative");
  CoherenceReport r;
  const double busy = t_pilot_s + t_opt_s + t_switch_s;
  r.feasible = busy < t_coherence_s;
  r.slack_s = t_coherence_s - busy;
  r.rho = bessel_j0(kTwoPi * doppler_hz * t_coherence_s);
  return r;
}

}  // namespace dsris
