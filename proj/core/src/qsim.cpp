#include "dsris/qsim.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "dsris/errors.hpp"

namespace dsris::qsim {

namespace {

using Mat2 = std::array<Amplitude, 4>;  // row-major

void check_qubit(const QuantumState& s, std::size_t q) {
  require(q < s.n_qubits(), "qubit index " + std::to_string(q) + " out of range for " +
                                std::to_string(s.n_qubits()) + " qubits");
}

void apply_single(QuantumState& s, std::size_t q, const Mat2& m) {
  auto amps = s.amplitudes();
  const std::size_t mask = std::size_t{1} << q;
  for (std::size_t block = 0; block < amps.size(); block += 2 * mask) {
    for (std::size_t i = block; i < block + mask; ++i) {
      const Amplitude a0 = amps[i];
      const Amplitude a1 = amps[i | mask];
      amps[i] = m[0] * a0 + m[1] * a1;
      amps[i | mask] = m[2] * a0 + m[3] * a1;
    }
  }
}

void apply_x(QuantumState& s, std::size_t q) {
  auto amps = s.amplitudes();
  const std::size_t mask = std::size_t{1} << q;
  for (std::size_t block = 0; block < amps.size(); block += 2 * mask) {
    for (std::size_t i = block; i < block + mask; ++i) std::swap(amps[i], amps[i | mask]);
  }
}

void apply_h(QuantumState& s, std::size_t q) {
  auto amps = s.amplitudes();
  const std::size_t mask = std::size_t{1} << q;
  constexpr double r = std::numbers::sqrt2 / 2.0;
  for (std::size_t block = 0; block < amps.size(); block += 2 * mask) {
    for (std::size_t i = block; i < block + mask; ++i) {
      const Amplitude a0 = amps[i];
      const Amplitude a1 = amps[i | mask];
      amps[i] = (a0 + a1) * r;
      amps[i | mask] = (a0 - a1) * r;
    }
  }
}

void apply_diag(QuantumState& s, std::size_t q, Amplitude d0, Amplitude d1) {
  auto amps = s.amplitudes();
  const std::size_t mask = std::size_t{1} << q;
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] *= (i & mask) ? d1 : d0;
}

Mat2 ry_matrix(double t) {
  const double c = std::cos(t / 2.0);
  const double sn = std::sin(t / 2.0);
  return {Amplitude(c), Amplitude(-sn), Amplitude(sn), Amplitude(c)};
}

Amplitude phasor(double t) { return {std::cos(t), std::sin(t)}; }

void apply_pauli(QuantumState& s, std::size_t q, Pauli p) {
  switch (p) {
    case Pauli::I: break;
    case Pauli::X: apply_x(s, q); break;
    case Pauli::Y: apply_single(s, q, {0.0, Amplitude(0, -1), Amplitude(0, 1), 0.0}); break;
    case Pauli::Z: apply_diag(s, q, 1.0, -1.0); break;
  }
}

}  // namespace

QuantumState::QuantumState(std::size_t n_qubits) : n_qubits_(n_qubits) {
  require(n_qubits <= 30, "statevector limited to 30 qubits");
  amps_.assign(std::size_t{1} << n_qubits, Amplitude{});
  amps_[0] = 1.0;
}

double QuantumState::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

void apply_gate(QuantumState& s, const Gate& g) {
  check_qubit(s, g.q0);
  if (g.two_qubit()) {
    check_qubit(s, g.q1);
    require(g.q0 != g.q1, "two-qubit gate needs distinct targets");
  }
  switch (g.kind) {
    case GateKind::X: apply_x(s, g.q0); break;
    case GateKind::Y: apply_pauli(s, g.q0, Pauli::Y); break;
    case GateKind::Z: apply_diag(s, g.q0, 1.0, -1.0); break;
    case GateKind::H: apply_h(s, g.q0); break;
    case GateKind::Ry: apply_single(s, g.q0, ry_matrix(g.theta)); break;
    case GateKind::Rz: apply_diag(s, g.q0, phasor(-g.theta / 2.0), phasor(g.theta / 2.0)); break;
    case GateKind::Ryz: {
      const Mat2 r = ry_matrix(g.theta);
      const Amplitude lo = phasor(-g.theta2 / 2.0);
      const Amplitude hi = phasor(g.theta2 / 2.0);
      apply_single(s, g.q0, {lo * r[0], lo * r[1], hi * r[2], hi * r[3]});
      break;
    }
    case GateKind::CNOT: {
      auto amps = s.amplitudes();
      const std::size_t c = std::size_t{1} << g.q0;
      const std::size_t t = std::size_t{1} << g.q1;
      for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & c) && !(i & t)) std::swap(amps[i], amps[i | t]);
      }
      break;
    }
    case GateKind::CPhase: {
      auto amps = s.amplitudes();
      const std::size_t both = (std::size_t{1} << g.q0) | (std::size_t{1} << g.q1);
      const Amplitude ph = phasor(g.theta);
      for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & both) == both) amps[i] *= ph;
      }
      break;
    }
  }
}

std::vector<Gate> adjoint(const Gate& g) {
  switch (g.kind) {
    case GateKind::Ry: return {Gate::ry(g.q0, -g.theta)};
    case GateKind::Rz: return {Gate::rz(g.q0, -g.theta)};
    case GateKind::CPhase: return {Gate::cphase(g.q0, g.q1, -g.theta)};
    case GateKind::Ryz: return {Gate::rz(g.q0, -g.theta2), Gate::ry(g.q0, -g.theta)};
    default: return {g};
  }
}

double expectation_z(const QuantumState& s, std::size_t q) {
  check_qubit(s, q);
  const auto amps = s.amplitudes();
  const std::size_t mask = std::size_t{1} << q;
  double z = 0.0;
  for (std::size_t block = 0; block < amps.size(); block += 2 * mask) {
    for (std::size_t i = block; i < block + mask; ++i) {
      z += std::norm(amps[i]) - std::norm(amps[i | mask]);
    }
  }
  return z;
}

double probability_one(const QuantumState& s, std::size_t q) {
  check_qubit(s, q);
  const auto amps = s.amplitudes();
  const std::size_t mask = std::size_t{1} << q;
  double p = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & mask) p += std::norm(amps[i]);
  }
  return p;
}

std::vector<double> expectations_z(const QuantumState& s) {
  std::vector<double> z(s.n_qubits());
  for (std::size_t q = 0; q < z.size(); ++q) z[q] = expectation_z(s, q);
  return z;
}

void NoiseModel::validate() const {
  const auto ok = [](double p) { return p >= 0.0 && p < 1.0; };
  require(ok(p1) && ok(p2) && ok(p_read), "noise probabilities must lie in [0, 1)");
}

std::vector<Pauli> inject_depolarizing(QuantumState& s, std::span<const std::size_t> targets,
                                       double p, Rng& rng) {
  require(p >= 0.0 && p <= 1.0, "depolarizing probability must lie in [0, 1]");
  require(targets.size() == 1 || targets.size() == 2, "depolarizing acts on one or two qubits");
  for (auto q : targets) check_qubit(s, q);
  if (p <= 0.0) return {};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) >= p) return {};
  const std::size_t choices = targets.size() == 1 ? 4 : 16;
  std::uniform_int_distribution<std::size_t> pick(0, choices - 1);
  std::size_t code = pick(rng);  // base-4 digits, qubit 0 least significant
  if (code == 0) return {};
  std::vector<Pauli> applied(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    applied[i] = static_cast<Pauli>(code % 4);
    code /= 4;
    apply_pauli(s, targets[i], applied[i]);
  }
  return applied;
}

ShotTable sample_measurements(const QuantumState& s, std::span<const std::size_t> qubits,
                              std::uint64_t n_shots, Rng& rng, const NoiseModel& noise) {
  require(n_shots >= 1, "sample_measurements needs at least one shot");
  require(qubits.size() <= 64, "at most 64 measured qubits");
  for (auto q : qubits) check_qubit(s, q);
  std::vector<double> probs(s.dim());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::norm(s.amplitudes()[i]);
  std::discrete_distribution<std::size_t> draw(probs.begin(), probs.end());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ShotTable table;
  for (std::uint64_t shot = 0; shot < n_shots; ++shot) {
    const std::size_t index = draw(rng);
    std::uint64_t outcome = 0;
    for (std::size_t i = 0; i < qubits.size(); ++i) {
      std::uint64_t bit = (index >> qubits[i]) & 1U;
      if (noise.p_read > 0.0 && u(rng) < noise.p_read) bit ^= 1U;
      outcome |= bit << i;
    }
    ++table[outcome];
  }
  return table;
}

std::vector<double> marginal_ones(const ShotTable& table, std::size_t n_measured) {
  std::vector<double> ones(n_measured, 0.0);
  std::uint64_t total = 0;
  for (const auto& [outcome, count] : table) {
    total += count;
    for (std::size_t i = 0; i < n_measured; ++i) {
      if ((outcome >> i) & 1U) ones[i] += static_cast<double>(count);
    }
  }
  if (total > 0) {
    for (auto& v : ones) v /= static_cast<double>(total);
  }
  return ones;
}

Engine::Engine(std::size_t n_qubits, const NoiseModel* noise, Rng* rng)
    : state_(n_qubits), noise_(noise), rng_(rng) {
  require(noise_ == nullptr || rng_ != nullptr, "a noisy engine needs a random engine");
}

void Engine::apply(const Gate& g) {
  apply_gate(state_, g);
  if (g.two_qubit()) {
    ++tally_.two;
  } else {
    ++tally_.single;
  }
  if (noise_ == nullptr) return;
  if (g.two_qubit()) {
    if (noise_->p2 > 0.0) {
      const std::array<std::size_t, 2> t{g.q0, g.q1};
      inject_depolarizing(state_, t, noise_->p2, *rng_);
    }
  } else if (noise_->p1 > 0.0) {
    const std::array<std::size_t, 1> t{g.q0};
    inject_depolarizing(state_, t, noise_->p1, *rng_);
  }
}

}  // namespace dsris::qsim
