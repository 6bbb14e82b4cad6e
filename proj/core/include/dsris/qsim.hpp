#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "dsris/config.hpp"

/// Dense statevector simulator. Qubit q is bit q of the amplitude index
/// (little-endian).
namespace dsris::qsim {

using Amplitude = std::complex<double>;

enum class GateKind : std::uint8_t { X, Y, Z, H, CNOT, CPhase, Ry, Rz, Ryz };

/// Ry(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]], Rz(t) = diag(e^{-it/2}, e^{it/2}),
/// CPhase(t) multiplies |11> by e^{it}, Ryz(a, g) = Rz(g) Ry(a) fused into one rotation.
struct Gate {
  GateKind kind = GateKind::X;
  std::size_t q0 = 0;  ///< target, or control for CNOT
  std::size_t q1 = 0;  ///< second qubit of two-qubit gates (CNOT target)
  double theta = 0.0;
  double theta2 = 0.0;  ///< Rz angle of Ryz

  [[nodiscard]] static Gate x(std::size_t q) { return {GateKind::X, q}; }
  [[nodiscard]] static Gate y(std::size_t q) { return {GateKind::Y, q}; }
  [[nodiscard]] static Gate z(std::size_t q) { return {GateKind::Z, q}; }
  [[nodiscard]] static Gate h(std::size_t q) { return {GateKind::H, q}; }
  [[nodiscard]] static Gate cnot(std::size_t control, std::size_t target) {
    return {GateKind::CNOT, control, target};
  }
  [[nodiscard]] static Gate cphase(std::size_t a, std::size_t b, double t) {
    return {GateKind::CPhase, a, b, t};
  }
  [[nodiscard]] static Gate ry(std::size_t q, double t) { return {GateKind::Ry, q, 0, t}; }
  [[nodiscard]] static Gate rz(std::size_t q, double t) { return {GateKind::Rz, q, 0, t}; }
  [[nodiscard]] static Gate ryz(std::size_t q, double ry_angle, double rz_angle) {
    return {GateKind::Ryz, q, 0, ry_angle, rz_angle};
  }

  [[nodiscard]] bool two_qubit() const noexcept {
    return kind == GateKind::CNOT || kind == GateKind::CPhase;
  }
};

class QuantumState {
 public:
  /// |0...0> on n_qubits qubits.
  explicit QuantumState(std::size_t n_qubits);

  [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
  [[nodiscard]] std::size_t dim() const noexcept { return amps_.size(); }
  [[nodiscard]] std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
  [[nodiscard]] std::span<Amplitude> amplitudes() noexcept { return amps_; }
  [[nodiscard]] double norm_squared() const;

 private:
  std::size_t n_qubits_;
  std::vector<Amplitude> amps_;
};

/// Throws ContractViolation on out-of-range or repeated targets.
void apply_gate(QuantumState& state, const Gate& gate);

/// Gate sequence (in application order) that undoes `gate`.
[[nodiscard]] std::vector<Gate> adjoint(const Gate& gate);

[[nodiscard]] double expectation_z(const QuantumState& state, std::size_t qubit);
[[nodiscard]] double probability_one(const QuantumState& state, std::size_t qubit);
/// <Z_q> for every qubit in one pass.
[[nodiscard]] std::vector<double> expectations_z(const QuantumState& state);

/// Depolarizing and readout error rates.
struct NoiseModel {
  double p1 = 0.0;      ///< after each single-qubit gate
  double p2 = 0.0;      ///< after each CNOT / CPhase
  double p_read = 0.0;  ///< symmetric bit flip on each measured bit

  [[nodiscard]] bool enabled() const noexcept { return p1 > 0.0 || p2 > 0.0 || p_read > 0.0; }
  /// 0.1% / 0.7% / 1.5%.
  [[nodiscard]] static NoiseModel ablation() { return {0.001, 0.007, 0.015}; }
  void validate() const;
};

enum class Pauli : std::uint8_t { I, X, Y, Z };

/// Depolarizing channel rho -> (1 - p) rho + p I / d as a trajectory step: with
/// probability p a uniformly drawn Pauli string (identity included) hits the
/// targets. Returns the applied string, or an empty vector for the identity.
std::vector<Pauli> inject_depolarizing(QuantumState& state, std::span<const std::size_t> targets,
                                       double p, Rng& rng);

/// Outcome -> count. Bit i of an outcome is the reading of qubits[i].
using ShotTable = std::map<std::uint64_t, std::uint64_t>;

[[nodiscard]] ShotTable sample_measurements(const QuantumState& state,
                                            std::span<const std::size_t> qubits,
                                            std::uint64_t n_shots, Rng& rng,
                                            const NoiseModel& noise = {});

/// Fraction of shots reading 1 on measured qubit i.
[[nodiscard]] std::vector<double> marginal_ones(const ShotTable& table, std::size_t n_measured);

struct GateTally {
  std::size_t single = 0;
  std::size_t two = 0;
  [[nodiscard]] std::size_t total() const noexcept { return single + two; }
};

/// A state plus an optional noise model: every applied gate is followed by a
/// depolarizing trajectory step when noise is attached.
class Engine {
 public:
  explicit Engine(std::size_t n_qubits, const NoiseModel* noise = nullptr, Rng* rng = nullptr);

  void apply(const Gate& gate);

  [[nodiscard]] const QuantumState& state() const noexcept { return state_; }
  [[nodiscard]] QuantumState& state() noexcept { return state_; }
  [[nodiscard]] const GateTally& tally() const noexcept { return tally_; }

 private:
  QuantumState state_;
  const NoiseModel* noise_;
  Rng* rng_;
  GateTally tally_;
};

}  // namespace dsris::qsim
