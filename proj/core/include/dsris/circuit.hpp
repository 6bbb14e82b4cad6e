#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dsris/config.hpp"
#include "dsris/graph.hpp"
#include "dsris/qsim.hpp"

namespace dsris {

/// Which layer structure to run. `Equations` rotates activation qubits in U_S
/// and U_A; `Algorithm1` applies one combined Rz(g) Ry(a + b*mu) per phase qubit
/// and leaves activation qubits alone.
enum class CircuitForm : std::uint8_t { Equations, Algorithm1 };

enum class ParamRole : std::uint8_t { Alpha, Beta, Gamma, EdgeTheta };

/// Element n of a block owns qubit 2n (activation) and 2n+1 (phase).
[[nodiscard]] constexpr std::size_t activation_qubit(std::size_t element) { return 2 * element; }
[[nodiscard]] constexpr std::size_t phase_qubit(std::size_t element) { return 2 * element + 1; }

/// Trainable angles of one block circuit, stored flat as
/// [alpha (L x V) | beta (L x V) | gamma (L x V) | edge theta (L x E)].
class CircuitParams {
 public:
  CircuitParams() = default;
  CircuitParams(std::size_t layers, std::size_t elements, std::size_t edges);

  /// alpha, gamma ~ U(-0.1, 0.1); beta ~ U(0, 0.1); edge thetas = 1.
  [[nodiscard]] static CircuitParams initial(std::size_t layers, std::size_t elements,
                                             std::size_t edges, Rng& rng);

  [[nodiscard]] std::size_t layers() const noexcept { return layers_; }
  [[nodiscard]] std::size_t elements() const noexcept { return elements_; }
  [[nodiscard]] std::size_t edges() const noexcept { return edges_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  /// 3 L |V_b|: the alpha/beta/gamma count, excluding edge thetas.
  [[nodiscard]] std::size_t rotation_count() const noexcept { return 3 * layers_ * elements_; }

  [[nodiscard]] double alpha(std::size_t l, std::size_t i) const { return values_[index(ParamRole::Alpha, l, i)]; }
  [[nodiscard]] double beta(std::size_t l, std::size_t i) const { return values_[index(ParamRole::Beta, l, i)]; }
  [[nodiscard]] double gamma(std::size_t l, std::size_t i) const { return values_[index(ParamRole::Gamma, l, i)]; }
  [[nodiscard]] double edge_theta(std::size_t l, std::size_t e) const {
    return values_[index(ParamRole::EdgeTheta, l, e)];
  }
  double& at(ParamRole role, std::size_t l, std::size_t item) { return values_[index(role, l, item)]; }

  [[nodiscard]] std::size_t index(ParamRole role, std::size_t l, std::size_t item) const;
  [[nodiscard]] ParamRole role(std::size_t flat) const;
  [[nodiscard]] std::size_t layer_of(std::size_t flat) const;
  [[nodiscard]] std::size_t item_of(std::size_t flat) const;

  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t layers_ = 0;
  std::size_t elements_ = 0;
  std::size_t edges_ = 0;
  std::vector<double> values_;
};

struct CircuitOptions {
  CircuitForm form = CircuitForm::Equations;
  std::optional<std::uint64_t> shots;  ///< empty: exact expectations (infinite shots)
  qsim::NoiseModel noise;
  std::size_t trajectories = 32;       ///< noisy runs; shots are split across them
  bool force_active = false;           ///< decode every activation bit as 1
  double d_min_m = 0.0;
  double w_decay_per_m = 0.0;
};

/// Adds `offset` to the gate angle driven by flat parameter `index`, leaving
/// the parameter (and any other gate using it) untouched.
struct AngleShift {
  std::size_t index = 0;
  double offset = 0.0;
};

struct DecodedState {
  std::vector<std::uint8_t> activation;
  std::vector<double> phases;           ///< wrap(2 pi <Z_phase>)
  std::vector<double> raw_z_phase;      ///< <Z_phase>
  std::vector<double> mean_activation;  ///< frequency (or probability) of reading 1
};

struct CircuitRun {
  DecodedState decoded;
  std::vector<std::vector<double>> layer_weights;  ///< U_GC weights per layer (trajectory mean)
  std::vector<std::vector<double>> layer_mu;       ///< neighbour sums per layer (trajectory mean)
  std::vector<qsim::GateTally> gates_per_layer;    ///< one trajectory
  qsim::GateTally prep_gates;
};

/// Activation qubits |1>, phase qubits |+>, element CNOTs, then edge CNOTs
/// between phase qubits.
void prepare_initial(qsim::Engine& engine, const SubgraphBlock& block);
[[nodiscard]] qsim::QuantumState prepare_initial(const SubgraphBlock& block);

/// One U_A U_S U_GC layer with the given edge weights. `mu_out` receives the
/// neighbour sums used by U_S.
void apply_layer(qsim::Engine& engine, std::size_t layer, const SubgraphBlock& block,
                 std::span<const double> weights, const CircuitParams& params, CircuitForm form,
                 std::optional<AngleShift> shift = {}, std::vector<double>* mu_out = nullptr);

/// Prep, L layers with weight refresh in between, then decode. Deterministic in
/// `seed`.
[[nodiscard]] CircuitRun run_circuit(const SubgraphBlock& block, const CircuitParams& params,
                                     const CircuitOptions& options, std::uint64_t seed,
                                     std::optional<AngleShift> shift = {});

}  // namespace dsris
