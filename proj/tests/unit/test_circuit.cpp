#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dsris/channel.hpp"
#include "dsris/circuit.hpp"
#include "dsris/errors.hpp"

namespace dsris {
namespace {

constexpr double kPi = std::numbers::pi;

SubgraphBlock block_of(std::size_t n, std::size_t k = 2) {
  const auto g = build_graph(grid_positions(n, 0.5), 2.0, k);
  return partition(g, n).front();
}

CircuitOptions exact_options() {
  CircuitOptions o;
  o.d_min_m = 0.5;
  o.w_decay_per_m = 2.0;
  return o;
}

CircuitParams zero_params(const SubgraphBlock& b, std::size_t layers) {
  return CircuitParams(layers, b.size(), b.edges.size());
}

TEST(CircuitParams, LayoutAndCount) {
  CircuitParams p(2, 3, 4);
  EXPECT_EQ(p.rotation_count(), 18u);
  EXPECT_EQ(p.size(), 26u);
  EXPECT_EQ(p.index(ParamRole::Alpha, 1, 2), 5u);
  EXPECT_EQ(p.index(ParamRole::Beta, 0, 0), 6u);
  EXPECT_EQ(p.index(ParamRole::Gamma, 1, 0), 15u);
  EXPECT_EQ(p.index(ParamRole::EdgeTheta, 1, 3), 25u);
  for (std::size_t j = 0; j < p.size(); ++j) {
    EXPECT_EQ(p.index(p.role(j), p.layer_of(j), p.item_of(j)), j);
  }
}

TEST(CircuitParams, InitialDistribution) {
  Rng rng(3);
  const auto p = CircuitParams::initial(3, 5, 6, rng);
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_LE(std::abs(p.alpha(l, i)), 0.1);
      EXPECT_LE(std::abs(p.gamma(l, i)), 0.1);
      EXPECT_GE(p.beta(l, i), 0.0);
      EXPECT_LE(p.beta(l, i), 0.1);
    }
    for (std::size_t e = 0; e < 6; ++e) EXPECT_EQ(p.edge_theta(l, e), 1.0);
  }
}

TEST(PrepareInitial, SingleElement) {
  const auto b = block_of(1);
  const auto s = prepare_initial(b);
  // qubit 0 (activation) = 1, qubit 1 (phase) = |+>
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(s.amplitudes()[1] - qsim::Amplitude(r, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.amplitudes()[3] - qsim::Amplitude(r, 0)), 0.0, 1e-15);
  EXPECT_EQ(s.amplitudes()[0], qsim::Amplitude{});
  EXPECT_EQ(s.amplitudes()[2], qsim::Amplitude{});

  qsim::QuantumState no_cnot(2);
  qsim::apply_gate(no_cnot, qsim::Gate::x(0));
  qsim::apply_gate(no_cnot, qsim::Gate::h(1));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(s.amplitudes()[i] - no_cnot.amplitudes()[i]), 0.0, 1e-15);
}

TEST(PrepareInitial, ActivationOnePhaseZeroExpectation) {
  const auto b = block_of(5);
  const auto s = prepare_initial(b);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(qsim::probability_one(s, activation_qubit(i)), 1.0, 1e-15);
    EXPECT_NEAR(qsim::expectation_z(s, phase_qubit(i)), 0.0, 1e-15);
  }
}

TEST(ApplyLayer, ZeroParametersAreIdentity) {
  const auto b = block_of(4);
  qsim::Engine e(b.qubits());
  prepare_initial(e, b);
  const qsim::QuantumState before = e.state();
  const auto p = zero_params(b, 1);
  std::vector<double> mu;
  apply_layer(e, 0, b, b.weights, p, CircuitForm::Equations, {}, &mu);
  for (std::size_t i = 0; i < before.dim(); ++i) {
    EXPECT_NEAR(std::abs(e.state().amplitudes()[i] - before.amplitudes()[i]), 0.0, 1e-15);
  }
  for (double m : mu) EXPECT_NEAR(m, 0.0, 1e-15);
}

TEST(ApplyLayer, FirstLayerNeighbourSumsVanish) {
  const auto b = block_of(4);
  Rng rng(1);
  const auto p = CircuitParams::initial(1, 4, b.edges.size(), rng);
  qsim::Engine e(b.qubits());
  prepare_initial(e, b);
  std::vector<double> mu;
  apply_layer(e, 0, b, b.weights, p, CircuitForm::Equations, {}, &mu);
  // CPhase layers leave Z expectations untouched, so the sums read the prep state
  for (double m : mu) EXPECT_NEAR(m, 0.0, 1e-14);
}

TEST(ApplyLayer, SingleElementRotationOfPlus) {
  const auto b = block_of(1);
  CircuitParams p(1, 1, 0);
  p.at(ParamRole::Alpha, 0, 0) = kPi;
  qsim::Engine e(b.qubits());
  prepare_initial(e, b);
  apply_layer(e, 0, b, b.weights, p, CircuitForm::Equations);
  // Ry(pi) [1, 1]/sqrt2 = [-1, 1]/sqrt2 on the phase qubit
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(e.state().amplitudes()[1].real(), -r, 1e-15);
  EXPECT_NEAR(e.state().amplitudes()[3].real(), r, 1e-15);
  EXPECT_NEAR(qsim::expectation_z(e.state(), phase_qubit(0)), 0.0, 1e-15);
}

TEST(ApplyLayer, GateCountPerLayer) {
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto b = block_of(n);
    Rng rng(n);
    const auto p = CircuitParams::initial(3, n, b.edges.size(), rng);
    CircuitOptions o = exact_options();
    const auto eq = run_circuit(b, p, o, 1);
    o.form = CircuitForm::Algorithm1;
    const auto a1 = run_circuit(b, p, o, 1);
    for (std::size_t l = 0; l < 3; ++l) {
      EXPECT_EQ(eq.gates_per_layer[l].two, b.edges.size());
      EXPECT_EQ(eq.gates_per_layer[l].single, 3 * n);
      EXPECT_EQ(a1.gates_per_layer[l].total(), b.edges.size() + n);
    }
  }
}

TEST(ApplyLayer, RejectsMisSizedInput) {
  const auto b = block_of(3);
  qsim::Engine e(b.qubits());
  EXPECT_THROW(apply_layer(e, 0, b, b.weights, CircuitParams(1, 2, b.edges.size()), CircuitForm::Equations),
               ContractViolation);
  EXPECT_THROW(apply_layer(e, 1, b, b.weights, zero_params(b, 1), CircuitForm::Equations), ContractViolation);
  const auto p = zero_params(b, 1);
  EXPECT_THROW(apply_layer(e, 0, b, b.weights, p, CircuitForm::Equations,
                           AngleShift{p.index(ParamRole::Beta, 0, 0), 1.0}),
               ContractViolation);
}

TEST(RunCircuit, NoLayersDecodesInitialState) {
  const auto b = block_of(3);
  const auto r = run_circuit(b, zero_params(b, 0), exact_options(), 1);
  EXPECT_EQ(r.decoded.activation, (std::vector<std::uint8_t>{1, 1, 1}));
  EXPECT_EQ(r.decoded.phases, (std::vector<double>{0.0, 0.0, 0.0}));
}

TEST(RunCircuit, NegativeHalfExpectationDecodesToPi) {
  const auto b = block_of(1);
  CircuitParams p(1, 1, 0);
  // <Z> of Ry(a)|+> is -sin a
  p.at(ParamRole::Alpha, 0, 0) = kPi / 6.0;
  const auto r = run_circuit(b, p, exact_options(), 1);
  EXPECT_NEAR(r.decoded.raw_z_phase[0], -0.5, 1e-14);
  EXPECT_NEAR(r.decoded.phases[0], kPi, 1e-12);
}

TEST(RunCircuit, ZeroParametersDecodeAllActiveZeroPhase) {
  for (std::size_t layers = 1; layers <= 3; ++layers) {
    const auto b = block_of(4);
    const auto r = run_circuit(b, zero_params(b, layers), exact_options(), 9);
    EXPECT_EQ(r.decoded.activation, (std::vector<std::uint8_t>(4, 1)));
    EXPECT_EQ(r.decoded.phases, (std::vector<double>(4, 0.0)));
  }
}

TEST(RunCircuit, NormPreservedThroughLayers) {
  const auto b = block_of(5);
  Rng rng(4);
  auto p = CircuitParams::initial(4, 5, b.edges.size(), rng);
  for (double& v : p.values()) v *= 20.0;
  qsim::Engine e(b.qubits());
  prepare_initial(e, b);
  for (std::size_t l = 0; l < 4; ++l) apply_layer(e, l, b, b.weights, p, CircuitForm::Equations);
  EXPECT_NEAR(e.state().norm_squared(), 1.0, 1e-10);
}

TEST(RunCircuit, DeterministicForFixedSeed) {
  const auto b = block_of(4);
  Rng rng(2);
  const auto p = CircuitParams::initial(2, 4, b.edges.size(), rng);
  CircuitOptions o = exact_options();
  o.shots = 512;
  o.noise = qsim::NoiseModel::ablation();
  o.trajectories = 4;
  const auto x = run_circuit(b, p, o, 42);
  const auto y = run_circuit(b, p, o, 42);
  EXPECT_EQ(x.decoded.activation, y.decoded.activation);
  EXPECT_EQ(x.decoded.phases, y.decoded.phases);
  EXPECT_EQ(x.decoded.mean_activation, y.decoded.mean_activation);
}

TEST(RunCircuit, ExactModeIgnoresSeedAndMatchesStatevector) {
  const auto b = block_of(3);
  Rng rng(5);
  auto p = CircuitParams::initial(2, 3, b.edges.size(), rng);
  for (double& v : p.values()) v *= 10.0;
  const auto x = run_circuit(b, p, exact_options(), 1);
  const auto y = run_circuit(b, p, exact_options(), 2);
  EXPECT_EQ(x.decoded.phases, y.decoded.phases);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_GE(x.decoded.mean_activation[i], 0.0);
    EXPECT_LE(x.decoded.mean_activation[i], 1.0);
    EXPECT_EQ(x.decoded.activation[i], x.decoded.mean_activation[i] >= 0.5 ? 1 : 0);
    EXPECT_NEAR(x.decoded.phases[i], wrap_phase(kTwoPi * x.decoded.raw_z_phase[i]), 1e-15);
  }
}

TEST(RunCircuit, ShotEstimatesApproachExactValues) {
  const auto b = block_of(3);
  Rng rng(8);
  auto p = CircuitParams::initial(2, 3, b.edges.size(), rng);
  for (double& v : p.values()) v *= 8.0;
  const auto exact = run_circuit(b, p, exact_options(), 1);
  CircuitOptions o = exact_options();
  o.shots = 200000;
  const auto sampled = run_circuit(b, p, o, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(sampled.decoded.raw_z_phase[i], exact.decoded.raw_z_phase[i], 0.01);
    EXPECT_NEAR(sampled.decoded.mean_activation[i], exact.decoded.mean_activation[i], 0.01);
  }
}

TEST(RunCircuit, ForcedActivationDecodesOnes) {
  const auto b = block_of(3);
  CircuitParams p = zero_params(b, 1);
  for (std::size_t i = 0; i < 3; ++i) p.at(ParamRole::Beta, 0, i) = kPi;  // drives activation to |0>
  CircuitOptions o = exact_options();
  EXPECT_EQ(run_circuit(b, p, o, 1).decoded.activation, (std::vector<std::uint8_t>(3, 0)));
  o.force_active = true;
  EXPECT_EQ(run_circuit(b, p, o, 1).decoded.activation, (std::vector<std::uint8_t>(3, 1)));
}

TEST(RunCircuit, AngleShiftMatchesShiftedParameterForSingleUseAngles) {
  const auto b = block_of(3);
  Rng rng(6);
  const auto p = CircuitParams::initial(2, 3, b.edges.size(), rng);
  for (ParamRole role : {ParamRole::Alpha, ParamRole::Gamma}) {
    const std::size_t j = p.index(role, 1, 2);
    CircuitParams moved = p;
    moved.values()[j] += 0.3;
    const auto a = run_circuit(b, p, exact_options(), 1, AngleShift{j, 0.3});
    const auto c = run_circuit(b, moved, exact_options(), 1);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a.decoded.raw_z_phase[i], c.decoded.raw_z_phase[i], 1e-14);
  }
}

}  // namespace
}  // namespace dsris
