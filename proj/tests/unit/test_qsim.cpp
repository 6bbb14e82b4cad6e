#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "dsris/errors.hpp"
#include "dsris/qsim.hpp"

namespace dsris::qsim {
namespace {

constexpr double kPi = std::numbers::pi;

QuantumState plus_state() {
  QuantumState s(1);
  apply_gate(s, Gate::h(0));
  return s;
}

Gate random_gate(std::size_t n, Rng& rng) {
  std::uniform_int_distribution<int> kind(0, 8);
  std::uniform_int_distribution<std::size_t> qubit(0, n - 1);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  const std::size_t a = qubit(rng);
  std::size_t b = qubit(rng);
  while (b == a) b = qubit(rng);
  switch (kind(rng)) {
    case 0: return Gate::x(a);
    case 1: return Gate::y(a);
    case 2: return Gate::z(a);
    case 3: return Gate::h(a);
    case 4: return Gate::cnot(a, b);
    case 5: return Gate::cphase(a, b, angle(rng));
    case 6: return Gate::ry(a, angle(rng));
    case 7: return Gate::rz(a, angle(rng));
    default: return Gate::ryz(a, angle(rng), angle(rng));
  }
}

double max_distance(const QuantumState& a, const QuantumState& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) d = std::max(d, std::abs(a.amplitudes()[i] - b.amplitudes()[i]));
  return d;
}

TEST(ApplyGate, RyPiMapsZeroToOne) {
  QuantumState s(1);
  apply_gate(s, Gate::ry(0, kPi));
  EXPECT_NEAR(s.amplitudes()[0].real(), 0.0, 1e-15);
  EXPECT_NEAR(s.amplitudes()[1].real(), 1.0, 1e-15);
  EXPECT_NEAR(s.amplitudes()[1].imag(), 0.0, 1e-15);
}

TEST(ApplyGate, CPhaseLeavesOneZeroAlone) {
  QuantumState s(2);
  apply_gate(s, Gate::x(1));  // |q1 q0> = |10>
  const QuantumState before = s;
  apply_gate(s, Gate::cphase(0, 1, 1.234));
  EXPECT_EQ(max_distance(s, before), 0.0);
  apply_gate(s, Gate::x(0));
  apply_gate(s, Gate::cphase(0, 1, 1.234));
  EXPECT_NEAR(std::abs(s.amplitudes()[3] - std::polar(1.0, 1.234)), 0.0, 1e-15);
}

TEST(ApplyGate, CnotOnPlusTargetIsInvariant) {
  QuantumState s(2);
  apply_gate(s, Gate::x(0));
  apply_gate(s, Gate::h(1));
  const QuantumState before = s;
  apply_gate(s, Gate::cnot(0, 1));
  EXPECT_LT(max_distance(s, before), 1e-15);
}

TEST(ApplyGate, LittleEndianIndexing) {
  QuantumState s(3);
  apply_gate(s, Gate::x(1));
  EXPECT_EQ(s.amplitudes()[2], Amplitude(1.0, 0.0));
  apply_gate(s, Gate::cnot(1, 2));
  EXPECT_EQ(s.amplitudes()[6], Amplitude(1.0, 0.0));
}

TEST(ApplyGate, RotationConventions) {
  QuantumState s(1);
  apply_gate(s, Gate::rz(0, 0.8));
  EXPECT_NEAR(std::abs(s.amplitudes()[0] - std::polar(1.0, -0.4)), 0.0, 1e-15);
  QuantumState a(1);
  QuantumState b(1);
  apply_gate(a, Gate::ryz(0, 0.7, -1.9));
  apply_gate(b, Gate::ry(0, 0.7));
  apply_gate(b, Gate::rz(0, -1.9));
  EXPECT_LT(max_distance(a, b), 1e-15);
}

TEST(ApplyGate, RejectsBadTargets) {
  QuantumState s(2);
  EXPECT_THROW(apply_gate(s, Gate::x(2)), ContractViolation);
  EXPECT_THROW(apply_gate(s, Gate::cnot(1, 1)), ContractViolation);
  EXPECT_THROW(QuantumState(31), ContractViolation);
}

TEST(ApplyGate, CPhaseIsSymmetric) {
  Rng rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    QuantumState a(3);
    for (int g = 0; g < 12; ++g) apply_gate(a, random_gate(3, rng));
    QuantumState b = a;
    apply_gate(a, Gate::cphase(0, 2, 0.3 * rep));
    apply_gate(b, Gate::cphase(2, 0, 0.3 * rep));
    EXPECT_EQ(max_distance(a, b), 0.0);
  }
}

TEST(ApplyGate, NormPreservedOverManyRandomGates) {
  Rng rng(99);
  QuantumState s(8);
  for (int g = 0; g < 10000; ++g) apply_gate(s, random_gate(8, rng));
  EXPECT_NEAR(s.norm_squared(), 1.0, 1e-10);
}

TEST(Adjoint, RoundTripsEveryGateKind) {
  Rng rng(17);
  QuantumState s(4);
  for (int g = 0; g < 20; ++g) apply_gate(s, random_gate(4, rng));
  for (int rep = 0; rep < 500; ++rep) {
    const Gate g = random_gate(4, rng);
    const QuantumState before = s;
    apply_gate(s, g);
    for (const auto& inv : adjoint(g)) apply_gate(s, inv);
    EXPECT_LT(max_distance(s, before), 1e-12);
  }
}

TEST(Expectation, BasisAndPlusStates) {
  QuantumState zero(1);
  EXPECT_EQ(expectation_z(zero, 0), 1.0);
  QuantumState one(1);
  apply_gate(one, Gate::x(0));
  EXPECT_EQ(expectation_z(one, 0), -1.0);
  EXPECT_EQ(probability_one(one, 0), 1.0);
  EXPECT_NEAR(expectation_z(plus_state(), 0), 0.0, 1e-15);
}

TEST(Expectation, RyClosedForm) {
  for (double theta = -3.0; theta <= 3.0; theta += 0.25) {
    QuantumState s(1);
    apply_gate(s, Gate::ry(0, theta));
    const double direct = std::norm(s.amplitudes()[0]) - std::norm(s.amplitudes()[1]);
    EXPECT_NEAR(expectation_z(s, 0), std::cos(theta), 1e-14);
    EXPECT_NEAR(expectation_z(s, 0), direct, 1e-15);
  }
  QuantumState s(1);
  apply_gate(s, Gate::ry(0, kPi / 3.0));
  EXPECT_NEAR(expectation_z(s, 0), 0.5, 1e-15);
}

TEST(Expectation, AllQubitsAtOnce) {
  Rng rng(3);
  QuantumState s(5);
  for (int g = 0; g < 40; ++g) apply_gate(s, random_gate(5, rng));
  const auto z = expectations_z(s);
  for (std::size_t q = 0; q < 5; ++q) EXPECT_NEAR(z[q], expectation_z(s, q), 1e-14);
}

TEST(ParameterShift, ToyObservableIsExact) {
  auto z_after = [](double theta) {
    QuantumState s(1);
    apply_gate(s, Gate::ry(0, theta));
    return expectation_z(s, 0);
  };
  auto shift = [&](double theta) { return 0.5 * (z_after(theta + kPi / 2) - z_after(theta - kPi / 2)); };
  EXPECT_NEAR(shift(kPi / 2), -1.0, 1e-15);
  EXPECT_NEAR(shift(0.0), 0.0, 1e-15);
  Rng rng(8);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 50; ++i) {
    const double theta = u(rng);
    EXPECT_NEAR(shift(theta), -std::sin(theta), 1e-10);
  }
}

TEST(Sampling, DeterministicOneReadsOne) {
  QuantumState s(2);
  apply_gate(s, Gate::x(0));
  Rng rng(1);
  const std::array<std::size_t, 1> q{0};
  const auto table = sample_measurements(s, q, 500, rng);
  ASSERT_EQ(table.size(), 1u);
  EXPECT_EQ(table.at(1), 500u);
}

TEST(Sampling, PlusStateIsBalanced) {
  // 2048 shots: sd of the fraction is 0.011, so 0.05 is beyond 4.5 sd
  const std::array<std::size_t, 1> q{0};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto ones = marginal_ones(sample_measurements(plus_state(), q, 2048, rng), 1);
    EXPECT_NEAR(ones[0], 0.5, 0.05);
  }
}

TEST(Sampling, FullReadoutNoiseIsUniform) {
  QuantumState s(1);
  NoiseModel noise;
  noise.p_read = 0.5;
  Rng rng(6);
  const std::array<std::size_t, 1> q{0};
  const auto ones = marginal_ones(sample_measurements(s, q, 20000, rng, noise), 1);
  EXPECT_NEAR(ones[0], 0.5, 0.02);
}

TEST(Sampling, ShotEstimateConvergesLikeInverseRootShots) {
  QuantumState s(1);
  apply_gate(s, Gate::ry(0, 1.0));
  const double exact = expectation_z(s, 0);
  const std::array<std::size_t, 1> q{0};
  for (std::uint64_t shots : {256u, 4096u, 65536u}) {
    double sq = 0.0;
    const int reps = 40;
    for (int r = 0; r < reps; ++r) {
      Rng rng(1000 + r);
      const double z = 1.0 - 2.0 * marginal_ones(sample_measurements(s, q, shots, rng), 1)[0];
      sq += (z - exact) * (z - exact);
    }
    const double rmse = std::sqrt(sq / reps);
    const double sd = std::sqrt((1.0 - exact * exact) / static_cast<double>(shots));
    EXPECT_LT(rmse, 2.0 * sd) << shots;
    EXPECT_GT(rmse, 0.4 * sd) << shots;
  }
}

TEST(Depolarizing, ZeroProbabilityIsBitIdentical) {
  Rng rng(1);
  QuantumState s(2);
  apply_gate(s, Gate::ry(0, 0.4));
  const QuantumState before = s;
  const std::array<std::size_t, 2> t{0, 1};
  EXPECT_TRUE(inject_depolarizing(s, t, 0.0, rng).empty());
  EXPECT_EQ(max_distance(s, before), 0.0);
}

TEST(Depolarizing, CertainErrorSplitsEvenlyOverPaulis) {
  Rng rng(12345);
  std::array<int, 4> counts{};
  int applied = 0;
  for (int trial = 0; trial < 4000; ++trial) {
    QuantumState s(1);
    const std::array<std::size_t, 1> t{0};
    const auto p = inject_depolarizing(s, t, 1.0, rng);
    if (p.empty()) continue;
    ++applied;
    ++counts[static_cast<int>(p[0])];
  }
  ASSERT_GE(applied, 2800);
  for (int k = 1; k <= 3; ++k) EXPECT_NEAR(counts[k] / static_cast<double>(applied), 1.0 / 3.0, 0.03);
}

TEST(Depolarizing, TrajectoryMeanMatchesChannel) {
  Rng rng(77);
  double sum = 0.0;
  const int trajectories = 8000;
  for (int i = 0; i < trajectories; ++i) {
    QuantumState s(1);
    const std::array<std::size_t, 1> t{0};
    inject_depolarizing(s, t, 0.3, rng);
    sum += expectation_z(s, 0);
  }
  EXPECT_NEAR(sum / trajectories, 0.7, 0.02);
}

TEST(Engine, CountsGatesAndInjectsNoise) {
  NoiseModel noise{0.5, 0.5, 0.0};
  Rng rng(2);
  Engine e(3, &noise, &rng);
  e.apply(Gate::h(0));
  e.apply(Gate::cnot(0, 1));
  e.apply(Gate::ryz(2, 0.1, 0.2));
  EXPECT_EQ(e.tally().single, 2u);
  EXPECT_EQ(e.tally().two, 1u);
  EXPECT_NEAR(e.state().norm_squared(), 1.0, 1e-12);
  EXPECT_THROW(NoiseModel({1.5, 0.0, 0.0}).validate(), ContractViolation);
}

}  // namespace
}  // namespace dsris::qsim
