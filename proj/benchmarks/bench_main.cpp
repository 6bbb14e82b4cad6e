#include <benchmark/benchmark.h>

#include "dsris/channel.hpp"
#include "dsris/circuit.hpp"
#include "dsris/graph.hpp"
#include "dsris/harness.hpp"
#include "dsris/qsim.hpp"

namespace dsris {
namespace {

void BM_SingleQubitGate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  qsim::QuantumState s(n);
  std::size_t q = 0;
  for (auto _ : state) {
    qsim::apply_gate(s, qsim::Gate::ryz(q, 0.3, 0.7));
    q = (q + 1) % n;
    benchmark::DoNotOptimize(s.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SingleQubitGate)->DenseRange(8, 20, 4);

void BM_ControlledPhase(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  qsim::QuantumState s(n);
  std::size_t q = 0;
  for (auto _ : state) {
    qsim::apply_gate(s, qsim::Gate::cphase(q, (q + 1) % n, 0.4));
    q = (q + 1) % n;
    benchmark::DoNotOptimize(s.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ControlledPhase)->DenseRange(8, 20, 4);

void BM_RunCircuitExact(benchmark::State& state) {
  const auto v = static_cast<std::size_t>(state.range(0));
  const auto g = build_graph(grid_positions(v, 0.5), 2.0, 2);
  const auto block = partition(g, v).front();
  Rng rng(1);
  const auto params = CircuitParams::initial(2, v, block.edges.size(), rng);
  CircuitOptions o;
  o.d_min_m = 0.5;
  o.w_decay_per_m = 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(run_circuit(block, params, o, 1));
}
BENCHMARK(BM_RunCircuitExact)->DenseRange(2, 8, 2);

void BM_RunCircuitNoisyShots(benchmark::State& state) {
  const auto g = build_graph(grid_positions(4, 0.5), 2.0, 2);
  const auto block = partition(g, 4).front();
  Rng rng(1);
  const auto params = CircuitParams::initial(2, 4, block.edges.size(), rng);
  CircuitOptions o;
  o.d_min_m = 0.5;
  o.w_decay_per_m = 2.0;
  o.shots = 2048;
  o.noise = qsim::NoiseModel::ablation();
  o.trajectories = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_circuit(block, params, o, ++seed));
}
BENCHMARK(BM_RunCircuitNoisyShots)->Arg(1)->Arg(8)->Arg(32);

void BM_MinRate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto config = make_config(n, 2, 3);
  const auto channels = combine_channels(generate_scenario(3, config, false), config);
  Rng rng(2);
  RISState s = RISState::all_active(n);
  for (double& phi : s.phases) phi = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
  for (auto _ : state) benchmark::DoNotOptimize(objective_min_rate(s, channels, config));
}
BENCHMARK(BM_MinRate)->RangeMultiplier(4)->Range(4, 256);

}  // namespace
}  // namespace dsris

BENCHMARK_MAIN();
