#include "dsris/circuit.hpp"

#include <random>

#include "dsris/channel.hpp"
#include "dsris/errors.hpp"

namespace dsris {

CircuitParams::CircuitParams(std::size_t layers, std::size_t elements, std::size_t edges)
    : layers_(layers), elements_(elements), edges_(edges),
      values_(3 * layers * elements + layers * edges, 0.0) {}

CircuitParams CircuitParams::initial(std::size_t layers, std::size_t elements, std::size_t edges,
                                     Rng& rng) {
  CircuitParams p(layers, elements, edges);
  std::uniform_real_distribution<double> small(-0.1, 0.1);
  std::uniform_real_distribution<double> positive(0.0, 0.1);
  for (std::size_t l = 0; l < layers; ++l) {
    for (std::size_t i = 0; i < elements; ++i) {
      p.at(ParamRole::Alpha, l, i) = small(rng);
      p.at(ParamRole::Beta, l, i) = positive(rng);
      p.at(ParamRole::Gamma, l, i) = small(rng);
    }
    for (std::size_t e = 0; e < edges; ++e) p.at(ParamRole::EdgeTheta, l, e) = 1.0;
  }
  return p;
}

std::size_t CircuitParams::index(ParamRole role, std::size_t l, std::size_t item) const {
  const std::size_t block = layers_ * elements_;
  switch (role) {
    case ParamRole::Alpha: return l * elements_ + item;
    case ParamRole::Beta: return block + l * elements_ + item;
    case ParamRole::Gamma: return 2 * block + l * elements_ + item;
    case ParamRole::EdgeTheta: return 3 * block + l * edges_ + item;
  }
  return 0;
}

ParamRole CircuitParams::role(std::size_t flat) const {
  require(flat < values_.size(), "parameter index out of range");
  const std::size_t block = layers_ * elements_;
  if (flat < block) return ParamRole::Alpha;
  if (flat < 2 * block) return ParamRole::Beta;
  if (flat < 3 * block) return ParamRole::Gamma;
  return ParamRole::EdgeTheta;
}

std::size_t CircuitParams::layer_of(std::size_t flat) const {
  const std::size_t block = layers_ * elements_;
  if (flat < 3 * block) return (flat % block) / elements_;
  return (flat - 3 * block) / edges_;
}

std::size_t CircuitParams::item_of(std::size_t flat) const {
  const std::size_t block = layers_ * elements_;
  if (flat < 3 * block) return (flat % block) % elements_;
  return (flat - 3 * block) % edges_;
}

void prepare_initial(qsim::Engine& engine, const SubgraphBlock& block) {
  using qsim::Gate;
  const std::size_t n = block.size();
  require(n >= 1, "prepare_initial: empty block");
  for (std::size_t i = 0; i < n; ++i) {
    engine.apply(Gate::x(activation_qubit(i)));
    engine.apply(Gate::h(phase_qubit(i)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    engine.apply(Gate::cnot(activation_qubit(i), phase_qubit(i)));
  }
  for (const auto& e : block.edges) engine.apply(Gate::cnot(phase_qubit(e.u), phase_qubit(e.v)));
}

qsim::QuantumState prepare_initial(const SubgraphBlock& block) {
  qsim::Engine engine(block.qubits());
  prepare_initial(engine, block);
  return engine.state();
}

namespace {

double shifted(std::size_t flat, double value,
               const std::optional<AngleShift>& shift) {
  return (shift && shift->index == flat) ? value + shift->offset : value;
}

std::vector<double> neighbour_sums(const qsim::QuantumState& state,
                                   const std::vector<std::vector<std::size_t>>& adj) {
  std::vector<double> z(adj.size());
  for (std::size_t j = 0; j < adj.size(); ++j) z[j] = qsim::expectation_z(state, phase_qubit(j));
  std::vector<double> mu(adj.size(), 0.0);
  for (std::size_t i = 0; i < adj.size(); ++i) {
    for (std::size_t j : adj[i]) mu[i] += z[j];
  }
  return mu;
}

}  // namespace

void apply_layer(qsim::Engine& engine, std::size_t layer, const SubgraphBlock& block,
                 std::span<const double> weights, const CircuitParams& params, CircuitForm form,
                 std::optional<AngleShift> shift, std::vector<double>* mu_out) {
  using qsim::Gate;
  require(layer < params.layers(), "apply_layer: layer index out of range");
  require(params.elements() == block.size() && params.edges() == block.edges.size(),
          "apply_layer: parameters are not dimensioned for this block");
  require(weights.size() == block.edges.size(), "apply_layer: one weight per edge required");
  const std::size_t n = block.size();

  for (std::size_t e = 0; e < block.edges.size(); ++e) {
    const std::size_t flat = params.index(ParamRole::EdgeTheta, layer, e);
    const double angle = shifted(flat, weights[e] * params.edge_theta(layer, e), shift);
    engine.apply(Gate::cphase(phase_qubit(block.edges[e].u), phase_qubit(block.edges[e].v), angle));
  }

  const auto adj = block.neighbors();
  if (form == CircuitForm::Equations) {
    require(!shift || params.role(shift->index) != ParamRole::Beta,
            "beta drives two gates in the equations form; shift the parameter instead");
    const auto mu = neighbour_sums(engine.state(), adj);
    for (std::size_t i = 0; i < n; ++i) {
      engine.apply(Gate::ry(activation_qubit(i), params.beta(layer, i) * mu[i]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double a = shifted(params.index(ParamRole::Alpha, layer, i), params.alpha(layer, i), shift);
      const double g = shifted(params.index(ParamRole::Gamma, layer, i), params.gamma(layer, i), shift);
      engine.apply(Gate::ryz(phase_qubit(i), a, g));
      engine.apply(Gate::ry(activation_qubit(i), params.beta(layer, i)));
    }
    if (mu_out != nullptr) *mu_out = mu;
  } else {
    std::vector<double> mu_used(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double mu = 0.0;
      for (std::size_t j : adj[i]) mu += qsim::expectation_z(engine.state(), phase_qubit(j));
      mu_used[i] = mu;
      double ry_angle = params.alpha(layer, i) + params.beta(layer, i) * mu;
      if (shift && (shift->index == params.index(ParamRole::Alpha, layer, i) ||
                    shift->index == params.index(ParamRole::Beta, layer, i))) {
        ry_angle += shift->offset;
      }
      const double g = shifted(params.index(ParamRole::Gamma, layer, i), params.gamma(layer, i), shift);
      engine.apply(Gate::ryz(phase_qubit(i), ry_angle, g));
    }
    if (mu_out != nullptr) *mu_out = mu_used;
  }
}

CircuitRun run_circuit(const SubgraphBlock& block, const CircuitParams& params,
                       const CircuitOptions& options, std::uint64_t seed,
                       std::optional<AngleShift> shift) {
  const std::size_t n = block.size();
  const std::size_t layers = params.layers();
  require(params.elements() == n && params.edges() == block.edges.size(),
          "run_circuit: parameters are not dimensioned for this block");
  options.noise.validate();
  if (options.shots) require(*options.shots >= 1, "run_circuit: shots must be positive");

  const bool gate_noise = options.noise.p1 > 0.0 || options.noise.p2 > 0.0;
  const std::size_t trajectories = gate_noise ? std::max<std::size_t>(1, options.trajectories) : 1;

  Rng rng(seed);
  CircuitRun run;
  run.layer_weights.assign(layers, std::vector<double>(block.edges.size(), 0.0));
  run.layer_mu.assign(layers, std::vector<double>(n, 0.0));
  std::vector<double> ones_activation(n, 0.0);
  std::vector<double> z_phase(n, 0.0);

  std::vector<std::size_t> measured(2 * n);
  for (std::size_t q = 0; q < measured.size(); ++q) measured[q] = q;

  for (std::size_t t = 0; t < trajectories; ++t) {
    qsim::Engine engine(block.qubits(), gate_noise ? &options.noise : nullptr, &rng);
    prepare_initial(engine, block);
    if (t == 0) run.prep_gates = engine.tally();

    std::vector<double> weights = block.weights;
    std::vector<double> mu;
    for (std::size_t l = 0; l < layers; ++l) {
      const qsim::GateTally before = engine.tally();
      apply_layer(engine, l, block, weights, params, options.form, shift, &mu);
      if (t == 0) {
        run.gates_per_layer.push_back(
            {engine.tally().single - before.single, engine.tally().two - before.two});
      }
      for (std::size_t e = 0; e < weights.size(); ++e) run.layer_weights[l][e] += weights[e];
      for (std::size_t i = 0; i < n; ++i) run.layer_mu[l][i] += mu[i];
      if (l + 1 < layers) {
        std::vector<double> mean_act(n, 1.0);
        if (!options.force_active) {
          for (std::size_t i = 0; i < n; ++i) {
            mean_act[i] = qsim::probability_one(engine.state(), activation_qubit(i));
          }
        }
        weights = refresh_weights(block.edges, mean_act, options.d_min_m, options.w_decay_per_m);
      }
    }

    if (options.shots) {
      const std::uint64_t total = *options.shots;
      const std::uint64_t share = total / trajectories + (t < total % trajectories ? 1 : 0);
      if (share == 0) continue;
      const auto table = qsim::sample_measurements(engine.state(), measured, share, rng, options.noise);
      const auto ones = qsim::marginal_ones(table, measured.size());
      const double w = static_cast<double>(share);
      for (std::size_t i = 0; i < n; ++i) {
        ones_activation[i] += w * ones[activation_qubit(i)];
        z_phase[i] += w * (1.0 - 2.0 * ones[phase_qubit(i)]);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        ones_activation[i] += qsim::probability_one(engine.state(), activation_qubit(i));
        z_phase[i] += qsim::expectation_z(engine.state(), phase_qubit(i));
      }
    }
  }

  const double norm = options.shots ? static_cast<double>(*options.shots)
                                    : static_cast<double>(trajectories);
  const double traj = static_cast<double>(trajectories);
  for (auto& row : run.layer_weights) for (auto& w : row) w /= traj;
  for (auto& row : run.layer_mu) for (auto& m : row) m /= traj;

  auto& d = run.decoded;
  d.activation.resize(n);
  d.phases.resize(n);
  d.raw_z_phase.resize(n);
  d.mean_activation.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.mean_activation[i] = ones_activation[i] / norm;
    d.raw_z_phase[i] = z_phase[i] / norm;
    d.activation[i] = (options.force_active || d.mean_activation[i] >= 0.5) ? 1 : 0;
    d.phases[i] = wrap_phase(kTwoPi * d.raw_z_phase[i]);
  }
  return run;
}

}  // namespace dsris
