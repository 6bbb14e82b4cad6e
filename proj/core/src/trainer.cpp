#include "dsris/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "dsris/errors.hpp"

namespace dsris {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

bool activation_driving(ParamRole role, const TrainOptions& options) {
  return role == ParamRole::Beta && options.circuit.form == CircuitForm::Equations;
}

double angle_factor(const CircuitParams& params, std::size_t flat, const CircuitRun& forward,
                    CircuitForm form) {
  const std::size_t l = params.layer_of(flat);
  const std::size_t item = params.item_of(flat);
  switch (params.role(flat)) {
    case ParamRole::Alpha:
    case ParamRole::Gamma: return 1.0;
    case ParamRole::EdgeTheta: return forward.layer_weights[l][item];
    case ParamRole::Beta: return form == CircuitForm::Algorithm1 ? forward.layer_mu[l][item] : 0.0;
  }
  return 0.0;
}

// Best-state bookkeeping: feasible beats infeasible, then higher min-rate.
struct Tracker {
  RISState state;
  double min_rate = -std::numeric_limits<double>::infinity();
  bool feasible = false;
  bool any = false;

  void offer(const BlockEvaluation& e) {
    const bool ok = e.metrics.feasible.ok();
    const bool better = !any || (ok && !feasible) || (ok == feasible && e.metrics.min_rate > min_rate);
    if (better) {
      state = e.state;
      min_rate = e.metrics.min_rate;
      feasible = ok;
      any = true;
    }
  }
};

}  // namespace

BlockEvaluation evaluate_block(const CircuitParams& params, const BlockProblem& problem,
                               const TrainOptions& options, std::uint64_t seed,
                               std::span<const double> ue_weights, std::optional<AngleShift> shift) {
  BlockEvaluation out;
  out.run = run_circuit(problem.block, params, options.circuit, seed, shift);
  out.state = problem.base;
  for (std::size_t i = 0; i < problem.block.size(); ++i) {
    const std::size_t n = problem.block.vertex_ids[i];
    out.state.activation[n] = out.run.decoded.activation[i];
    out.state.phases[n] = out.run.decoded.phases[i];
  }
  out.state.activation = effective_activation(out.state, problem.channels);
  out.metrics = evaluate_state(out.state, problem.channels, problem.config, ue_weights);
  out.loss = out.metrics.loss;
  return out;
}

std::vector<std::uint8_t> trainable_mask(const CircuitParams& params, const TrainOptions& options) {
  std::vector<std::uint8_t> mask(params.size(), 1);
  for (std::size_t j = 0; j < params.size(); ++j) {
    const ParamRole role = params.role(j);
    if (role == ParamRole::EdgeTheta && !options.train_edge_thetas) mask[j] = 0;
    if (role == ParamRole::Beta && options.circuit.force_active &&
        options.circuit.form == CircuitForm::Equations) {
      mask[j] = 0;
    }
  }
  return mask;
}

std::vector<double> loss_gradient(const CircuitParams& params, const BlockProblem& problem,
                                  const TrainOptions& options, std::uint64_t seed,
                                  std::span<const double> ue_weights, const BlockEvaluation& forward,
                                  std::span<const std::uint8_t> mask,
                                  const std::function<void(const BlockEvaluation&)>& observe) {
  require(mask.size() == params.size(), "loss_gradient: mask size mismatch");
  std::vector<double> grad(params.size(), 0.0);
  const auto dphi = loss_phase_gradient(forward.state, problem.channels, problem.config, ue_weights);

  for (std::size_t j = 0; j < params.size(); ++j) {
    if (mask[j] == 0) continue;
    if (activation_driving(params.role(j), options)) {
      CircuitParams plus = params;
      CircuitParams minus = params;
      plus.values()[j] += kHalfPi;
      minus.values()[j] -= kHalfPi;
      const auto ep = evaluate_block(plus, problem, options, seed, ue_weights);
      const auto em = evaluate_block(minus, problem, options, seed, ue_weights);
      grad[j] = 0.5 * (ep.loss - em.loss);
      if (observe) {
        observe(ep);
        observe(em);
      }
      continue;
    }
    const auto ep = evaluate_block(params, problem, options, seed, ue_weights, AngleShift{j, kHalfPi});
    const auto em = evaluate_block(params, problem, options, seed, ue_weights, AngleShift{j, -kHalfPi});
    const double factor = angle_factor(params, j, forward.run, options.circuit.form);
    double g = 0.0;
    for (std::size_t i = 0; i < problem.block.size(); ++i) {
      const double dz = 0.5 * (ep.run.decoded.raw_z_phase[i] - em.run.decoded.raw_z_phase[i]);
      g += dphi[problem.block.vertex_ids[i]] * kTwoPi * dz;
    }
    grad[j] = factor * g;
    if (observe) {
      observe(ep);
      observe(em);
    }
  }
  return grad;
}

std::size_t detect_convergence(std::span<const double> trace, double delta, std::size_t window) {
  require(delta >= 0.0 && window >= 1, "detect_convergence: invalid delta or window");
  const std::size_t t = trace.size();
  if (t < window) return t;
  for (std::size_t e = 0; e + window <= t; ++e) {
    const double best = *std::min_element(trace.begin(), trace.begin() + static_cast<long>(e + window));
    bool settled = true;
    for (std::size_t i = e; i < e + window; ++i) {
      if (std::abs(trace[i] - best) > delta) {
        settled = false;
        break;
      }
    }
    if (settled) return e + 1;
  }
  return t;
}

std::vector<double> softmin_weights(std::span<const double> rates, double tau) {
  require(tau > 0.0, "softmin temperature must be positive");
  require(!rates.empty(), "softmin_weights: no rates");
  const double lo = *std::min_element(rates.begin(), rates.end());
  std::vector<double> w(rates.size());
  double total = 0.0;
  for (std::size_t k = 0; k < rates.size(); ++k) {
    w[k] = std::exp(-(rates[k] - lo) / tau);
    total += w[k];
  }
  for (double& x : w) x /= total;
  return w;
}

TrainReport train(const BlockProblem& problem, const TrainOptions& options, std::uint64_t seed) {
  Rng rng(seed);
  auto initial = CircuitParams::initial(options.layers, problem.block.size(),
                                        problem.block.edges.size(), rng);
  return train(problem, options, derive_seed(seed, 1), std::move(initial));
}

TrainReport train(const BlockProblem& problem, const TrainOptions& options, std::uint64_t seed,
                  CircuitParams params) {
  require(options.epochs >= 1, "train: at least one epoch required");
  require(options.learning_rate >= 0.0, "train: learning rate must be non-negative");
  require(problem.base.size() == problem.channels.n_elements(), "train: base state size mismatch");
  const auto start = std::chrono::steady_clock::now();

  Rng rng(seed);
  const auto mask = trainable_mask(params, options);
  const std::size_t n_trainable =
      static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
  std::vector<double> ue_weights = problem.config.loss.ue;

  TrainReport report;
  Tracker best;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    const std::uint64_t epoch_seed = rng();
    const auto forward = evaluate_block(params, problem, options, epoch_seed, ue_weights);
    Tracker epoch_best;
    epoch_best.offer(forward);
    best.offer(forward);
    std::function<void(const BlockEvaluation&)> observe;
    if (options.select_from_all_evaluations) {
      observe = [&](const BlockEvaluation& e) {
        epoch_best.offer(e);
        best.offer(e);
      };
    }
    const auto grad = loss_gradient(params, problem, options, epoch_seed, ue_weights, forward,
                                    mask, observe);
    auto values = params.values();
    for (std::size_t j = 0; j < values.size(); ++j) values[j] -= options.learning_rate * grad[j];

    report.loss_trace.push_back(forward.loss);
    report.min_rate_trace.push_back(epoch_best.min_rate);
    report.circuit_evals += 1 + 2 * n_trainable;
    if (options.softmin_weights) {
      ue_weights = softmin_weights(forward.metrics.link.rates, options.softmin_tau);
    }
  }

  report.best_state = best.state;
  report.best_min_rate = best.min_rate;
  report.best_feasible = best.feasible;
  report.convergence_epoch =
      detect_convergence(report.loss_trace, options.convergence_delta, options.convergence_window);
  report.final_params = std::move(params);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

QgcnResult optimize_qgcn(const ChannelSet& channels, const SystemConfig& config,
                         const RISGraph& graph, std::size_t block_cap, const TrainOptions& options,
                         std::uint64_t seed) {
  require(graph.size() == channels.n_elements(), "optimize_qgcn: graph does not cover the RIS");
  const auto start = std::chrono::steady_clock::now();
  TrainOptions opts = options;
  if (opts.circuit.d_min_m <= 0.0) opts.circuit.d_min_m = config.d_min_m;
  if (opts.circuit.w_decay_per_m <= 0.0) opts.circuit.w_decay_per_m = graph.w_decay;

  const auto blocks = partition(graph, block_cap);
  QgcnResult result;
  RISState current = RISState::all_active(channels.n_elements());
  current.activation = effective_activation(current, channels);
  std::vector<BlockResult> pieces;
  for (const auto& block : blocks) {
    BlockProblem problem{channels, config, block, current};
    auto report = train(problem, opts, derive_seed(seed, block.block_id));
    BlockResult piece;
    piece.vertex_ids = block.vertex_ids;
    for (std::size_t n : block.vertex_ids) {
      current.activation[n] = report.best_state.activation[n];
      current.phases[n] = report.best_state.phases[n];
      piece.activation.push_back(report.best_state.activation[n]);
      piece.phases.push_back(report.best_state.phases[n]);
    }
    pieces.push_back(std::move(piece));
    result.circuit_evals += report.circuit_evals;
    result.convergence_epoch = std::max(result.convergence_epoch, report.convergence_epoch);
    result.block_reports.push_back(std::move(report));
  }
  const auto stitched = stitch(pieces, channels.n_elements(), config);
  result.state = stitched.state;
  result.metrics = evaluate_state(result.state, channels, config);
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace dsris
