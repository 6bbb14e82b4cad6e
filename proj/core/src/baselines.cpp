#include "dsris/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "dsris/errors.hpp"

namespace dsris {

namespace {

constexpr double kGolden = 0.6180339887498949;

double min_rate_from_gains(std::span<const double> gains, const SystemConfig& c) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < gains.size(); ++k) {
    double interference = 0.0;
    for (std::size_t i = 0; i < gains.size(); ++i) {
      if (i != k) interference += c.tx_power_w[i] * gains[i];
    }
    const double sinr = c.tx_power_w[k] * gains[k] / (interference + c.noise_power_w[k]);
    worst = std::min(worst, std::log2(1.0 + sinr));
  }
  return worst;
}

std::vector<std::uint8_t> pattern_bits(std::uint32_t mask, std::size_t n) {
  std::vector<std::uint8_t> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = (mask >> i) & 1U;
  return a;
}

std::vector<std::uint8_t> powered(const ChannelSet& ch) {
  std::vector<std::uint8_t> a(ch.n_elements(), 1);
  for (std::size_t n = 0; n < a.size() && n < ch.forced_off.size(); ++n) {
    if (ch.forced_off[n] != 0) a[n] = 0;
  }
  return a;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Best-state rule shared by the classical optimizers.
struct Best {
  RISState state;
  double min_rate = -std::numeric_limits<double>::infinity();
  bool feasible = false;
  bool any = false;

  void offer(const RISState& s, const Evaluation& e) {
    const bool ok = e.feasible.ok();
    if (!any || (ok && !feasible) || (ok == feasible && e.min_rate > min_rate)) {
      state = s;
      min_rate = e.min_rate;
      feasible = ok;
      any = true;
    }
  }
};

}  // namespace

std::vector<std::uint32_t> feasible_patterns(const SystemConfig& config,
                                             std::span<const std::uint8_t> forced_off) {
  const std::size_t n = config.n_elements;
  require(n <= 31, "feasible_patterns: too many elements to enumerate");
  std::uint32_t blocked = 0;
  for (std::size_t i = 0; i < forced_off.size() && i < n; ++i) {
    if (forced_off[i] != 0) blocked |= 1U << i;
  }
  std::vector<std::uint32_t> out;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if ((mask & blocked) != 0) continue;
    if (feasibility(pattern_bits(mask, n), config).ok()) out.push_back(mask);
  }
  return out;
}

OracleResult brute_force(const ChannelSet& channels, const SystemConfig& config, unsigned phase_bits) {
  const std::size_t n = channels.n_elements();
  if (n > kBruteForceMaxElements || phase_bits > kBruteForceMaxBits) {
    throw DomainError("brute_force supports N <= 6 and B <= 3; got N = " + std::to_string(n) +
                      ", B = " + std::to_string(phase_bits));
  }
  require(config.n_elements == n, "brute_force: config and channel sizes differ");

  const std::size_t levels = std::size_t{1} << phase_bits;
  std::vector<Complex> phasor(levels);
  for (std::size_t t = 0; t < levels; ++t) {
    const double phi = kTwoPi * static_cast<double>(t) / static_cast<double>(levels);
    phasor[t] = {std::cos(phi), std::sin(phi)};
  }

  OracleResult result;
  const auto patterns = feasible_patterns(config, channels.forced_off);
  result.feasible_patterns = patterns.size();
  double best = -std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  std::vector<std::size_t> best_digits;

  const std::size_t k_count = channels.n_ues();
  std::vector<Complex> s(k_count);
  std::vector<double> gains(k_count);
  for (std::uint32_t mask : patterns) {
    const auto terms = reflection_terms(pattern_bits(mask, n), channels);
    const std::size_t na = terms.idx.size();
    std::vector<std::size_t> digits(na, 0);
    while (true) {
      std::fill(s.begin(), s.end(), Complex{});
      for (std::size_t j = 0; j < na; ++j) {
        for (std::size_t k = 0; k < k_count; ++k) s[k] += terms.t(j, k) * phasor[digits[j]];
      }
      for (std::size_t k = 0; k < k_count; ++k) gains[k] = std::norm(s[k]);
      const double r = min_rate_from_gains(gains, config);
      ++result.configurations_searched;
      if (r > best) {
        best = r;
        best_mask = mask;
        best_digits = digits;
      }
      std::size_t pos = 0;
      while (pos < na && ++digits[pos] == levels) digits[pos++] = 0;
      if (pos == na) break;
    }
  }

  result.best_state.activation.assign(n, 0);
  result.best_state.phases.assign(n, 0.0);
  if (patterns.empty()) {
    result.best_state = RISState::all_active(n);
    result.best_state.activation = effective_activation(result.best_state, channels);
    result.best_min_rate = objective_min_rate(result.best_state, channels, config);
    return result;
  }
  result.best_state.activation = pattern_bits(best_mask, n);
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (result.best_state.activation[i] == 0) continue;
    result.best_state.phases[i] =
        kTwoPi * static_cast<double>(best_digits[j++]) / static_cast<double>(levels);
  }
  result.best_min_rate = best;
  return result;
}

RISState project_phases(const RISState& state, unsigned phase_bits) {
  require(phase_bits >= 1 && phase_bits <= 16, "project_phases: phase bits must be in [1, 16]");
  const double levels = static_cast<double>(1U << phase_bits);
  RISState out = state;
  for (double& phi : out.phases) {
    const double t = std::round(wrap_phase(phi) * levels / kTwoPi);
    phi = wrap_phase(kTwoPi * t / levels);
  }
  return out;
}

RISState random_phase_config(std::size_t n_elements, Rng& rng) {
  std::uniform_real_distribution<double> uni(0.0, kTwoPi);
  RISState s = RISState::all_active(n_elements);
  for (double& phi : s.phases) phi = uni(rng);
  return s;
}

RISState fixed_spacing_config(const ChannelSet& ch, const SystemConfig&) {
  const std::size_t n = ch.n_elements();
  std::size_t dominant = 0;
  double strongest = -1.0;
  for (std::size_t k = 0; k < ch.n_ues(); ++k) {
    double power = 0.0;
    for (std::size_t i = 0; i < n; ++i) power += std::norm(ch.ris_ue(i, k));
    power *= ch.beta[k];
    if (power > strongest) {
      strongest = power;
      dominant = k;
    }
  }
  RISState s = RISState::all_active(n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex u{};
    for (std::size_t m = 0; m < ch.n_aps(); ++m) u += std::conj(ch.ap_ris(m, i));
    const Complex path = u * ch.ris_ue(i, dominant);
    s.phases[i] = std::abs(path) > 0.0 ? wrap_phase(-std::arg(path)) : 0.0;
  }
  return s;
}

RISState continuous_phase_config(const ChannelSet& ch, const SystemConfig& config,
                                 std::size_t sweeps, std::size_t evals_per_step) {
  require(evals_per_step >= 2, "continuous_phase_config: need at least two evaluations per step");
  RISState state = fixed_spacing_config(ch, config);
  state.activation = effective_activation(state, ch);
  const auto terms = reflection_terms(state.activation, ch);
  auto score = [&](const std::vector<double>& phases) {
    return min_rate_from_gains(received_gains(terms, phases), config);
  };

  double current = score(state.phases);
  std::vector<double> trial = state.phases;
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t n : terms.idx) {
      const double centre = state.phases[n];
      auto f = [&](double phi) {
        trial[n] = phi;
        return score(trial);
      };
      double lo = centre - std::numbers::pi;
      double hi = centre + std::numbers::pi;
      double x1 = hi - kGolden * (hi - lo);
      double x2 = lo + kGolden * (hi - lo);
      double f1 = f(x1);
      double f2 = f(x2);
      double best_x = f1 >= f2 ? x1 : x2;
      double best_f = std::max(f1, f2);
      for (std::size_t e = 2; e < evals_per_step; ++e) {
        if (f1 >= f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - kGolden * (hi - lo);
          f1 = f(x1);
          if (f1 > best_f) { best_f = f1; best_x = x1; }
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + kGolden * (hi - lo);
          f2 = f(x2);
          if (f2 > best_f) { best_f = f2; best_x = x2; }
        }
      }
      if (best_f > current) {
        current = best_f;
        state.phases[n] = wrap_phase(best_x);
      }
      trial[n] = state.phases[n];
    }
  }
  return state;
}

std::vector<LabeledState> reference_configs(const ChannelSet& channels, const SystemConfig& config,
                                            Rng& rng, unsigned phase_bits) {
  std::vector<LabeledState> out;
  out.push_back({"random", random_phase_config(channels.n_elements(), rng)});
  out.push_back({"fixed", fixed_spacing_config(channels, config)});
  out.push_back({"continuous", continuous_phase_config(channels, config)});
  out.push_back({"discrete", project_phases(out.back().state, phase_bits)});
  return out;
}

BaselineReport phase_gradient_descent(const ChannelSet& channels, const SystemConfig& config,
                                      const RISState& initial, std::size_t epochs,
                                      double learning_rate) {
  require(learning_rate >= 0.0, "phase_gradient_descent: learning rate must be non-negative");
  const auto start = std::chrono::steady_clock::now();
  BaselineReport report;
  RISState state = initial;
  state.activation = effective_activation(state, channels);
  Best best;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    const auto e = evaluate_state(state, channels, config);
    best.offer(state, e);
    report.loss_trace.push_back(e.loss);
    const auto grad = loss_phase_gradient(state, channels, config);
    for (std::size_t n = 0; n < state.size(); ++n) {
      if (state.activation[n] != 0) state.phases[n] = wrap_phase(state.phases[n] - learning_rate * grad[n]);
    }
    report.state_trace.push_back(state);
  }
  best.offer(state, evaluate_state(state, channels, config));
  report.state = best.state;
  report.metrics = evaluate_state(report.state, channels, config);
  report.convergence_epoch = detect_convergence(report.loss_trace, 1e-3, 5);
  report.wall_time_s = seconds_since(start);
  return report;
}

namespace {

// Flat layout: node features [logit, phase] per element, then per round a 2x4
// weight matrix and a bias pair.
class GnnModel {
 public:
  GnnModel(const ChannelSet& ch, const SystemConfig& config, const RISGraph& graph,
           const GnnOptions& options)
      : config_(config), options_(options), n_(ch.n_elements()),
        rounds_(options.messages ? options.rounds : 0), powered_(powered(ch)),
        terms_(reflection_terms(powered_, ch)), adj_(n_), adj_w_(n_) {
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
      const auto [u, v] = graph.edges[e];
      adj_[u].push_back(v);
      adj_w_[u].push_back(graph.weights[e]);
      adj_[v].push_back(u);
      adj_w_[v].push_back(graph.weights[e]);
    }
  }

  [[nodiscard]] std::size_t size() const { return 2 * n_ + rounds_ * 10; }

  [[nodiscard]] std::vector<double> initial(Rng& rng) const {
    std::vector<double> p(size(), 0.0);
    std::uniform_real_distribution<double> small(-0.1, 0.1);
    std::normal_distribution<double> weight(0.0, 0.1);
    for (std::size_t i = 0; i < n_; ++i) {
      p[2 * i] = options_.initial_logit;
      p[2 * i + 1] = options_.initial_phases ? (*options_.initial_phases)[i] : small(rng);
    }
    for (std::size_t j = 2 * n_; j < p.size(); ++j) {
      const bool is_bias = (j - 2 * n_) % 10 >= 8;
      p[j] = is_bias ? 0.0 : weight(rng);
    }
    return p;
  }

  [[nodiscard]] std::vector<std::uint8_t> trainable() const {
    std::vector<std::uint8_t> mask(size(), 1);
    if (!options_.train_logits) {
      for (std::size_t i = 0; i < n_; ++i) mask[2 * i] = 0;
    }
    return mask;
  }

  /// Output features (logit, phase) per element.
  [[nodiscard]] std::vector<double> forward(std::span<const double> p) const {
    std::vector<double> x(p.begin(), p.begin() + static_cast<long>(2 * n_));
    for (std::size_t r = 0; r < rounds_; ++r) {
      const double* w = p.data() + 2 * n_ + 10 * r;
      const double* b = w + 8;
      std::vector<double> next = x;
      for (std::size_t i = 0; i < n_; ++i) {
        double m0 = 0.0;
        double m1 = 0.0;
        double total = 0.0;
        for (std::size_t q = 0; q < adj_[i].size(); ++q) {
          m0 += adj_w_[i][q] * x[2 * adj_[i][q]];
          m1 += adj_w_[i][q] * x[2 * adj_[i][q] + 1];
          total += adj_w_[i][q];
        }
        if (total > 0.0) {
          m0 /= total;
          m1 /= total;
        }
        const double in[4] = {x[2 * i], x[2 * i + 1], m0, m1};
        for (std::size_t o = 0; o < 2; ++o) {
          double z = b[o];
          for (std::size_t c = 0; c < 4; ++c) z += w[4 * o + c] * in[c];
          next[2 * i + o] += std::tanh(z);
        }
      }
      x = std::move(next);
    }
    return x;
  }

  [[nodiscard]] double relaxed_loss(std::span<const double> p) const {
    const auto x = forward(p);
    std::vector<double> amp(n_);
    std::vector<double> phases(n_);
    double soft_count = 0.0;
    double phase_sq = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      amp[i] = powered_[i] != 0 ? 1.0 / (1.0 + std::exp(-x[2 * i])) : 0.0;
      phases[i] = x[2 * i + 1];
      soft_count += amp[i];
      phase_sq += amp[i] * phases[i] * phases[i];
    }
    const auto link = sinr_and_rates(received_gains(terms_, phases, amp), config_);
    double value = 0.0;
    for (std::size_t k = 0; k < link.rates.size(); ++k) value -= config_.loss.ue[k] * link.rates[k];
    value += config_.loss.phase_norm * phase_sq;
    if (!feasibility(decode(x).activation, config_).aperture) value += config_.loss.aperture;
    const double deficit = std::max(0.0, static_cast<double>(config_.n_min) - soft_count);
    value += config_.loss.activation * deficit * deficit;
    return value;
  }

  [[nodiscard]] RISState decode(std::span<const double> x) const {
    RISState s = RISState::all_active(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      s.activation[i] = (powered_[i] != 0 && x[2 * i] >= 0.0) ? 1 : 0;
      s.phases[i] = wrap_phase(x[2 * i + 1]);
    }
    return s;
  }

 private:
  const SystemConfig& config_;
  const GnnOptions& options_;
  std::size_t n_;
  std::size_t rounds_;
  std::vector<std::uint8_t> powered_;
  ReflectionTerms terms_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::vector<double>> adj_w_;
};

}  // namespace

BaselineReport classical_gnn(const ChannelSet& channels, const SystemConfig& config,
                             const RISGraph& graph, const GnnOptions& options, std::uint64_t seed) {
  require(graph.size() == channels.n_elements(), "classical_gnn: graph does not cover the RIS");
  require(options.fd_step > 0.0 && options.learning_rate >= 0.0, "classical_gnn: invalid step sizes");
  if (options.initial_phases) {
    require(options.initial_phases->size() == channels.n_elements(),
            "classical_gnn: initial phases size mismatch");
  }
  const auto start = std::chrono::steady_clock::now();
  Rng rng(seed);
  const GnnModel model(channels, config, graph, options);
  auto p = model.initial(rng);
  const auto mask = model.trainable();

  BaselineReport report;
  Best best;
  std::vector<double> grad(p.size());
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    const RISState hard = model.decode(model.forward(p));
    best.offer(hard, evaluate_state(hard, channels, config));
    report.loss_trace.push_back(model.relaxed_loss(p));
    for (std::size_t j = 0; j < p.size(); ++j) {
      grad[j] = 0.0;
      if (mask[j] == 0) continue;
      const double keep = p[j];
      p[j] = keep + options.fd_step;
      const double up = model.relaxed_loss(p);
      p[j] = keep - options.fd_step;
      const double down = model.relaxed_loss(p);
      p[j] = keep;
      grad[j] = (up - down) / (2.0 * options.fd_step);
    }
    for (std::size_t j = 0; j < p.size(); ++j) p[j] -= options.learning_rate * grad[j];
    report.state_trace.push_back(model.decode(model.forward(p)));
  }
  const RISState last = model.decode(model.forward(p));
  best.offer(last, evaluate_state(last, channels, config));
  report.state = best.state;
  report.metrics = evaluate_state(report.state, channels, config);
  report.convergence_epoch = detect_convergence(report.loss_trace, 1e-3, 5);
  report.wall_time_s = seconds_since(start);
  return report;
}

}  // namespace dsris
