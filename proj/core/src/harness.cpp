#include "dsris/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <numbers>
#include <random>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "dsris/baselines.hpp"
#include "dsris/errors.hpp"
#include "dsris/graph.hpp"
#include "dsris/trainer.hpp"

namespace dsris {

namespace {

constexpr std::pair<Method, const char*> kMethodNames[] = {
    {Method::Qgcn, "qgcn"},         {Method::Gnn, "gnn"},           {Method::Gd, "gd"},
    {Method::Random, "random"},     {Method::Fixed, "fixed"},       {Method::Continuous, "continuous"},
    {Method::Discrete, "discrete"}, {Method::Oracle, "oracle"},
};

constexpr std::pair<AblationMode, const char*> kAblationNames[] = {
    {AblationMode::Full, "full"},
    {AblationMode::NoVirtualSpacing, "no_virtual_spacing"},
    {AblationMode::NoDoubleSided, "no_double_sided"},
};

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  void values(std::span<const double> xs) { bytes(xs.data(), xs.size() * sizeof(double)); }
  void values(std::span<const Complex> xs) { bytes(xs.data(), xs.size() * sizeof(Complex)); }
  void sides(std::span<const Side> xs) { bytes(xs.data(), xs.size() * sizeof(Side)); }
  [[nodiscard]] std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

ResultRow make_row(const ExperimentSpec& spec, const SystemConfig& config, Method method,
                   std::uint64_t seed, const RISState& state, const ChannelSet& channels,
                   const std::string& digest) {
  const RISState scored = spec.grid_scoring ? project_phases(state, spec.phase_bits) : state;
  const auto e = evaluate_state(scored, channels, config);
  ResultRow row;
  row.config = to_string(spec.ablation);
  row.n_elements = config.n_elements;
  row.method = to_string(method);
  row.seed = seed;
  row.min_rate = e.min_rate;
  row.sum_rate = e.sum_rate;
  row.rates = e.link.rates;
  row.n_active = active_count(e.activation);
  row.feasible = e.feasible.ok();
  row.scenario_digest = digest;
  row.state = scored;
  row.state.activation = e.activation;
  return row;
}

TrainOptions qgcn_options(const ExperimentSpec& spec, const SystemConfig& config) {
  TrainOptions opts;
  opts.layers = spec.layers;
  opts.epochs = spec.epochs;
  opts.learning_rate = spec.learning_rate;
  opts.train_edge_thetas = spec.train_edge_thetas;
  opts.softmin_weights = spec.softmin_weights;
  opts.circuit.form = spec.form;
  if (!spec.exact) opts.circuit.shots = spec.shots;
  if (spec.noise) opts.circuit.noise = spec.noise_model;
  opts.circuit.trajectories = spec.trajectories;
  opts.circuit.force_active = spec.ablation == AblationMode::NoVirtualSpacing;
  opts.circuit.d_min_m = config.d_min_m;
  opts.circuit.w_decay_per_m = config.w_decay_per_m;
  return opts;
}

SystemConfig config_for_size(const SystemConfig& base, std::size_t n) {
  SystemConfig c = base;
  c.n_elements = n;
  c.n_min = std::max<std::size_t>(1, (n + 1) / 2);
  c.d_total_m = static_cast<double>(n - 1) * c.d_min_m;
  return c;
}

}  // namespace

std::string to_string(Method m) {
  for (const auto& [k, name] : kMethodNames) {
    if (k == m) return name;
  }
  return "unknown";
}

std::string to_string(AblationMode m) {
  for (const auto& [k, name] : kAblationNames) {
    if (k == m) return name;
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (const auto& [k, n] : kMethodNames) {
    if (name == n) return k;
  }
  throw ContractViolation("unknown method '" + name + "'");
}

AblationMode parse_ablation(const std::string& name) {
  for (const auto& [k, n] : kAblationNames) {
    if (name == n) return k;
  }
  throw ContractViolation("unknown ablation mode '" + name + "'");
}

void validate(const ExperimentSpec& spec) {
  require(spec.n_runs >= 1, "at least one run is required");
  require(!spec.methods.empty(), "the method list is empty");
  require(spec.block_cap >= 1, "block cap must be at least 1");
  require(2 * std::min(spec.block_cap, spec.config.n_elements) <= 26,
          "block cap " + std::to_string(spec.block_cap) + " needs " +
              std::to_string(2 * spec.block_cap) + " qubits; the budget is 26");
  require(spec.layers >= 1 && spec.epochs >= 1, "layers and epochs must be positive");
  require(spec.exact || spec.shots >= 1, "shot mode needs at least one shot");
  require(spec.k_neighbors >= 1, "k_neighbors must be positive");
  spec.noise_model.validate();
  try {
    validate(spec.config);
  } catch (const DomainError& e) {
    throw ContractViolation(std::string("invalid system config: ") + e.what());
  }
}

Scenario generate_scenario(std::uint64_t seed, const SystemConfig& config, bool double_sided) {
  Rng rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi / 3.0, std::numbers::pi / 3.0);
  std::uniform_real_distribution<double> distance(5.0, 50.0);
  std::bernoulli_distribution coin(0.5);
  const std::size_t m_count = config.n_aps;
  const std::size_t n = config.n_elements;
  const std::size_t k_count = config.n_ues;

  Scenario s;
  s.ap_angles.resize(m_count);
  s.ue_angles.resize(k_count);
  s.ap_ris_distances = RMatrix(m_count, n);
  s.ris_ue_distances = RMatrix(n, k_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    s.ap_angles[m] = angle(rng);
    const double d = distance(rng);
    for (std::size_t i = 0; i < n; ++i) s.ap_ris_distances(m, i) = d;
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    s.ue_angles[k] = angle(rng);
    const double d = distance(rng);
    for (std::size_t i = 0; i < n; ++i) s.ris_ue_distances(i, k) = d;
  }
  s.element_sides.assign(n, Side::Front);
  s.ap_sides.assign(m_count, Side::Front);
  s.ue_sides.assign(k_count, Side::Front);
  if (double_sided) {
    for (std::size_t i = 0; i < n; ++i) s.element_sides[i] = (i % 2 == 0) ? Side::Front : Side::Back;
    for (auto& side : s.ap_sides) side = coin(rng) ? Side::Back : Side::Front;
    for (auto& side : s.ue_sides) side = coin(rng) ? Side::Back : Side::Front;
  }
  s.beta = composite_path_loss(s, config);
  draw_nlos(s, rng);
  return s;
}

std::string scenario_digest(const Scenario& s) {
  Fnv1a h;
  h.values(s.ap_angles);
  h.values(s.ue_angles);
  h.values(s.ap_ris_distances.data());
  h.values(s.ris_ue_distances.data());
  h.values(s.beta);
  h.sides(s.element_sides);
  h.sides(s.ap_sides);
  h.sides(s.ue_sides);
  h.values(s.nlos_ap.data());
  h.values(s.nlos_ue.data());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.value()));
  return buf;
}

ChannelSet ablation_channels(const Scenario& scenario, const SystemConfig& config, AblationMode mode) {
  ChannelSet ch = combine_channels(scenario, config);
  switch (mode) {
    case AblationMode::Full: break;
    case AblationMode::NoVirtualSpacing:
      std::fill(ch.forced_off.begin(), ch.forced_off.end(), std::uint8_t{0});
      break;
    case AblationMode::NoDoubleSided:
      for (std::size_t n = 0; n < ch.n_elements(); ++n) {
        if (scenario.element_sides[n] == Side::Back) ch.forced_off[n] = 1;
      }
      break;
  }
  return ch;
}

std::vector<ResultRow> run_seed(const ExperimentSpec& spec, std::uint64_t seed) {
  SystemConfig config = spec.config;
  const Scenario scenario = generate_scenario(seed, config, spec.double_sided);
  const std::string digest = scenario_digest(scenario);
  if (spec.snr_db) {
    ChannelSet reference = combine_channels(scenario, config);
    std::fill(reference.forced_off.begin(), reference.forced_off.end(), std::uint8_t{0});
    const double sigma2 = reference_noise_power(reference, config, *spec.snr_db);
    if (sigma2 > 0.0) config.noise_power_w.assign(config.n_ues, sigma2);
  }
  const ChannelSet channels = ablation_channels(scenario, config, spec.ablation);
  const RISGraph graph = build_graph(channels.positions, config.w_decay_per_m, spec.k_neighbors);

  std::vector<ResultRow> rows;
  for (Method method : spec.methods) {
    const std::uint64_t method_seed = derive_seed(seed, static_cast<std::uint64_t>(method) + 1);
    const auto start = std::chrono::steady_clock::now();
    ResultRow row;
    switch (method) {
      case Method::Qgcn: {
        const auto r = optimize_qgcn(channels, config, graph, spec.block_cap,
                                     qgcn_options(spec, config), method_seed);
        row = make_row(spec, config, method, seed, r.state, channels, digest);
        row.convergence_epoch = r.convergence_epoch;
        row.circuit_evals = r.circuit_evals;
        break;
      }
      case Method::Gnn: {
        GnnOptions opts;
        opts.epochs = spec.epochs;
        opts.learning_rate = spec.gnn_learning_rate;
        if (spec.ablation == AblationMode::NoVirtualSpacing) {
          opts.train_logits = false;
          opts.initial_logit = 40.0;
        }
        const auto r = classical_gnn(channels, config, graph, opts, method_seed);
        row = make_row(spec, config, method, seed, r.state, channels, digest);
        row.convergence_epoch = r.convergence_epoch;
        break;
      }
      case Method::Gd: {
        const auto r = phase_gradient_descent(channels, config, RISState::all_active(config.n_elements),
                                              spec.epochs, spec.gd_learning_rate);
        row = make_row(spec, config, method, seed, r.state, channels, digest);
        row.convergence_epoch = r.convergence_epoch;
        break;
      }
      case Method::Random: {
        Rng rng(method_seed);
        row = make_row(spec, config, method, seed, random_phase_config(config.n_elements, rng),
                       channels, digest);
        break;
      }
      case Method::Fixed:
        row = make_row(spec, config, method, seed, fixed_spacing_config(channels, config), channels, digest);
        break;
      case Method::Continuous:
        row = make_row(spec, config, method, seed, continuous_phase_config(channels, config),
                       channels, digest);
        break;
      case Method::Discrete:
        row = make_row(spec, config, method, seed,
                       project_phases(continuous_phase_config(channels, config), spec.phase_bits),
                       channels, digest);
        break;
      case Method::Oracle: {
        const auto r = brute_force(channels, config, spec.phase_bits);
        row = make_row(spec, config, method, seed, r.best_state, channels, digest);
        break;
      }
    }
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  std::vector<ResultRow> rows;
  for (std::size_t r = 0; r < spec.n_runs; ++r) {
    auto seed_rows = run_seed(spec, spec.seed_base + r);
    rows.insert(rows.end(), std::make_move_iterator(seed_rows.begin()),
                std::make_move_iterator(seed_rows.end()));
  }
  return rows;
}

std::vector<ResultRow> run_ablation(const ExperimentSpec& spec) {
  validate(spec);
  std::vector<ResultRow> rows;
  for (AblationMode mode :
       {AblationMode::Full, AblationMode::NoVirtualSpacing, AblationMode::NoDoubleSided}) {
    ExperimentSpec s = spec;
    s.ablation = mode;
    auto part = run_experiment(s);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return rows;
}

std::vector<ResultRow> run_sweep(const ExperimentSpec& spec, const std::vector<std::size_t>& n_values) {
  require(!n_values.empty(), "run_sweep: no element counts given");
  std::vector<ResultRow> rows;
  for (std::size_t n : n_values) {
    require(n >= 1, "run_sweep: element counts must be positive");
    ExperimentSpec s = spec;
    s.config = config_for_size(spec.config, n);
    auto part = run_experiment(s);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return rows;
}

std::vector<ResultRow> run_oracle(const ExperimentSpec& spec) {
  ExperimentSpec s = spec;
  s.methods.erase(std::remove(s.methods.begin(), s.methods.end(), Method::Oracle), s.methods.end());
  s.methods.push_back(Method::Oracle);
  validate(s);
  if (s.config.n_elements > kBruteForceMaxElements || s.phase_bits > kBruteForceMaxBits) {
    throw DomainError("oracle runs need N <= 6 and B <= 3; got N = " +
                      std::to_string(s.config.n_elements) + ", B = " + std::to_string(s.phase_bits));
  }
  return run_experiment(s);
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  std::map<std::tuple<std::string, std::size_t, std::string>, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) {
    auto key = std::make_tuple(r.config, r.n_elements, r.method);
    if (!groups.contains(key)) {
      SummaryRow s;
      s.config = r.config;
      s.n_elements = r.n_elements;
      s.method = r.method;
      out.push_back(s);
    }
    groups[key].push_back(&r);
  }
  for (auto& s : out) {
    const auto& members = groups[std::make_tuple(s.config, s.n_elements, s.method)];
    s.n = members.size();
    double sum = 0.0;
    double conv = 0.0;
    double feasible = 0.0;
    for (const auto* r : members) {
      sum += r->min_rate;
      conv += static_cast<double>(r->convergence_epoch);
      feasible += r->feasible ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(s.n);
    s.mean = sum / n;
    s.convergence_mean = conv / n;
    s.feasible_fraction = feasible / n;
    if (s.n >= 2) {
      double ss = 0.0;
      for (const auto* r : members) ss += (r->min_rate - s.mean) * (r->min_rate - s.mean);
      s.sd = std::sqrt(ss / (n - 1.0));
      const boost::math::students_t dist(n - 1.0);
      s.ci95 = boost::math::quantile(boost::math::complement(dist, 0.025)) * s.sd / std::sqrt(n);
    }
  }
  return out;
}

OverheadReport overhead_report(const TimingInputs& t, double carrier_freq_hz) {
  require(t.symbol_duration_us > 0.0, "symbol duration must be positive");
  OverheadReport r;
  r.coherence = coherence_report(t.pilot_time_ms * 1e-3, t.opt_time_ms * 1e-3, t.switch_time_ms * 1e-3,
                                 t.coherence_time_ms * 1e-3, t.doppler_hz);
  const double symbol_s = t.symbol_duration_us * 1e-6;
  const double busy_s = (t.pilot_time_ms + t.opt_time_ms + t.switch_time_ms) * 1e-3;
  r.coherence_symbols = t.coherence_time_ms * 1e-3 / symbol_s;
  r.overhead_symbols = busy_s / symbol_s;
  r.overhead_fraction = t.coherence_time_ms > 0.0 ? busy_s / (t.coherence_time_ms * 1e-3) : 0.0;
  r.implied_doppler_hz = t.user_velocity_mps * carrier_freq_hz / kSpeedOfLight;
  return r;
}

}  // namespace dsris
