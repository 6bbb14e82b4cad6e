#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsris/errors.hpp"
#include "dsris/harness.hpp"
#include "dsris/io.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> shots;
  std::optional<std::string> noise;
  bool exact = false;
  bool timing = false;
  std::string out;
  std::string format = "csv";
  std::string methods;
  std::string ablation;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "first scenario seed");
  cmd->add_option("--runs", f.runs, "Monte Carlo runs (consecutive seeds)");
  cmd->add_option("--shots", f.shots, "measurement shots per circuit evaluation");
  cmd->add_option("--noise", f.noise, "depolarizing + readout noise")->check(CLI::IsMember({"on", "off"}));
  cmd->add_flag("--exact", f.exact, "exact expectations instead of shots");
  cmd->add_flag("--timing", f.timing, "export per-row wall time");
  cmd->add_option("--out", f.out, "result file");
  cmd->add_option("--format", f.format, "result file format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--methods", f.methods, "comma-separated: qgcn,gnn,gd,random,fixed,continuous,discrete,oracle");
  cmd->add_option("--ablation", f.ablation, "full | no_virtual_spacing | no_double_sided");
}

struct Loaded {
  dsris::ExperimentSpec spec;
  dsris::TimingInputs timing;
};

Loaded load(const CommonFlags& f) {
  Loaded l;
  if (!f.config_path.empty()) {
    dsris::apply_key_values(dsris::parse_key_values(dsris::read_text(f.config_path)), l.spec, l.timing);
  }
  dsris::KeyValues overrides;
  if (f.seed) overrides["seed"] = std::to_string(*f.seed);
  if (f.runs) overrides["runs"] = std::to_string(*f.runs);
  if (f.shots) overrides["shots"] = std::to_string(*f.shots);
  if (f.noise) overrides["noise"] = *f.noise;
  if (f.exact) overrides["exact"] = "on";
  if (f.timing) overrides["record_timing"] = "on";
  if (!f.methods.empty()) overrides["methods"] = f.methods;
  if (!f.ablation.empty()) overrides["ablation"] = f.ablation;
  dsris::apply_key_values(overrides, l.spec, l.timing);
  return l;
}

void print_summary(const std::vector<dsris::SummaryRow>& summary) {
  std::printf("%-20s %4s %-11s %5s %10s %10s %10s %8s %8s\n", "config", "N", "method", "runs",
              "mean", "sd", "ci95", "conv", "feas");
  for (const auto& s : summary) {
    std::printf("%-20s %4zu %-11s %5zu %10.4f %10.4f %10.4f %8.2f %8.2f\n", s.config.c_str(),
                s.n_elements, s.method.c_str(), s.n, s.mean, s.sd, s.ci95, s.convergence_mean,
                s.feasible_fraction);
  }
}

void finish(const std::vector<dsris::ResultRow>& rows, const CommonFlags& f,
            const dsris::ExperimentSpec& spec) {
  if (!f.out.empty()) {
    dsris::export_results(rows, f.out, dsris::parse_format(f.format), spec.record_timing);
  }
  print_summary(dsris::summarize(rows));
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    dsris::require(!item.empty() && item.find_first_not_of("0123456789") == std::string::npos,
                   "--n-values expects comma-separated positive integers, got '" + text + "'");
    out.push_back(std::stoul(item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  dsris::require(!out.empty(), "--n-values is empty");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint phase and spacing optimizer for double-sided RIS"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "single experiment over consecutive seeds");
  add_common(run, run_flags);

  CommonFlags ablate_flags;
  auto* ablate = app.add_subcommand("ablate", "full / no virtual spacing / no double-sided on paired seeds");
  add_common(ablate, ablate_flags);

  CommonFlags sweep_flags;
  std::string n_values = "2,4,6";
  auto* sweep = app.add_subcommand("sweep", "repeat the experiment over element counts");
  add_common(sweep, sweep_flags);
  sweep->add_option("--n-values", n_values, "comma-separated element counts");

  CommonFlags oracle_flags;
  auto* oracle = app.add_subcommand("oracle", "brute-force optimum next to the configured methods");
  add_common(oracle, oracle_flags);

  CommonFlags report_flags;
  bool show_config = false;
  auto* report = app.add_subcommand("report", "coherence-time and overhead budget");
  report->add_option("--config", report_flags.config_path, "key = value config file")->check(CLI::ExistingFile);
  report->add_flag("--show-config", show_config, "print every config key with its value");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto l = load(run_flags);
      finish(dsris::run_experiment(l.spec), run_flags, l.spec);
    } else if (*ablate) {
      auto l = load(ablate_flags);
      const auto rows = dsris::run_ablation(l.spec);
      finish(rows, ablate_flags, l.spec);
      std::printf("reference (published, not asserted): full 0.139, no_virtual_spacing -25.1%%, "
                  "no_double_sided -35.9%%\n");
    } else if (*sweep) {
      const auto l = load(sweep_flags);
      finish(dsris::run_sweep(l.spec, parse_sizes(n_values)), sweep_flags, l.spec);
    } else if (*oracle) {
      const auto l = load(oracle_flags);
      finish(dsris::run_oracle(l.spec), oracle_flags, l.spec);
    } else if (*report) {
      const auto l = load(report_flags);
      if (show_config) std::cout << dsris::describe_config(l.spec, l.timing);
      const auto r = dsris::overhead_report(l.timing, l.spec.config.carrier_freq_hz);
      std::printf("coherence time      %.3f ms (%.0f symbols)\n", l.timing.coherence_time_ms, r.coherence_symbols);
      std::printf("pilot + opt + switch %.3f ms (%.0f symbols, %.1f%% of coherence)\n",
                  l.timing.pilot_time_ms + l.timing.opt_time_ms + l.timing.switch_time_ms,
                  r.overhead_symbols, 100.0 * r.overhead_fraction);
      std::printf("slack               %.3f ms\n", r.coherence.slack_s * 1e3);
      std::printf("fits coherence      %s\n", r.coherence.feasible ? "yes" : "no");
      std::printf("channel correlation %.4f (Doppler %.1f Hz; %.1f m/s implies %.1f Hz)\n",
                  r.coherence.rho, l.timing.doppler_hz, l.timing.user_velocity_mps, r.implied_doppler_hz);
    }
  } catch (const dsris::ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dsris::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dsris::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
