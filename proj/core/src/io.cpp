#include "dsris/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "dsris/errors.hpp"

namespace dsris {

namespace {

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string join_rates(const std::vector<double>& rates) {
  std::string out;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (i > 0) out += ';';
    out += fmt_double(rates[i]);
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  require(ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(v),
          "key '" + key + "': expected a number, got '" + text + "'");
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  require(ec == std::errc() && ptr == text.data() + text.size(),
          "key '" + key + "': expected a non-negative integer, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "on" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "off" || text == "no" || text == "0") return false;
  throw ContractViolation("key '" + key + "': expected on/off, got '" + text + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

nlohmann::ordered_json row_json(const ResultRow& r, bool with_timing) {
  nlohmann::ordered_json j;
  j["config"] = r.config;
  j["n_elements"] = r.n_elements;
  j["method"] = r.method;
  j["seed"] = r.seed;
  j["min_rate"] = r.min_rate;
  j["sum_rate"] = r.sum_rate;
  j["rates"] = r.rates;
  j["n_active"] = r.n_active;
  j["feasible"] = r.feasible;
  j["convergence_epoch"] = r.convergence_epoch;
  j["circuit_evals"] = r.circuit_evals;
  if (with_timing) j["wall_time_s"] = r.wall_time_s;
  j["scenario_digest"] = r.scenario_digest;
  return j;
}

}  // namespace

ExportFormat parse_format(const std::string& name) {
  if (name == "csv") return ExportFormat::Csv;
  if (name == "json") return ExportFormat::Json;
  throw ContractViolation("unknown export format '" + name + "' (expected csv or json)");
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    table.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
          const char next = i + 1 < text.size() ? text[i + 1] : ',';
          require(next == ',' || next == '\n' || next == '\r',
                  "parse_csv: text after a closing quote");
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      require(!field_started, "parse_csv: quote inside an unquoted field");
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_record();
      ++i;
    } else if (c == '\n') {
      end_record();
    } else {
      field += c;
      field_started = true;
    }
  }
  require(!quoted, "parse_csv: unterminated quoted field");
  if (field_started || !record.empty()) end_record();
  return table;
}

std::string write_csv(const CsvTable& table) {
  std::string out;
  for (const auto& record : table) {
    for (std::size_t i = 0; i < record.size(); ++i) {
      if (i > 0) out += ',';
      const auto& f = record[i];
      if (f.find_first_of(",\"\r\n") != std::string::npos) {
        out += '"';
        for (char c : f) {
          if (c == '"') out += '"';
          out += c;
        }
        out += '"';
      } else {
        out += f;
      }
    }
    out += '\n';
  }
  return out;
}

std::vector<std::string> result_columns(bool with_timing) {
  std::vector<std::string> cols{"config",   "n_elements", "method",   "seed",
                                "min_rate", "sum_rate",   "rates",    "n_active",
                                "feasible", "convergence_epoch", "circuit_evals"};
  if (with_timing) cols.emplace_back("wall_time_s");
  cols.emplace_back("scenario_digest");
  return cols;
}

CsvTable result_table(const std::vector<ResultRow>& rows, bool with_timing) {
  CsvTable t{result_columns(with_timing)};
  for (const auto& r : rows) {
    std::vector<std::string> rec{r.config,
                                 std::to_string(r.n_elements),
                                 r.method,
                                 std::to_string(r.seed),
                                 fmt_double(r.min_rate),
                                 fmt_double(r.sum_rate),
                                 join_rates(r.rates),
                                 std::to_string(r.n_active),
                                 r.feasible ? "true" : "false",
                                 std::to_string(r.convergence_epoch),
                                 std::to_string(r.circuit_evals)};
    if (with_timing) rec.push_back(fmt_double(r.wall_time_s));
    rec.push_back(r.scenario_digest);
    t.push_back(std::move(rec));
  }
  return t;
}

std::string results_csv(const std::vector<ResultRow>& rows, bool with_timing) {
  return write_csv(result_table(rows, with_timing));
}

std::string results_json(const std::vector<ResultRow>& rows, bool with_timing) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) arr.push_back(row_json(r, with_timing));
  return arr.dump(2) + "\n";
}

std::vector<ResultRow> parse_results_csv(std::string_view text) {
  const CsvTable t = parse_csv(text);
  require(!t.empty(), "parse_results_csv: missing header");
  const auto& header = t.front();
  const bool timing = header == result_columns(true);
  require(timing || header == result_columns(false), "parse_results_csv: unexpected header");
  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const auto& f = t[i];
    require(f.size() == header.size(), "parse_results_csv: record " + std::to_string(i) +
                                           " has " + std::to_string(f.size()) + " fields");
    ResultRow r;
    std::size_t c = 0;
    r.config = f[c++];
    r.n_elements = to_uint("n_elements", f[c++]);
    r.method = f[c++];
    r.seed = to_uint("seed", f[c++]);
    r.min_rate = to_double("min_rate", f[c++]);
    r.sum_rate = to_double("sum_rate", f[c++]);
    for (const auto& x : split(f[c++], ';')) r.rates.push_back(to_double("rates", x));
    r.n_active = to_uint("n_active", f[c++]);
    r.feasible = to_bool("feasible", f[c++]);
    r.convergence_epoch = to_uint("convergence_epoch", f[c++]);
    r.circuit_evals = to_uint("circuit_evals", f[c++]);
    if (timing) r.wall_time_s = to_double("wall_time_s", f[c++]);
    r.scenario_digest = f[c++];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  CsvTable t{{"config", "n_elements", "method", "runs", "mean_min_rate", "sd", "ci95",
              "convergence_epoch", "feasible_fraction"}};
  for (const auto& s : rows) {
    t.push_back({s.config, std::to_string(s.n_elements), s.method, std::to_string(s.n),
                 fmt_double(s.mean), fmt_double(s.sd), fmt_double(s.ci95),
                 fmt_double(s.convergence_mean), fmt_double(s.feasible_fraction)});
  }
  return write_csv(t);
}

std::string summary_json(const std::vector<SummaryRow>& rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : rows) {
    nlohmann::ordered_json j;
    j["config"] = s.config;
    j["n_elements"] = s.n_elements;
    j["method"] = s.method;
    j["runs"] = s.n;
    j["mean_min_rate"] = s.mean;
    j["sd"] = s.sd;
    j["ci95"] = s.ci95;
    j["convergence_epoch"] = s.convergence_mean;
    j["feasible_fraction"] = s.feasible_fraction;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void export_results(const std::vector<ResultRow>& rows, const std::filesystem::path& path,
                    ExportFormat format, bool with_timing) {
  write_text(path, format == ExportFormat::Csv ? results_csv(rows, with_timing)
                                               : results_json(rows, with_timing));
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    require(eq != std::string::npos,
            "config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    require(!key.empty(), "config line " + std::to_string(line_no) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

void apply_key_values(const KeyValues& values, ExperimentSpec& spec, TimingInputs& timing) {
  auto get = [&](const char* key) -> const std::string* {
    const auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  };

  SystemConfig& c = spec.config;
  const bool resize = get("n_elements") || get("n_aps") || get("n_ues") || get("carrier_freq_hz");
  if (resize) {
    const auto n = get("n_elements") ? to_uint("n_elements", *get("n_elements")) : c.n_elements;
    const auto m = get("n_aps") ? to_uint("n_aps", *get("n_aps")) : c.n_aps;
    const auto k = get("n_ues") ? to_uint("n_ues", *get("n_ues")) : c.n_ues;
    const double f = get("carrier_freq_hz") ? to_double("carrier_freq_hz", *get("carrier_freq_hz"))
                                            : c.carrier_freq_hz;
    require(n >= 1 && m >= 1 && k >= 1 && f > 0.0, "n_elements, n_aps, n_ues and carrier_freq_hz must be positive");
    c = make_config(n, m, k, f);
  }

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"n_elements", [](auto&, auto&) {}},
      {"n_aps", [](auto&, auto&) {}},
      {"n_ues", [](auto&, auto&) {}},
      {"carrier_freq_hz", [](auto&, auto&) {}},
      {"bandwidth_hz", [&](auto& k, auto& v) { c.bandwidth_hz = to_double(k, v); }},
      {"rician_kappa_db", [&](auto& k, auto& v) { c.rician_kappa = db_to_linear(to_double(k, v)); }},
      {"noise_power_dbm", [&](auto& k, auto& v) { c.noise_power_w.assign(c.n_ues, dbm_to_watts(to_double(k, v))); }},
      {"tx_power_w", [&](auto& k, auto& v) { c.tx_power_w.assign(c.n_ues, to_double(k, v)); }},
      {"n_min", [&](auto& k, auto& v) { c.n_min = to_uint(k, v); }},
      {"d_min_m", [&](auto& k, auto& v) {
         c.d_min_m = to_double(k, v);
         if (!get("d_total_m")) c.d_total_m = static_cast<double>(c.n_elements - 1) * c.d_min_m;
       }},
      {"d_total_m", [&](auto& k, auto& v) { c.d_total_m = to_double(k, v); }},
      {"path_loss_exponent_ap_ris", [&](auto& k, auto& v) { c.path_loss_exponents[0] = to_double(k, v); }},
      {"path_loss_exponent_ris_ue", [&](auto& k, auto& v) { c.path_loss_exponents[1] = to_double(k, v); }},
      {"loss_phase_norm", [&](auto& k, auto& v) { c.loss.phase_norm = to_double(k, v); }},
      {"loss_aperture", [&](auto& k, auto& v) { c.loss.aperture = to_double(k, v); }},
      {"loss_activation", [&](auto& k, auto& v) { c.loss.activation = to_double(k, v); }},
      {"w_decay_per_m", [&](auto& k, auto& v) { c.w_decay_per_m = to_double(k, v); }},
      {"side_power_fraction", [&](auto& k, auto& v) { c.side_power_fraction = to_double(k, v); }},
      {"snr_db", [&](auto& k, auto& v) {
         if (v == "none") spec.snr_db.reset(); else spec.snr_db = to_double(k, v);
       }},
      {"seed", [&](auto& k, auto& v) { spec.seed_base = to_uint(k, v); }},
      {"runs", [&](auto& k, auto& v) { spec.n_runs = to_uint(k, v); }},
      {"methods", [&](auto&, auto& v) {
         spec.methods.clear();
         for (const auto& name : split(v, ',')) spec.methods.push_back(parse_method(name));
       }},
      {"ablation", [&](auto&, auto& v) { spec.ablation = parse_ablation(v); }},
      {"double_sided", [&](auto& k, auto& v) { spec.double_sided = to_bool(k, v); }},
      {"layers", [&](auto& k, auto& v) { spec.layers = to_uint(k, v); }},
      {"epochs", [&](auto& k, auto& v) { spec.epochs = to_uint(k, v); }},
      {"learning_rate", [&](auto& k, auto& v) { spec.learning_rate = to_double(k, v); }},
      {"circuit_form", [&](auto& k, auto& v) {
         if (v == "equations") spec.form = CircuitForm::Equations;
         else if (v == "algorithm1") spec.form = CircuitForm::Algorithm1;
         else throw ContractViolation("key '" + k + "': expected equations or algorithm1");
       }},
      {"train_edge_thetas", [&](auto& k, auto& v) { spec.train_edge_thetas = to_bool(k, v); }},
      {"softmin_weights", [&](auto& k, auto& v) { spec.softmin_weights = to_bool(k, v); }},
      {"noise", [&](auto& k, auto& v) { spec.noise = to_bool(k, v); }},
      {"noise_single_qubit_prob", [&](auto& k, auto& v) { spec.noise_model.p1 = to_double(k, v); }},
      {"noise_two_qubit_prob", [&](auto& k, auto& v) { spec.noise_model.p2 = to_double(k, v); }},
      {"noise_readout_prob", [&](auto& k, auto& v) { spec.noise_model.p_read = to_double(k, v); }},
      {"exact", [&](auto& k, auto& v) { spec.exact = to_bool(k, v); }},
      {"shots", [&](auto& k, auto& v) { spec.shots = to_uint(k, v); }},
      {"trajectories", [&](auto& k, auto& v) { spec.trajectories = to_uint(k, v); }},
      {"block_cap", [&](auto& k, auto& v) { spec.block_cap = to_uint(k, v); }},
      {"k_neighbors", [&](auto& k, auto& v) { spec.k_neighbors = to_uint(k, v); }},
      {"phase_bits", [&](auto& k, auto& v) { spec.phase_bits = static_cast<unsigned>(to_uint(k, v)); }},
      {"gd_learning_rate", [&](auto& k, auto& v) { spec.gd_learning_rate = to_double(k, v); }},
      {"gnn_learning_rate", [&](auto& k, auto& v) { spec.gnn_learning_rate = to_double(k, v); }},
      {"grid_scoring", [&](auto& k, auto& v) { spec.grid_scoring = to_bool(k, v); }},
      {"record_timing", [&](auto& k, auto& v) { spec.record_timing = to_bool(k, v); }},
      {"coherence_time_ms", [&](auto& k, auto& v) { timing.coherence_time_ms = to_double(k, v); }},
      {"pilot_time_ms", [&](auto& k, auto& v) { timing.pilot_time_ms = to_double(k, v); }},
      {"opt_time_ms", [&](auto& k, auto& v) { timing.opt_time_ms = to_double(k, v); }},
      {"switch_time_ms", [&](auto& k, auto& v) { timing.switch_time_ms = to_double(k, v); }},
      {"doppler_hz", [&](auto& k, auto& v) { timing.doppler_hz = to_double(k, v); }},
      {"user_velocity_mps", [&](auto& k, auto& v) { timing.user_velocity_mps = to_double(k, v); }},
      {"symbol_duration_us", [&](auto& k, auto& v) { timing.symbol_duration_us = to_double(k, v); }},
  };

  for (const auto& [key, value] : values) {
    const auto it = setters.find(key);
    require(it != setters.end(), "unknown config key '" + key + "'");
    it->second(key, value);
  }
}

std::string describe_config(const ExperimentSpec& spec, const TimingInputs& t) {
  const SystemConfig& c = spec.config;
  std::string methods;
  for (std::size_t i = 0; i < spec.methods.size(); ++i) {
    if (i > 0) methods += ',';
    methods += to_string(spec.methods[i]);
  }
  auto on = [](bool b) { return std::string(b ? "on" : "off"); };
  std::ostringstream o;
  o << "# system\n"
    << "n_elements = " << c.n_elements << "\n"
    << "n_aps = " << c.n_aps << "\n"
    << "n_ues = " << c.n_ues << "\n"
    << "carrier_freq_hz = " << fmt_double(c.carrier_freq_hz) << "\n"
    << "bandwidth_hz = " << fmt_double(c.bandwidth_hz) << "\n"
    << "rician_kappa_db = " << fmt_double(10.0 * std::log10(c.rician_kappa)) << "\n"
    << "noise_power_dbm = " << fmt_double(10.0 * std::log10(c.noise_power_w.front() * 1e3)) << "\n"
    << "tx_power_w = " << fmt_double(c.tx_power_w.front()) << "\n"
    << "n_min = " << c.n_min << "\n"
    << "d_min_m = " << fmt_double(c.d_min_m) << "\n"
    << "d_total_m = " << fmt_double(c.d_total_m) << "\n"
    << "path_loss_exponent_ap_ris = " << fmt_double(c.path_loss_exponents[0]) << "\n"
    << "path_loss_exponent_ris_ue = " << fmt_double(c.path_loss_exponents[1]) << "\n"
    << "loss_phase_norm = " << fmt_double(c.loss.phase_norm) << "\n"
    << "loss_aperture = " << fmt_double(c.loss.aperture) << "\n"
    << "loss_activation = " << fmt_double(c.loss.activation) << "\n"
    << "w_decay_per_m = " << fmt_double(c.w_decay_per_m) << "\n"
    << "side_power_fraction = " << fmt_double(c.side_power_fraction) << "\n"
    << "snr_db = " << (spec.snr_db ? fmt_double(*spec.snr_db) : std::string("none")) << "\n"
    << "\n# experiment\n"
    << "seed = " << spec.seed_base << "\n"
    << "runs = " << spec.n_runs << "\n"
    << "methods = " << methods << "\n"
    << "ablation = " << to_string(spec.ablation) << "\n"
    << "double_sided = " << on(spec.double_sided) << "\n"
    << "layers = " << spec.layers << "\n"
    << "epochs = " << spec.epochs << "\n"
    << "learning_rate = " << fmt_double(spec.learning_rate) << "\n"
    << "circuit_form = " << (spec.form == CircuitForm::Equations ? "equations" : "algorithm1") << "\n"
    << "train_edge_thetas = " << on(spec.train_edge_thetas) << "\n"
    << "softmin_weights = " << on(spec.softmin_weights) << "\n"
    << "noise = " << on(spec.noise) << "\n"
    << "noise_single_qubit_prob = " << fmt_double(spec.noise_model.p1) << "\n"
    << "noise_two_qubit_prob = " << fmt_double(spec.noise_model.p2) << "\n"
    << "noise_readout_prob = " << fmt_double(spec.noise_model.p_read) << "\n"
    << "exact = " << on(spec.exact) << "\n"
    << "shots = " << spec.shots << "\n"
    << "trajectories = " << spec.trajectories << "\n"
    << "block_cap = " << spec.block_cap << "\n"
    << "k_neighbors = " << spec.k_neighbors << "\n"
    << "phase_bits = " << spec.phase_bits << "\n"
    << "gd_learning_rate = " << fmt_double(spec.gd_learning_rate) << "\n"
    << "gnn_learning_rate = " << fmt_double(spec.gnn_learning_rate) << "\n"
    << "grid_scoring = " << on(spec.grid_scoring) << "\n"
    << "record_timing = " << on(spec.record_timing) << "\n"
    << "\n# timing\n"
    << "coherence_time_ms = " << fmt_double(t.coherence_time_ms) << "\n"
    << "pilot_time_ms = " << fmt_double(t.pilot_time_ms) << "\n"
    << "opt_time_ms = " << fmt_double(t.opt_time_ms) << "\n"
    << "switch_time_ms = " << fmt_double(t.switch_time_ms) << "\n"
    << "doppler_hz = " << fmt_double(t.doppler_hz) << "\n"
    << "user_velocity_mps = " << fmt_double(t.user_velocity_mps) << "\n"
    << "symbol_duration_us = " << fmt_double(t.symbol_duration_us) << "\n";
  return o.str();
}

}  // namespace dsris
