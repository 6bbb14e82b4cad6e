#include <gtest/gtest.h>

#include <filesystem>
#include <json.hpp>

#include "dsris/errors.hpp"
#include "dsris/io.hpp"

namespace dsris {
namespace {

std::vector<ResultRow> sample_rows() {
  std::vector<ResultRow> rows;
  for (int i = 0; i < 3; ++i) {
    ResultRow r;
    r.config = "full";
    r.n_elements = 4;
    r.method = i == 1 ? "random" : "qgcn";
    r.seed = 10 + static_cast<std::uint64_t>(i);
    r.min_rate = 0.125 * i + 1e-7;
    r.sum_rate = 1.0 / 3.0 + i;
    r.rates = {0.1, 0.2 * i, 1.0 / 7.0};
    r.n_active = 3;
    r.feasible = i != 2;
    r.convergence_epoch = 7;
    r.circuit_evals = 2070;
    r.wall_time_s = 0.5;
    r.scenario_digest = "00ff00ff00ff00ff";
    rows.push_back(r);
  }
  return rows;
}

TEST(Csv, ParsesQuotedFields) {
  const auto t = parse_csv("a,\"b,c\",\"say \"\"hi\"\"\"\r\n1,\"two\nlines\",\n");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0], (std::vector<std::string>{"a", "b,c", "say \"hi\""}));
  EXPECT_EQ(t[1], (std::vector<std::string>{"1", "two\nlines", ""}));
}

TEST(Csv, WritesMinimalQuoting) {
  const CsvTable t{{"plain", "with,comma", "with \"quote\"", "line\nbreak"}};
  EXPECT_EQ(write_csv(t), "plain,\"with,comma\",\"with \"\"quote\"\"\",\"line\nbreak\"\n");
  EXPECT_EQ(parse_csv(write_csv(t)), t);
}

TEST(Csv, RejectsMalformedQuoting) {
  EXPECT_THROW((void)parse_csv("a,\"open\n"), ContractViolation);
  EXPECT_THROW((void)parse_csv("a,\"x\"y\n"), ContractViolation);
}

TEST(ResultExport, ZeroRowsGiveHeaderOnly) {
  std::string header;
  for (const auto& c : result_columns(false)) header += (header.empty() ? "" : ",") + c;
  EXPECT_EQ(results_csv({}), header + "\n");
  EXPECT_EQ(result_columns(true).size(), result_columns(false).size() + 1);
}

TEST(ResultExport, CsvRoundTripIsByteIdentical) {
  const auto text = results_csv(sample_rows());
  EXPECT_EQ(results_csv(parse_results_csv(text)), text);
  const auto timed = results_csv(sample_rows(), true);
  EXPECT_EQ(results_csv(parse_results_csv(timed), true), timed);
}

TEST(ResultExport, JsonParsesWithFieldNamesAsKeys) {
  const auto rows = sample_rows();
  const auto j = nlohmann::json::parse(results_json(rows));
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), rows.size());
  for (const auto& col : result_columns(false)) EXPECT_TRUE(j[0].contains(col)) << col;
  EXPECT_EQ(j[1]["method"], "random");
  EXPECT_EQ(j[2]["feasible"], false);
  EXPECT_EQ(nlohmann::json::parse(results_json({})), nlohmann::json::array());
}

TEST(ResultExport, WritesFilesAndReportsPathOnFailure) {
  const auto dir = std::filesystem::temp_directory_path() / "dsris_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "rows.csv";
  export_results(sample_rows(), path, ExportFormat::Csv);
  EXPECT_EQ(read_text(path), results_csv(sample_rows()));
  export_results(sample_rows(), dir / "rows.json", ExportFormat::Json);
  EXPECT_EQ(read_text(dir / "rows.json"), results_json(sample_rows()));
  std::filesystem::remove_all(dir);

  const std::filesystem::path bad = "/nonexistent-dir/rows.csv";
  try {
    export_results(sample_rows(), bad, ExportFormat::Csv);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(bad.string()), std::string::npos);
  }
}

TEST(ResultExport, FormatNames) {
  EXPECT_EQ(parse_format("csv"), ExportFormat::Csv);
  EXPECT_EQ(parse_format("json"), ExportFormat::Json);
  EXPECT_THROW((void)parse_format("xml"), ContractViolation);
}

TEST(SummaryExport, CsvAndJsonAgree) {
  const auto s = summarize(sample_rows());
  const auto csv = parse_csv(summary_csv(s));
  const auto j = nlohmann::json::parse(summary_json(s));
  ASSERT_EQ(csv.size(), s.size() + 1);
  ASSERT_EQ(j.size(), s.size());
}

TEST(KeyValues, CommentsWhitespaceAndOverrides) {
  const auto kv = parse_key_values("# header\n seed = 4 \nruns=2 # trailing\n\nseed = 9\n");
  EXPECT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("seed"), "9");
  EXPECT_EQ(kv.at("runs"), "2");
  EXPECT_THROW((void)parse_key_values("no equals sign\n"), ContractViolation);
}

TEST(KeyValues, ApplyAndDescribeRoundTrip) {
  ExperimentSpec spec;
  TimingInputs timing;
  apply_key_values(parse_key_values("n_elements = 6\nn_ues = 2\nruns = 3\nnoise = on\n"
                                    "methods = qgcn,gnn,oracle\nablation = no_double_sided\n"
                                    "opt_time_ms = 2.5\nsnr_db = 5\n"),
                   spec, timing);
  EXPECT_EQ(spec.config.n_elements, 6u);
  EXPECT_EQ(spec.config.n_min, 3u);
  EXPECT_EQ(spec.config.n_ues, 2u);
  EXPECT_EQ(spec.n_runs, 3u);
  EXPECT_TRUE(spec.noise);
  EXPECT_EQ(spec.methods, (std::vector<Method>{Method::Qgcn, Method::Gnn, Method::Oracle}));
  EXPECT_EQ(spec.ablation, AblationMode::NoDoubleSided);
  EXPECT_EQ(timing.opt_time_ms, 2.5);

  const auto text = describe_config(spec, timing);
  ExperimentSpec again;
  TimingInputs timing_again;
  apply_key_values(parse_key_values(text), again, timing_again);
  EXPECT_EQ(describe_config(again, timing_again), text);
}

TEST(KeyValues, UnknownKeysAndBadValuesNameTheKey) {
  ExperimentSpec spec;
  TimingInputs timing;
  try {
    apply_key_values({{"shotz", "5"}}, spec, timing);
    FAIL() << "expected ContractViolation";
  } catch (const ContractViolation& e) {
    EXPECT_NE(std::string(e.what()).find("shotz"), std::string::npos);
  }
  EXPECT_THROW(apply_key_values({{"shots", "many"}}, spec, timing), ContractViolation);
  EXPECT_THROW(apply_key_values({{"noise", "maybe"}}, spec, timing), ContractViolation);
}

}  // namespace
}  // namespace dsris
