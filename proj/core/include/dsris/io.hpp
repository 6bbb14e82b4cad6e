#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dsris/harness.hpp"

namespace dsris {

/// File-system failure; the message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExportFormat : std::uint8_t { Csv, Json };

[[nodiscard]] ExportFormat parse_format(const std::string& name);

using CsvTable = std::vector<std::vector<std::string>>;

/// RFC 4180: CRLF-or-LF records, quoted fields may hold commas, quotes and
/// newlines. Throws ContractViolation on malformed quoting.
[[nodiscard]] CsvTable parse_csv(std::string_view text);
/// Quotes only fields that need it; records end with "\n".
[[nodiscard]] std::string write_csv(const CsvTable& table);

[[nodiscard]] std::vector<std::string> result_columns(bool with_timing);
[[nodiscard]] CsvTable result_table(const std::vector<ResultRow>& rows, bool with_timing);
[[nodiscard]] std::string results_csv(const std::vector<ResultRow>& rows, bool with_timing = false);
[[nodiscard]] std::string results_json(const std::vector<ResultRow>& rows, bool with_timing = false);
/// Inverse of results_csv (the state column is not exported and stays empty).
[[nodiscard]] std::vector<ResultRow> parse_results_csv(std::string_view text);

[[nodiscard]] std::string summary_csv(const std::vector<SummaryRow>& rows);
[[nodiscard]] std::string summary_json(const std::vector<SummaryRow>& rows);

/// Writes rows to `path` in the requested format. Throws IoError.
void export_results(const std::vector<ResultRow>& rows, const std::filesystem::path& path,
                    ExportFormat format, bool with_timing = false);
void write_text(const std::filesystem::path& path, const std::string& text);
[[nodiscard]] std::string read_text(const std::filesystem::path& path);

/// `key = value` lines; `#` starts a comment. Later keys override earlier ones.
using KeyValues = std::map<std::string, std::string>;
[[nodiscard]] KeyValues parse_key_values(std::string_view text);

/// Applies recognised keys to the spec and timing inputs. Unknown keys and
/// unparsable values throw ContractViolation naming the key.
void apply_key_values(const KeyValues& values, ExperimentSpec& spec, TimingInputs& timing);

/// Every recognised key with its current value, in the file format.
[[nodiscard]] std::string describe_config(const ExperimentSpec& spec, const TimingInputs& timing);

}  // namespace dsris
