#pragma once

#include "fiberkit/config.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fiberkit {

enum class Subcommand {
  tile_check,
  lambda_map,
  separation,
  admissible,
  certify,
  triangularize,
  diagonalize,
};

/// "tile-check", "lambda-map", ... Throws std::invalid_argument on unknown names.
Subcommand parse_subcommand(std::string_view name);
std::string subcommand_name(Subcommand sub);
const std::vector<std::string>& subcommand_names();

/// Exit status: 0 pass, 1 certified failure, 2 input or validation error.
enum ExitCode : int { kPass = 0, kFail = 1, kInputError = 2 };

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct Report {
  std::string subcommand;
  nlohmann::json body = nlohmann::json::object();
  CsvTable table;
  int exit_code = kPass;
};

Report run(Subcommand sub, const RunConfig& cfg);

/// Structured report for an error raised before or during a run.
Report error_report(std::string subcommand, const std::exception& e);

/// Runs parse_config then run(); errors become error reports with exit code 2.
Report run_text(Subcommand sub, std::string_view config_text);

enum class Format { json, csv };

/// Byte-stable rendering: sorted keys, shortest round-trip floats.
std::string render(const Report& report, Format format);

/// Writes render(report, format) to `path`; throws Error("io") on failure.
void emit(const Report& report, Format format, const std::string& path);

/// Shortest round-trip decimal form of x ("nan", "inf", "-inf" for non-finite).
std::string format_double(double x);

/// Hex SHA-256 of `text`.
std::string sha256_hex(std::string_view text);

/// JSON forms of fields: per sample, the omega point and the fiber entries as
/// [re, im] pairs.
nlohmann::json field_to_json(const FiberVectorField& f);
nlohmann::json field_to_json(const RangeField& f);

}  // namespace fiberkit
