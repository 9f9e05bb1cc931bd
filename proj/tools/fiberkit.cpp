#include "fiberkit/parallel.hpp"
#include "fiberkit/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fiberkit::Error("io", "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int execute(const std::string& name, const std::string& config_path, std::optional<std::string> out,
            std::optional<std::string> csv, bool timing) {
  using namespace fiberkit;
  const Subcommand sub = parse_subcommand(name);
  Report report;
  const auto start = std::chrono::steady_clock::now();
  try {
    const RunConfig cfg = parse_config(read_file(config_path));
    if (!out) out = cfg.out_json;
    if (!csv) csv = cfg.out_csv;
    report = run(sub, cfg);
  } catch (const std::exception& e) {
    report = error_report(name, e);
  }
  if (timing) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    report.body["wall_time_seconds"] = elapsed.count();
  }

  try {
    if (out) {
      emit(report, Format::json, *out);
    } else {
      std::cout << render(report, Format::json);
    }
    if (csv && report.exit_code != kInputError) emit(report, Format::csv, *csv);
  } catch (const std::exception& e) {
    std::cerr << "fiberkit: " << e.what() << "\n";
    return kInputError;
  }
  if (report.exit_code == kInputError) {
    std::cerr << "fiberkit: " << report.body["error"]["message"].get<std::string>() << "\n";
  }
  return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fiber decompositions of multi-tiles and exponential bases"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::string> csv;
  int threads = 0;
  bool timing = false;

  for (const std::string& name : fiberkit::subcommand_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out, "write the JSON report here instead of stdout");
    sub->add_option("--csv", csv, "write the per-sample table here");
    sub->add_option("--threads", threads, "worker threads (default: FIBERKIT_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--timing", timing, "add wall time to the report");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fiberkit::kInputError;
  }
  if (threads > 0) fiberkit::set_thread_count(threads);
  return execute(app.get_subcommands().front()->get_name(), config_path, out, csv, timing);
}
