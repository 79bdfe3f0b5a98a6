#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecglab/config.hpp"
#include "ecglab/plot.hpp"

namespace ecglab {

const char* tool_version();

/// Files written by one run. Paths are relative to the output directory and
/// may not leave it.
class OutputBundle {
 public:
  explicit OutputBundle(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }
  const std::vector<std::string>& tables() const { return tables_; }

  /// Writes a CSV table; it is listed in the summary's "tables".
  void add_table(const std::string& name, const std::string& content);
  /// Writes an SVG plot; an empty plot throws and leaves no file.
  void add_plot(const std::string& name, const LinePlot& plot);
  /// Writes summary.json with "tables" and "plots" filled in.
  void write_summary(nlohmann::json summary);

 private:
  std::filesystem::path resolve(const std::string& name) const;
  void write_file(const std::string& name, const std::string& content);

  std::filesystem::path dir_;
  std::vector<std::string> files_;
  std::vector<std::string> tables_;
  std::vector<std::string> plots_;
};

struct OutputChecksum {
  std::string path;
  std::uintmax_t bytes = 0;
  std::string sha256;
};

struct RunRecord {
  nlohmann::json config;
  std::string tool_version;
  double wall_clock_seconds = 0.0;
  std::vector<OutputChecksum> outputs;

  nlohmann::json to_json() const;
};

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Checksums every output, writes run_record.json and appends one line to
/// runs.jsonl in the output directory.
RunRecord record_run(const ExperimentConfig& config, const OutputBundle& bundle, double wall_clock_seconds);

struct RunResult {
  int exit_code = 0;  // 0 success, 2 failed statistical checks in validate mode
  nlohmann::json summary;
  RunRecord record;
};

/// Dispatches to the experiment, writes its outputs and the run record.
/// Operational errors propagate as exceptions.
RunResult run(const ExperimentConfig& config);

}  // namespace ecglab
