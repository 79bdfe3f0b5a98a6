#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ecglab/ecg.hpp"
#include "ecglab/rng.hpp"

namespace ecglab {

/// Malformed, unknown or out-of-range configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind { Ecg, Growth, Maxima, Sl2zExample, Validate };
const char* to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

/// Everything a run depends on. Defaults are chosen so that a file naming
/// only the kind and model is a complete, reproducible configuration.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Ecg;

  // Model
  ModelKind model = ModelKind::TreeFull;
  int rank = 2;
  std::string subgroup = "z:1,0";
  MeasureChoice measure = MeasureChoice::Patterson;
  int patterson_depth = 14;
  int cylinder_depth = 8;
  std::optional<double> patterson_exponent;

  // Ranges
  int n_min = 1;
  int n_max = 10;
  int m_min = 1;
  int m_max = 30;
  std::vector<int> radii{4, 6, 8};

  // Statistics
  std::size_t samples = 1000;
  double alpha = 1.5;
  std::size_t replicates = 400;
  std::size_t truncation = 1000;
  Thresholds thresholds;

  std::uint64_t seed = kDefaultSeed;
  std::filesystem::path out = "ecglab-out";
  int threads = 1;
  bool plots = true;

  /// Sets one key from its text form. Throws ConfigError for unknown keys
  /// and malformed values; ranges are checked by validate().
  void set(std::string_view key, std::string_view value);
  /// Checks every cap and cross-field constraint; throws ConfigError.
  void validate() const;

  SubgroupSpec subgroup_spec() const;
  ModelOptions model_options() const;
  /// Every key with its effective value.
  nlohmann::json to_json() const;
};

/// Keys accepted by ExperimentConfig::set, in documentation order.
const std::vector<std::string>& config_keys();

/// Reads flat `key = value` lines (comments with #, TOML-style quoting and
/// arrays). Sections and dotted keys are rejected.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

/// Defaults, then the file, then the ECGLAB_SEED value (if any), then the
/// flag overrides in order; the result is validated.
ExperimentConfig load_config(ExperimentKind kind, const std::optional<std::filesystem::path>& file,
                             const std::optional<std::string>& env_seed,
                             const std::vector<std::pair<std::string, std::string>>& overrides);

}  // namespace ecglab
