#include "ecglab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "CLI11.hpp"

namespace ecglab {

namespace {

constexpr int kMaxRank = 8;
constexpr int kTreeMaxRadius = 24;
constexpr int kCircleMaxRadius = 10;
constexpr int kZkGrowthMax = 200;
constexpr int kFullGrowthMax = 1000;
constexpr std::size_t kMaxSamples = 10'000'000;
constexpr std::size_t kMaxReplicates = 1'000'000;
constexpr std::size_t kMaxTruncation = 1'000'000;
constexpr int kMaxThreads = 256;

template <class T>
T parse_integer(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ConfigError(fmt::format("{}: '{}' is not a valid integer", key, text));
  return value;
}

double parse_double(std::string_view key, std::string_view text) {
  double value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty() || !std::isfinite(value))
    throw ConfigError(fmt::format("{}: '{}' is not a finite number", key, text));
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, text));
}

std::vector<int> parse_int_list(std::string_view key, std::string_view text) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    std::string_view item = text.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    out.push_back(parse_integer<int>(key, item));
    start = comma + 1;
  }
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Ecg: return "ecg";
    case ExperimentKind::Growth: return "growth";
    case ExperimentKind::Maxima: return "maxima";
    case ExperimentKind::Sl2zExample: return "sl2z-example";
    case ExperimentKind::Validate: return "validate";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (auto kind : {ExperimentKind::Ecg, ExperimentKind::Growth, ExperimentKind::Maxima, ExperimentKind::Sl2zExample,
                    ExperimentKind::Validate})
    if (text == to_string(kind)) return kind;
  throw ConfigError(fmt::format("kind: unknown experiment '{}'", text));
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "kind",       "model",     "rank",       "subgroup",   "measure", "patterson_depth", "cylinder_depth",
      "patterson_exponent", "n_min", "n_max",  "m_min",      "m_max",   "radii",           "samples",
      "alpha",      "replicates", "truncation", "theta1",    "theta2",  "theta3",          "seed",
      "out",        "threads",   "plots"};
  return keys;
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  if (key == "kind") {
    kind = parse_experiment_kind(value);
  } else if (key == "model") {
    if (value == "tree-full") model = ModelKind::TreeFull;
    else if (value == "tree-subgroup") model = ModelKind::TreeSubgroup;
    else if (value == "circle-harmonic") model = ModelKind::CircleHarmonic;
    else throw ConfigError(fmt::format("model: unknown model '{}'", value));
  } else if (key == "rank" || key == "d") {
    rank = parse_integer<int>(key, value);
  } else if (key == "subgroup") {
    subgroup = std::string(value);
  } else if (key == "measure") {
    if (value == "patterson") measure = MeasureChoice::Patterson;
    else if (value == "ambient") measure = MeasureChoice::Ambient;
    else throw ConfigError(fmt::format("measure: expected patterson or ambient, got '{}'", value));
  } else if (key == "patterson_depth") {
    patterson_depth = parse_integer<int>(key, value);
  } else if (key == "cylinder_depth") {
    cylinder_depth = parse_integer<int>(key, value);
  } else if (key == "patterson_exponent") {
    if (value == "auto") patterson_exponent.reset();
    else patterson_exponent = parse_double(key, value);
  } else if (key == "n_min") {
    n_min = parse_integer<int>(key, value);
  } else if (key == "n_max") {
    n_max = parse_integer<int>(key, value);
  } else if (key == "m_min") {
    m_min = parse_integer<int>(key, value);
  } else if (key == "m_max") {
    m_max = parse_integer<int>(key, value);
  } else if (key == "radii") {
    radii = parse_int_list(key, value);
  } else if (key == "samples") {
    samples = parse_integer<std::size_t>(key, value);
  } else if (key == "alpha") {
    alpha = parse_double(key, value);
  } else if (key == "replicates") {
    replicates = parse_integer<std::size_t>(key, value);
  } else if (key == "truncation") {
    truncation = parse_integer<std::size_t>(key, value);
  } else if (key == "theta1") {
    thresholds.floor = parse_double(key, value);
  } else if (key == "theta2") {
    thresholds.tail_slope = parse_double(key, value);
  } else if (key == "theta3") {
    thresholds.decay = parse_double(key, value);
  } else if (key == "seed") {
    seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "out") {
    require(!value.empty(), "out: empty output directory");
    out = std::filesystem::path(std::string(value));
  } else if (key == "threads") {
    threads = parse_integer<int>(key, value);
  } else if (key == "plots") {
    plots = parse_bool(key, value);
  } else {
    throw ConfigError(fmt::format("unknown configuration key '{}'", key));
  }
}

SubgroupSpec ExperimentConfig::subgroup_spec() const {
  try {
    return SubgroupSpec::parse(rank, subgroup);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("subgroup: {}", e.what()));
  }
}

ModelOptions ExperimentConfig::model_options() const {
  ModelOptions options;
  options.max_n = kTreeMaxRadius;
  options.patterson_depth = patterson_depth;
  options.cylinder_depth = cylinder_depth;
  options.patterson_exponent = patterson_exponent;
  options.circle_cap = kCircleMaxRadius;
  return options;
}

void ExperimentConfig::validate() const {
  require(rank >= 1 && rank <= kMaxRank, fmt::format("rank: {} outside [1, {}]", rank, kMaxRank));
  require(threads >= 1 && threads <= kMaxThreads, fmt::format("threads: {} outside [1, {}]", threads, kMaxThreads));
  require(alpha > 0.0 && alpha < 2.0, fmt::format("alpha: {} outside the stable range (0, 2)", alpha));
  require(thresholds.floor > 0.0, "theta1: must be positive");
  require(thresholds.tail_slope >= 0.0, "theta2: must be non-negative");
  require(thresholds.decay > 1.0, "theta3: must exceed 1");
  require(patterson_depth >= 1 && patterson_depth <= 18, "patterson_depth: outside [1, 18]");
  require(cylinder_depth >= 1 && cylinder_depth <= std::min(patterson_depth, 12),
          "cylinder_depth: outside [1, min(patterson_depth, 12)]");
  if (patterson_exponent) require(*patterson_exponent > 0.0, "patterson_exponent: must be positive");

  const bool tree = model != ModelKind::CircleHarmonic;
  const int radius_cap = tree ? kTreeMaxRadius : kCircleMaxRadius;
  if (tree) require(rank >= 2, "rank: tree models need rank >= 2");
  if (model == ModelKind::TreeSubgroup || kind == ExperimentKind::Growth) {
    const auto spec = subgroup_spec();
    if (model == ModelKind::TreeSubgroup) require(!spec.is_full(), "subgroup: tree-subgroup needs a proper kernel");
  }

  switch (kind) {
    case ExperimentKind::Ecg:
      require(n_min >= 1 && n_min <= n_max, fmt::format("n_min..n_max: {}..{} is not a valid range", n_min, n_max));
      require(n_max <= radius_cap, fmt::format("n_max: {} exceeds the cap {} for {}", n_max, radius_cap, to_string(model)));
      require(samples >= 2 && samples <= kMaxSamples, fmt::format("samples: {} outside [2, {}]", samples, kMaxSamples));
      break;
    case ExperimentKind::Growth: {
      const auto spec = subgroup_spec();
      const int cap = spec.is_full() ? kFullGrowthMax : spec.is_c2c3() ? SubgroupCaps{}.c2c3_max_radius : kZkGrowthMax;
      require(m_min >= 0 && m_min <= m_max, fmt::format("m_min..m_max: {}..{} is not a valid range", m_min, m_max));
      require(m_max <= cap, fmt::format("m_max: {} exceeds the cap {} for {}", m_max, cap, subgroup));
      break;
    }
    case ExperimentKind::Maxima: {
      require(!radii.empty(), "radii: empty list");
      std::set<int> seen;
      for (int n : radii) {
        require(n >= 1 && n <= radius_cap, fmt::format("radii: {} outside [1, {}]", n, radius_cap));
        require(seen.insert(n).second, fmt::format("radii: {} listed twice", n));
      }
      require(replicates >= 1 && replicates <= kMaxReplicates,
              fmt::format("replicates: {} outside [1, {}]", replicates, kMaxReplicates));
      require(truncation >= 10 && truncation <= kMaxTruncation,
              fmt::format("truncation: {} outside [10, {}]", truncation, kMaxTruncation));
      require(samples >= 2 && samples <= kMaxSamples, fmt::format("samples: {} outside [2, {}]", samples, kMaxSamples));
      break;
    }
    case ExperimentKind::Sl2zExample:
    case ExperimentKind::Validate:
      break;
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind);
  j["model"] = to_string(model);
  j["rank"] = rank;
  j["subgroup"] = subgroup;
  j["measure"] = to_string(measure);
  j["patterson_depth"] = patterson_depth;
  j["cylinder_depth"] = cylinder_depth;
  j["patterson_exponent"] = patterson_exponent ? nlohmann::json(*patterson_exponent) : nlohmann::json("auto");
  j["n_min"] = n_min;
  j["n_max"] = n_max;
  j["m_min"] = m_min;
  j["m_max"] = m_max;
  j["radii"] = radii;
  j["samples"] = samples;
  j["alpha"] = alpha;
  j["replicates"] = replicates;
  j["truncation"] = truncation;
  j["theta1"] = thresholds.floor;
  j["theta2"] = thresholds.tail_slope;
  j["theta3"] = thresholds.decay;
  j["seed"] = seed;
  j["out"] = out.generic_string();
  j["threads"] = threads;
  j["plots"] = plots;
  return j;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read configuration file '{}'", path.string()));
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : items) {
    // Section markers come through as "++" / "--" items.
    if (!item.parents.empty() || item.name == "++" || item.name == "--")
      throw ConfigError(fmt::format("{}: sections and dotted keys are not supported ('{}')", path.string(),
                                    item.parents.empty() ? item.name : item.parents.front()));
    out.emplace_back(item.name, fmt::format("{}", fmt::join(item.inputs, ",")));
  }
  return out;
}

ExperimentConfig load_config(ExperimentKind kind, const std::optional<std::filesystem::path>& file,
                             const std::optional<std::string>& env_seed,
                             const std::vector<std::pair<std::string, std::string>>& overrides) {
  ExperimentConfig config;
  if (file)
    for (const auto& [key, value] : read_config_file(*file)) config.set(key, value);
  // The subcommand names the experiment regardless of what the file says.
  config.kind = kind;
  if (env_seed) config.set("seed", *env_seed);
  for (const auto& [key, value] : overrides) config.set(key, value);
  config.validate();
  return config;
}

}  // namespace ecglab
