// Command-line entry point: one subcommand per experiment kind.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "ecglab/config.hpp"
#include "ecglab/runner.hpp"

namespace {

struct Override {
  const char* flag;
  const char* key;
  const char* help;
};

const std::vector<Override>& all_overrides() {
  static const std::vector<Override> table{
      {"--model", "model", "tree-full | tree-subgroup | circle-harmonic"},
      {"--rank", "rank", "free group rank d"},
      {"--subgroup", "subgroup", "full | z:w1,w2[|...] | c2c3:img1,img2"},
      {"--measure", "measure", "patterson | ambient"},
      {"--patterson-depth", "patterson_depth", "enumeration depth N of the empirical Patterson measure"},
      {"--cylinder-depth", "cylinder_depth", "cylinder depth K of the empirical Patterson measure"},
      {"--patterson-exponent", "patterson_exponent", "weight exponent s, or auto"},
      {"--n-min", "n_min", "smallest radius"},
      {"--n-max", "n_max", "largest radius"},
      {"--m-min", "m_min", "smallest subgroup radius"},
      {"--m-max", "m_max", "largest subgroup radius"},
      {"--radii", "radii", "comma-separated radii"},
      {"--samples", "samples", "Monte Carlo samples"},
      {"--alpha", "alpha", "stability index in (0, 2)"},
      {"--replicates", "replicates", "field replicates"},
      {"--truncation", "truncation", "series truncation J"},
      {"--theta1", "theta1", "C_n floor for nonvanishing"},
      {"--theta2", "theta2", "tail log-slope tolerance"},
      {"--theta3", "theta3", "decay factor for vanishing"},
  };
  return table;
}

struct Subcommand {
  ecglab::ExperimentKind kind;
  CLI::App* app = nullptr;
  std::vector<std::string> keys;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  CLI::Option* no_plots = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extremal cocycle growth experiments on free groups and PSL(2,Z)"};
  app.set_version_flag("--version", ecglab::tool_version());
  app.require_subcommand(1);

  std::string config_path, seed, out, threads;
  std::map<std::string, std::string> values;

  const std::vector<std::string> model_keys{"model", "rank", "subgroup", "measure", "patterson_depth", "cylinder_depth",
                                            "patterson_exponent"};
  std::vector<Subcommand> subs{
      {ecglab::ExperimentKind::Ecg, nullptr, model_keys, {}, nullptr},
      {ecglab::ExperimentKind::Growth, nullptr, {"rank", "subgroup", "m_min", "m_max"}, {}, nullptr},
      {ecglab::ExperimentKind::Maxima, nullptr, model_keys, {}, nullptr},
      {ecglab::ExperimentKind::Sl2zExample, nullptr, {}, {}, nullptr},
      {ecglab::ExperimentKind::Validate, nullptr, {}, {}, nullptr},
  };
  for (auto key : {"n_min", "n_max", "samples", "theta1", "theta2", "theta3"}) subs[0].keys.push_back(key);
  for (auto key : {"radii", "alpha", "replicates", "truncation", "samples"}) subs[2].keys.push_back(key);

  const std::map<ecglab::ExperimentKind, const char*> descriptions{
      {ecglab::ExperimentKind::Ecg, "Estimate C_n over a range of radii and classify the curve"},
      {ecglab::ExperimentKind::Growth, "Exact subgroup ball counts and their ratio to the ambient ball"},
      {ecglab::ExperimentKind::Maxima, "Partial maxima of the stable field and the dichotomy verdict"},
      {ecglab::ExperimentKind::Sl2zExample, "Radius log 3 ball of PSL(2,Z) and derivatives at 2"},
      {ecglab::ExperimentKind::Validate, "Run the invariant suite; exit 2 if any check fails"},
  };

  for (auto& sub : subs) {
    sub.app = app.add_subcommand(ecglab::to_string(sub.kind), descriptions.at(sub.kind));
    sub.app->add_option("--config", config_path, "flat key = value configuration file")->check(CLI::ExistingFile);
    sub.options.emplace_back("seed", sub.app->add_option("--seed", seed, "master seed (u64)"));
    sub.options.emplace_back("out", sub.app->add_option("--out", out, "output directory"));
    sub.options.emplace_back("threads", sub.app->add_option("--threads", threads, "worker threads"));
    for (const auto& o : all_overrides())
      if (std::find(sub.keys.begin(), sub.keys.end(), o.key) != sub.keys.end())
        sub.options.emplace_back(o.key, sub.app->add_option(o.flag, values[o.key], o.help));
    if (sub.kind != ecglab::ExperimentKind::Validate)
      sub.no_plots = sub.app->add_flag("--no-plots", "skip SVG output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (const auto& sub : subs) {
    if (!sub.app->parsed()) continue;
    try {
      std::vector<std::pair<std::string, std::string>> overrides;
      for (const auto& [key, option] : sub.options) {
        if (option->count() == 0) continue;
        if (key == "seed") overrides.emplace_back(key, seed);
        else if (key == "out") overrides.emplace_back(key, out);
        else if (key == "threads") overrides.emplace_back(key, threads);
        else overrides.emplace_back(key, values[key]);
      }
      if (sub.no_plots && sub.no_plots->count() > 0) overrides.emplace_back("plots", "false");
      std::optional<std::string> env_seed;
      if (const char* env = std::getenv("ECGLAB_SEED"); env && *env) env_seed = env;
      std::optional<std::filesystem::path> file;
      if (!config_path.empty()) file = config_path;

      const ecglab::ExperimentConfig config = ecglab::load_config(sub.kind, file, env_seed, overrides);
      const ecglab::RunResult result = ecglab::run(config);
      fmt::print("{}: wrote {} files to {} in {:.2f} s\n", ecglab::to_string(config.kind),
                 result.record.outputs.size(), config.out.string(), result.record.wall_clock_seconds);
      if (result.exit_code != 0) fmt::print(stderr, "validation failed: {}\n", result.summary["failed"].dump());
      return result.exit_code;
    } catch (const ecglab::ConfigError& e) {
      fmt::print(stderr, "configuration error: {}\n", e.what());
      return 1;
    } catch (const std::exception& e) {
      fmt::print(stderr, "error: {}\n", e.what());
      return 1;
    }
  }
  return 1;
}
