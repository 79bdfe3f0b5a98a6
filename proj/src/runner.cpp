#include "ecglab/runner.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "ecglab/ecg.hpp"
#include "ecglab/field.hpp"
#include "ecglab/mobius.hpp"
#include "ecglab/stable.hpp"
#include "ecglab/validate.hpp"

#ifndef ECGLAB_VERSION
#define ECGLAB_VERSION "unknown"
#endif

namespace ecglab {

namespace fs = std::filesystem;

const char* tool_version() { return ECGLAB_VERSION; }

// ---------------------------------------------------------------------------
// Output bundle

OutputBundle::OutputBundle(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_))
    throw std::runtime_error(fmt::format("cannot create output directory '{}': {}", dir_.string(), ec.message()));
}

fs::path OutputBundle::resolve(const std::string& name) const {
  const fs::path rel(name);
  if (rel.empty() || rel.is_absolute() || rel.has_parent_path() || name == "." || name == "..")
    throw std::invalid_argument(fmt::format("output name '{}' must be a plain file name", name));
  return dir_ / rel;
}

void OutputBundle::write_file(const std::string& name, const std::string& content) {
  const fs::path path = resolve(name);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << content;
  out.close();
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
  files_.push_back(name);
}

void OutputBundle::add_table(const std::string& name, const std::string& content) {
  write_file(name, content);
  tables_.push_back(name);
}

void OutputBundle::add_plot(const std::string& name, const LinePlot& plot) {
  std::ostringstream svg;
  write_svg(svg, plot);
  write_file(name, svg.str());
  plots_.push_back(name);
}

void OutputBundle::write_summary(nlohmann::json summary) {
  summary["tables"] = tables_;
  summary["plots"] = plots_;
  write_file("summary.json", summary.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Run record

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read '{}' for checksumming", path.string()));
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 initialisation failed");
  std::array<char, 1 << 16> buffer;
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0 && EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount())) != 1)
      throw std::runtime_error("SHA-256 update failed");
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int length = 0;
  if (EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) throw std::runtime_error("SHA-256 final failed");
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

nlohmann::json RunRecord::to_json() const {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& o : outputs) files.push_back({{"path", o.path}, {"bytes", o.bytes}, {"sha256", o.sha256}});
  return {{"tool", "ecglab"},
          {"tool_version", tool_version},
          {"config", config},
          {"wall_clock_seconds", wall_clock_seconds},
          {"outputs", files}};
}

RunRecord record_run(const ExperimentConfig& config, const OutputBundle& bundle, double wall_clock_seconds) {
  RunRecord record;
  record.config = config.to_json();
  record.tool_version = tool_version();
  record.wall_clock_seconds = wall_clock_seconds;
  for (const auto& name : bundle.files()) {
    const fs::path path = bundle.dir() / name;
    record.outputs.push_back({name, fs::file_size(path), sha256_file(path)});
  }
  const nlohmann::json j = record.to_json();
  {
    std::ofstream out(bundle.dir() / "run_record.json", std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write run_record.json");
    out << j.dump(2) << "\n";
  }
  std::ofstream index(bundle.dir() / "runs.jsonl", std::ios::binary | std::ios::app);
  if (!index) throw std::runtime_error("cannot append to runs.jsonl");
  index << j.dump() << "\n";
  if (!index) throw std::runtime_error("append to runs.jsonl failed");
  return record;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Model make_model(const ExperimentConfig& config) {
  const ModelOptions options = config.model_options();
  switch (config.model) {
    case ModelKind::TreeFull: return Model::tree_full(config.rank, options);
    case ModelKind::TreeSubgroup: return Model::tree_subgroup(config.subgroup_spec(), config.measure, options);
    case ModelKind::CircleHarmonic: return Model::circle_harmonic(options);
  }
  throw std::logic_error("unhandled model kind");
}

nlohmann::json run_ecg(const ExperimentConfig& config, OutputBundle& bundle) {
  const Model model = make_model(config);
  EcgOptions options;
  options.samples = config.samples;
  options.seed = config.seed;
  options.threads = config.threads;
  const EcgCurve curve = ecg_curve(model, int_range(config.n_min, config.n_max), options, config.thresholds);

  std::ostringstream csv;
  curve.write_csv(csv);
  bundle.add_table("ecg_curve.csv", csv.str());
  if (config.plots) {
    LinePlot plot{"Extremal cocycle growth: " + model.description(), "radius n", "C_n", true, {}};
    PlotSeries s{"C_n", {}, {}, false};
    for (const auto& p : curve.points) {
      s.x.push_back(p.n);
      s.y.push_back(p.cn);
    }
    plot.series.push_back(std::move(s));
    bundle.add_plot("ecg_curve.svg", plot);
  }
  nlohmann::json summary = curve.summary();
  summary["dimension"] = model.dimension();
  return summary;
}

nlohmann::json run_growth(const ExperimentConfig& config, OutputBundle& bundle) {
  const SubgroupSpec spec = config.subgroup_spec();
  const auto series = growth_ratio_series(spec, int_range(config.m_min, config.m_max));

  std::ostringstream csv;
  csv << "m,count,ratio_numerator,ratio_denominator,ratio\n";
  std::vector<double> counts;
  for (const auto& g : series) {
    csv << fmt::format("{},{},{},{},{:.17g}\n", g.m, g.count.str(), numerator(g.ratio).str(),
                       denominator(g.ratio).str(), to_double(g.ratio));
    counts.push_back(to_double(g.count));
  }
  bundle.add_table("growth.csv", csv.str());

  bool non_increasing = true;
  for (std::size_t i = 1; i < series.size(); ++i)
    if (series[i - 1].m >= 5 && series[i].ratio > series[i - 1].ratio) non_increasing = false;

  nlohmann::json summary = {{"subgroup", spec.to_string()},
                            {"rank", spec.rank()},
                            {"m_min", config.m_min},
                            {"m_max", config.m_max},
                            {"ambient_exponent", std::log(2.0 * spec.rank() - 1.0)},
                            {"non_increasing_from_m5", non_increasing}};
  summary["first_ratio"] = to_double(series.front().ratio);
  summary["last_ratio"] = to_double(series.back().ratio);
  summary["last_over_first"] = to_double(series.back().ratio / series.front().ratio);
  const bool positive = std::all_of(counts.begin(), counts.end(), [](double c) { return c > 0; });
  summary["growth_exponent"] =
      counts.size() >= 4 && positive ? nlohmann::json(growth_exponent(counts)) : nlohmann::json(nullptr);

  if (config.plots) {
    LinePlot plot{"Subgroup growth ratio: " + spec.to_string(), "radius m", "V_H(m) / (2d-1)^m", true, {}};
    PlotSeries s{"ratio", {}, {}, false};
    for (const auto& g : series) {
      s.x.push_back(g.m);
      s.y.push_back(to_double(g.ratio));
    }
    plot.series.push_back(std::move(s));
    bundle.add_plot("growth_ratio.svg", plot);
  }
  return summary;
}

nlohmann::json run_maxima(const ExperimentConfig& config, OutputBundle& bundle) {
  const Model model = make_model(config);
  SeriesOptions options;
  options.truncation = config.truncation;
  options.replicates = config.replicates;
  options.seed = config.seed;
  options.threads = config.threads;
  options.abar_samples = config.samples;
  const DichotomyReport report = dichotomy_experiment(model, config.radii, config.alpha, options);

  std::ostringstream rows;
  report.write_csv(rows);
  bundle.add_table("maxima_summary.csv", rows.str());

  std::ostringstream all;
  all << "n,replicate,maximum,over_volume,over_b_n\n";
  for (const auto& s : report.samples) {
    const auto v = s.over_volume();
    const auto b = s.over_b_n();
    for (std::size_t r = 0; r < s.maxima.size(); ++r)
      all << fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", s.n, r, s.maxima[r], v[r], b[r]);
  }
  bundle.add_table("maxima.csv", all.str());

  nlohmann::json summary = report.summary();

  // Empirical CDF against the Frechet limit at the largest radius.
  const auto last = std::max_element(report.rows.begin(), report.rows.end(),
                                     [](const DichotomyRow& a, const DichotomyRow& b) { return a.n < b.n; });
  const MaximaSample& sample = report.samples[static_cast<std::size_t>(last - report.rows.begin())];
  if (last->fitted && last->kappa > 0) {
    std::vector<double> lambda = sample.over_b_n();
    for (double& x : lambda) x /= last->kappa;
    std::sort(lambda.begin(), lambda.end());
    std::ostringstream cdf;
    cdf << "lambda,empirical_cdf,frechet_cdf\n";
    PlotSeries empirical{"empirical", {}, {}, true}, limit{"exp(-c_alpha lambda^-alpha)", {}, {}, false};
    const double count = static_cast<double>(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      const double f = frechet_cdf(lambda[i], config.alpha);
      cdf << fmt::format("{:.17g},{:.17g},{:.17g}\n", lambda[i], static_cast<double>(i + 1) / count, f);
    }
    bundle.add_table("maxima_cdf.csv", cdf.str());
    if (config.plots) {
      // Heavy tails would squash the bulk, so the plot stops near the 99% point.
      const double hi = std::min(lambda.back(), frechet_quantile(0.99, config.alpha) * 2.0);
      for (std::size_t i = 0; i < lambda.size() && lambda[i] <= hi; ++i) {
        empirical.x.push_back(lambda[i]);
        empirical.y.push_back(static_cast<double>(i + 1) / count);
      }
      for (int k = 1; k <= 200; ++k) {
        const double x = hi * k / 200.0;
        limit.x.push_back(x);
        limit.y.push_back(frechet_cdf(x, config.alpha));
      }
      LinePlot plot{fmt::format("Normalized maxima at n = {} against the Frechet law", last->n),
                    "M_n / (b_n kappa)", "CDF", false, {empirical, limit}};
      bundle.add_plot("maxima_cdf.svg", plot);
    }
  }

  SeriesOptions check = options;
  check.replicates = std::min<std::size_t>(options.replicates, 200);
  const TruncationDiagnostics t = truncation_check(model, last->n, config.alpha, check);
  summary["truncation_check"] = {{"n", last->n},
                                 {"truncation", t.truncation},
                                 {"replicates", check.replicates},
                                 {"median_j", t.median_j},
                                 {"median_2j", t.median_2j},
                                 {"relative_change", t.relative_change},
                                 {"tail_proxy", std::isfinite(t.tail_proxy) ? nlohmann::json(t.tail_proxy)
                                                                             : nlohmann::json(nullptr)},
                                 {"gamma_ratio", t.gamma_ratio},
                                 {"gamma_flag", t.gamma_flag}};
  if (config.plots) {
    LinePlot plot{"Median normalized maximum by radius", "radius n", "median M_n / V_n^(1/alpha)", true, {}};
    PlotSeries s{"median", {}, {}, false};
    for (const auto& r : report.rows) {
      s.x.push_back(r.n);
      s.y.push_back(r.median);
    }
    plot.series.push_back(std::move(s));
    bundle.add_plot("maxima_medians.svg", plot);
  }
  return summary;
}

nlohmann::json run_sl2z_example(const ExperimentConfig&, OutputBundle& bundle) {
  const double radius = std::log(3.0);
  const auto ball = enumerate_ball(radius);
  const auto points = orbit_points(ball);
  const CirclePoint xi{2.0, false};

  std::ostringstream ball_csv;
  write_ball_csv(ball_csv, ball);
  bundle.add_table("sl2z_ball.csv", ball_csv.str());

  std::ostringstream points_csv;
  points_csv << "p,q,re,im\n";
  nlohmann::json point_names = nlohmann::json::array();
  for (const auto& k : points) {
    const auto z = k.point();
    points_csv << fmt::format("{},{},{:.17g},{:.17g}\n", k.p, k.q, z.re, z.im);
    point_names.push_back(fmt::format("({} + i) / {}", k.p, k.q));
  }
  bundle.add_table("sl2z_orbit_points.csv", points_csv.str());

  std::ostringstream rn_csv;
  rn_csv << "a,b,c,d,rn_lebesgue,poisson_ratio\n";
  double a_lebesgue = 0, a_harmonic = 0;
  for (const auto& g : ball) {
    const double leb = rn_lebesgue(g, xi), harm = poisson_ratio(g, xi);
    a_lebesgue = std::max(a_lebesgue, leb);
    a_harmonic = std::max(a_harmonic, harm);
    rn_csv << fmt::format("{},{},{},{},{:.17g},{:.17g}\n", g.a(), g.b(), g.c(), g.d(), leb, harm);
  }
  bundle.add_table("sl2z_rn_at_2.csv", rn_csv.str());

  return {{"radius", radius},
          {"ball_size", ball.size()},
          {"orbit_point_count", points.size()},
          {"orbit_points", point_names},
          {"xi", xi.value},
          {"max_rn_lebesgue", a_lebesgue},
          {"max_poisson_ratio", a_harmonic}};
}

nlohmann::json run_validate(const ExperimentConfig& config, OutputBundle& bundle, int& exit_code) {
  ValidationOptions options;
  options.seed = config.seed;
  options.threads = config.threads;
  const auto checks = run_validation(options, [](const CheckResult& c) {
    fmt::print("{} {} (value {:.6g}, threshold {:.6g}){}\n", c.passed ? "PASS" : "FAIL", c.name, c.value, c.threshold,
               c.detail.empty() ? "" : ": " + c.detail);
    std::fflush(stdout);
  });

  std::ostringstream csv;
  csv << "check,passed,value,threshold,detail\n";
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& c : checks) {
    csv << fmt::format("{},{},{:.17g},{:.17g},{}\n", c.name, c.passed ? "true" : "false", c.value, c.threshold,
                       csv_field(c.detail));
    if (!c.passed) failed.push_back(c.name);
  }
  bundle.add_table("validation.csv", csv.str());
  exit_code = failed.empty() ? 0 : 2;
  return {{"checks", checks.size()}, {"passed", checks.size() - failed.size()}, {"failed", failed}};
}

}  // namespace

RunResult run(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  OutputBundle bundle(config.out);

  RunResult result;
  nlohmann::json summary;
  switch (config.kind) {
    case ExperimentKind::Ecg: summary = run_ecg(config, bundle); break;
    case ExperimentKind::Growth: summary = run_growth(config, bundle); break;
    case ExperimentKind::Maxima: summary = run_maxima(config, bundle); break;
    case ExperimentKind::Sl2zExample: summary = run_sl2z_example(config, bundle); break;
    case ExperimentKind::Validate: summary = run_validate(config, bundle, result.exit_code); break;
  }
  summary["experiment"] = to_string(config.kind);
  summary["seed"] = config.seed;
  bundle.write_summary(summary);
  result.summary = summary;

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.record = record_run(config, bundle, seconds);
  return result;
}

}  // namespace ecglab
