// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit code
// is non-zero when any selected criterion fails.

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "oracles.hpp"

#include "ecglab/boundary.hpp"
#include "ecglab/ecg.hpp"
#include "ecglab/field.hpp"
#include "ecglab/mobius.hpp"
#include "ecglab/parallel.hpp"
#include "ecglab/runner.hpp"
#include "ecglab/stable.hpp"
#include "ecglab/word.hpp"

using namespace ecglab;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool passed;
  std::string detail;
};

struct Settings {
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
};

oracle::Word plain(const ReducedWord& w) { return {w.letters().begin(), w.letters().end()}; }

Model subgroup_model() {
  return Model::tree_subgroup(SubgroupSpec::kernel_to_z({1, 0}), MeasureChoice::Patterson);
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / fmt::format("ecglab-acceptance-{}{}", rd(), rd());
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 1. The radius log 3 ball of the modular group.
Verdict modular_example(const Settings&) {
  const auto ball = enumerate_ball(std::log(3.0));
  const auto points = orbit_points(ball);
  using C = std::complex<double>;
  const std::vector<C> expected{{0, 1}, {1, 1}, {-1, 1}, {0.5, 0.5}, {-0.5, 0.5}};
  std::vector<bool> hit(expected.size(), false);
  bool all_matched = true;
  for (const auto& k : points) {
    const auto z = k.point();
    bool matched = false;
    for (std::size_t i = 0; i < expected.size(); ++i)
      if (std::abs(C(z.re, z.im) - expected[i]) <= 1e-12) matched = hit[i] = true;
    all_matched = all_matched && matched;
  }
  const bool covers = std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
  double best = 0;
  for (const auto& g : ball) best = std::max(best, rn_lebesgue(g, CirclePoint{2.0, false}));
  // The same numbers through the experiment runner.
  TempDir tmp;
  ExperimentConfig c;
  c.kind = ExperimentKind::Sl2zExample;
  c.out = tmp.path;
  const RunResult r = run(c);
  const bool runner_ok = r.summary["orbit_point_count"] == 5 &&
                         std::abs(r.summary["max_rn_lebesgue"].get<double>() - 1.0) <= 1e-12;
  const bool ok = points.size() == 5 && all_matched && covers && std::abs(best - 1.0) <= 1e-12 && runner_ok;
  return {ok, fmt::format("{} orbit points from {} matrices, max D_g(2) = {:.15g}", points.size(), ball.size(), best)};
}

// 2. Exact ECG on the full tree, closed form and a generic brute-force estimator.
Verdict tree_exactness(const Settings& s) {
  const Model model = Model::tree_full(2);
  double worst = 0;
  for (const auto& p : ecg_estimate(model, int_range(1, 10), {1000, s.seed, s.threads}))
    worst = std::max({worst, std::abs(p.cn - 1.0), p.stderr_cn});
  // Generic estimator: maximize the RN derivative over every ball element.
  const auto evaluator = RnEvaluator::tree_full(2);
  const TreeBoundarySampler sampler(2);
  Rng rng(s.seed, 0xC2);
  double generic_dev = 0;
  for (int n = 1; n <= 7; ++n) {
    const auto elements = ball(2, n);
    std::vector<double> ratios;
    for (int i = 0; i < 100; ++i) {
      const auto xi = sampler.sample(rng, static_cast<std::size_t>(n) + 1);
      double best = 0;
      for (const auto& g : elements) best = std::max(best, evaluator.derivative(g, xi));
      ratios.push_back(best / std::pow(3.0, n));
    }
    double mean = 0, ss = 0;
    for (double x : ratios) mean += x / static_cast<double>(ratios.size());
    for (double x : ratios) ss += (x - mean) * (x - mean);
    const double se = std::sqrt(ss / static_cast<double>(ratios.size() - 1) / static_cast<double>(ratios.size()));
    generic_dev = std::max(generic_dev, std::abs(mean - 1.0) - 3 * se);
  }
  const bool ok = worst <= 1e-12 && generic_dev <= 1e-12;
  return {ok, fmt::format("max |C_n - 1| or stderr {:.2g} for n = 1..10; generic estimator excess over 3 SE {:.2g}",
                          worst, std::max(generic_dev, 0.0))};
}

// 3. Conformality by exact integer sums over depth-(|g| + |w|) cylinders.
Verdict conformality(const Settings&) {
  const auto words = oracle::all_reduced_words(2, 3);
  std::map<int, std::vector<oracle::Word>> spheres;
  for (const auto& u : oracle::all_reduced_words(2, 6)) spheres[static_cast<int>(u.size())].push_back(u);
  int failures = 0, checked = 0;
  for (const auto& g : words)
    for (const auto& w : words) {
      const ReducedWord G(2, g), W(2, w);
      const Rational lhs = integrate_rn_over_cylinder(2, G, W);
      const Rational rhs = pushforward_cylinder(2, G, W);
      const int L = static_cast<int>(g.size() + w.size());
      Rational expected = 1;
      if (L > 0) {
        std::int64_t sum = 0;
        for (const auto& u : spheres[L])
          if (oracle::prefix_length(u, w) == w.size())
            sum += oracle::power(3, 2 * static_cast<int>(oracle::prefix_length(u, g)));
        expected = Rational(sum, 4 * oracle::power(3, L - 1) * oracle::power(3, static_cast<int>(g.size())));
      }
      ++checked;
      if (lhs != rhs || lhs != expected) ++failures;
    }
  return {failures == 0, fmt::format("{} failures in {} (g, w) pairs", failures, checked)};
}

// 4. Cocycle identities.
Verdict cocycles(const Settings& s) {
  Rng rng(s.seed, 0xC4);
  const TreeBoundarySampler sampler(2);
  const auto tree = RnEvaluator::tree_full(2);
  double tree_worst = 0;
  int oracle_mismatch = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto g = sampler.sample(rng, rng.uniform_index(8));
    const auto h = sampler.sample(rng, rng.uniform_index(8));
    const auto xi = sampler.sample(rng, g.length() + h.length() + 4);
    tree_worst = std::max(tree_worst, cocycle_check(tree, g, h, xi));
    const double direct = std::log(3.0) * static_cast<double>(oracle::busemann_by_distance(plain(xi), plain(g)));
    if (std::abs(tree.log_derivative(g, xi) - direct) > 1e-12) ++oracle_mismatch;
  }
  const UnimodularMatrix gens[] = {UnimodularMatrix::S(), UnimodularMatrix::T(), UnimodularMatrix::T().inverse()};
  auto random_matrix = [&] {
    UnimodularMatrix g;
    for (std::uint64_t k = 0, n = rng.uniform_index(9); k < n; ++k) g = g * gens[rng.uniform_index(3)];
    return g;
  };
  double circle_worst = 0;
  const auto circle = RnEvaluator::circle_harmonic();
  for (int i = 0; i < 1000; ++i) {
    const auto g = random_matrix(), h = random_matrix();
    circle_worst = std::max(circle_worst, cocycle_check(circle, g, h, sample_harmonic(rng)));
  }
  const bool ok = tree_worst == 0.0 && oracle_mismatch == 0 && circle_worst <= 1e-10;
  return {ok, fmt::format("tree residual {:.3g}, circle residual {:.3g}", tree_worst, circle_worst)};
}

// 5. Ball sizes and modular-group orbit growth.
Verdict growth_laws(const Settings&) {
  bool sizes = true;
  for (int n = 0; n <= 10; ++n) sizes = sizes && ball(2, n).size() == static_cast<std::size_t>(2 * oracle::power(3, n) - 1);
  for (int n = 0; n <= 6; ++n) sizes = sizes && ball(2, n).size() == oracle::all_reduced_words(2, n).size();
  double lo = INFINITY, hi = 0;
  bool counts_agree = true;
  for (int n = 4; n <= 9; ++n) {
    const auto points = orbit_points(enumerate_ball(n));
    counts_agree = counts_agree && points.size() == oracle::orbit_points_within(n).size();
    const double scaled = static_cast<double>(points.size()) * std::exp(-n);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  return {sizes && counts_agree && hi / lo <= 3.0,
          fmt::format("ball sizes exact: {}; orbit counts e^-n max/min = {:.4f}", sizes, hi / lo)};
}

// 6. Subgroup growth.
Verdict subgroup_growth(const Settings&) {
  const auto h = SubgroupSpec::kernel_to_z({1, 0});
  auto brute = [](int m) {
    long count = 0;
    for (const auto& w : oracle::all_reduced_words(2, m)) count += oracle::exponent_sum(w, 1) == 0;
    return count;
  };
  const bool small = subgroup_ball_count(h, 2) == 5 && subgroup_ball_count(h, 3) == 11 && brute(2) == 5 && brute(3) == 11;
  bool dp = true;
  for (int m = 0; m <= 8; ++m) dp = dp && subgroup_ball_count(h, m) == brute(m);
  const auto series = growth_ratio_series(h, int_range(5, 30));
  bool monotone = true;
  for (std::size_t i = 1; i < series.size(); ++i) monotone = monotone && series[i].ratio <= series[i - 1].ratio;
  const double q = to_double(series[25].ratio / series[5].ratio);
  const bool ok = small && dp && monotone && q < 0.5;
  return {ok, fmt::format("small values {}, DP = brute force {}, non-increasing from m = 5 {}, "
                          "ratio(30) / ratio(10) = {:.4f} (needs < 0.5)",
                          small, dp, monotone, q)};
}

// 7. Vanishing ECG on the subgroup tree.
Verdict vanishing(const Settings& s) {
  const EcgCurve curve = ecg_curve(subgroup_model(), int_range(4, 20), {4000, s.seed, s.threads});
  const double c5 = curve.points[1].cn, c20 = curve.points.back().cn;
  const bool ok = curve.classification == Classification::Vanishing && c20 < c5 / 2;
  return {ok, fmt::format("classified {}, C_5 = {:.4f}, C_20 = {:.4f}, ratio {:.3f}", to_string(curve.classification),
                          c5, c20, c20 / c5)};
}

// 8. Non-vanishing ECG on the circle.
Verdict nonvanishing(const Settings& s) {
  const EcgCurve curve = ecg_curve(Model::circle_harmonic(), int_range(2, 8), {4000, s.seed, s.threads});
  double lowest = INFINITY;
  bool strictly_decreasing = true;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    lowest = std::min(lowest, curve.points[i].cn);
    if (i > 0) strictly_decreasing = strictly_decreasing && curve.points[i].cn < curve.points[i - 1].cn;
  }
  const bool ok = lowest >= 0.01 && !(strictly_decreasing && curve.tail_slope < -curve.thresholds.tail_slope) &&
                  curve.classification == Classification::Nonvanishing;
  return {ok, fmt::format("min C_n = {:.4f}, tail slope {:.4f}, classified {}", lowest, curve.tail_slope,
                          to_string(curve.classification))};
}

// 9. Stable sampler.
Verdict stable_sampler(const Settings& s) {
  double cf_worst = 0, lo = INFINITY, hi = 0;
  std::uint64_t stream = 0;
  for (double alpha : {0.7, 1.2, 1.7}) {
    Rng rng(s.seed, 0xC9 + stream++);
    std::vector<double> draws(100000);
    for (double& x : draws) x = sample_sas({alpha, 1.0}, rng);
    for (double theta : {0.5, 1.0, 2.0}) {
      std::complex<double> cf = 0;
      for (double x : draws) cf += std::polar(1.0, theta * x);
      cf /= static_cast<double>(draws.size());
      cf_worst = std::max(cf_worst, std::abs(cf - std::exp(-std::pow(theta, alpha))));
    }
    for (double& x : draws) x = std::abs(x);
    std::sort(draws.begin(), draws.end());
    const double lambda = draws[static_cast<std::size_t>(0.995 * (draws.size() - 1))];
    const double tail = 0.005 * std::pow(lambda, alpha) / c_alpha(alpha);
    lo = std::min(lo, tail);
    hi = std::max(hi, tail);
  }
  const bool ok = cf_worst < 0.02 && lo >= 0.7 && hi <= 1.3;
  return {ok, fmt::format("CF deviation {:.4f}, tail ratio in [{:.3f}, {:.3f}]", cf_worst, lo, hi)};
}

// 10. Field marginal at the identity against direct stable draws.
Verdict marginal(const Settings& s) {
  const Model model = Model::tree_full(2);
  const int n = 6;
  const double alpha = 1.5;
  const std::size_t replicates = 10000;
  std::vector<double> field(replicates), direct(replicates);
  const std::uint64_t stream = derive_seed(s.seed, 0xC10);
  parallel_for(replicates, s.threads, [&](std::size_t r) {
    Rng rng(stream, r);
    const auto series = draw_series(model, n, alpha, model.volume(n), 1000, rng);
    field[r] = field_value(model, series, ReducedWord(2));
  });
  Rng rng(s.seed, 0xC10);
  for (double& x : direct) x = sample_sas({alpha, 1.0}, rng);
  const double ks = ks_two_sample(field, direct);
  return {ks <= 0.05, fmt::format("two-sample KS {:.4f}", ks)};
}

SeriesOptions series_options(const Settings& s) {
  SeriesOptions o;
  o.truncation = 1000;
  o.replicates = 400;
  o.seed = s.seed;
  o.threads = s.threads;
  o.abar_samples = 4000;
  return o;
}

// 11. i.i.d.-like branch of the dichotomy and the Frechet self-test.
Verdict iid_branch(const Settings& s) {
  const DichotomyReport report = dichotomy_experiment(Model::tree_full(2), {4, 6, 8}, 1.5, series_options(s));
  const double first = report.rows.front().median;
  double lo = INFINITY;
  for (const auto& r : report.rows) lo = std::min(lo, r.median);
  const double ks = report.rows.back().ks;
  Rng rng(s.seed, 0xC11);
  std::vector<double> exact(2000);
  for (double& x : exact) x = sample_frechet(1.5, rng);
  const double self_ks = frechet_test(exact, 1.5).ks;
  const bool ok = report.spread <= 2.0 && lo >= 0.1 * first && ks <= 0.15 && self_ks < 0.05;
  return {ok, fmt::format("median spread {:.3f}, min / first {:.3f}, KS at n = 8 {:.4f}, self-test KS {:.4f}",
                          report.spread, lo / first, ks, self_ks)};
}

// 12. Degenerate branch of the dichotomy.
Verdict degenerate_branch(const Settings& s) {
  const DichotomyReport report = dichotomy_experiment(subgroup_model(), {8, 16}, 1.5, series_options(s));
  const double q = report.rows[1].median / report.rows[0].median;
  return {q < 0.5, fmt::format("median M_n / V_n^(1/alpha): n = 8 {:.4f}, n = 16 {:.4f}, ratio {:.4f} (needs < 0.5)",
                               report.rows[0].median, report.rows[1].median, q)};
}

// 13. Normalized ECG against the exact-dimensional integral.
Verdict comparability(const Settings& s) {
  const Model model = subgroup_model();
  const EcgOptions options{4000, s.seed, s.threads};
  double lo = INFINITY, hi = 0;
  for (int r = 6; r <= 12; ++r) {
    const double ratio = ecg_estimate(model, r, options).cn / fexr_integral(model, r, options).mean;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {lo >= 0.125 && hi <= 8.0, fmt::format("C_r / f_exr in [{:.4f}, {:.4f}] for r = 6..12", lo, hi)};
}

// 14. Byte-identical outputs across repeated runs and thread counts.
Verdict determinism(const Settings& s) {
  std::vector<ExperimentConfig> configs;
  {
    ExperimentConfig c;
    c.kind = ExperimentKind::Ecg;
    c.model = ModelKind::TreeSubgroup;
    c.n_max = 8;
    c.samples = 500;
    configs.push_back(c);
    c.model = ModelKind::CircleHarmonic;
    c.n_max = 5;
    configs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.kind = ExperimentKind::Maxima;
    c.model = ModelKind::TreeSubgroup;
    c.radii = {4, 6};
    c.replicates = 120;
    c.truncation = 200;
    c.samples = 500;
    configs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.kind = ExperimentKind::Growth;
    configs.push_back(c);
    c.kind = ExperimentKind::Sl2zExample;
    configs.push_back(c);
  }
  TempDir tmp;
  int compared = 0, differing = 0;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    std::vector<fs::path> dirs;
    for (int threads : {1, 8, 1}) {
      ExperimentConfig c = configs[k];
      c.seed = s.seed;
      c.threads = threads;
      c.out = tmp.path / fmt::format("{}-{}", k, dirs.size());
      run(c);
      dirs.push_back(c.out);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const auto name = entry.path().filename().string();
      if (name == "run_record.json" || name == "runs.jsonl") continue;
      const std::string reference = read_bytes(entry.path());
      for (std::size_t d = 1; d < dirs.size(); ++d) {
        ++compared;
        if (!fs::exists(dirs[d] / name) || read_bytes(dirs[d] / name) != reference) ++differing;
      }
    }
  }
  return {compared > 0 && differing == 0,
          fmt::format("{} differing of {} file comparisons across {} configurations at 1 and 8 threads", differing,
                      compared, configs.size())};
}

const std::vector<std::pair<std::string, std::function<Verdict(const Settings&)>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Verdict(const Settings&)>>> list{
      {"modular group radius log 3 example", modular_example},
      {"tree ECG exactness", tree_exactness},
      {"exact conformality", conformality},
      {"cocycle identities", cocycles},
      {"growth laws", growth_laws},
      {"subgroup growth", subgroup_growth},
      {"vanishing ECG trend", vanishing},
      {"non-vanishing ECG floor", nonvanishing},
      {"stable sampler", stable_sampler},
      {"field marginal identity", marginal},
      {"dichotomy, i.i.d.-like branch", iid_branch},
      {"dichotomy, degenerate branch", degenerate_branch},
      {"ECG versus exact-dimensional integral", comparability},
      {"determinism across runs and threads", determinism},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ecglab acceptance checks"};
  std::vector<int> selected;
  Settings settings;
  app.add_option("--criterion", selected, "criterion numbers to run (default: all)")->check(CLI::Range(1, 14));
  app.add_option("--seed", settings.seed, "base seed");
  app.add_option("--threads", settings.threads, "worker threads")->check(CLI::Range(1, 256));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty())
    for (int i = 1; i <= static_cast<int>(criteria().size()); ++i) selected.push_back(i);

  int failures = 0;
  for (int index : selected) {
    const auto& [name, check] = criteria()[static_cast<std::size_t>(index - 1)];
    Verdict v{false, ""};
    try {
      v = check(settings);
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    std::cout << fmt::format("{} criterion {}: {}: {}", v.passed ? "PASS" : "FAIL", index, name, v.detail) << std::endl;
    failures += !v.passed;
  }
  return failures == 0 ? 0 : 1;
}
