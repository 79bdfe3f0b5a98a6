#include "ecglab/validate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "ecglab/boundary.hpp"
#include "ecglab/ecg.hpp"
#include "ecglab/field.hpp"
#include "ecglab/parallel.hpp"
#include "ecglab/stable.hpp"
#include "ecglab/subgroup.hpp"
#include "ecglab/word.hpp"

namespace ecglab {

namespace {

struct Outcome {
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

ReducedWord random_word(Rng& rng, int rank, int max_length) {
  const auto length = static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(max_length) + 1));
  return TreeBoundarySampler(rank).sample(rng, length).prefix(length);
}

UnimodularMatrix random_matrix(Rng& rng, int max_letters) {
  const UnimodularMatrix gens[] = {UnimodularMatrix::S(), UnimodularMatrix::T(), UnimodularMatrix::T().inverse()};
  UnimodularMatrix g;
  const auto length = rng.uniform_index(static_cast<std::uint64_t>(max_letters) + 1);
  for (std::uint64_t i = 0; i < length; ++i) g = g * gens[rng.uniform_index(3)];
  return g;
}

Outcome ball_growth() {
  for (int n = 0; n <= 10; ++n) {
    const auto size = ball(2, n).size();
    const double expected = 2.0 * std::pow(3.0, n) - 1.0;
    if (static_cast<double>(size) != expected || BigInt(size) != ball_size(2, n))
      return {false, static_cast<double>(size), expected, fmt::format("n = {}", n)};
  }
  return {true, 0, 0, "|B_n| = 2 3^n - 1 for n <= 10"};
}

Outcome group_laws(std::uint64_t seed) {
  Rng rng(seed, 1);
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto u = random_word(rng, 2, 8), v = random_word(rng, 2, 8), w = random_word(rng, 2, 8);
    if (multiply(multiply(u, v), w) != multiply(u, multiply(v, w))) ++failures;
    if (!multiply(u, u.inverse()).is_identity()) ++failures;
    const std::size_t cp = gromov_product(u, v);
    if (2 * cp != u.length() + v.length() - multiply(u.inverse(), v).length()) ++failures;
  }
  return {failures == 0, static_cast<double>(failures), 0, "associativity, inverses, Gromov product on 1000 triples"};
}

Outcome subgroup_counts() {
  for (const char* text : {"z:1,0", "c2c3:s,t"}) {
    const SubgroupSpec spec = SubgroupSpec::parse(2, text);
    std::vector<long> brute(9, 0);
    for (const auto& w : ball(2, 8))
      if (spec.contains(w.letters()))
        for (std::size_t m = w.length(); m <= 8; ++m) ++brute[m];
    for (int m = 0; m <= 8; ++m)
      if (subgroup_ball_count(spec, m) != brute[static_cast<std::size_t>(m)])
        return {false, static_cast<double>(m), 8, fmt::format("{} differs at m = {}", text, m)};
  }
  const SubgroupSpec z = SubgroupSpec::kernel_to_z({1, 0});
  const bool small = subgroup_ball_count(z, 2) == 5 && subgroup_ball_count(z, 3) == 11;
  return {small, 0, 0, "dynamic program equals enumeration for m <= 8; V_H(2) = 5, V_H(3) = 11"};
}

Outcome growth_ratio_monotone() {
  const auto series = growth_ratio_series(SubgroupSpec::kernel_to_z({1, 0}), int_range(5, 30));
  for (std::size_t i = 1; i < series.size(); ++i)
    if (series[i].ratio > series[i - 1].ratio)
      return {false, static_cast<double>(series[i].m), 0, "ratio increases"};
  return {true, 0, 0, "V_H(m) / 3^m non-increasing for m = 5..30"};
}

Outcome growth_ratio_halving() {
  const auto series = growth_ratio_series(SubgroupSpec::kernel_to_z({1, 0}), {10, 30});
  const double q = to_double(series[1].ratio / series[0].ratio);
  return {q < 0.5, q, 0.5, "ratio(30) / ratio(10)"};
}

Outcome return_distance_vs_trie() {
  const SubgroupSpec spec = SubgroupSpec::kernel_to_z({1, 0});
  const ReturnDistance returns(spec, 12);
  const int r = 6;
  const OrbitTrie orbit = subgroup_ball_elements(spec, r);
  int mismatches = 0;
  for (const auto& x : ball(2, r))
    if (static_cast<int>(x.length()) == r && distance_to_subgroup_ball(returns, x.letters(), r) != orbit.distance_to(x.letters()))
      ++mismatches;
  return {mismatches == 0, static_cast<double>(mismatches), 0, "distance to H cap B_6 over the radius-6 sphere"};
}

Outcome cylinder_consistency() {
  const bool ok = CylinderMeasure::uniform(2, 6).consistent() && CylinderMeasure::uniform(3, 4).consistent();
  return {ok, 0, 0, "children sum to parent, levels sum to 1"};
}

Outcome conformality() {
  const auto words = ball(2, 3);
  int failures = 0;
  for (const auto& g : words)
    for (const auto& w : words)
      if (!conformality_check(2, g, w)) ++failures;
  return {failures == 0, static_cast<double>(failures), 0,
          fmt::format("{} pairs with |g|, |w| <= 3", words.size() * words.size())};
}

Outcome pushforward_mass() {
  const auto level = ball(2, 2);
  for (const auto& g : ball(2, 3)) {
    Rational total = 0;
    for (const auto& w : level)
      if (w.length() == 2) total += pushforward_cylinder(2, g, w);
    if (total != 1) return {false, to_double(total), 1, "pushforward of " + g.to_string()};
    if (integrate_rn_over_cylinder(2, g, ReducedWord(2)) != 1)
      return {false, 0, 1, "integral of D_g is not 1 for " + g.to_string()};
  }
  return {true, 1, 1, "g_* mu is a probability measure and integrates D_g to 1, |g| <= 3"};
}

Outcome patterson_normalized() {
  const EmpiricalPattersonMeasure mu(SubgroupSpec::kernel_to_z({1, 0}), 12, std::log(3.0), 6);
  double total = 0, lowest = 1;
  for (std::size_t i = 0; i < mu.cylinder_count(); ++i) {
    const double w = mu.weight(mu.cylinder_word(i).letters());
    total += w;
    lowest = std::min(lowest, w);
  }
  return {std::abs(total - 1.0) < 1e-12 && lowest >= 0.0, total, 1.0, "cylinder weights sum to 1"};
}

Outcome cocycle_tree(std::uint64_t seed) {
  Rng rng(seed, 2);
  const RnEvaluator rn = RnEvaluator::tree_full(2);
  const TreeBoundarySampler sampler(2);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto g = random_word(rng, 2, 8), h = random_word(rng, 2, 8);
    const ReducedWord xi = sampler.sample(rng, g.length() + h.length() + 2);
    worst = std::max(worst, cocycle_check(rn, g, h, xi));
  }
  return {worst == 0.0, worst, 0.0, "1000 random triples"};
}

Outcome cocycle_circle(std::uint64_t seed, const RnEvaluator& rn, std::uint64_t stream) {
  Rng rng(seed, stream);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto g = random_matrix(rng, 6), h = random_matrix(rng, 6);
    worst = std::max(worst, cocycle_check(rn, g, h, sample_harmonic(rng)));
  }
  return {worst <= 1e-10, worst, 1e-10, "1000 random triples, log residual"};
}

Outcome sl2z_example() {
  const auto points = orbit_points(enumerate_ball(std::log(3.0)));
  const std::set<std::pair<long, long>> expected{{-1, 1}, {-1, 2}, {0, 1}, {1, 1}, {1, 2}};
  std::set<std::pair<long, long>> found;
  for (const auto& k : points) found.insert({k.p, k.q});
  double a = 0;
  for (const auto& g : enumerate_ball(std::log(3.0))) a = std::max(a, rn_lebesgue(g, CirclePoint{2.0, false}));
  const bool ok = found == expected && std::abs(a - 1.0) <= 1e-12;
  return {ok, a, 1.0, fmt::format("{} orbit points; max Lebesgue derivative at 2", points.size())};
}

Outcome sl2z_growth() {
  double lo = INFINITY, hi = 0;
  for (int n = 4; n <= 9; ++n) {
    const double scaled = static_cast<double>(orbit_points(enumerate_ball(n)).size()) * std::exp(-n);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  return {hi / lo <= 3.0, hi / lo, 3.0, "max/min of count e^-n over n = 4..9"};
}

Outcome ecg_tree_exact(const ValidationOptions& o) {
  const Model model = Model::tree_full(2);
  EcgOptions options{1000, o.seed, o.threads};
  double worst = 0;
  for (const auto& p : ecg_estimate(model, int_range(1, 10), options)) {
    worst = std::max(worst, std::abs(p.cn - 1.0));
    if (p.stderr_cn > 0) worst = std::max(worst, p.stderr_cn);
  }
  return {worst <= 1e-12, worst, 1e-12, "C_n = 1 with zero variance for n = 1..10"};
}

Outcome pointwise_max_monotone(std::uint64_t seed) {
  const Model model = Model::tree_subgroup(SubgroupSpec::kernel_to_z({1, 0}), MeasureChoice::Patterson);
  Rng rng(seed, 3);
  std::vector<double> profile;
  int violations = 0;
  for (int i = 0; i < 200; ++i) {
    model.log_ratio_profile(model.sample(rng, 16), 16, profile);
    for (int n = 1; n <= 16; ++n)
      if (profile[n] + model.dimension() * n < profile[n - 1] + model.dimension() * (n - 1) - 1e-12) ++violations;
  }
  return {violations == 0, static_cast<double>(violations), 0, "A_n(xi) non-decreasing in n on 200 samples"};
}

Outcome ecg_thread_invariance(std::uint64_t seed) {
  const Model model = Model::tree_subgroup(SubgroupSpec::kernel_to_z({1, 0}), MeasureChoice::Patterson);
  const auto one = ecg_estimate(model, int_range(2, 8), {500, seed, 1});
  const auto many = ecg_estimate(model, int_range(2, 8), {500, seed, 8});
  bool same = true;
  for (std::size_t i = 0; i < one.size(); ++i)
    same = same && one[i].abar == many[i].abar && one[i].stderr_abar == many[i].stderr_abar;
  return {same, 0, 0, "bitwise equal estimates at 1 and 8 threads"};
}

Outcome ecg_vanishing(const ValidationOptions& o) {
  const Model model = Model::tree_subgroup(SubgroupSpec::kernel_to_z({1, 0}), MeasureChoice::Patterson);
  const EcgCurve curve = ecg_curve(model, int_range(4, 20), {4000, o.seed, o.threads});
  const double c5 = curve.points[1].cn, c20 = curve.points.back().cn;
  const bool ok = curve.classification == Classification::Vanishing && c20 < c5 / 2;
  return {ok, c20 / c5, 0.5, fmt::format("classified {}; C_20 / C_5", to_string(curve.classification))};
}

Outcome ecg_nonvanishing(const ValidationOptions& o) {
  const Model model = Model::circle_harmonic();
  const EcgCurve curve = ecg_curve(model, int_range(2, 8), {4000, o.seed, o.threads});
  double lowest = INFINITY;
  for (const auto& p : curve.points) lowest = std::min(lowest, p.cn);
  const bool ok = lowest >= 0.01 && curve.classification == Classification::Nonvanishing;
  return {ok, lowest, 0.01, fmt::format("classified {}; min C_n", to_string(curve.classification))};
}

Outcome fexr_comparability(const ValidationOptions& o) {
  const Model model = Model::tree_subgroup(SubgroupSpec::kernel_to_z({1, 0}), MeasureChoice::Patterson);
  const EcgOptions options{4000, o.seed, o.threads};
  double lo = INFINITY, hi = 0;
  for (int r = 6; r <= 12; ++r) {
    const double ratio = ecg_estimate(model, r, options).cn / fexr_integral(model, r, options).mean;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {lo >= 0.125 && hi <= 8.0, hi / lo, 64.0, fmt::format("C_r / f_exr in [{:.3f}, {:.3f}], r = 6..12", lo, hi)};
}

Outcome c_alpha_values() {
  const double e1 = std::abs(c_alpha(0.5) - std::sqrt(2.0 / std::numbers::pi));
  const double e2 = std::abs(c_alpha(1.5) - 1.0 / std::sqrt(2.0 * std::numbers::pi));
  const double e3 = std::abs(c_alpha(1.0) - 2.0 / std::numbers::pi);
  const double worst = std::max({e1, e2, e3});
  return {worst < 1e-7, worst, 1e-7, "c_alpha at 0.5, 1 and 1.5"};
}

Outcome stable_cf(std::uint64_t seed) {
  double worst = 0;
  for (double alpha : {0.7, 1.2, 1.7}) {
    Rng rng(seed, 4);
    std::vector<double> draws(100000);
    for (double& x : draws) x = sample_sas({alpha, 1.0}, rng);
    for (double theta : {0.5, 1.0, 2.0})
      worst = std::max(worst, std::abs(empirical_cf(draws, theta) - std::exp(-std::pow(theta, alpha))));
  }
  return {worst < 0.02, worst, 0.02, "10^5 draws, alpha in {0.7, 1.2, 1.7}, theta in {0.5, 1, 2}"};
}

Outcome stable_tail(std::uint64_t seed) {
  double lo = INFINITY, hi = 0;
  for (double alpha : {0.7, 1.2, 1.7}) {
    Rng rng(seed, 5);
    std::vector<double> draws(100000);
    for (double& x : draws) x = std::abs(sample_sas({alpha, 1.0}, rng));
    const double lambda = quantile(draws, 0.995);
    const double ratio = 0.005 * std::pow(lambda, alpha) / c_alpha(alpha);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {lo >= 0.7 && hi <= 1.3, hi, 1.3, fmt::format("tail ratio in [{:.3f}, {:.3f}]", lo, hi)};
}

Outcome marginal_identity(const ValidationOptions& o) {
  const Model model = Model::tree_full(2);
  const int n = 6;
  const double alpha = 1.5;
  const std::size_t replicates = 10000;
  const ReducedWord identity(2);
  std::vector<double> field(replicates), direct(replicates);
  const std::uint64_t stream = derive_seed(o.seed, 0xF1E1D);
  parallel_for(replicates, o.threads, [&](std::size_t r) {
    Rng rng(stream, r);
    const SeriesRealization series = draw_series(model, n, alpha, model.volume(n), 1000, rng);
    field[r] = field_value(model, series, identity);
  });
  Rng rng(o.seed, 6);
  for (double& x : direct) x = sample_sas({alpha, 1.0}, rng);
  const double ks = ks_two_sample(field, direct);
  return {ks <= 0.05, ks, 0.05, "Y_e against SaS(1), 10^4 each"};
}

Outcome frechet_self_test(std::uint64_t seed) {
  Rng rng(seed, 7);
  std::vector<double> draws(2000);
  for (double& x : draws) x = sample_frechet(1.5, rng);
  const FrechetFit fit = frechet_test(draws, 1.5);
  return {fit.ks < 0.05, fit.ks, 0.05, fmt::format("exact Frechet draws, kappa {:.3f}", fit.kappa)};
}

SeriesOptions dichotomy_options(const ValidationOptions& o) {
  SeriesOptions s;
  s.truncation = 1000;
  s.replicates = 400;
  s.seed = o.seed;
  s.threads = o.threads;
  s.abar_samples = 4000;
  return s;
}

Outcome dichotomy_iid(const ValidationOptions& o) {
  const DichotomyReport report = dichotomy_experiment(Model::tree_full(2), {4, 6, 8}, 1.5, dichotomy_options(o));
  const double first = report.rows.front().median;
  double lo = INFINITY;
  for (const auto& r : report.rows) lo = std::min(lo, r.median);
  const double ks = report.rows.back().ks;
  const bool ok = report.spread <= 2.0 && lo >= 0.1 * first && ks <= 0.15;
  return {ok, ks, 0.15, fmt::format("spread {:.3f}, verdict {}, KS at n = 8", report.spread, report.verdict)};
}

Outcome dichotomy_degenerate(const ValidationOptions& o) {
  const Model model = Model::tree_subgroup(SubgroupSpec::kernel_to_z({1, 0}), MeasureChoice::Patterson);
  const DichotomyReport report = dichotomy_experiment(model, {8, 16}, 1.5, dichotomy_options(o));
  const double q = report.rows[1].median / report.rows[0].median;
  return {q < 0.5, q, 0.5, "median M_16 / V_16^(1/alpha) over the n = 8 value"};
}

Outcome truncation_sensitivity(const ValidationOptions& o) {
  SeriesOptions s = dichotomy_options(o);
  s.replicates = 200;
  const TruncationDiagnostics t = truncation_check(Model::tree_full(2), 6, 1.5, s);
  return {t.relative_change < 0.05 && !t.gamma_flag, t.relative_change, 0.05,
          fmt::format("median change from J = {} to 2J", t.truncation)};
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& options,
                                        const std::function<void(const CheckResult&)>& progress) {
  const std::uint64_t seed = options.seed;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"ball_growth", [] { return ball_growth(); }},
      {"group_laws", [&] { return group_laws(seed); }},
      {"subgroup_counts", [] { return subgroup_counts(); }},
      {"growth_ratio_monotone", [] { return growth_ratio_monotone(); }},
      {"growth_ratio_halving", [] { return growth_ratio_halving(); }},
      {"return_distance_vs_trie", [] { return return_distance_vs_trie(); }},
      {"cylinder_consistency", [] { return cylinder_consistency(); }},
      {"conformality_exact", [] { return conformality(); }},
      {"pushforward_mass", [] { return pushforward_mass(); }},
      {"patterson_normalized", [] { return patterson_normalized(); }},
      {"cocycle_tree", [&] { return cocycle_tree(seed); }},
      {"cocycle_circle_harmonic", [&] { return cocycle_circle(seed, RnEvaluator::circle_harmonic(), 8); }},
      {"cocycle_circle_lebesgue", [&] { return cocycle_circle(seed, RnEvaluator::circle_lebesgue(), 9); }},
      {"sl2z_example", [] { return sl2z_example(); }},
      {"sl2z_orbit_growth", [] { return sl2z_growth(); }},
      {"ecg_tree_exact", [&] { return ecg_tree_exact(options); }},
      {"pointwise_max_monotone", [&] { return pointwise_max_monotone(seed); }},
      {"ecg_thread_invariance", [&] { return ecg_thread_invariance(seed); }},
      {"ecg_subgroup_vanishing", [&] { return ecg_vanishing(options); }},
      {"ecg_circle_nonvanishing", [&] { return ecg_nonvanishing(options); }},
      {"fexr_comparability", [&] { return fexr_comparability(options); }},
      {"c_alpha_values", [] { return c_alpha_values(); }},
      {"stable_characteristic_function", [&] { return stable_cf(seed); }},
      {"stable_tail_ratio", [&] { return stable_tail(seed); }},
      {"field_marginal_identity", [&] { return marginal_identity(options); }},
      {"frechet_self_test", [&] { return frechet_self_test(seed); }},
      {"dichotomy_iid_like", [&] { return dichotomy_iid(options); }},
      {"dichotomy_degenerate", [&] { return dichotomy_degenerate(options); }},
      {"truncation_sensitivity", [&] { return truncation_sensitivity(options); }},
  };
  std::vector<CheckResult> results;
  for (const auto& [name, check] : checks) {
    CheckResult result{name, false, 0.0, 0.0, ""};
    try {
      const Outcome o = check();
      result = {name, o.passed, o.value, o.threshold, o.detail};
    } catch (const std::exception& e) {
      result.detail = fmt::format("exception: {}", e.what());
    }
    if (progress) progress(result);
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace ecglab
