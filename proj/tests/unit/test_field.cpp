#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"

#include "ecglab/errors.hpp"
#include "ecglab/field.hpp"

using namespace ecglab;

namespace {

double max_abs_within(const Model& model, const SeriesRealization& series, int radius, std::size_t terms = 0) {
  double best = 0;
  for (const auto& g : model.ball_elements(radius)) best = std::max(best, std::abs(field_value(model, series, g, terms)));
  return best;
}

}  // namespace

TEST_CASE("normalizing constant") {
  CHECK(b_n(std::pow(3.0, 6), 1.5) == doctest::Approx(std::pow(3.0, 4)));
  CHECK(b_n(1.0, 0.7) == 1.0);
  CHECK_THROWS(b_n(0.0, 1.5));
  CHECK_THROWS(b_n(2.0, 2.0));
}

TEST_CASE("tilted sampler") {
  SUBCASE("full tree accepts every proposal") {
    Rng rng(71);
    const auto series = draw_series(Model::tree_full(2), 6, 1.5, std::pow(3.0, 6), 200, rng);
    CHECK(series.terms.size() == 200);
    CHECK(series.acceptance_rate() == 1.0);
  }
  SUBCASE("radius zero accepts every proposal") {
    const Model model = Model::tree_subgroup(SubgroupSpec::kernel_to_z({1, 0}), MeasureChoice::Patterson);
    Rng rng(72);
    for (int i = 0; i < 100; ++i) CHECK(sample_tilted_boundary(model, 0, rng).proposals == 1);
    for (int i = 0; i < 100; ++i) CHECK(sample_tilted_boundary(Model::circle_harmonic(), 0, rng).proposals == 1);
  }
  SUBCASE("circle acceptance rate matches the normalized ECG") {
    const Model model = Model::circle_harmonic();
    const auto ecg = ecg_estimate(model, 4, {20000, 73, 1});
    Rng rng(74);
    const auto series = draw_series(model, 4, 1.5, ecg.abar, 4000, rng);
    const double rate = series.acceptance_rate();
    const double se = std::sqrt(rate * (1 - rate) / static_cast<double>(series.proposals) + ecg.stderr_cn * ecg.stderr_cn);
    CHECK(std::abs(rate - ecg.cn) < 3 * se);
  }
  SUBCASE("the ratio carried by each term is the pointwise maximum over the volume") {
    const Model model = Model::tree_subgroup(SubgroupSpec::kernel_to_z({1, 0}), MeasureChoice::Patterson);
    Rng rng(75);
    const auto series = draw_series(model, 6, 1.5, 50.0, 50, rng);
    for (const auto& t : series.terms)
      CHECK(std::exp(t.log_ratio) == doctest::Approx(model.pointwise_max(6, t.point) / model.volume(6)));
  }
}

TEST_CASE("single-term field value") {
  const Model model = Model::tree_full(2);
  Rng rng(76);
  const auto series = draw_series(model, 4, 1.5, model.volume(4), 1, rng);
  const auto& t = series.terms.front();
  const double expected = std::pow(c_alpha(1.5), 1.0 / 1.5) * t.weight;
  CHECK(field_value(model, series, ReducedWord(2)) == doctest::Approx(expected));
  CHECK(std::abs(t.weight) == doctest::Approx(std::pow(t.gamma, -1.0 / 1.5)));
  CHECK_THROWS(field_value(model, series, ReducedWord(2), 2));
}

TEST_CASE("partial maxima") {
  CHECK(partial_maxima(std::vector<double>{-3, 1, 2}) == 3.0);
  CHECK_THROWS(partial_maxima(std::vector<double>{}));
}

TEST_CASE("fast field maximum equals brute force over the ball") {
  Rng rng(77);
  SUBCASE("full tree") {
    const Model model = Model::tree_full(2);
    const auto series = draw_series(model, 4, 1.5, model.volume(4), 300, rng);
    CHECK(field_maximum(model, series, 4) == doctest::Approx(partial_maxima(simulate_field(model, series))).epsilon(1e-10));
    for (int r = 0; r <= 4; ++r)
      CHECK(field_maximum(model, series, r) == doctest::Approx(max_abs_within(model, series, r)).epsilon(1e-10));
    CHECK(field_maximum(model, series, 4, 100) == doctest::Approx(max_abs_within(model, series, 4, 100)).epsilon(1e-10));
    CHECK_THROWS(field_maximum(model, series, 5));
  }
  SUBCASE("subgroup tree") {
    const Model model = Model::tree_subgroup(SubgroupSpec::kernel_to_z({1, 0}), MeasureChoice::Patterson);
    const auto series = draw_series(model, 6, 1.2, 40.0, 300, rng);
    CHECK(field_maximum(model, series, 6) == doctest::Approx(partial_maxima(simulate_field(model, series))).epsilon(1e-10));
  }
  SUBCASE("circle") {
    const Model model = Model::circle_harmonic();
    const auto series = draw_series(model, 3, 1.5, 10.0, 300, rng);
    CHECK(field_maximum(model, series, 3) == doctest::Approx(partial_maxima(simulate_field(model, series))).epsilon(1e-10));
  }
}

TEST_CASE("maxima grow with the ball") {
  const Model model = Model::tree_subgroup(SubgroupSpec::kernel_to_z({1, 0}), MeasureChoice::Patterson);
  Rng rng(78);
  for (int i = 0; i < 20; ++i) {
    const auto series = draw_series(model, 8, 1.5, 100.0, 200, rng);
    for (int r = 1; r <= 8; ++r) CHECK(field_maximum(model, series, r) >= field_maximum(model, series, r - 1));
  }
}

TEST_CASE("doubling the truncation extends the same series") {
  const Model model = Model::tree_full(2);
  Rng a(79, 3), b(79, 3);
  const auto short_series = draw_series(model, 5, 1.5, model.volume(5), 100, a);
  const auto long_series = draw_series(model, 5, 1.5, model.volume(5), 200, b);
  for (std::size_t j = 0; j < 100; ++j) {
    CHECK(short_series.terms[j].weight == long_series.terms[j].weight);
    CHECK(short_series.terms[j].gamma == long_series.terms[j].gamma);
  }
  CHECK(field_maximum(model, long_series, 5, 100) == doctest::Approx(field_maximum(model, short_series, 5)));
}

TEST_CASE("the field at the identity is symmetric") {
  const Model model = Model::tree_full(2);
  std::vector<double> values;
  for (std::size_t r = 0; r < 4000; ++r) {
    Rng rng(80, r);
    values.push_back(field_value(model, draw_series(model, 3, 1.5, model.volume(3), 200, rng), ReducedWord(2)));
  }
  CHECK(std::abs(median(values)) < 0.1);
}

TEST_CASE("Frechet fit") {
  CHECK_THROWS(frechet_test(std::vector<double>(99, 1.0), 1.5));
  CHECK_THROWS(frechet_test(std::vector<double>(200, 0.0), 1.5));
  // Exact Frechet quantiles give kappa 1 and a KS statistic near 1 / (2R).
  std::vector<double> grid;
  for (int i = 0; i < 1000; ++i) grid.push_back(frechet_quantile((i + 0.5) / 1000.0, 1.5));
  const FrechetFit fit = frechet_test(grid, 1.5);
  CHECK(fit.kappa == doctest::Approx(1.0).epsilon(0.01));
  CHECK(fit.ks < 0.005);
  // A rescaled sample is absorbed by kappa.
  for (double& x : grid) x *= 4.0;
  CHECK(frechet_test(grid, 1.5).kappa == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("dichotomy report") {
  SeriesOptions options;
  options.replicates = 1;
  options.truncation = 50;
  const auto single = dichotomy_experiment(Model::tree_full(2), {3, 5}, 1.5, options);
  CHECK(single.verdict == "inconclusive");
  CHECK_FALSE(single.rows.front().fitted);
  CHECK(single.summary()["rows"][0]["kappa"].is_null());
  std::ostringstream csv;
  single.write_csv(csv);
  CHECK(csv.str().rfind("n,median_over_volume", 0) == 0);
  CHECK_THROWS(dichotomy_experiment(Model::tree_full(2), {}, 1.5, options));
}

TEST_CASE("maxima are reproducible and thread-count invariant") {
  const Model model = Model::tree_subgroup(SubgroupSpec::kernel_to_z({1, 0}), MeasureChoice::Patterson);
  SeriesOptions options;
  options.replicates = 40;
  options.truncation = 100;
  options.abar_samples = 500;
  const auto one = sample_maxima(model, 5, 1.5, options);
  options.threads = 4;
  const auto four = sample_maxima(model, 5, 1.5, options);
  CHECK(one.maxima == four.maxima);
  CHECK(one.b_n == four.b_n);
  CHECK(one.acceptance_rate > 0.0);
  CHECK(one.acceptance_rate <= 1.0);
}

TEST_CASE("truncation tail proxy") {
  // Direct partial sum of j^(-1/alpha) from J + 1 to a far cutoff, plus the
  // integral remainder beyond it.
  const double alpha = 0.5, s = 1.0 / alpha;
  const std::size_t J = 50, far = 2000000;
  double direct = 0;
  for (std::size_t j = far; j > J; --j) direct += std::pow(static_cast<double>(j), -s);
  direct += std::pow(static_cast<double>(far), 1.0 - s) / (s - 1.0);
  CHECK(series_tail_proxy(J, alpha) == doctest::Approx(direct).epsilon(1e-6));
  CHECK(std::isinf(series_tail_proxy(J, 1.5)));
}

TEST_CASE("truncation diagnostics on the full tree") {
  SeriesOptions options;
  options.replicates = 100;
  options.truncation = 500;
  const auto t = truncation_check(Model::tree_full(2), 4, 1.5, options);
  CHECK(t.truncation == 500);
  CHECK(t.relative_change < 0.05);
  CHECK_FALSE(t.gamma_flag);
}
