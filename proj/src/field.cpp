#include "ecglab/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "ecglab/errors.hpp"
#include "ecglab/parallel.hpp"

namespace ecglab {

double b_n(double abar, double alpha) {
  if (!(abar > 0)) throw std::invalid_argument("abar must be positive");
  StableParams{alpha, 1.0}.validate();
  return std::pow(abar, 1.0 / alpha);
}

TiltedDraw sample_tilted_boundary(const Model& model, int n, Rng& rng) {
  TiltedDraw draw;
  std::vector<double> profile;
  while (true) {
    ++draw.proposals;
    BoundaryPoint xi = model.sample(rng, n + 1);
    model.log_ratio_profile(xi, n, profile);
    const double log_ratio = profile[n];
    if (rng.uniform() < std::exp(log_ratio)) {
      draw.point = std::move(xi);
      draw.log_ratio = log_ratio;
      return draw;
    }
    if (draw.proposals >= 100000)
      throw SamplerCollapse(fmt::format("tilted sampler accepted nothing in {} proposals at n = {}", draw.proposals, n));
  }
}

SeriesRealization draw_series(const Model& model, int n, double alpha, double abar, std::size_t truncation, Rng& rng) {
  StableParams{alpha, 1.0}.validate();
  if (truncation < 1) throw std::invalid_argument("truncation must be >= 1");
  SeriesRealization series;
  series.n = n;
  series.alpha = alpha;
  series.b_n = b_n(abar, alpha);
  series.scale = series.b_n * std::pow(c_alpha(alpha), 1.0 / alpha);
  series.terms.reserve(truncation);
  double gamma = 0.0;
  for (std::size_t j = 0; j < truncation; ++j) {
    SeriesTerm term;
    gamma += rng.exponential();
    term.gamma = gamma;
    term.weight = rng.sign() * std::pow(gamma, -1.0 / alpha);
    TiltedDraw draw = sample_tilted_boundary(model, n, rng);
    series.proposals += draw.proposals;
    if (series.proposals >= 10000 && static_cast<double>(j + 1) < 1e-3 * static_cast<double>(series.proposals))
      throw SamplerCollapse(fmt::format("tilted acceptance rate {:.2g} below 1e-3 at n = {}",
                                        static_cast<double>(j + 1) / static_cast<double>(series.proposals), n));
    term.point = std::move(draw.point);
    term.log_ratio = draw.log_ratio;
    series.terms.push_back(std::move(term));
  }
  return series;
}

namespace {

std::size_t used_terms(const SeriesRealization& series, std::size_t terms) {
  if (terms == 0) return series.terms.size();
  if (terms > series.terms.size()) throw std::invalid_argument("more terms requested than drawn");
  return terms;
}

}  // namespace

double field_value(const Model& model, const SeriesRealization& series, const GroupElement& g, std::size_t terms) {
  const std::size_t count = used_terms(series, terms);
  const double log_volume = model.log_volume(series.n);
  double sum = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const auto& t = series.terms[j];
    const double log_d = model.evaluator().log_derivative(g, t.point);
    sum += t.weight * std::exp((log_d - t.log_ratio - log_volume) / series.alpha);
  }
  return series.scale * sum;
}

FieldSample simulate_field(const Model& model, const SeriesRealization& series) {
  FieldSample field;
  field.elements = model.ball_elements(series.n);
  field.values.reserve(field.elements.size());
  for (const auto& g : field.elements) field.values.push_back(field_value(model, series, g));
  return field;
}

double partial_maxima(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("partial maximum of an empty field");
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double partial_maxima(const FieldSample& field) { return partial_maxima(field.values); }

namespace {

// Prefix trie of the U_j truncated at the radius, with S(u) = sum of the
// reduced weights of the terms passing through u.
struct TermTrie {
  struct Node {
    double s = 0.0;
    Letter letter = 0;
    int depth = 0;
    std::vector<int> children;
  };
  std::vector<Node> nodes;

  int child(int node, Letter x) const {
    for (int c : nodes[node].children)
      if (nodes[c].letter == x) return c;
    return -1;
  }
};

double tree_field_maximum(const Model& model, const SeriesRealization& series, int radius, std::size_t count) {
  const double v = model.dimension();
  const double alpha = series.alpha;
  const double log_volume = model.log_volume(series.n);
  TermTrie trie;
  trie.nodes.emplace_back();
  for (std::size_t j = 0; j < count; ++j) {
    const auto& t = series.terms[j];
    const double w = t.weight * std::exp(-(t.log_ratio + log_volume) / alpha);
    const auto& word = std::get<ReducedWord>(t.point);
    int node = 0;
    trie.nodes[0].s += w;
    for (int k = 0; k < radius; ++k) {
      int c = trie.child(node, word[k]);
      if (c < 0) {
        c = static_cast<int>(trie.nodes.size());
        TermTrie::Node fresh;
        fresh.letter = word[k];
        fresh.depth = k + 1;
        trie.nodes.push_back(std::move(fresh));
        trie.nodes[node].children.push_back(c);
      }
      node = c;
      trie.nodes[node].s += w;
    }
  }

  // P(u) = sum_j w_j exp(v beta_{U_j}(u) / alpha), with
  // P(u x) = e^{-v/alpha} P(u) + S(u x) (e^{v k/alpha} - e^{v (k-2)/alpha}), k = |u x|.
  const SubgroupSpec& spec = model.spec();
  const ReturnDistance& returns = model.returns();
  const double step = std::exp(-v / alpha);
  double best = 0.0;
  struct Frame {
    int node;
    double p;
    GroupImage image;
  };
  std::vector<Frame> stack{{0, trie.nodes[0].s, spec.identity()}};
  std::vector<Letter> excluded;
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const auto& node = trie.nodes[f.node];
    if (spec.is_identity(f.image)) {
      best = std::max(best, std::abs(f.p));
    } else {
      excluded.clear();
      for (int c : node.children) excluded.push_back(trie.nodes[c].letter);
      if (const auto len = returns.exit_length(f.image, node.letter, excluded, radius - node.depth))
        best = std::max(best, std::abs(f.p) * std::exp(-v * *len / alpha));
    }
    for (int c : node.children) {
      const auto& ch = trie.nodes[c];
      const double k = ch.depth;
      const double p = step * f.p + ch.s * (std::exp(v * k / alpha) - std::exp(v * (k - 2) / alpha));
      stack.push_back({c, p, spec.apply(f.image, ch.letter)});
    }
  }
  return series.scale * best;
}

double circle_field_maximum(const Model& model, const SeriesRealization& series, int radius, std::size_t count) {
  // Values depend on g only through the orbit point g.i.
  const auto ball = enumerate_ball(static_cast<double>(radius), static_cast<double>(model.max_n()));
  std::map<OrbitPointKey, UnimodularMatrix> first;
  for (const auto& g : ball) first.emplace(orbit_point(g), g);
  std::vector<UnimodularMatrix> representatives;
  for (const auto& [key, g] : first) representatives.push_back(g);
  double best = 0.0;
  std::vector<double> values(representatives.size(), 0.0);
  const double log_volume = model.log_volume(series.n);
  for (std::size_t j = 0; j < count; ++j) {
    const auto& t = series.terms[j];
    const auto& xi = std::get<CirclePoint>(t.point);
    for (std::size_t i = 0; i < representatives.size(); ++i) {
      const double log_d = std::log(poisson_ratio(representatives[i], xi));
      values[i] += t.weight * std::exp((log_d - t.log_ratio - log_volume) / series.alpha);
    }
  }
  for (double value : values) best = std::max(best, std::abs(value));
  return series.scale * best;
}

}  // namespace

double field_maximum(const Model& model, const SeriesRealization& series, int radius, std::size_t terms) {
  if (radius < 0 || radius > series.n) throw std::invalid_argument("radius outside [0, n]");
  const std::size_t count = used_terms(series, terms);
  if (model.is_tree()) return tree_field_maximum(model, series, radius, count);
  return circle_field_maximum(model, series, radius, count);
}

std::vector<double> MaximaSample::over_volume() const {
  std::vector<double> out;
  for (double m : maxima) out.push_back(m / v_n_root);
  return out;
}

std::vector<double> MaximaSample::over_b_n() const {
  std::vector<double> out;
  for (double m : maxima) out.push_back(m / b_n);
  return out;
}

double estimate_abar(const Model& model, int n, const SeriesOptions& options) {
  if (model.kind() == ModelKind::TreeFull) return model.volume(n);
  EcgOptions ecg;
  ecg.samples = options.abar_samples;
  ecg.seed = derive_seed(options.seed, 0xABA0u + static_cast<std::uint64_t>(n));
  ecg.threads = options.threads;
  return ecg_estimate(model, n, ecg).abar;
}

MaximaSample sample_maxima(const Model& model, int n, double alpha, const SeriesOptions& options) {
  if (options.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  MaximaSample out;
  out.n = n;
  out.alpha = alpha;
  out.v_n_root = std::exp(model.log_volume(n) / alpha);
  const double abar = estimate_abar(model, n, options);
  out.b_n = b_n(abar, alpha);
  out.maxima.assign(options.replicates, 0.0);
  std::vector<std::size_t> accepted(options.replicates), proposed(options.replicates);
  const std::uint64_t stream_seed = derive_seed(options.seed, static_cast<std::uint64_t>(n));
  parallel_for(options.replicates, options.threads, [&](std::size_t r) {
    Rng rng(stream_seed, r);
    const SeriesRealization series = draw_series(model, n, alpha, abar, options.truncation, rng);
    out.maxima[r] = field_maximum(model, series, n);
    accepted[r] = series.terms.size();
    proposed[r] = series.proposals;
  });
  std::size_t a = 0, p = 0;
  for (std::size_t r = 0; r < options.replicates; ++r) {
    a += accepted[r];
    p += proposed[r];
  }
  out.acceptance_rate = p ? static_cast<double>(a) / static_cast<double>(p) : 0.0;
  return out;
}

FrechetFit frechet_test(std::span<const double> normalized, double alpha) {
  if (normalized.size() < 100) throw std::invalid_argument("Frechet fit needs at least 100 replicates");
  std::vector<double> values(normalized.begin(), normalized.end());
  if (std::all_of(values.begin(), values.end(), [](double x) { return x == 0.0; }))
    throw std::invalid_argument("degenerate sample: all maxima are zero");
  FrechetFit fit;
  fit.kappa = median(values) / std::pow(c_alpha(alpha) / std::numbers::ln2, 1.0 / alpha);
  for (double& x : values) x /= fit.kappa;
  fit.ks = ks_statistic(std::move(values), [alpha](double x) { return frechet_cdf(x, alpha); });
  return fit;
}

FrechetFit frechet_test(const MaximaSample& sample) { return frechet_test(sample.over_b_n(), sample.alpha); }

DichotomyReport dichotomy_experiment(const Model& model, const std::vector<int>& radii, double alpha,
                                     const SeriesOptions& options, const DichotomyOptions& verdict) {
  if (radii.empty()) throw std::invalid_argument("empty radius list");
  DichotomyReport report;
  report.model = model.description();
  report.alpha = alpha;
  for (int n : radii) {
    MaximaSample sample = sample_maxima(model, n, alpha, options);
    const auto scaled = sample.over_volume();
    DichotomyRow row;
    row.n = n;
    row.median = median(scaled);
    row.q1 = quantile(scaled, 0.25);
    row.q3 = quantile(scaled, 0.75);
    row.median_over_b = median(sample.over_b_n());
    row.acceptance_rate = sample.acceptance_rate;
    if (sample.maxima.size() >= 100) {
      const FrechetFit fit = frechet_test(sample);
      row.fitted = true;
      row.kappa = fit.kappa;
      row.ks = fit.ks;
    }
    report.rows.push_back(row);
    report.samples.push_back(std::move(sample));
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& row : report.rows) {
    lo = std::min(lo, row.median);
    hi = std::max(hi, row.median);
  }
  const double first = report.rows.front().median;
  const double last = report.rows.back().median;
  report.spread = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  report.decay = last > 0 ? first / last : std::numeric_limits<double>::infinity();
  if (options.replicates < 2 || report.rows.size() < 2)
    report.verdict = "inconclusive";
  else if (report.decay >= verdict.degenerate_factor)
    report.verdict = "degenerate";
  else if (report.spread <= verdict.iid_band && lo > verdict.floor_fraction * first && lo > 0)
    report.verdict = "iid-like";
  else
    report.verdict = "inconclusive";
  return report;
}

void DichotomyReport::write_csv(std::ostream& out) const {
  out << "n,median_over_volume,q1,q3,median_over_b,acceptance_rate,kappa,ks\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},", r.n, r.median, r.q1, r.q3, r.median_over_b,
                       r.acceptance_rate);
    if (r.fitted)
      out << fmt::format("{:.17g},{:.17g}\n", r.kappa, r.ks);
    else
      out << ",\n";
  }
}

nlohmann::json DichotomyReport::summary() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row = {{"n", r.n},
                          {"median_over_volume", r.median},
                          {"q1", r.q1},
                          {"q3", r.q3},
                          {"median_over_b", r.median_over_b},
                          {"acceptance_rate", r.acceptance_rate}};
    row["kappa"] = r.fitted ? nlohmann::json(r.kappa) : nlohmann::json(nullptr);
    row["ks"] = r.fitted ? nlohmann::json(r.ks) : nlohmann::json(nullptr);
    rows_json.push_back(row);
  }
  return {{"model", model}, {"alpha", alpha},   {"verdict", verdict},
          {"spread", spread}, {"decay", decay}, {"rows", rows_json}};
}

double series_tail_proxy(std::size_t truncation, double alpha) {
  const double s = 1.0 / alpha;
  if (s <= 1.0) return std::numeric_limits<double>::infinity();
  const double j = static_cast<double>(truncation);
  return std::pow(j, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(j, -s) + s / 12.0 * std::pow(j, -s - 1.0);
}

TruncationDiagnostics truncation_check(const Model& model, int n, double alpha, const SeriesOptions& options) {
  TruncationDiagnostics out;
  out.truncation = options.truncation;
  const double abar = estimate_abar(model, n, options);
  std::vector<double> short_max(options.replicates), long_max(options.replicates);
  std::vector<double> gamma_ratio(options.replicates);
  const std::uint64_t stream_seed = derive_seed(options.seed, static_cast<std::uint64_t>(n));
  parallel_for(options.replicates, options.threads, [&](std::size_t r) {
    Rng rng(stream_seed, r);
    const SeriesRealization series = draw_series(model, n, alpha, abar, 2 * options.truncation, rng);
    short_max[r] = field_maximum(model, series, n, options.truncation);
    long_max[r] = field_maximum(model, series, n);
    gamma_ratio[r] = series.terms[options.truncation - 1].gamma / static_cast<double>(options.truncation);
  });
  out.median_j = median(short_max);
  out.median_2j = median(long_max);
  out.relative_change = std::abs(out.median_2j - out.median_j) / out.median_j;
  out.tail_proxy = series_tail_proxy(options.truncation, alpha);
  out.gamma_ratio = gamma_ratio.front();
  out.gamma_flag = std::abs(out.gamma_ratio - 1.0) >= 0.2;
  return out;
}

}  // namespace ecglab
