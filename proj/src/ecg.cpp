#include "ecglab/ecg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "ecglab/errors.hpp"
#include "ecglab/parallel.hpp"

namespace ecglab {

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::TreeFull: return "tree-full";
    case ModelKind::TreeSubgroup: return "tree-subgroup";
    case ModelKind::CircleHarmonic: return "circle-harmonic";
  }
  return "unknown";
}

const char* to_string(MeasureChoice measure) {
  return measure == MeasureChoice::Patterson ? "patterson" : "ambient";
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::Nonvanishing: return "nonvanishing";
    case Classification::Vanishing: return "vanishing";
    case Classification::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::vector<int> int_range(int first, int last) {
  std::vector<int> out;
  for (int n = first; n <= last; ++n) out.push_back(n);
  return out;
}

// ---------------------------------------------------------------------------
// Model

Model Model::tree_full(int rank, const ModelOptions& options) {
  Model m;
  m.kind_ = ModelKind::TreeFull;
  m.measure_ = MeasureChoice::Ambient;
  m.rank_ = rank;
  m.dimension_ = std::log(2.0 * rank - 1.0);
  m.max_n_ = options.max_n;
  m.spec_ = std::make_shared<const SubgroupSpec>(SubgroupSpec::full(rank));
  m.returns_ = std::make_shared<const ReturnDistance>(*m.spec_, options.max_n);
  m.evaluator_ = RnEvaluator(RnModel::TreeFull, m.dimension_);
  return m;
}

Model Model::tree_subgroup(const SubgroupSpec& spec, MeasureChoice measure, const ModelOptions& options) {
  Model m;
  m.kind_ = spec.is_full() ? ModelKind::TreeFull : ModelKind::TreeSubgroup;
  m.measure_ = measure;
  m.rank_ = spec.rank();
  m.max_n_ = options.max_n;
  m.spec_ = std::make_shared<const SubgroupSpec>(spec);
  if (spec.is_c2c3()) {
    // Not co-amenable: estimate v_H from exact counts.
    std::vector<double> counts;
    for (int k = 0; k <= std::min(options.caps.c2c3_max_radius, 14); ++k)
      counts.push_back(to_double(subgroup_ball_count(spec, k, options.caps)));
    m.dimension_ = growth_exponent(counts);
  } else {
    m.dimension_ = std::log(2.0 * spec.rank() - 1.0);
  }
  m.returns_ = std::make_shared<const ReturnDistance>(spec, options.max_n);
  m.evaluator_ = RnEvaluator(m.kind_ == ModelKind::TreeFull ? RnModel::TreeFull : RnModel::TreeSubgroup, m.dimension_);
  if (measure == MeasureChoice::Patterson && !spec.is_full()) {
    const double s = options.patterson_exponent.value_or(m.dimension_);
    m.patterson_ = std::make_shared<const EmpiricalPattersonMeasure>(spec, options.patterson_depth, s,
                                                                     options.cylinder_depth, options.caps);
  }
  return m;
}

Model Model::circle_harmonic(const ModelOptions& options) {
  Model m;
  m.kind_ = ModelKind::CircleHarmonic;
  m.measure_ = MeasureChoice::Ambient;
  m.rank_ = 0;
  m.dimension_ = 1.0;
  m.max_n_ = static_cast<int>(std::floor(options.circle_cap));
  m.evaluator_ = RnEvaluator::circle_harmonic();
  const auto ball = enumerate_ball(static_cast<double>(m.max_n_), options.circle_cap);
  std::map<OrbitPointKey, std::int64_t> points;
  for (const auto& g : ball) points.emplace(orbit_point(g), g.frobenius_sq());
  std::vector<std::pair<OrbitPointKey, std::int64_t>> sorted(points.begin(), points.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.second < y.second; });
  m.orbit_ = std::make_shared<const std::vector<std::pair<OrbitPointKey, std::int64_t>>>(std::move(sorted));
  return m;
}

std::string Model::description() const {
  if (kind_ == ModelKind::CircleHarmonic) return "circle-harmonic";
  if (kind_ == ModelKind::TreeFull) return fmt::format("tree-full(rank={})", rank_);
  return fmt::format("tree-subgroup(rank={}, subgroup={}, measure={})", rank_, spec_->to_string(), to_string(measure_));
}

BoundaryPoint Model::sample(Rng& rng, int depth) const {
  if (kind_ == ModelKind::CircleHarmonic) return sample_harmonic(rng);
  if (patterson_) return patterson_->sample(rng, static_cast<std::size_t>(depth));
  return TreeBoundarySampler(rank_).sample(rng, static_cast<std::size_t>(depth));
}

void Model::tree_busemann_profile(std::span<const Letter> xi, int n_max, std::vector<int>& best) const {
  if (n_max > max_n_) throw CapExceeded(fmt::format("radius {} exceeds the model's max_n {}", n_max, max_n_));
  if (static_cast<int>(xi.size()) < n_max)
    throw InsufficientDepth(fmt::format("boundary prefix depth {} below n = {}", xi.size(), n_max));
  // Divergence depth p contributes the value p - l at radius p + l, where l is
  // the shortest tail leaving the ray at p and landing in H.
  best.assign(n_max + 1, std::numeric_limits<int>::min());
  best[0] = 0;
  const SubgroupSpec& spec = *spec_;
  GroupImage q = spec.identity();
  for (int p = 1; p <= n_max; ++p) {
    q = spec.apply(q, xi[p - 1]);
    if (spec.is_identity(q)) {
      best[p] = std::max(best[p], p);
      continue;
    }
    const auto excluded = xi.subspan(static_cast<std::size_t>(p), static_cast<std::size_t>(p) < xi.size() ? 1 : 0);
    if (const auto len = returns_->exit_length(q, xi[p - 1], excluded, n_max - p))
      best[p + *len] = std::max(best[p + *len], p - *len);
  }
  for (int n = 1; n <= n_max; ++n) best[n] = std::max(best[n], best[n - 1]);
}

void Model::log_ratio_profile(const BoundaryPoint& xi, int n_max, std::vector<double>& out) const {
  if (n_max < 0) throw std::invalid_argument("radius must be non-negative");
  out.assign(n_max + 1, 0.0);
  if (is_tree()) {
    const auto& word = std::get<ReducedWord>(xi);
    std::vector<int> best;
    tree_busemann_profile(word.letters(), n_max, best);
    for (int n = 0; n <= n_max; ++n) out[n] = dimension_ * (best[n] - n);
    return;
  }
  if (n_max > max_n_) throw CapExceeded(fmt::format("radius {} exceeds the ball cap {}", n_max, max_n_));
  const auto& point = std::get<CirclePoint>(xi);
  if (point.infinite) throw std::invalid_argument("boundary point at infinity has measure zero");
  const double x = point.value;
  const double lift = 1.0 + x * x;
  const auto& orbit = *orbit_;
  std::size_t i = 0;
  double best = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const auto bound = static_cast<std::int64_t>(std::floor(2.0 * std::cosh(static_cast<double>(n)) + 1e-9));
    for (; i < orbit.size() && orbit[i].second <= bound; ++i) {
      const double p = static_cast<double>(orbit[i].first.p);
      const double q = static_cast<double>(orbit[i].first.q);
      const double gap = p - x * q;
      best = std::max(best, q * lift / (gap * gap + 1.0));
    }
    out[n] = std::log(best) - static_cast<double>(n);
  }
}

double Model::pointwise_max(int n, const BoundaryPoint& xi) const {
  if (is_tree()) return std::exp(dimension_ * max_busemann(n, std::get<ReducedWord>(xi).letters()));
  std::vector<double> profile;
  log_ratio_profile(xi, n, profile);
  return std::exp(profile[n] + log_volume(n));
}

int Model::max_busemann(int n, std::span<const Letter> xi) const {
  std::vector<int> best;
  tree_busemann_profile(xi, n, best);
  return best[n];
}

std::vector<GroupElement> Model::ball_elements(int n) const {
  std::vector<GroupElement> out;
  if (is_tree()) {
    if (spec_->is_full()) {
      for (auto& w : ball(rank_, n)) out.emplace_back(std::move(w));
    } else {
      for (auto& w : subgroup_ball_elements(*spec_, n).words()) out.emplace_back(std::move(w));
    }
  } else {
    for (const auto& g : enumerate_ball(static_cast<double>(n), static_cast<double>(max_n_))) out.emplace_back(g);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Estimation

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& values) {
  MeanSe out;
  if (values.empty()) return out;
  double sum = 0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  return out;
}

// Fills values[i] for sample i using per-batch RNG streams.
void for_each_sample(const EcgOptions& options, const std::function<void(Rng&, std::size_t)>& body) {
  const std::size_t batch = std::max<std::size_t>(options.batch_size, 1);
  const std::size_t batches = (options.samples + batch - 1) / batch;
  parallel_for(batches, options.threads, [&](std::size_t b) {
    Rng rng(options.seed, b);
    const std::size_t end = std::min(options.samples, (b + 1) * batch);
    for (std::size_t i = b * batch; i < end; ++i) body(rng, i);
  });
}

}  // namespace

std::vector<EcgPoint> ecg_estimate(const Model& model, const std::vector<int>& radii, const EcgOptions& options) {
  if (radii.empty()) throw std::invalid_argument("empty radius list");
  if (!std::is_sorted(radii.begin(), radii.end()) || radii.front() < 0)
    throw std::invalid_argument("radii must be non-negative and ascending");
  if (options.samples < 2) throw std::invalid_argument("ECG estimation needs at least 2 samples");
  const int n_max = radii.back();
  std::vector<std::vector<double>> ratios(radii.size(), std::vector<double>(options.samples));
  for_each_sample(options, [&](Rng& rng, std::size_t i) {
    const BoundaryPoint xi = model.sample(rng, n_max + 1);
    std::vector<double> profile;
    model.log_ratio_profile(xi, n_max, profile);
    for (std::size_t k = 0; k < radii.size(); ++k) ratios[k][i] = std::exp(profile[radii[k]]);
  });
  std::vector<EcgPoint> points;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const MeanSe ms = mean_and_se(ratios[k]);
    EcgPoint p;
    p.n = radii[k];
    p.cn = ms.mean;
    p.stderr_cn = ms.se;
    p.abar = ms.mean * model.volume(radii[k]);
    p.stderr_abar = ms.se * model.volume(radii[k]);
    p.samples = options.samples;
    points.push_back(p);
  }
  return points;
}

EcgPoint ecg_estimate(const Model& model, int n, const EcgOptions& options) {
  return ecg_estimate(model, std::vector<int>{n}, options).front();
}

double tail_log_slope(const std::vector<EcgPoint>& points) {
  if (points.size() < 2) return 0.0;
  const std::size_t begin = std::min(points.size() / 2, points.size() - 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(points.size() - begin);
  for (std::size_t i = begin; i < points.size(); ++i) {
    const double x = points[i].n;
    const double y = std::log(std::max(points[i].cn, std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = k * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (k * sxy - sx * sy) / den;
}

Classification classify(const std::vector<EcgPoint>& points, const Thresholds& thresholds) {
  if (points.size() < 2) return Classification::Inconclusive;
  const double slope = tail_log_slope(points);
  const std::size_t begin = std::min(points.size() / 2, points.size() - 2);
  double tail_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = begin; i < points.size(); ++i) tail_min = std::min(tail_min, points[i].cn);
  const bool nonvanishing = tail_min >= thresholds.floor && slope >= -thresholds.tail_slope;
  const bool vanishing =
      points.back().cn > 0 ? points.front().cn / points.back().cn >= thresholds.decay && slope < 0 : slope < 0;
  if (nonvanishing == vanishing) return Classification::Inconclusive;
  return nonvanishing ? Classification::Nonvanishing : Classification::Vanishing;
}

EcgCurve ecg_curve(const Model& model, const std::vector<int>& radii, const EcgOptions& options,
                   const Thresholds& thresholds) {
  EcgCurve curve;
  curve.model = model.description();
  curve.points = ecg_estimate(model, radii, options);
  curve.thresholds = thresholds;
  curve.tail_slope = tail_log_slope(curve.points);
  curve.classification = classify(curve.points, thresholds);
  return curve;
}

void EcgCurve::write_csv(std::ostream& out) const {
  out << "n,abar,stderr,cn,cn_stderr,samples\n";
  for (const auto& p : points)
    out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", p.n, p.abar, p.stderr_abar, p.cn, p.stderr_cn,
                       p.samples);
}

nlohmann::json EcgCurve::summary() const {
  nlohmann::json points_json = nlohmann::json::array();
  for (const auto& p : points)
    points_json.push_back({{"n", p.n}, {"abar", p.abar}, {"stderr", p.stderr_abar}, {"cn", p.cn},
                           {"cn_stderr", p.stderr_cn}, {"samples", p.samples}});
  return {{"model", model},
          {"classification", to_string(classification)},
          {"tail_log_slope", tail_slope},
          {"thresholds", {{"theta1_floor", thresholds.floor},
                          {"theta2_tail_slope", thresholds.tail_slope},
                          {"theta3_decay", thresholds.decay}}},
          {"points", points_json}};
}

FexrEstimate fexr_integral(const Model& model, int r, const EcgOptions& options) {
  if (!model.is_tree()) throw std::invalid_argument("f_exr integral is defined for tree models only");
  if (r < 0) throw std::invalid_argument("radius must be non-negative");
  FexrEstimate out;
  out.r = r;
  if (r == 0 || model.spec().is_full()) {
    out.mean = 1.0;
    return out;
  }
  const OrbitTrie orbit = subgroup_ball_elements(model.spec(), r);
  std::vector<double> values(options.samples);
  for_each_sample(options, [&](Rng& rng, std::size_t i) {
    const auto xi = std::get<ReducedWord>(model.sample(rng, r));
    const int d = orbit.distance_to(xi.letters().first(static_cast<std::size_t>(r)));
    values[i] = std::exp(-model.dimension() * d);
  });
  const MeanSe ms = mean_and_se(values);
  out.mean = ms.mean;
  out.stderr_mean = ms.se;
  return out;
}

std::vector<GrowthRatio> growth_ratio_series(const SubgroupSpec& spec, const std::vector<int>& ms,
                                             const SubgroupCaps& caps) {
  std::vector<GrowthRatio> out;
  for (int m : ms) {
    GrowthRatio g;
    g.m = m;
    g.count = subgroup_ball_count(spec, m, caps);
    g.ratio = Rational(g.count, big_pow(2 * spec.rank() - 1, static_cast<unsigned>(m)));
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace ecglab
