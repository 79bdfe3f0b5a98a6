#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecglab/boundary.hpp"
#include "ecglab/mobius.hpp"
#include "ecglab/subgroup.hpp"

namespace ecglab {

enum class ModelKind { TreeFull, TreeSubgroup, CircleHarmonic };
enum class MeasureChoice { Patterson, Ambient };

const char* to_string(ModelKind kind);
const char* to_string(MeasureChoice measure);

struct ModelOptions {
  int max_n = 24;              // deepest radius served by the return-distance table
  int patterson_depth = 14;    // N for the empirical Patterson measure
  int cylinder_depth = 8;      // K for the empirical Patterson measure
  std::optional<double> patterson_exponent;  // defaults to the model dimension
  double circle_cap = 10.0;
  SubgroupCaps caps{};
};

/// A group acting on a boundary with a probability measure, its dimension v
/// and V_n = exp(v n). Immutable after construction; share across threads.
class Model {
 public:
  static Model tree_full(int rank, const ModelOptions& options = {});
  static Model tree_subgroup(const SubgroupSpec& spec, MeasureChoice measure, const ModelOptions& options = {});
  static Model circle_harmonic(const ModelOptions& options = {});

  ModelKind kind() const { return kind_; }
  MeasureChoice measure() const { return measure_; }
  bool is_tree() const { return kind_ != ModelKind::CircleHarmonic; }
  int rank() const { return rank_; }
  double dimension() const { return dimension_; }
  int max_n() const { return max_n_; }
  const SubgroupSpec& spec() const { return *spec_; }
  const ReturnDistance& returns() const { return *returns_; }
  const RnEvaluator& evaluator() const { return evaluator_; }
  const EmpiricalPattersonMeasure* patterson() const { return patterson_.get(); }
  std::string description() const;

  double log_volume(int n) const { return dimension_ * n; }
  double volume(int n) const { return std::exp(log_volume(n)); }

  /// Boundary point from the model measure; tree prefixes have depth >= depth.
  BoundaryPoint sample(Rng& rng, int depth) const;

  /// out[n] = log(A_n(xi) / V_n) for n = 0..n_max, computed in one pass.
  void log_ratio_profile(const BoundaryPoint& xi, int n_max, std::vector<double>& out) const;
  /// A_n(xi) = max over the ball B_n of D_g(xi).
  double pointwise_max(int n, const BoundaryPoint& xi) const;
  /// For trees, max over the ball of the integer Busemann value 2 (xi . h) - |h|.
  int max_busemann(int n, std::span<const Letter> xi) const;

  /// Elements of B_n (tree: H cap B_n as words; circle: matrices).
  std::vector<GroupElement> ball_elements(int n) const;

 private:
  Model() = default;

  ModelKind kind_ = ModelKind::TreeFull;
  MeasureChoice measure_ = MeasureChoice::Ambient;
  int rank_ = 2;
  double dimension_ = 0.0;
  int max_n_ = 0;
  std::shared_ptr<const SubgroupSpec> spec_;
  std::shared_ptr<const ReturnDistance> returns_;
  std::shared_ptr<const EmpiricalPattersonMeasure> patterson_;
  RnEvaluator evaluator_{RnModel::TreeFull, 0.0};
  // best[n] = max over h in B_n of the integer Busemann value.
  void tree_busemann_profile(std::span<const Letter> xi, int n_max, std::vector<int>& best) const;

  // Circle: distinct orbit points with their squared Frobenius norm, sorted
  // by distance from i.
  std::shared_ptr<const std::vector<std::pair<OrbitPointKey, std::int64_t>>> orbit_;
};

struct EcgPoint {
  int n = 0;
  double abar = 0.0;
  double stderr_abar = 0.0;
  double cn = 0.0;
  double stderr_cn = 0.0;
  std::size_t samples = 0;
};

struct Thresholds {
  double floor = 0.01;       // theta_1
  double tail_slope = 0.02;  // theta_2
  double decay = 2.0;        // theta_3
};

enum class Classification { Nonvanishing, Vanishing, Inconclusive };
const char* to_string(Classification c);

struct EcgCurve {
  std::string model;
  std::vector<EcgPoint> points;
  Thresholds thresholds;
  Classification classification = Classification::Inconclusive;
  double tail_slope = 0.0;

  void write_csv(std::ostream& out) const;
  nlohmann::json summary() const;
};

struct EcgOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
  std::size_t batch_size = 64;
};

/// Monte Carlo estimate of abar_n and C_n = abar_n / V_n for each n in
/// `radii`, reusing the same boundary samples for every n. Batches own RNG
/// streams derived from (seed, batch), so the result does not depend on
/// the thread count.
std::vector<EcgPoint> ecg_estimate(const Model& model, const std::vector<int>& radii, const EcgOptions& options);
EcgPoint ecg_estimate(const Model& model, int n, const EcgOptions& options);

/// Least-squares slope of log C_n against n over the last half of the points
/// (at least two).
double tail_log_slope(const std::vector<EcgPoint>& points);
/// Nonvanishing: tail min >= floor and tail slope >= -tail_slope. Vanishing:
/// C_first / C_last >= decay and tail slope < 0. Both or neither, or fewer
/// than two points: inconclusive.
Classification classify(const std::vector<EcgPoint>& points, const Thresholds& thresholds);

EcgCurve ecg_curve(const Model& model, const std::vector<int>& radii, const EcgOptions& options,
                   const Thresholds& thresholds = {});

/// Monte Carlo integral of exp(-v d(pi_r(xi), (H cap B_r).o)) against the model
/// measure; pi_r(xi) is the length-r prefix. Tree models only.
struct FexrEstimate {
  int r = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
};
FexrEstimate fexr_integral(const Model& model, int r, const EcgOptions& options);

struct GrowthRatio {
  int m = 0;
  BigInt count;
  Rational ratio;  // V_H(1,1,m) / (2d-1)^m
};
std::vector<GrowthRatio> growth_ratio_series(const SubgroupSpec& spec, const std::vector<int>& ms,
                                             const SubgroupCaps& caps = {});

/// Inclusive integer range helper.
std::vector<int> int_range(int first, int last);

}  // namespace ecglab
