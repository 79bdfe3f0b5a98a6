#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <variant>
#include <vector>

#include "ecglab/mobius.hpp"
#include "ecglab/numeric.hpp"
#include "ecglab/rng.hpp"
#include "ecglab/subgroup.hpp"
#include "ecglab/word.hpp"

namespace ecglab {

// ---------------------------------------------------------------------------
// Uniform measure on the tree boundary

/// mu([w]) = 1 / (2d (2d-1)^(k-1)) for |w| = k >= 1, and 1 for k = 0.
Rational uniform_cylinder_mass(int rank, std::size_t depth);

/// Exact cylinder masses up to a depth cap.
class CylinderMeasure {
 public:
  /// The uniform measure, tabulated for every prefix of length <= depth.
  static CylinderMeasure uniform(int rank, int depth);

  int rank() const { return rank_; }
  int depth() const { return depth_; }
  /// Throws std::out_of_range for prefixes deeper than the table.
  const Rational& mass(std::span<const Letter> prefix) const;
  /// Parent mass equals the sum over children at every internal prefix, and
  /// each level sums to 1.
  bool consistent() const;
  /// CSV rows prefix,numerator,denominator.
  void write_csv(std::ostream& out) const;

 private:
  CylinderMeasure(int rank, int depth) : rank_(rank), depth_(depth) {}
  int rank_;
  int depth_;
  std::map<std::vector<Letter>, Rational> table_;
};

/// (g_* mu)([w]) = mu(g^-1 [w]) by case analysis of how g^-1 meets [w].
Rational pushforward_cylinder(int rank, const ReducedWord& g, const ReducedWord& w, int depth_cap = 24);

/// Integral over [w] of D_g(xi) = (2d-1)^(2 (xi . g) - |g|) against the uniform
/// measure, splitting [w] into sub-cylinders of depth |g| on which the
/// Busemann value is constant.
Rational integrate_rn_over_cylinder(int rank, const ReducedWord& g, const ReducedWord& w, int depth_cap = 24);

/// Exact equality of the two sides above.
bool conformality_check(int rank, const ReducedWord& g, const ReducedWord& w, int depth_cap = 24);

/// Draws boundary prefixes letter by letter, uniform over legal continuations.
class TreeBoundarySampler {
 public:
  explicit TreeBoundarySampler(int rank) : rank_(rank), letters_(alphabet(rank)) {}

  int rank() const { return rank_; }
  ReducedWord sample(Rng& rng, std::size_t depth) const;
  /// Appends uniform letters until |prefix| >= depth.
  void extend(Rng& rng, ReducedWord& prefix, std::size_t depth) const;

 private:
  int rank_;
  std::vector<Letter> letters_;
};

// ---------------------------------------------------------------------------
// Empirical Patterson measure of a subgroup

/// Cylinder weights w([u]) = sum over h in H cap B_N with prefix u of
/// exp(-s |h|), normalized, at a fixed cylinder depth K. Words shorter than K
/// spread their weight uniformly over the depth-K cylinders extending them.
class EmpiricalPattersonMeasure {
 public:
  EmpiricalPattersonMeasure(const SubgroupSpec& spec, int depth_n, double exponent, int cylinder_depth,
                            const SubgroupCaps& caps = {});

  const SubgroupSpec& spec() const { return spec_; }
  int depth_n() const { return depth_n_; }
  double exponent() const { return exponent_; }
  int cylinder_depth() const { return cylinder_depth_; }
  std::size_t cylinder_count() const { return weights_.size(); }

  /// Normalized weight of [prefix]; prefixes deeper than K are split
  /// uniformly.
  double weight(std::span<const Letter> prefix) const;
  /// Draws a depth-K cylinder by weight, then extends uniformly to `depth`
  /// (the result has at least K letters).
  ReducedWord sample(Rng& rng, std::size_t depth) const;
  /// CSV rows prefix,weight over the depth-K cylinders.
  void write_csv(std::ostream& out) const;

  /// Mixed-radix index of a depth-K prefix and its inverse.
  std::size_t cylinder_index(std::span<const Letter> prefix) const;
  ReducedWord cylinder_word(std::size_t index) const;

 private:
  std::pair<std::size_t, std::size_t> index_range(std::span<const Letter> prefix) const;

  SubgroupSpec spec_;
  int depth_n_;
  double exponent_;
  int cylinder_depth_;
  std::vector<double> weights_;  // normalized, indexed by cylinder
  std::vector<double> cdf_;
};

// ---------------------------------------------------------------------------
// Radon-Nikodym derivatives

using GroupElement = std::variant<ReducedWord, UnimodularMatrix>;
using BoundaryPoint = std::variant<ReducedWord, CirclePoint>;

enum class RnModel { TreeFull, TreeSubgroup, CircleHarmonic, CircleLebesgue };

const char* to_string(RnModel model);

/// D_g(xi) = d(g_* mu)/d mu (xi). Trees: exp(v (2 (xi . g) - |g|)); harmonic
/// circle: poisson_ratio; Lebesgue circle: (c xi + d)^-2.
class RnEvaluator {
 public:
  RnEvaluator(RnModel model, double dimension) : model_(model), dimension_(dimension) {}
  /// Tree model with v = log(2d - 1).
  static RnEvaluator tree_full(int rank);
  static RnEvaluator circle_harmonic() { return {RnModel::CircleHarmonic, 1.0}; }
  static RnEvaluator circle_lebesgue() { return {RnModel::CircleLebesgue, 1.0}; }

  RnModel model() const { return model_; }
  double dimension() const { return dimension_; }
  bool is_tree() const { return model_ == RnModel::TreeFull || model_ == RnModel::TreeSubgroup; }

  double derivative(const GroupElement& g, const BoundaryPoint& xi) const;
  double log_derivative(const GroupElement& g, const BoundaryPoint& xi) const;

 private:
  RnModel model_;
  double dimension_;
};

/// Residual of the chain rule. Trees and the harmonic circle use
/// D_{gh}(xi) = D_g(xi) D_h(g^-1 xi); the Lebesgue derivative is the
/// derivative of xi -> g xi and uses D_{gh}(xi) = D_g(h xi) D_h(xi). Tree
/// residuals come from integer Busemann arithmetic and are exactly 0.
double cocycle_check(const RnEvaluator& model, const GroupElement& g, const GroupElement& h,
                     const BoundaryPoint& xi);

/// g^-1 applied to a boundary prefix; the result is a valid prefix of depth
/// |xi| + |g| - 2 (xi . g).
ReducedWord shift_boundary(const ReducedWord& g, const ReducedWord& xi);

}  // namespace ecglab
