#include "ecglab/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "ecglab/errors.hpp"

namespace ecglab {

Rational uniform_cylinder_mass(int rank, std::size_t depth) {
  if (depth == 0) return Rational(1);
  return Rational(BigInt(1), BigInt(2 * rank) * big_pow(2 * rank - 1, static_cast<unsigned>(depth - 1)));
}

// ---------------------------------------------------------------------------
// CylinderMeasure

CylinderMeasure CylinderMeasure::uniform(int rank, int depth) {
  if (depth < 0) throw std::invalid_argument("cylinder depth must be non-negative");
  CylinderMeasure m(rank, depth);
  for_each_word(rank, depth, [&](std::span<const Letter> w) {
    m.table_.emplace(std::vector<Letter>(w.begin(), w.end()), uniform_cylinder_mass(rank, w.size()));
    return true;
  });
  return m;
}

const Rational& CylinderMeasure::mass(std::span<const Letter> prefix) const {
  const auto it = table_.find(std::vector<Letter>(prefix.begin(), prefix.end()));
  if (it == table_.end()) throw std::out_of_range(fmt::format("prefix of length {} not tabulated", prefix.size()));
  return it->second;
}

bool CylinderMeasure::consistent() const {
  const auto letters = alphabet(rank_);
  std::vector<Rational> level_sum(depth_ + 1);
  for (const auto& [prefix, value] : table_) {
    level_sum[prefix.size()] += value;
    if (static_cast<int>(prefix.size()) == depth_) continue;
    Rational children = 0;
    std::vector<Letter> child = prefix;
    child.push_back(0);
    for (Letter x : letters) {
      if (!prefix.empty() && x == inverse_letter(prefix.back())) continue;
      child.back() = x;
      children += mass(child);
    }
    if (children != value) return false;
  }
  return std::all_of(level_sum.begin(), level_sum.end(), [](const Rational& s) { return s == 1; });
}

void CylinderMeasure::write_csv(std::ostream& out) const {
  out << "prefix,numerator,denominator\n";
  for (const auto& [prefix, value] : table_)
    out << ReducedWord(rank_, prefix).to_string() << ',' << numerator(value) << ',' << denominator(value) << '\n';
}

// ---------------------------------------------------------------------------
// Exact conformality

Rational pushforward_cylinder(int rank, const ReducedWord& g, const ReducedWord& w, int depth_cap) {
  if (g.rank() != rank || w.rank() != rank) throw RankMismatch("rank mismatch in pushforward_cylinder");
  if (static_cast<int>(g.length() + w.length()) > depth_cap)
    throw CapExceeded(fmt::format("|g| + |w| = {} exceeds cap {}", g.length() + w.length(), depth_cap));
  if (w.is_identity()) return Rational(1);
  const std::size_t cp = gromov_product(g, w);
  if (cp < w.length()) {
    // g^-1 [w] is the cylinder of the reduced word g^-1 w.
    return uniform_cylinder_mass(rank, multiply(g.inverse(), w).length());
  }
  // g = w g'': g^-1 [w] is the complement of g''^-1 [x], x the inverse of the
  // last letter of w, and g''^-1 x is reduced.
  const std::size_t tail = g.length() - w.length();
  return Rational(1) - uniform_cylinder_mass(rank, tail + 1);
}

Rational integrate_rn_over_cylinder(int rank, const ReducedWord& g, const ReducedWord& w, int depth_cap) {
  if (g.rank() != rank || w.rank() != rank) throw RankMismatch("rank mismatch in integrate_rn_over_cylinder");
  if (static_cast<int>(std::max(g.length(), w.length())) > depth_cap)
    throw CapExceeded(fmt::format("cylinder refinement depth exceeds cap {}", depth_cap));
  const int base = 2 * rank - 1;
  const auto letters = alphabet(rank);
  Rational total = 0;
  std::vector<Letter> prefix(w.letters().begin(), w.letters().end());
  std::function<void()> refine = [&]() {
    if (prefix.size() >= g.length()) {
      const int beta = 2 * static_cast<int>(common_prefix(prefix, g.letters())) - static_cast<int>(g.length());
      const Rational scale = beta >= 0 ? Rational(big_pow(base, beta)) : Rational(BigInt(1), big_pow(base, -beta));
      total += scale * uniform_cylinder_mass(rank, prefix.size());
      return;
    }
    const Letter last = prefix.empty() ? 0 : prefix.back();
    for (Letter x : letters) {
      if (x == inverse_letter(last)) continue;
      prefix.push_back(x);
      refine();
      prefix.pop_back();
    }
  };
  refine();
  return total;
}

bool conformality_check(int rank, const ReducedWord& g, const ReducedWord& w, int depth_cap) {
  return integrate_rn_over_cylinder(rank, g, w, depth_cap) == pushforward_cylinder(rank, g, w, depth_cap);
}

// ---------------------------------------------------------------------------
// TreeBoundarySampler

ReducedWord TreeBoundarySampler::sample(Rng& rng, std::size_t depth) const {
  ReducedWord xi(rank_);
  extend(rng, xi, depth);
  return xi;
}

void TreeBoundarySampler::extend(Rng& rng, ReducedWord& prefix, std::size_t depth) const {
  if (prefix.rank() != rank_) throw RankMismatch("sampler rank differs from prefix rank");
  while (prefix.length() < depth) {
    if (prefix.is_identity()) {
      prefix.push_back(letters_[rng.uniform_index(letters_.size())]);
      continue;
    }
    // Uniform over the 2d - 1 letters other than the inverse of the last one.
    const Letter banned = inverse_letter(prefix.back());
    auto k = static_cast<std::size_t>(rng.uniform_index(letters_.size() - 1));
    const auto banned_at = static_cast<std::size_t>(std::find(letters_.begin(), letters_.end(), banned) - letters_.begin());
    if (k >= banned_at) ++k;
    prefix.push_back(letters_[k]);
  }
}

// ---------------------------------------------------------------------------
// EmpiricalPattersonMeasure

namespace {

std::size_t letter_slot(Letter x) { return x > 0 ? 2 * (x - 1) : 2 * (-x - 1) + 1; }

}  // namespace

EmpiricalPattersonMeasure::EmpiricalPattersonMeasure(const SubgroupSpec& spec, int depth_n, double exponent,
                                                     int cylinder_depth, const SubgroupCaps& caps)
    : spec_(spec), depth_n_(depth_n), exponent_(exponent), cylinder_depth_(cylinder_depth) {
  if (depth_n < 0) throw std::invalid_argument("Patterson depth must be non-negative");
  if (cylinder_depth < 1 || cylinder_depth > 12) throw std::invalid_argument("cylinder depth must lie in [1, 12]");
  if (!(exponent >= 0)) throw std::invalid_argument("Patterson exponent must be non-negative");
  const int rank = spec.rank();
  const std::size_t branching = 2 * rank - 1;
  std::size_t cylinders = 2 * rank;
  for (int k = 1; k < cylinder_depth; ++k) cylinders *= branching;

  // Integer counts first, indexed by (cylinder, length) for long words and by
  // (prefix, length) for short ones, so symmetric cylinders get identical sums.
  const int K = cylinder_depth;
  std::vector<std::uint64_t> long_counts(cylinders * (depth_n + 1), 0);
  std::map<std::vector<Letter>, std::uint64_t> short_words;
  for_each_subgroup_element(
      spec, depth_n,
      [&](std::span<const Letter> h) {
        if (static_cast<int>(h.size()) >= K)
          ++long_counts[cylinder_index(h.first(K)) * (depth_n + 1) + h.size()];
        else
          ++short_words[std::vector<Letter>(h.begin(), h.end())];
      },
      caps);

  std::vector<double> length_weight(depth_n + 1);
  for (int len = 0; len <= depth_n; ++len) length_weight[len] = std::exp(-exponent * len);

  weights_.assign(cylinders, 0.0);
  for (std::size_t c = 0; c < cylinders; ++c)
    for (int len = K; len <= depth_n; ++len)
      weights_[c] += static_cast<double>(long_counts[c * (depth_n + 1) + len]) * length_weight[len];
  for (const auto& [word, count] : short_words) {
    const auto [lo, hi] = index_range(word);
    const double share = static_cast<double>(count) * length_weight[word.size()] / static_cast<double>(hi - lo);
    for (std::size_t c = lo; c < hi; ++c) weights_[c] += share;
  }
  double total = 0;
  for (double w : weights_) total += w;
  if (!(total > 0)) throw std::invalid_argument("empirical Patterson measure has no mass");
  cdf_.resize(cylinders);
  double running = 0;
  for (std::size_t c = 0; c < cylinders; ++c) {
    weights_[c] /= total;
    running += weights_[c];
    cdf_[c] = running;
  }
}

std::size_t EmpiricalPattersonMeasure::cylinder_index(std::span<const Letter> prefix) const {
  if (static_cast<int>(prefix.size()) != cylinder_depth_) throw std::invalid_argument("prefix length differs from cylinder depth");
  const std::size_t branching = 2 * spec_.rank() - 1;
  std::size_t index = letter_slot(prefix[0]);
  for (std::size_t i = 1; i < prefix.size(); ++i) {
    const std::size_t s = letter_slot(prefix[i]);
    const std::size_t banned = letter_slot(inverse_letter(prefix[i - 1]));
    index = index * branching + (s > banned ? s - 1 : s);
  }
  return index;
}

ReducedWord EmpiricalPattersonMeasure::cylinder_word(std::size_t index) const {
  const int rank = spec_.rank();
  const std::size_t branching = 2 * rank - 1;
  std::vector<std::size_t> digits(cylinder_depth_);
  for (int i = cylinder_depth_ - 1; i > 0; --i) {
    digits[i] = index % branching;
    index /= branching;
  }
  digits[0] = index;
  const auto letters = alphabet(rank);  // letters[slot] is the letter with that slot
  ReducedWord out(rank);
  out.push_back(letters[digits[0]]);
  for (int i = 1; i < cylinder_depth_; ++i) {
    const std::size_t banned = letter_slot(inverse_letter(out.back()));
    const std::size_t s = digits[i] >= banned ? digits[i] + 1 : digits[i];
    out.push_back(letters[s]);
  }
  return out;
}

std::pair<std::size_t, std::size_t> EmpiricalPattersonMeasure::index_range(std::span<const Letter> prefix) const {
  const std::size_t branching = 2 * spec_.rank() - 1;
  if (prefix.empty()) return {0, weights_.size()};
  // Smallest and largest extensions share the prefix, so the range is contiguous.
  std::vector<Letter> lo(prefix.begin(), prefix.end());
  std::size_t span = 1;
  const auto letters = alphabet(spec_.rank());
  while (static_cast<int>(lo.size()) < cylinder_depth_) {
    const Letter banned = inverse_letter(lo.back());
    lo.push_back(letters[0] == banned ? letters[1] : letters[0]);
    span *= branching;
  }
  const std::size_t first = cylinder_index(lo);
  return {first, first + span};
}

double EmpiricalPattersonMeasure::weight(std::span<const Letter> prefix) const {
  if (static_cast<int>(prefix.size()) > cylinder_depth_) {
    const double parent = weight(prefix.first(cylinder_depth_));
    const double split = std::pow(2.0 * spec_.rank() - 1, static_cast<double>(prefix.size()) - cylinder_depth_);
    return parent / split;
  }
  const auto [lo, hi] = index_range(prefix);
  double total = 0;
  for (std::size_t c = lo; c < hi; ++c) total += weights_[c];
  return total;
}

ReducedWord EmpiricalPattersonMeasure::sample(Rng& rng, std::size_t depth) const {
  const double u = rng.uniform() * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto index = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1));
  ReducedWord xi = cylinder_word(index);
  TreeBoundarySampler(spec_.rank()).extend(rng, xi, depth);
  return xi;
}

void EmpiricalPattersonMeasure::write_csv(std::ostream& out) const {
  out << "prefix,weight\n";
  for (std::size_t c = 0; c < weights_.size(); ++c)
    out << fmt::format("{},{:.17g}\n", cylinder_word(c).to_string(), weights_[c]);
}

// ---------------------------------------------------------------------------
// Radon-Nikodym derivatives

const char* to_string(RnModel model) {
  switch (model) {
    case RnModel::TreeFull: return "tree-full";
    case RnModel::TreeSubgroup: return "tree-subgroup";
    case RnModel::CircleHarmonic: return "circle-harmonic";
    case RnModel::CircleLebesgue: return "circle-lebesgue";
  }
  return "unknown";
}

RnEvaluator RnEvaluator::tree_full(int rank) { return {RnModel::TreeFull, std::log(2.0 * rank - 1.0)}; }

double RnEvaluator::log_derivative(const GroupElement& g, const BoundaryPoint& xi) const {
  if (is_tree()) {
    const auto* word = std::get_if<ReducedWord>(&g);
    const auto* prefix = std::get_if<ReducedWord>(&xi);
    if (!word || !prefix) throw std::invalid_argument("tree model needs a word and a boundary prefix");
    return dimension_ * busemann_tree(*prefix, *word);
  }
  const auto* matrix = std::get_if<UnimodularMatrix>(&g);
  const auto* point = std::get_if<CirclePoint>(&xi);
  if (!matrix || !point) throw std::invalid_argument("circle model needs a matrix and a circle point");
  if (model_ == RnModel::CircleHarmonic) return std::log(poisson_ratio(*matrix, *point));
  return std::log(rn_lebesgue(*matrix, *point));
}

double RnEvaluator::derivative(const GroupElement& g, const BoundaryPoint& xi) const {
  if (is_tree()) return std::exp(log_derivative(g, xi));
  const auto* matrix = std::get_if<UnimodularMatrix>(&g);
  const auto* point = std::get_if<CirclePoint>(&xi);
  if (!matrix || !point) throw std::invalid_argument("circle model needs a matrix and a circle point");
  return model_ == RnModel::CircleHarmonic ? poisson_ratio(*matrix, *point) : rn_lebesgue(*matrix, *point);
}

ReducedWord shift_boundary(const ReducedWord& g, const ReducedWord& xi) {
  if (gromov_product(g, xi) >= xi.length())
    throw InsufficientDepth(fmt::format("boundary prefix of depth {} is absorbed by |g| = {}", xi.length(), g.length()));
  return multiply(g.inverse(), xi);
}

double cocycle_check(const RnEvaluator& model, const GroupElement& g, const GroupElement& h,
                     const BoundaryPoint& xi) {
  if (model.is_tree()) {
    const auto& gw = std::get<ReducedWord>(g);
    const auto& hw = std::get<ReducedWord>(h);
    const auto& prefix = std::get<ReducedWord>(xi);
    const ReducedWord shifted = shift_boundary(gw, prefix);
    const int lhs = busemann_tree(prefix, multiply(gw, hw));
    const int rhs = busemann_tree(prefix, gw) + busemann_tree(shifted, hw);
    return model.dimension() * std::abs(lhs - rhs);
  }
  const auto& gm = std::get<UnimodularMatrix>(g);
  const auto& hm = std::get<UnimodularMatrix>(h);
  const auto& point = std::get<CirclePoint>(xi);
  const double lhs = model.log_derivative(gm * hm, point);
  double rhs = 0;
  if (model.model() == RnModel::CircleHarmonic)
    rhs = model.log_derivative(gm, point) + model.log_derivative(hm, mobius_apply(gm.inverse(), point));
  else
    rhs = model.log_derivative(gm, mobius_apply(hm, point)) + model.log_derivative(hm, point);
  return std::abs(lhs - rhs);
}

}  // namespace ecglab
