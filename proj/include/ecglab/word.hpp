#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecglab/numeric.hpp"

namespace ecglab {

/// Signed generator index: +i is the i-th generator, -i its inverse, i >= 1.
using Letter = int;

inline constexpr Letter inverse_letter(Letter x) { return -x; }

/// Letter name: generators are a, b, c, ... and inverses A, B, C, ...
char letter_char(Letter x);

/// Element of the free group F_d stored as a freely reduced letter string.
class ReducedWord {
 public:
  /// Identity element of F_rank.
  explicit ReducedWord(int rank);
  /// Throws std::invalid_argument unless `letters` is freely reduced with
  /// indices in [1, rank].
  ReducedWord(int rank, std::vector<Letter> letters);

  /// Accepts "a b A B" or "abAB"; "e" or "" is the identity.
  static ReducedWord parse(int rank, std::string_view text);

  int rank() const { return rank_; }
  std::size_t length() const { return letters_.size(); }
  bool is_identity() const { return letters_.empty(); }
  std::span<const Letter> letters() const { return letters_; }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter back() const { return letters_.back(); }

  ReducedWord inverse() const;
  ReducedWord prefix(std::size_t k) const;
  /// Appends x; throws std::invalid_argument if x would cancel.
  void push_back(Letter x);

  /// Space-separated letters, e.g. "a b A"; the identity prints as "e".
  std::string to_string() const;

  friend bool operator==(const ReducedWord&, const ReducedWord&) = default;
  friend std::strong_ordering operator<=>(const ReducedWord&, const ReducedWord&) = default;

 private:
  int rank_;
  std::vector<Letter> letters_;
};

/// Freely reduced product u*v. Throws RankMismatch.
ReducedWord multiply(const ReducedWord& u, const ReducedWord& v);

/// Length of the longest common prefix, which on the tree equals
/// (|u| + |v| - |u^-1 v|) / 2.
std::size_t gromov_product(const ReducedWord& u, const ReducedWord& v);
std::size_t common_prefix(std::span<const Letter> u, std::span<const Letter> v);

/// beta_xi(o, g.o) = 2 (xi . g) - |g| for a boundary point given by a prefix
/// of depth >= |g|. Throws InsufficientDepth otherwise.
int busemann_tree(const ReducedWord& xi_prefix, const ReducedWord& g);

/// Number of letters that may follow `last` in a reduced word (last == 0
/// means "no previous letter").
inline int continuation_count(int rank, Letter last) { return last == 0 ? 2 * rank : 2 * rank - 1; }

/// Letters in canonical order a, A, b, B, ...
std::vector<Letter> alphabet(int rank);

/// All reduced words of length <= n in breadth-first order. Each level is
/// produced by extending the previous one, never by the inverse of the
/// last letter, so no deduplication is needed.
std::vector<ReducedWord> ball(int rank, int n);

/// Depth-first visit of every reduced word of length <= n. The visitor
/// receives the current letters and returns false to prune the subtree.
void for_each_word(int rank, int n, const std::function<bool(std::span<const Letter>)>& visit);

/// 1 + 2d((2d-1)^n - 1)/(2d-2); for d = 1 this is 2n + 1.
BigInt ball_size(int rank, int n);
/// 2d(2d-1)^(n-1) for n >= 1, 1 for n = 0.
BigInt sphere_size(int rank, int n);

/// Least-squares slope of log(count) against index over the last half of
/// the sequence. Requires at least 4 positive counts.
double growth_exponent(std::span<const double> counts);

}  // namespace ecglab
