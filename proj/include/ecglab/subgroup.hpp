#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ecglab/numeric.hpp"
#include "ecglab/word.hpp"

namespace ecglab {

/// Image of a word under the defining homomorphism, in canonical form.
/// Z^k: the k coordinates. Z/2 * Z/3: alternating syllables, 0 = s,
/// 1 = t, 2 = t^2. Full group: empty.
using GroupImage = std::vector<int>;

struct FullGroup {};

/// Kernel of F_d -> Z^k given by integer weights, weights[generator][component].
struct KernelToZk {
  std::vector<std::vector<int>> weights;
};

/// Kernel of F_d -> Z/2 * Z/3 = <s> * <t>; images[i] is the normal form
/// assigned to generator i + 1.
struct KernelToC2C3 {
  std::vector<GroupImage> images;
};

/// A subgroup H <= F_d given as the full group or a homomorphism kernel.
class SubgroupSpec {
 public:
  using Kind = std::variant<FullGroup, KernelToZk, KernelToC2C3>;

  SubgroupSpec(int rank, Kind kind);

  static SubgroupSpec full(int rank) { return {rank, FullGroup{}}; }
  /// One-component kernel, e.g. {1, 0} for a -> 1, b -> 0.
  static SubgroupSpec kernel_to_z(std::vector<int> weights);
  static SubgroupSpec kernel_to_c2c3(std::vector<GroupImage> images);

  /// Text forms: "full", "z:1,0", "z:1,0|0,1" (components separated by |),
  /// "c2c3:s,t" (one normal form per generator, T = t^-1).
  static SubgroupSpec parse(int rank, std::string_view text);
  std::string to_string() const;

  int rank() const { return rank_; }
  const Kind& kind() const { return kind_; }
  bool is_full() const { return std::holds_alternative<FullGroup>(kind_); }
  bool is_c2c3() const { return std::holds_alternative<KernelToC2C3>(kind_); }

  GroupImage identity() const;
  bool is_identity(const GroupImage& q) const;
  GroupImage letter_image(Letter x) const;
  /// q * phi(x)
  GroupImage apply(const GroupImage& q, Letter x) const;
  GroupImage multiply(const GroupImage& p, const GroupImage& q) const;
  GroupImage inverse(const GroupImage& q) const;
  GroupImage image_of(std::span<const Letter> word) const;
  bool contains(std::span<const Letter> word) const { return is_identity(image_of(word)); }

  /// Necessary condition for a word with image q and `remaining` more
  /// letters to end in H. Exact pruning for Z^k; always true otherwise.
  bool can_return(const GroupImage& q, int remaining) const;

 private:
  int rank_;
  Kind kind_;
  std::vector<GroupImage> letter_images_;  // indexed by letter + rank
  std::vector<int> max_weight_;            // per Z^k component
};

/// Normal-form product in Z/2 * Z/3.
GroupImage c2c3_multiply(const GroupImage& p, const GroupImage& q);
GroupImage c2c3_inverse(const GroupImage& q);
/// Parses a word in s, t, T into normal form.
GroupImage c2c3_parse(std::string_view text);

struct SubgroupCaps {
  int c2c3_max_radius = 16;
  std::size_t max_elements = 4'000'000;
};

/// Exact V_H(1,1,m) = #{h in H : |h| <= m}. Z^k kernels use dynamic
/// programming over (length, image, last letter); Z/2*Z/3 kernels use a
/// depth-first filter capped at caps.c2c3_max_radius.
BigInt subgroup_ball_count(const SubgroupSpec& spec, int m, const SubgroupCaps& caps = {});

/// Calls visit for every h in H with |h| <= m, in depth-first order.
void for_each_subgroup_element(const SubgroupSpec& spec, int m,
                               const std::function<void(std::span<const Letter>)>& visit,
                               const SubgroupCaps& caps = {});

/// Minimal lengths of reduced words that return a given image to the
/// identity, bounded by a maximum depth. Built by multi-source breadth-first
/// search backwards from the identity over states (image, last letter).
class ReturnDistance {
 public:
  ReturnDistance(const SubgroupSpec& spec, int max_depth);

  const SubgroupSpec& spec() const { return spec_; }
  int max_depth() const { return max_depth_; }

  /// Minimal |w| with q * phi(w) = 1, where w is reduced and its first letter
  /// is not the inverse of `last` (last == 0: unconstrained).
  std::optional<int> distance(const GroupImage& q, Letter last) const;

  /// Minimal |w| >= 1 with q * phi(w) = 1 whose first letter is neither the
  /// inverse of `last` nor in `excluded`; nullopt if it exceeds `budget`.
  std::optional<int> exit_length(const GroupImage& q, Letter last, std::span<const Letter> excluded,
                                 int budget) const;

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<int>& key) const;
  };
  SubgroupSpec spec_;
  int max_depth_;
  std::unordered_map<std::vector<int>, int, KeyHash> table_;  // (image..., last) -> distance
};

/// Prefix tree over reduced words with per-node counts and the minimum
/// stored word length in each subtree.
class OrbitTrie {
 public:
  explicit OrbitTrie(int rank);

  int rank() const { return rank_; }
  std::size_t size() const { return nodes_[0].count; }
  bool empty() const { return size() == 0; }

  void insert(std::span<const Letter> word);
  void insert(const ReducedWord& word) { insert(word.letters()); }
  bool contains(std::span<const Letter> word) const;
  /// Number of stored words having `prefix` as a prefix.
  std::size_t count_with_prefix(std::span<const Letter> prefix) const;

  /// Exact min over stored s of |x| + |s| - 2 (x . s). Throws
  /// std::invalid_argument on an empty trie.
  int distance_to(std::span<const Letter> x) const;

  /// Exact max over stored h with |h| <= n of 2 (xi . h) - |h|, i.e. the
  /// largest Busemann value beta_xi(o, h.o). Needs |xi| >= n.
  int max_busemann(std::span<const Letter> xi, int n) const;

  /// Stored words in lexicographic letter order.
  std::vector<ReducedWord> words() const;
  /// One word per line, letters separated by spaces.
  void write_word_list(std::ostream& out) const;

 private:
  struct Node {
    std::size_t count = 0;
    int min_depth = -1;  // shortest stored word in the subtree, -1 if none
    bool terminal = false;
  };
  int child(int node, Letter x) const { return children_[node * 2 * rank_ + slot(x)]; }
  int slot(Letter x) const { return x > 0 ? 2 * (x - 1) : 2 * (-x - 1) + 1; }

  int rank_;
  std::vector<Node> nodes_;
  std::vector<int> children_;  // 2*rank entries per node, -1 = absent
};

/// H intersected with the ball of radius m, materialized. Throws
/// CapExceeded beyond caps.max_elements.
OrbitTrie subgroup_ball_elements(const SubgroupSpec& spec, int m, const SubgroupCaps& caps = {});

/// Exact distance from a vertex x with |x| = r to (H cap B_r).o, evaluated as
/// min over divergence depths p of (r - p) + shortest returning tail.
int distance_to_subgroup_ball(const ReturnDistance& returns, std::span<const Letter> x, int r);

/// Fraction of the radius-r sphere lying within distance C of (H cap B_r).o.
/// Exact, by depth-first enumeration of the sphere (r <= max_radius).
Rational shell_mass(const SubgroupSpec& spec, int r, int c, int max_radius = 14);

}  // namespace ecglab
