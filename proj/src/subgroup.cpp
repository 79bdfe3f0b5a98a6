#include "ecglab/subgroup.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include <boost/container_hash/hash.hpp>
#include <fmt/format.h>

#include "ecglab/errors.hpp"

namespace ecglab {

// ---------------------------------------------------------------------------
// Z/2 * Z/3 normal forms

GroupImage c2c3_multiply(const GroupImage& p, const GroupImage& q) {
  GroupImage out = p;
  std::size_t i = 0;
  while (i < q.size()) {
    if (out.empty()) break;
    const int a = out.back();
    const int b = q[i];
    const bool a_is_s = a == 0;
    const bool b_is_s = b == 0;
    if (a_is_s != b_is_s) break;
    if (a_is_s) {
      out.pop_back();
      ++i;
      continue;
    }
    const int sum = (a + b) % 3;
    out.pop_back();
    ++i;
    if (sum != 0) {
      out.push_back(sum);
      break;
    }
  }
  out.insert(out.end(), q.begin() + static_cast<std::ptrdiff_t>(i), q.end());
  return out;
}

GroupImage c2c3_inverse(const GroupImage& q) {
  GroupImage out;
  out.reserve(q.size());
  for (auto it = q.rbegin(); it != q.rend(); ++it) out.push_back(*it == 0 ? 0 : 3 - *it);
  return out;
}

GroupImage c2c3_parse(std::string_view text) {
  GroupImage out;
  for (char ch : text) {
    switch (ch) {
      case 's': out = c2c3_multiply(out, {0}); break;
      case 't': out = c2c3_multiply(out, {1}); break;
      case 'T': out = c2c3_multiply(out, {2}); break;
      case 'e':
      case ' ': break;
      default: throw std::invalid_argument(fmt::format("bad Z/2*Z/3 letter '{}' in \"{}\"", ch, text));
    }
  }
  return out;
}

namespace {

std::string c2c3_to_string(const GroupImage& q) {
  if (q.empty()) return "e";
  std::string out;
  for (int x : q) out += x == 0 ? 's' : (x == 1 ? 't' : 'T');
  return out;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int parse_int(const std::string& s) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw std::invalid_argument(fmt::format("bad integer \"{}\"", s));
  return value;
}

}  // namespace

// ---------------------------------------------------------------------------
// SubgroupSpec

SubgroupSpec::SubgroupSpec(int rank, Kind kind) : rank_(rank), kind_(std::move(kind)) {
  if (rank < 1 || rank > 26) throw std::invalid_argument(fmt::format("rank {} outside [1, 26]", rank));
  letter_images_.assign(2 * rank + 1, GroupImage{});
  if (const auto* z = std::get_if<KernelToZk>(&kind_)) {
    if (static_cast<int>(z->weights.size()) != rank)
      throw RankMismatch(fmt::format("{} weight rows for rank {}", z->weights.size(), rank));
    const std::size_t k = z->weights.front().size();
    if (k == 0) throw std::invalid_argument("Z^k kernel needs k >= 1");
    max_weight_.assign(k, 0);
    for (int i = 0; i < rank; ++i) {
      if (z->weights[i].size() != k) throw std::invalid_argument("ragged Z^k weight rows");
      GroupImage neg(k);
      for (std::size_t j = 0; j < k; ++j) {
        neg[j] = -z->weights[i][j];
        max_weight_[j] = std::max(max_weight_[j], std::abs(z->weights[i][j]));
      }
      letter_images_[rank + i + 1] = z->weights[i];
      letter_images_[rank - i - 1] = neg;
    }
  } else if (const auto* c = std::get_if<KernelToC2C3>(&kind_)) {
    if (static_cast<int>(c->images.size()) != rank)
      throw RankMismatch(fmt::format("{} generator images for rank {}", c->images.size(), rank));
    int longest = 0;
    for (int i = 0; i < rank; ++i) {
      if (std::any_of(c->images[i].begin(), c->images[i].end(), [](int x) { return x < 0 || x > 2; }))
        throw std::invalid_argument("Z/2*Z/3 syllables must be 0 (s), 1 (t) or 2 (t^2)");
      GroupImage normal;
      for (int syllable : c->images[i]) normal = c2c3_multiply(normal, {syllable});
      if (normal != c->images[i]) throw std::invalid_argument("Z/2*Z/3 image not in normal form");
      letter_images_[rank + i + 1] = normal;
      letter_images_[rank - i - 1] = c2c3_inverse(normal);
      longest = std::max(longest, static_cast<int>(normal.size()));
    }
    max_weight_.assign(1, longest);
  }
}

SubgroupSpec SubgroupSpec::kernel_to_z(std::vector<int> weights) {
  const int rank = static_cast<int>(weights.size());
  KernelToZk kind;
  for (int w : weights) kind.weights.push_back({w});
  return {rank, std::move(kind)};
}

SubgroupSpec SubgroupSpec::kernel_to_c2c3(std::vector<GroupImage> images) {
  const int rank = static_cast<int>(images.size());
  return {rank, KernelToC2C3{std::move(images)}};
}

SubgroupSpec SubgroupSpec::parse(int rank, std::string_view text) {
  if (text == "full") return full(rank);
  if (text.starts_with("z:")) {
    const auto components = split(text.substr(2), '|');
    KernelToZk kind;
    kind.weights.assign(rank, {});
    for (const auto& comp : components) {
      const auto values = split(comp, ',');
      if (static_cast<int>(values.size()) != rank)
        throw RankMismatch(fmt::format("subgroup \"{}\" lists {} weights for rank {}", text, values.size(), rank));
      for (int i = 0; i < rank; ++i) kind.weights[i].push_back(parse_int(values[i]));
    }
    return {rank, std::move(kind)};
  }
  if (text.starts_with("c2c3:")) {
    const auto parts = split(text.substr(5), ',');
    if (static_cast<int>(parts.size()) != rank)
      throw RankMismatch(fmt::format("subgroup \"{}\" lists {} images for rank {}", text, parts.size(), rank));
    KernelToC2C3 kind;
    for (const auto& p : parts) kind.images.push_back(c2c3_parse(p));
    return {rank, std::move(kind)};
  }
  throw std::invalid_argument(fmt::format("unknown subgroup \"{}\" (expected full, z:..., c2c3:...)", text));
}

std::string SubgroupSpec::to_string() const {
  if (is_full()) return "full";
  if (const auto* z = std::get_if<KernelToZk>(&kind_)) {
    std::string out = "z:";
    for (std::size_t j = 0; j < z->weights.front().size(); ++j) {
      if (j) out += '|';
      for (int i = 0; i < rank_; ++i) out += fmt::format("{}{}", i ? "," : "", z->weights[i][j]);
    }
    return out;
  }
  const auto& c = std::get<KernelToC2C3>(kind_);
  std::string out = "c2c3:";
  for (int i = 0; i < rank_; ++i) out += (i ? "," : "") + c2c3_to_string(c.images[i]);
  return out;
}

GroupImage SubgroupSpec::identity() const {
  if (std::holds_alternative<KernelToZk>(kind_)) return GroupImage(max_weight_.size(), 0);
  return {};
}

bool SubgroupSpec::is_identity(const GroupImage& q) const {
  if (is_c2c3()) return q.empty();
  return std::all_of(q.begin(), q.end(), [](int x) { return x == 0; });
}

GroupImage SubgroupSpec::letter_image(Letter x) const {
  if (x == 0 || std::abs(x) > rank_) throw std::invalid_argument(fmt::format("letter {} outside rank {}", x, rank_));
  return letter_images_[x + rank_];
}

GroupImage SubgroupSpec::apply(const GroupImage& q, Letter x) const {
  if (is_full()) return q;
  const GroupImage& w = letter_images_[x + rank_];
  if (is_c2c3()) return c2c3_multiply(q, w);
  GroupImage out = q;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += w[j];
  return out;
}

GroupImage SubgroupSpec::multiply(const GroupImage& p, const GroupImage& q) const {
  if (is_full()) return {};
  if (is_c2c3()) return c2c3_multiply(p, q);
  GroupImage out = p;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += q[j];
  return out;
}

GroupImage SubgroupSpec::inverse(const GroupImage& q) const {
  if (is_c2c3()) return c2c3_inverse(q);
  GroupImage out = q;
  for (int& x : out) x = -x;
  return out;
}

GroupImage SubgroupSpec::image_of(std::span<const Letter> word) const {
  GroupImage q = identity();
  for (Letter x : word) q = apply(q, x);
  return q;
}

bool SubgroupSpec::can_return(const GroupImage& q, int remaining) const {
  if (is_full()) return true;
  if (is_c2c3()) return static_cast<int>(q.size()) <= remaining * max_weight_[0];
  for (std::size_t j = 0; j < q.size(); ++j)
    if (std::abs(q[j]) > remaining * max_weight_[j]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Counting and enumeration

namespace {

void visit_subgroup(const SubgroupSpec& spec, std::vector<Letter>& stack, const GroupImage& q, int m,
                    const std::vector<Letter>& letters,
                    const std::function<void(std::span<const Letter>)>& visit) {
  if (spec.is_identity(q)) visit(stack);
  const int len = static_cast<int>(stack.size());
  if (len == m) return;
  const Letter last = stack.empty() ? 0 : stack.back();
  for (Letter x : letters) {
    if (x == inverse_letter(last)) continue;
    GroupImage next = spec.apply(q, x);
    if (!spec.can_return(next, m - len - 1)) continue;
    stack.push_back(x);
    visit_subgroup(spec, stack, next, m, letters, visit);
    stack.pop_back();
  }
}

}  // namespace

void for_each_subgroup_element(const SubgroupSpec& spec, int m,
                               const std::function<void(std::span<const Letter>)>& visit,
                               const SubgroupCaps& caps) {
  if (m < 0) throw std::invalid_argument("radius must be non-negative");
  if (spec.is_c2c3() && m > caps.c2c3_max_radius)
    throw CapExceeded(fmt::format("Z/2*Z/3 kernel enumeration radius {} exceeds cap {}", m, caps.c2c3_max_radius));
  std::vector<Letter> stack;
  stack.reserve(static_cast<std::size_t>(m));
  visit_subgroup(spec, stack, spec.identity(), m, alphabet(spec.rank()), visit);
}

BigInt subgroup_ball_count(const SubgroupSpec& spec, int m, const SubgroupCaps& caps) {
  if (m < 0) throw std::invalid_argument("radius must be non-negative");
  if (spec.is_full()) return ball_size(spec.rank(), m);
  if (spec.is_c2c3()) {
    BigInt total = 0;
    std::uint64_t count = 0;
    for_each_subgroup_element(spec, m, [&](std::span<const Letter>) { ++count; }, caps);
    total = count;
    return total;
  }
  // States keyed by (image..., last letter); images that cannot return to 0
  // within the remaining length are dropped.
  const auto letters = alphabet(spec.rank());
  std::map<std::vector<int>, BigInt> layer;
  {
    std::vector<int> key = spec.identity();
    key.push_back(0);
    layer[key] = 1;
  }
  BigInt total = 1;
  for (int len = 1; len <= m; ++len) {
    std::map<std::vector<int>, BigInt> next;
    for (const auto& [key, count] : layer) {
      const Letter last = key.back();
      const GroupImage q(key.begin(), key.end() - 1);
      for (Letter x : letters) {
        if (x == inverse_letter(last)) continue;
        GroupImage r = spec.apply(q, x);
        if (!spec.can_return(r, m - len)) continue;
        r.push_back(x);
        next[r] += count;
      }
    }
    for (const auto& [key, count] : next)
      if (spec.is_identity(GroupImage(key.begin(), key.end() - 1))) total += count;
    layer = std::move(next);
  }
  return total;
}

// ---------------------------------------------------------------------------
// ReturnDistance

std::size_t ReturnDistance::KeyHash::operator()(const std::vector<int>& key) const {
  return boost::hash_range(key.begin(), key.end());
}

ReturnDistance::ReturnDistance(const SubgroupSpec& spec, int max_depth) : spec_(spec), max_depth_(max_depth) {
  if (max_depth < 0) throw std::invalid_argument("max_depth must be non-negative");
  if (spec_.is_full()) return;
  const auto letters = alphabet(spec_.rank());
  std::deque<std::vector<int>> queue;
  for (Letter x : letters) {
    std::vector<int> key = spec_.identity();
    key.push_back(x);
    table_.emplace(key, 0);
    queue.push_back(std::move(key));
  }
  // Reverse search: D(q, y) = min over x != y^-1 of 1 + D(q phi(x), x).
  while (!queue.empty()) {
    const std::vector<int> key = std::move(queue.front());
    queue.pop_front();
    const int d = table_.at(key);
    if (d >= max_depth_) continue;
    const Letter x = key.back();
    const GroupImage qx(key.begin(), key.end() - 1);
    const GroupImage q = spec_.apply(qx, inverse_letter(x));
    if (spec_.is_identity(q)) continue;
    for (Letter y : letters) {
      if (y == inverse_letter(x)) continue;
      std::vector<int> pred = q;
      pred.push_back(y);
      if (table_.emplace(pred, d + 1).second) queue.push_back(std::move(pred));
    }
  }
}

std::optional<int> ReturnDistance::distance(const GroupImage& q, Letter last) const {
  if (spec_.is_identity(q)) return 0;
  return exit_length(q, last, {}, max_depth_);
}

std::optional<int> ReturnDistance::exit_length(const GroupImage& q, Letter last, std::span<const Letter> excluded,
                                               int budget) const {
  budget = std::min(budget, max_depth_);
  if (budget < 1) return std::nullopt;
  int best = std::numeric_limits<int>::max();
  std::vector<int> key;
  for (Letter x : alphabet(spec_.rank())) {
    if (x == inverse_letter(last)) continue;
    if (std::find(excluded.begin(), excluded.end(), x) != excluded.end()) continue;
    if (spec_.is_full()) return 1;
    key = spec_.apply(q, x);
    key.push_back(x);
    const auto it = table_.find(key);
    if (it != table_.end()) best = std::min(best, 1 + it->second);
  }
  if (best > budget) return std::nullopt;
  return best;
}

// ---------------------------------------------------------------------------
// OrbitTrie

OrbitTrie::OrbitTrie(int rank) : rank_(rank), nodes_(1), children_(2 * rank, -1) {
  if (rank < 1 || rank > 26) throw std::invalid_argument(fmt::format("rank {} outside [1, 26]", rank));
}

void OrbitTrie::insert(std::span<const Letter> word) {
  if (contains(word)) return;
  const int len = static_cast<int>(word.size());
  int node = 0;
  auto touch = [&](int n) {
    ++nodes_[n].count;
    if (nodes_[n].min_depth < 0 || len < nodes_[n].min_depth) nodes_[n].min_depth = len;
  };
  touch(0);
  for (Letter x : word) {
    if (x == 0 || std::abs(x) > rank_) throw std::invalid_argument(fmt::format("letter {} outside rank {}", x, rank_));
    int c = child(node, x);
    if (c < 0) {
      c = static_cast<int>(nodes_.size());
      nodes_.emplace_back();
      children_.resize(children_.size() + 2 * rank_, -1);
      children_[node * 2 * rank_ + slot(x)] = c;
    }
    node = c;
    touch(node);
  }
  nodes_[node].terminal = true;
}

bool OrbitTrie::contains(std::span<const Letter> word) const {
  int node = 0;
  for (Letter x : word) {
    if (x == 0 || std::abs(x) > rank_) return false;
    node = child(node, x);
    if (node < 0) return false;
  }
  return nodes_[node].terminal;
}

std::size_t OrbitTrie::count_with_prefix(std::span<const Letter> prefix) const {
  int node = 0;
  for (Letter x : prefix) {
    if (x == 0 || std::abs(x) > rank_) return 0;
    node = child(node, x);
    if (node < 0) return 0;
  }
  return nodes_[node].count;
}

int OrbitTrie::distance_to(std::span<const Letter> x) const {
  if (empty()) throw std::invalid_argument("distance to an empty set");
  const int len = static_cast<int>(x.size());
  int best = std::numeric_limits<int>::max();
  int node = 0;
  for (int p = 0; p <= len && node >= 0; ++p) {
    if (nodes_[node].terminal) best = std::min(best, len - p);
    for (int s = 0; s < 2 * rank_; ++s) {
      const int c = children_[node * 2 * rank_ + s];
      if (c < 0 || (p < len && s == slot(x[p]))) continue;
      best = std::min(best, len + nodes_[c].min_depth - 2 * p);
    }
    node = p < len ? child(node, x[p]) : -1;
  }
  return best;
}

int OrbitTrie::max_busemann(std::span<const Letter> xi, int n) const {
  if (empty()) throw std::invalid_argument("maximum over an empty set");
  if (static_cast<int>(xi.size()) < n)
    throw InsufficientDepth(fmt::format("boundary prefix depth {} below n = {}", xi.size(), n));
  int best = std::numeric_limits<int>::min();
  int node = 0;
  for (int p = 0; p <= n && node >= 0; ++p) {
    if (nodes_[node].terminal) best = std::max(best, p);
    for (int s = 0; s < 2 * rank_; ++s) {
      const int c = children_[node * 2 * rank_ + s];
      if (c < 0 || (p < static_cast<int>(xi.size()) && s == slot(xi[p]))) continue;
      if (nodes_[c].min_depth <= n) best = std::max(best, 2 * p - nodes_[c].min_depth);
    }
    node = p < n ? child(node, xi[p]) : -1;
  }
  return best;
}

std::vector<ReducedWord> OrbitTrie::words() const {
  std::vector<ReducedWord> out;
  std::vector<Letter> stack;
  const auto letters = alphabet(rank_);
  std::function<void(int)> walk = [&](int node) {
    if (nodes_[node].terminal) out.emplace_back(rank_, stack);
    for (Letter x : letters) {
      const int c = child(node, x);
      if (c < 0) continue;
      stack.push_back(x);
      walk(c);
      stack.pop_back();
    }
  };
  if (!empty()) walk(0);
  return out;
}

void OrbitTrie::write_word_list(std::ostream& out) const {
  for (const auto& w : words()) out << w.to_string() << '\n';
}

OrbitTrie subgroup_ball_elements(const SubgroupSpec& spec, int m, const SubgroupCaps& caps) {
  OrbitTrie trie(spec.rank());
  for_each_subgroup_element(
      spec, m,
      [&](std::span<const Letter> h) {
        if (trie.size() >= caps.max_elements)
          throw CapExceeded(fmt::format("H cap B_{} exceeds {} elements", m, caps.max_elements));
        trie.insert(h);
      },
      caps);
  return trie;
}

// ---------------------------------------------------------------------------
// Distances to the subgroup ball

int distance_to_subgroup_ball(const ReturnDistance& returns, std::span<const Letter> x, int r) {
  const auto& spec = returns.spec();
  if (static_cast<int>(x.size()) != r)
    throw std::invalid_argument(fmt::format("vertex length {} differs from radius {}", x.size(), r));
  int best = r;  // the identity
  GroupImage q = spec.identity();
  for (int p = 1; p <= r; ++p) {
    q = spec.apply(q, x[p - 1]);
    if (r - p >= best) continue;
    if (spec.is_identity(q)) {
      best = r - p;
      continue;
    }
    const auto excluded = x.subspan(static_cast<std::size_t>(p), p < r ? 1 : 0);
    if (const auto len = returns.exit_length(q, x[p - 1], excluded, r - p))
      best = std::min(best, r - p + *len);
  }
  return best;
}

Rational shell_mass(const SubgroupSpec& spec, int r, int c, int max_radius) {
  if (r < 1) throw std::invalid_argument("shell radius must be >= 1");
  if (c < 0) throw std::invalid_argument("shell width must be >= 0");
  if (r > max_radius) throw CapExceeded(fmt::format("shell radius {} exceeds cap {}", r, max_radius));
  const BigInt sphere = sphere_size(spec.rank(), r);
  if (c >= r) return Rational(1);
  const ReturnDistance returns(spec, r);
  const auto letters = alphabet(spec.rank());
  const int branching = 2 * spec.rank() - 1;

  // Term for divergence depth p needs x_{p+1}; carried as a running minimum.
  BigInt hits = 0;
  std::vector<Letter> stack;
  std::function<void(const GroupImage&, int)> walk = [&](const GroupImage& q, int best) {
    const int p = static_cast<int>(stack.size());
    if (p == r) {
      if (spec.is_identity(q)) best = 0;
      if (best <= c) hits += 1;
      return;
    }
    const Letter last = p == 0 ? 0 : stack.back();
    for (Letter x : letters) {
      if (x == inverse_letter(last)) continue;
      int b = best;
      if (p > 0 && r - p < b) {
        if (spec.is_identity(q)) {
          b = r - p;
        } else {
          const Letter excluded[1] = {x};
          if (const auto len = returns.exit_length(q, last, excluded, r - p)) b = std::min(b, r - p + *len);
        }
      }
      if (b <= c) {
        hits += big_pow(branching, static_cast<unsigned>(r - p - 1));
        continue;
      }
      stack.push_back(x);
      walk(spec.apply(q, x), b);
      stack.pop_back();
    }
  };
  walk(spec.identity(), r);
  return Rational(hits, sphere);
}

}  // namespace ecglab
