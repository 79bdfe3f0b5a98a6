#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"

#include "ecglab/errors.hpp"
#include "ecglab/rng.hpp"
#include "ecglab/subgroup.hpp"

using namespace ecglab;

namespace {

// Subgroup membership by definition, independent of SubgroupSpec.
bool in_z_kernel(const oracle::Word& w) { return oracle::exponent_sum(w, 1) == 0; }

// Z/2 * Z/3 images by naive rewriting: T -> tt, then delete ss and ttt.
std::string c2c3_reduce(const std::string& word) {
  std::string w;
  for (char c : word) w += c == 'T' ? std::string("tt") : std::string(1, c);
  for (bool changed = true; changed;) {
    changed = false;
    for (const std::string pattern : {"ss", "ttt"}) {
      const auto pos = w.find(pattern);
      if (pos == std::string::npos) continue;
      w.erase(pos, pattern.size());
      changed = true;
    }
  }
  return w;
}

bool in_c2c3_kernel(const oracle::Word& w) {
  // a -> s, b -> t as in "c2c3:s,t".
  std::string image;
  for (int x : w) image += x == 1 ? "s" : x == -1 ? "s" : x == 2 ? "t" : "T";
  return c2c3_reduce(image).empty();
}

long brute_count(int rank, int m, bool (*member)(const oracle::Word&)) {
  long n = 0;
  for (const auto& w : oracle::all_reduced_words(rank, m))
    if (member(w)) ++n;
  return n;
}

int brute_distance(const oracle::Word& x, const std::vector<oracle::Word>& targets) {
  int best = 1 << 30;
  for (const auto& s : targets)
    best = std::min(best, static_cast<int>(x.size() + s.size() - 2 * oracle::prefix_length(x, s)));
  return best;
}

}  // namespace

TEST_CASE("subgroup specs parse, print and validate") {
  CHECK(SubgroupSpec::parse(2, "full").is_full());
  CHECK(SubgroupSpec::parse(2, "z:1,0").to_string() == "z:1,0");
  CHECK(SubgroupSpec::parse(2, "z:1,0|0,1").to_string() == "z:1,0|0,1");
  CHECK(SubgroupSpec::parse(2, "c2c3:s,t").to_string() == "c2c3:s,t");
  CHECK_THROWS(SubgroupSpec::parse(2, "z:1,0,0"));
  CHECK_THROWS(SubgroupSpec::parse(2, "q:1"));
  CHECK_THROWS(SubgroupSpec::parse(2, "c2c3:x,t"));
  CHECK_THROWS(SubgroupSpec::parse(2, "z:x,0"));
}

TEST_CASE("Z/2 * Z/3 normal forms") {
  CHECK(c2c3_parse("ss").empty());
  CHECK(c2c3_parse("ttt").empty());
  CHECK(c2c3_parse("tT").empty());
  CHECK(c2c3_parse("TT") == c2c3_parse("t"));
  Rng rng(21);
  const char letters[] = {'s', 't', 'T'};
  auto random_text = [&] {
    std::string w;
    for (int i = 0, n = static_cast<int>(rng.uniform_index(8)); i < n; ++i) w += letters[rng.uniform_index(3)];
    return w;
  };
  for (int i = 0; i < 500; ++i) {
    const auto p = random_text(), q = random_text(), r = random_text();
    const auto P = c2c3_parse(p), Q = c2c3_parse(q), R = c2c3_parse(r);
    CHECK(c2c3_multiply(c2c3_multiply(P, Q), R) == c2c3_multiply(P, c2c3_multiply(Q, R)));
    CHECK(c2c3_multiply(P, c2c3_inverse(P)).empty());
    CHECK(c2c3_multiply(P, Q) == c2c3_parse(p + q));
    CHECK(c2c3_parse(p).empty() == c2c3_reduce(p).empty());
  }
}

TEST_CASE("subgroup ball counts: small values") {
  const auto h = SubgroupSpec::kernel_to_z({1, 0});
  CHECK(subgroup_ball_count(h, 0) == 1);
  CHECK(subgroup_ball_count(h, 2) == 5);
  CHECK(subgroup_ball_count(h, 3) == 11);
  CHECK(brute_count(2, 2, in_z_kernel) == 5);
  CHECK(brute_count(2, 3, in_z_kernel) == 11);
  for (int m = 0; m <= 6; ++m) CHECK(subgroup_ball_count(SubgroupSpec::full(2), m) == ball_size(2, m));
}

TEST_CASE("dynamic program equals brute force for m <= 8") {
  const auto h = SubgroupSpec::kernel_to_z({1, 0});
  const auto k = SubgroupSpec::parse(2, "c2c3:s,t");
  for (int m = 0; m <= 8; ++m) {
    CHECK(subgroup_ball_count(h, m) == brute_count(2, m, in_z_kernel));
    CHECK(subgroup_ball_count(k, m) == brute_count(2, m, in_c2c3_kernel));
  }
  // Two-component kernel in rank 3: zero a- and b-exponent.
  const auto h3 = SubgroupSpec::parse(3, "z:1,0,0|0,1,0");
  auto in_h3 = [](const oracle::Word& w) { return oracle::exponent_sum(w, 1) == 0 && oracle::exponent_sum(w, 2) == 0; };
  for (int m = 0; m <= 5; ++m) {
    long brute = 0;
    for (const auto& w : oracle::all_reduced_words(3, m)) brute += in_h3(w);
    CHECK(subgroup_ball_count(h3, m) == brute);
  }
}

TEST_CASE("Z/2 * Z/3 kernel counts and growth rate") {
  const auto k = SubgroupSpec::parse(2, "c2c3:s,t");
  const std::vector<long> expected{1, 1, 3, 5, 11, 35, 79, 215, 513, 1427, 3889, 10353, 28093};
  std::vector<double> counts;
  for (int m = 0; m <= 12; ++m) {
    CHECK(subgroup_ball_count(k, m) == expected[static_cast<std::size_t>(m)]);
    counts.push_back(static_cast<double>(expected[static_cast<std::size_t>(m)]));
  }
  counts.push_back(to_double(subgroup_ball_count(k, 13)));
  counts.push_back(to_double(subgroup_ball_count(k, 14)));
  CHECK(growth_exponent(std::span<const double>(counts).subspan(1)) < std::log(3.0));
  CHECK_THROWS_AS(subgroup_ball_count(k, 17), CapExceeded);
}

TEST_CASE("pruning never discards a word of the subgroup") {
  const auto h = SubgroupSpec::kernel_to_z({2, -1});
  for (const auto& w : oracle::all_reduced_words(2, 7)) {
    if (h.image_of(w) != h.identity()) continue;
    for (std::size_t k = 0; k <= w.size(); ++k) {
      const std::span<const Letter> prefix(w.data(), k);
      CHECK(h.can_return(h.image_of(prefix), static_cast<int>(w.size() - k)));
    }
  }
}

TEST_CASE("subgroup ball tries") {
  const auto h = SubgroupSpec::kernel_to_z({1, 0});
  CHECK(subgroup_ball_elements(h, 2).size() == 5);
  CHECK(subgroup_ball_elements(SubgroupSpec::full(2), 1).size() == 5);
  CHECK(subgroup_ball_elements(h, 0).size() == 1);
  CHECK(subgroup_ball_elements(h, 0).contains({}));
  const auto trie = subgroup_ball_elements(h, 4);
  std::vector<oracle::Word> brute;
  for (const auto& w : oracle::all_reduced_words(2, 4))
    if (in_z_kernel(w)) brute.push_back(w);
  CHECK(trie.size() == brute.size());
  for (const auto& w : brute) CHECK(trie.contains(w));
  CHECK(trie.count_with_prefix(std::vector<Letter>{2}) ==
        static_cast<std::size_t>(std::count_if(brute.begin(), brute.end(), [](const auto& w) { return !w.empty() && w[0] == 2; })));
  std::ostringstream list;
  subgroup_ball_elements(h, 1).write_word_list(list);
  CHECK(list.str() == "e\nb\nB\n");
  SubgroupCaps caps;
  caps.max_elements = 10;
  CHECK_THROWS_AS(subgroup_ball_elements(h, 6, caps), CapExceeded);
}

TEST_CASE("distance to a set of orbit points") {
  const auto h = SubgroupSpec::kernel_to_z({1, 0});
  const auto trie = subgroup_ball_elements(h, 3);
  CHECK(trie.distance_to(std::vector<Letter>{2, 2}) == 0);

  OrbitTrie identity_only(2);
  identity_only.insert(std::vector<Letter>{});
  CHECK(identity_only.distance_to(std::vector<Letter>{1}) == 1);

  // x = aab against the 11 elements of H cap B_3: the identity is nearest at
  // distance 3. Elements starting with a (abA, aBA) share one letter with x
  // and sit at distance 4.
  std::vector<oracle::Word> elements;
  for (const auto& w : oracle::all_reduced_words(2, 3))
    if (in_z_kernel(w)) elements.push_back(w);
  REQUIRE(elements.size() == 11);
  const oracle::Word aab{1, 1, 2};
  CHECK(brute_distance(aab, elements) == 3);
  CHECK(trie.distance_to(aab) == 3);

  CHECK_THROWS(OrbitTrie(2).distance_to(aab));
}

TEST_CASE("return distances agree with brute-force distances on whole spheres") {
  for (const char* text : {"z:1,0", "z:1,1", "c2c3:s,t"}) {
    const auto spec = SubgroupSpec::parse(2, text);
    const ReturnDistance returns(spec, 12);
    for (int r = 1; r <= 6; ++r) {
      std::vector<oracle::Word> elements;
      for (const auto& w : oracle::all_reduced_words(2, r))
        if (spec.contains(w)) elements.push_back(w);
      for (const auto& x : oracle::all_reduced_words(2, r))
        if (static_cast<int>(x.size()) == r) CHECK(distance_to_subgroup_ball(returns, x, r) == brute_distance(x, elements));
    }
  }
}

TEST_CASE("max Busemann value over a subgroup ball") {
  const auto h = SubgroupSpec::kernel_to_z({1, 0});
  const auto trie = subgroup_ball_elements(h, 6);
  std::vector<oracle::Word> elements;
  for (const auto& w : oracle::all_reduced_words(2, 6))
    if (in_z_kernel(w)) elements.push_back(w);
  Rng rng(22);
  for (int i = 0; i < 200; ++i) {
    oracle::Word xi;
    while (xi.size() < 8) {
      const int x = static_cast<int>(rng.uniform_index(2)) + 1;
      const int s = rng.sign() > 0 ? x : -x;
      if (!xi.empty() && xi.back() == -s) continue;
      xi.push_back(s);
    }
    for (int n = 0; n <= 6; ++n) {
      long best = -1000;
      for (const auto& e : elements)
        if (static_cast<int>(e.size()) <= n) best = std::max(best, oracle::busemann_by_distance(xi, e));
      CHECK(trie.max_busemann(xi, n) == best);
    }
  }
}

TEST_CASE("shell mass at width zero is the zero-exponent fraction of the sphere") {
  const auto h = SubgroupSpec::kernel_to_z({1, 0});
  for (int r = 1; r <= 8; ++r) {
    long zero = 0, total = 0;
    for (const auto& w : oracle::all_reduced_words(2, r)) {
      if (static_cast<int>(w.size()) != r) continue;
      ++total;
      zero += in_z_kernel(w);
    }
    CHECK(shell_mass(h, r, 0) == Rational(zero, total));
  }
  // Decreasing once past the parity effects of short radii.
  for (int r = 4; r < 10; ++r) CHECK(shell_mass(h, r + 1, 0) < shell_mass(h, r, 0));
  CHECK(shell_mass(SubgroupSpec::full(2), 5, 0) == 1);
  CHECK(shell_mass(h, 5, 5) == 1);
  CHECK(shell_mass(h, 5, 7) == 1);
  CHECK_THROWS_AS(shell_mass(h, 15, 0), CapExceeded);
}

TEST_CASE("shell mass grows with the width") {
  const auto h = SubgroupSpec::kernel_to_z({1, 0});
  for (int r = 2; r <= 8; ++r)
    for (int c = 0; c < r; ++c) CHECK(shell_mass(h, r, c) <= shell_mass(h, r, c + 1));
}
