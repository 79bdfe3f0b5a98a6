#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

#include "ecglab/errors.hpp"
#include "ecglab/rng.hpp"
#include "ecglab/word.hpp"

using namespace ecglab;

namespace {

ReducedWord w2(const char* text) { return ReducedWord::parse(2, text); }

oracle::Word plain(const ReducedWord& w) { return {w.letters().begin(), w.letters().end()}; }

ReducedWord random_word(Rng& rng, int rank, std::size_t max_length) {
  const auto length = rng.uniform_index(max_length + 1);
  std::vector<Letter> letters;
  while (letters.size() < length) {
    const int g = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(rank))) + 1;
    const Letter x = rng.sign() > 0 ? g : -g;
    if (!letters.empty() && letters.back() == -x) continue;
    letters.push_back(x);
  }
  return ReducedWord(rank, letters);
}

}  // namespace

TEST_CASE("words reject unreduced or out-of-range letters") {
  CHECK_THROWS_AS(ReducedWord(2, {1, -1}), std::invalid_argument);
  CHECK_THROWS_AS(ReducedWord(2, {3}), std::invalid_argument);
  CHECK_THROWS_AS(ReducedWord(2, {0}), std::invalid_argument);
  CHECK_THROWS_AS(ReducedWord(0), std::invalid_argument);
  CHECK(w2("e").is_identity());
  CHECK(w2("a b A").to_string() == "a b A");
  CHECK(w2("abA") == w2("a b A"));
  CHECK(ReducedWord(2).to_string() == "e");
  ReducedWord w = w2("ab");
  CHECK_THROWS_AS(w.push_back(-2), std::invalid_argument);
}

TEST_CASE("multiplication examples") {
  CHECK(multiply(w2("a"), w2("A")).is_identity());
  CHECK(multiply(w2("ab"), w2("Ba")) == w2("aa"));
  CHECK(multiply(w2("ab"), w2("e")) == w2("ab"));
  CHECK_THROWS_AS(multiply(w2("a"), ReducedWord::parse(3, "c")), RankMismatch);
}

TEST_CASE("multiplication agrees with naive reduction and is associative") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const auto u = random_word(rng, 3, 7), v = random_word(rng, 3, 7), w = random_word(rng, 3, 7);
    CHECK(plain(multiply(u, v)) == oracle::concat(plain(u), plain(v)));
    CHECK(multiply(multiply(u, v), w) == multiply(u, multiply(v, w)));
    CHECK(multiply(u, u.inverse()).is_identity());
    CHECK(plain(u.inverse()) == oracle::invert(plain(u)));
  }
}

TEST_CASE("Gromov product examples and the length identity") {
  CHECK(gromov_product(w2("abab"), w2("abb")) == 2);
  CHECK(gromov_product(w2("abAB"), w2("abAB")) == 4);
  CHECK(gromov_product(w2("a"), w2("A")) == 0);
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const auto u = random_word(rng, 2, 9), v = random_word(rng, 2, 9);
    const std::size_t lhs = 2 * gromov_product(u, v);
    CHECK(lhs == u.length() + v.length() - oracle::concat(oracle::invert(plain(u)), plain(v)).size());
  }
}

TEST_CASE("Busemann values on the tree") {
  const ReducedWord xi = w2("abababab");
  CHECK(busemann_tree(xi, w2("ab")) == 2);
  CHECK(busemann_tree(xi, w2("e")) == 0);
  CHECK(busemann_tree(xi, w2("aB")) == 0);
  CHECK_THROWS_AS(busemann_tree(w2("ab"), w2("abab")), InsufficientDepth);

  // The limit definition |xi_k| - |g^-1 xi_k| on a long prefix.
  Rng rng(13);
  for (int i = 0; i < 500; ++i) {
    const auto g = random_word(rng, 2, 6);
    auto x = random_word(rng, 2, 14);
    if (x.length() < g.length()) continue;
    CHECK(busemann_tree(x, g) == oracle::busemann_by_distance(plain(x), plain(g)));
  }
}

TEST_CASE("balls match brute-force enumeration and the closed form") {
  CHECK(ball(2, 0).size() == 1);
  CHECK(ball(2, 1).size() == 5);
  CHECK(ball(2, 3).size() == 53);
  for (int n = 0; n <= 10; ++n) {
    const auto b = ball(2, n);
    CHECK(b.size() == static_cast<std::size_t>(2 * oracle::power(3, n) - 1));
    CHECK(ball_size(2, n) == b.size());
  }
  for (int rank : {2, 3}) {
    for (int n = 0; n <= 5; ++n) {
      const auto b = ball(rank, n);
      const auto naive = oracle::all_reduced_words(rank, n);
      REQUIRE(b.size() == naive.size());
      std::set<oracle::Word> lhs, rhs(naive.begin(), naive.end());
      for (const auto& w : b) lhs.insert(plain(w));
      CHECK(lhs == rhs);
    }
  }
  CHECK(ball_size(1, 4) == 9);
  CHECK(sphere_size(2, 0) == 1);
  CHECK(sphere_size(2, 3) == 36);
}

TEST_CASE("depth-first visit honours pruning") {
  std::size_t visited = 0;
  for_each_word(2, 4, [&](std::span<const Letter> w) {
    ++visited;
    return w.empty() || w.front() == 1;  // only the subtree under a
  });
  // identity, the 4 letters, then a's subtree: 3 + 9 + 27 more words.
  CHECK(visited == 1 + 4 + 3 + 9 + 27);
}

TEST_CASE("growth exponent") {
  std::vector<double> counts;
  for (int n = 1; n <= 20; ++n) counts.push_back(2.0 * std::pow(3.0, n) - 1.0);
  CHECK(growth_exponent(counts) == doctest::Approx(std::log(3.0)).epsilon(0.01 / std::log(3.0)));
  const std::vector<double> flat(8, 5.0);
  CHECK(growth_exponent(flat) == doctest::Approx(0.0));
  CHECK_THROWS(growth_exponent(std::vector<double>{1, 2, 3}));
  CHECK_THROWS(growth_exponent(std::vector<double>{1, 0, 3, 4}));
}
