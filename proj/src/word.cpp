#include "ecglab/word.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include <fmt/format.h>

#include "ecglab/errors.hpp"

namespace ecglab {

namespace {

void check_rank(int rank) {
  if (rank < 1 || rank > 26) throw std::invalid_argument(fmt::format("rank {} outside [1, 26]", rank));
}

void check_same_rank(const ReducedWord& u, const ReducedWord& v) {
  if (u.rank() != v.rank())
    throw RankMismatch(fmt::format("rank mismatch: {} vs {}", u.rank(), v.rank()));
}

}  // namespace

char letter_char(Letter x) {
  const int i = std::abs(x) - 1;
  return static_cast<char>(x > 0 ? 'a' + i : 'A' + i);
}

ReducedWord::ReducedWord(int rank) : rank_(rank) { check_rank(rank); }

ReducedWord::ReducedWord(int rank, std::vector<Letter> letters) : rank_(rank), letters_(std::move(letters)) {
  check_rank(rank);
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    const Letter x = letters_[i];
    if (x == 0 || std::abs(x) > rank)
      throw std::invalid_argument(fmt::format("letter {} outside rank {}", x, rank));
    if (i > 0 && letters_[i - 1] == inverse_letter(x))
      throw std::invalid_argument(fmt::format("word not freely reduced at position {}", i));
  }
}

ReducedWord ReducedWord::parse(int rank, std::string_view text) {
  std::vector<Letter> letters;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    if (ch == 'e' && text.find_first_not_of(" e") == std::string_view::npos) continue;
    if (std::islower(static_cast<unsigned char>(ch)))
      letters.push_back(ch - 'a' + 1);
    else if (std::isupper(static_cast<unsigned char>(ch)))
      letters.push_back(-(ch - 'A' + 1));
    else
      throw std::invalid_argument(fmt::format("bad letter '{}' in word \"{}\"", ch, text));
  }
  return ReducedWord(rank, std::move(letters));
}

ReducedWord ReducedWord::inverse() const {
  ReducedWord out(rank_);
  out.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) out.letters_.push_back(inverse_letter(*it));
  return out;
}

ReducedWord ReducedWord::prefix(std::size_t k) const {
  if (k > letters_.size()) throw std::out_of_range("prefix longer than word");
  ReducedWord out(rank_);
  out.letters_.assign(letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

void ReducedWord::push_back(Letter x) {
  if (x == 0 || std::abs(x) > rank_) throw std::invalid_argument(fmt::format("letter {} outside rank {}", x, rank_));
  if (!letters_.empty() && letters_.back() == inverse_letter(x))
    throw std::invalid_argument("push_back would cancel the last letter");
  letters_.push_back(x);
}

std::string ReducedWord::to_string() const {
  if (letters_.empty()) return "e";
  std::string out;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) out += ' ';
    out += letter_char(letters_[i]);
  }
  return out;
}

ReducedWord multiply(const ReducedWord& u, const ReducedWord& v) {
  check_same_rank(u, v);
  const auto lu = u.letters();
  const auto lv = v.letters();
  std::size_t cancel = 0;
  while (cancel < lu.size() && cancel < lv.size() &&
         lu[lu.size() - 1 - cancel] == inverse_letter(lv[cancel]))
    ++cancel;
  std::vector<Letter> out(lu.begin(), lu.end() - static_cast<std::ptrdiff_t>(cancel));
  out.insert(out.end(), lv.begin() + static_cast<std::ptrdiff_t>(cancel), lv.end());
  return ReducedWord(u.rank(), std::move(out));
}

std::size_t common_prefix(std::span<const Letter> u, std::span<const Letter> v) {
  std::size_t k = 0;
  while (k < u.size() && k < v.size() && u[k] == v[k]) ++k;
  return k;
}

std::size_t gromov_product(const ReducedWord& u, const ReducedWord& v) {
  check_same_rank(u, v);
  return common_prefix(u.letters(), v.letters());
}

int busemann_tree(const ReducedWord& xi_prefix, const ReducedWord& g) {
  check_same_rank(xi_prefix, g);
  if (xi_prefix.length() < g.length())
    throw InsufficientDepth(
        fmt::format("boundary prefix depth {} below |g| = {}", xi_prefix.length(), g.length()));
  return 2 * static_cast<int>(gromov_product(xi_prefix, g)) - static_cast<int>(g.length());
}

std::vector<Letter> alphabet(int rank) {
  std::vector<Letter> out;
  out.reserve(2 * rank);
  for (int i = 1; i <= rank; ++i) {
    out.push_back(i);
    out.push_back(-i);
  }
  return out;
}

std::vector<ReducedWord> ball(int rank, int n) {
  check_rank(rank);
  if (n < 0) throw std::invalid_argument("ball radius must be non-negative");
  const auto letters = alphabet(rank);
  std::vector<ReducedWord> out{ReducedWord(rank)};
  std::size_t level_begin = 0;
  for (int len = 1; len <= n; ++len) {
    const std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (Letter x : letters) {
        if (!out[i].is_identity() && out[i].back() == inverse_letter(x)) continue;
        ReducedWord w = out[i];
        w.push_back(x);
        out.push_back(std::move(w));
      }
    }
    level_begin = level_end;
  }
  return out;
}

namespace {

void visit_words(std::vector<Letter>& stack, int n, const std::vector<Letter>& letters,
                 const std::function<bool(std::span<const Letter>)>& visit) {
  if (!visit(stack) || static_cast<int>(stack.size()) == n) return;
  const Letter last = stack.empty() ? 0 : stack.back();
  for (Letter x : letters) {
    if (x == inverse_letter(last)) continue;
    stack.push_back(x);
    visit_words(stack, n, letters, visit);
    stack.pop_back();
  }
}

}  // namespace

void for_each_word(int rank, int n, const std::function<bool(std::span<const Letter>)>& visit) {
  check_rank(rank);
  if (n < 0) throw std::invalid_argument("ball radius must be non-negative");
  std::vector<Letter> stack;
  stack.reserve(static_cast<std::size_t>(n));
  visit_words(stack, n, alphabet(rank), visit);
}

BigInt sphere_size(int rank, int n) {
  if (n == 0) return 1;
  return BigInt(2 * rank) * big_pow(2 * rank - 1, static_cast<unsigned>(n - 1));
}

BigInt ball_size(int rank, int n) {
  BigInt total = 0;
  for (int k = 0; k <= n; ++k) total += sphere_size(rank, k);
  return total;
}

double growth_exponent(std::span<const double> counts) {
  if (counts.size() < 4) throw std::invalid_argument("growth_exponent needs at least 4 counts");
  for (double c : counts)
    if (!(c > 0)) throw std::invalid_argument("growth_exponent needs positive counts");
  const std::size_t begin = counts.size() / 2;
  const double k = static_cast<double>(counts.size() - begin);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = begin; i < counts.size(); ++i) {
    const double x = static_cast<double>(i);
    const double y = std::log(counts[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace ecglab
