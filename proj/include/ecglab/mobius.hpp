#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ecglab/rng.hpp"

namespace ecglab {

/// Element of PSL(2,Z): integer matrix [[a, b], [c, d]] with ad - bc = 1,
/// normalized so the first nonzero entry of (a, b, c, d) is positive.
class UnimodularMatrix {
 public:
  UnimodularMatrix() : UnimodularMatrix(1, 0, 0, 1) {}
  /// Throws std::invalid_argument unless ad - bc = 1.
  UnimodularMatrix(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d);

  static UnimodularMatrix identity() { return {}; }
  /// S = [[0, -1], [1, 0]], the order-2 stabilizer of i.
  static UnimodularMatrix S() { return {0, -1, 1, 0}; }
  /// T = [[1, 1], [0, 1]].
  static UnimodularMatrix T() { return {1, 1, 0, 1}; }

  std::int64_t a() const { return a_; }
  std::int64_t b() const { return b_; }
  std::int64_t c() const { return c_; }
  std::int64_t d() const { return d_; }

  UnimodularMatrix inverse() const { return {d_, -b_, -c_, a_}; }
  /// a^2 + b^2 + c^2 + d^2 = 2 cosh d(i, g.i).
  std::int64_t frobenius_sq() const { return a_ * a_ + b_ * b_ + c_ * c_ + d_ * d_; }
  std::string to_string() const;

  friend UnimodularMatrix operator*(const UnimodularMatrix& g, const UnimodularMatrix& h);
  friend bool operator==(const UnimodularMatrix&, const UnimodularMatrix&) = default;
  friend auto operator<=>(const UnimodularMatrix&, const UnimodularMatrix&) = default;

 private:
  std::int64_t a_, b_, c_, d_;
};

struct UpperHalfPoint {
  double re = 0.0;
  double im = 1.0;
};

/// Point of R u {inf}.
struct CirclePoint {
  double value = 0.0;
  bool infinite = false;

  static CirclePoint at_infinity() { return {0.0, true}; }
};

/// Exact orbit point g.i = (p + i) / q with p = ac + bd, q = c^2 + d^2.
struct OrbitPointKey {
  std::int64_t p;
  std::int64_t q;

  UpperHalfPoint point() const { return {static_cast<double>(p) / q, 1.0 / static_cast<double>(q)}; }
  friend auto operator<=>(const OrbitPointKey&, const OrbitPointKey&) = default;
};

OrbitPointKey orbit_point(const UnimodularMatrix& g);

UpperHalfPoint mobius_apply(const UnimodularMatrix& g, UpperHalfPoint z);
/// inf maps to a/c (inf if c = 0); the pole -d/c maps to inf.
CirclePoint mobius_apply(const UnimodularMatrix& g, CirclePoint xi);

double hyperbolic_distance(UpperHalfPoint z, UpperHalfPoint w);
/// d(i, g.i) = arcosh(frobenius^2 / 2).
double distance_from_base(const UnimodularMatrix& g);

/// Every element of PSL(2,Z) with d(i, g.i) <= n, sorted. Throws CapExceeded
/// for n > cap.
std::vector<UnimodularMatrix> enumerate_ball(double n, double cap = 10.0);
/// Distinct orbit points among `ball`, sorted.
std::vector<OrbitPointKey> orbit_points(const std::vector<UnimodularMatrix>& ball);
/// CSV rows a,b,c,d,distance with a header.
void write_ball_csv(std::ostream& out, const std::vector<UnimodularMatrix>& ball);

/// (c xi + d)^-2: the derivative of xi -> (a xi + b)/(c xi + d). Returns
/// +inf at the pole; throws std::invalid_argument for xi = inf.
double rn_lebesgue(const UnimodularMatrix& g, CirclePoint xi);

/// P(g.i, xi) / P(i, xi) with P the Poisson kernel of the upper half-plane;
/// equals (1 + xi^2) / ((a - c xi)^2 + (b - d xi)^2). Depends only on g.i.
double poisson_ratio(const UnimodularMatrix& g, CirclePoint xi);

/// log(P(z, xi) / P(i, xi)).
double busemann_circle(CirclePoint xi, UpperHalfPoint z);

/// Standard Cauchy draw tan(pi (U - 1/2)), the harmonic measure seen from i.
CirclePoint sample_harmonic(Rng& rng);
CirclePoint harmonic_from_uniform(double u);
/// CDF of harmonic measure from i: 1/2 + atan(x)/pi.
double harmonic_cdf(double x);

}  // namespace ecglab
