#include "ecglab/mobius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>
#include <tuple>
#include <utility>

#include <fmt/format.h>

#include "ecglab/errors.hpp"

namespace ecglab {

UnimodularMatrix::UnimodularMatrix(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d)
    : a_(a), b_(b), c_(c), d_(d) {
  if (a * d - b * c != 1)
    throw std::invalid_argument(fmt::format("determinant of [[{}, {}], [{}, {}]] is not 1", a, b, c, d));
  const std::int64_t first = a != 0 ? a : (b != 0 ? b : c);
  if (first < 0) {
    a_ = -a_;
    b_ = -b_;
    c_ = -c_;
    d_ = -d_;
  }
}

std::string UnimodularMatrix::to_string() const { return fmt::format("[[{}, {}], [{}, {}]]", a_, b_, c_, d_); }

UnimodularMatrix operator*(const UnimodularMatrix& g, const UnimodularMatrix& h) {
  return {g.a_ * h.a_ + g.b_ * h.c_, g.a_ * h.b_ + g.b_ * h.d_, g.c_ * h.a_ + g.d_ * h.c_,
          g.c_ * h.b_ + g.d_ * h.d_};
}

OrbitPointKey orbit_point(const UnimodularMatrix& g) {
  return {g.a() * g.c() + g.b() * g.d(), g.c() * g.c() + g.d() * g.d()};
}

UpperHalfPoint mobius_apply(const UnimodularMatrix& g, UpperHalfPoint z) {
  const double a = static_cast<double>(g.a()), b = static_cast<double>(g.b());
  const double c = static_cast<double>(g.c()), d = static_cast<double>(g.d());
  // (az + b)/(cz + d) = ((az + b)(c conj(z) + d)) / |cz + d|^2
  const double den_re = c * z.re + d;
  const double den_im = c * z.im;
  const double norm = den_re * den_re + den_im * den_im;
  const double num_re = a * z.re + b;
  const double num_im = a * z.im;
  return {(num_re * den_re + num_im * den_im) / norm, z.im / norm};
}

CirclePoint mobius_apply(const UnimodularMatrix& g, CirclePoint xi) {
  const double a = static_cast<double>(g.a()), b = static_cast<double>(g.b());
  const double c = static_cast<double>(g.c()), d = static_cast<double>(g.d());
  if (xi.infinite) return g.c() == 0 ? CirclePoint::at_infinity() : CirclePoint{a / c, false};
  const double den = c * xi.value + d;
  if (den == 0.0) return CirclePoint::at_infinity();
  return {(a * xi.value + b) / den, false};
}

double hyperbolic_distance(UpperHalfPoint z, UpperHalfPoint w) {
  const double dx = z.re - w.re, dy = z.im - w.im;
  return std::acosh(1.0 + (dx * dx + dy * dy) / (2.0 * z.im * w.im));
}

double distance_from_base(const UnimodularMatrix& g) {
  return std::acosh(static_cast<double>(g.frobenius_sq()) / 2.0);
}

std::vector<UnimodularMatrix> enumerate_ball(double n, double cap) {
  if (n < 0) throw std::invalid_argument("ball radius must be non-negative");
  if (n > cap) throw CapExceeded(fmt::format("matrix ball radius {} exceeds cap {}", n, cap));
  const auto bound = static_cast<std::int64_t>(std::floor(2.0 * std::cosh(n) + 1e-9));
  const auto side = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(bound))));
  std::set<UnimodularMatrix> found;
  for (std::int64_t a = -side; a <= side; ++a) {
    for (std::int64_t c = -side; c <= side; ++c) {
      const std::int64_t column = a * a + c * c;
      if (column == 0 || column > bound || std::gcd(a, c) != 1) continue;
      // Particular solution of a d - b c = 1, then the line (b + k a, d + k c).
      std::int64_t x = 1, y = 0, r0 = a, x1 = 0, y1 = 1, r1 = c;
      while (r1 != 0) {
        const std::int64_t t = r0 / r1;
        std::tie(r0, r1) = std::make_pair(r1, r0 - t * r1);
        std::tie(x, x1) = std::make_pair(x1, x - t * x1);
        std::tie(y, y1) = std::make_pair(y1, y - t * y1);
      }
      // a x + c y = r0 = +-1, so d = x r0, b = -y r0.
      const std::int64_t d0 = x * r0, b0 = -y * r0;
      const std::int64_t rest = bound - column;
      const double k_star = -static_cast<double>(a * b0 + c * d0) / static_cast<double>(column);
      const auto centre = static_cast<std::int64_t>(std::llround(k_star));
      auto emit = [&](std::int64_t k) {
        const std::int64_t b = b0 + k * a, d = d0 + k * c;
        if (b * b + d * d > rest) return false;
        found.emplace(a, b, c, d);
        return true;
      };
      emit(centre);
      for (std::int64_t k = centre + 1; emit(k); ++k) {
      }
      for (std::int64_t k = centre - 1; emit(k); --k) {
      }
    }
  }
  return {found.begin(), found.end()};
}

std::vector<OrbitPointKey> orbit_points(const std::vector<UnimodularMatrix>& ball) {
  std::set<OrbitPointKey> keys;
  for (const auto& g : ball) keys.insert(orbit_point(g));
  return {keys.begin(), keys.end()};
}

void write_ball_csv(std::ostream& out, const std::vector<UnimodularMatrix>& ball) {
  out << "a,b,c,d,distance\n";
  for (const auto& g : ball)
    out << fmt::format("{},{},{},{},{:.12g}\n", g.a(), g.b(), g.c(), g.d(), distance_from_base(g));
}

double rn_lebesgue(const UnimodularMatrix& g, CirclePoint xi) {
  if (xi.infinite) throw std::invalid_argument("Lebesgue derivative undefined at infinity");
  const double den = static_cast<double>(g.c()) * xi.value + static_cast<double>(g.d());
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (den * den);
}

double poisson_ratio(const UnimodularMatrix& g, CirclePoint xi) {
  if (xi.infinite) throw std::invalid_argument("Poisson ratio undefined at infinity");
  const double x = xi.value;
  const double u = static_cast<double>(g.a()) - static_cast<double>(g.c()) * x;
  const double v = static_cast<double>(g.b()) - static_cast<double>(g.d()) * x;
  return (1.0 + x * x) / (u * u + v * v);
}

double busemann_circle(CirclePoint xi, UpperHalfPoint z) {
  if (xi.infinite) throw std::invalid_argument("Busemann function needs a finite boundary point");
  const double dx = z.re - xi.value;
  return std::log(z.im * (1.0 + xi.value * xi.value) / (dx * dx + z.im * z.im));
}

CirclePoint harmonic_from_uniform(double u) {
  if (u == 0.5) return {0.0, false};
  return {std::tan(std::numbers::pi * (u - 0.5)), false};
}

CirclePoint sample_harmonic(Rng& rng) { return harmonic_from_uniform(rng.uniform()); }

double harmonic_cdf(double x) { return 0.5 + std::atan(x) / std::numbers::pi; }

}  // namespace ecglab
