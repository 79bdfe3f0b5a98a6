#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace ecglab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt big_pow(long base, unsigned exponent) {
  return boost::multiprecision::pow(BigInt(base), exponent);
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(const BigInt& n) { return n.convert_to<double>(); }

}  // namespace ecglab
