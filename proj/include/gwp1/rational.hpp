#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "gwp1/errors.hpp"

namespace gwp1 {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw ContractError("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Canonical text form, always "p/q" with q > 0.
inline std::string to_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// Accepts "p", "p/q" and "-p/q"; result is canonicalized.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  Rational r;
  try {
    auto slash = s.find('/');
    if (slash == std::string::npos) {
      r = Rational(Integer(s));
    } else {
      Integer num(s.substr(0, slash));
      Integer den(s.substr(slash + 1));
      if (den == 0) throw ContractError("rational with zero denominator: " + s);
      r = Rational(num, den);
    }
  } catch (const std::invalid_argument&) {
    throw ContractError("malformed rational: " + s);
  }
  r.canonicalize();
  return r;
}

inline Rational factorial(int n) {
  Integer f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return Rational(f);
}

inline Rational binomial(const Rational& top, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) {
    r *= (top - i);
    r /= (i + 1);
  }
  return r;
}

inline Rational rpow(const Rational& x, int e) {
  if (e < 0) {
    if (x == 0) throw ContractError("negative power of zero");
    return rpow(1 / x, -e);
  }
  Rational r = 1, b = x;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

}  // namespace gwp1
