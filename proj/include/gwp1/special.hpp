#pragma once

#include <mutex>
#include <shared_mutex>
#include <vector>

#include "gwp1/poly.hpp"
#include "gwp1/rational.hpp"
#include "gwp1/series.hpp"

namespace gwp1 {

namespace detail {

class BernoulliTable {
 public:
  Rational get(int k) {
    {
      std::shared_lock lock(mu_);
      if (k < int(b_.size())) return b_[k];
    }
    std::unique_lock lock(mu_);
    if (b_.empty()) b_.push_back(1);
    // sum_{j=0}^{m} binom(m+1, j) B_j = 0
    while (int(b_.size()) <= k) {
      const int m = int(b_.size());
      Rational s = 0;
      Integer binom = 1;  // binom(m+1, j)
      for (int j = 0; j < m; ++j) {
        s += Rational(binom) * b_[j];
        binom = binom * (m + 1 - j) / (j + 1);
      }
      b_.push_back(-s / (m + 1));
    }
    return b_[k];
  }

 private:
  std::shared_mutex mu_;
  std::vector<Rational> b_;
};

inline BernoulliTable& bernoulli_table() {
  static BernoulliTable t;
  return t;
}

}  // namespace detail

/// Bernoulli number with B_1 = -1/2.
inline Rational bernoulli_number(int k) {
  if (k < 0) throw ContractError("negative Bernoulli index");
  return detail::bernoulli_table().get(k);
}

/// B_k(x) as a dense coefficient list, coeffs[i] multiplies x^i.
struct BernoulliPoly {
  int degree = 0;
  std::vector<Rational> coeffs;

  Rational operator()(const Rational& x) const {
    Rational r = 0;
    for (int i = degree; i >= 0; --i) r = r * x + coeffs[i];
    return r;
  }

  Poly operator()(const Poly& x) const {
    Poly r(x.alphabet());
    for (int i = degree; i >= 0; --i) r = r * x + coeffs[i];
    return r;
  }
};

inline BernoulliPoly bernoulli_poly(int k) {
  if (k < 0) throw ContractError("negative Bernoulli polynomial degree");
  BernoulliPoly p{k, std::vector<Rational>(k + 1)};
  for (int j = 0; j <= k; ++j) p.coeffs[k - j] = binomial(Rational(k), j) * bernoulli_number(j);
  return p;
}

/// c_k(n) = B_{k+1}(n + 1/2)/(k+1).
inline Rational c_k(int k, const Rational& n) {
  if (k < 1) throw ContractError("c_k needs k >= 1");
  return bernoulli_poly(k + 1)(n + Rational(1, 2)) / (k + 1);
}

inline Poly c_k(int k, const Poly& n) {
  if (k < 1) throw ContractError("c_k needs k >= 1");
  return bernoulli_poly(k + 1)(n + Rational(1, 2)) * Rational(1, k + 1);
}

/// F_n(z) = sum_{k=1}^{M} c_k(n)/(k z^k), known down to z^{-M}.
inline Series stirling_series(const Poly& n, int M) {
  if (M < 1) throw ContractError("stirling_series needs M >= 1");
  Series s(n.alphabet(), -M);
  for (int k = 1; k <= M; ++k) s.set(-k, c_k(k, n) * Rational(1, k));
  return s;
}

inline Series stirling_series(AlphabetPtr alpha, const Rational& n, int M) {
  return stirling_series(Poly::constant(std::move(alpha), n), M);
}

/// e^{F_n(z)} to order z^{-M}.
inline Series exp_stirling(const Poly& n, int M) { return stirling_series(n, M).exp(); }

/// Gamma(z + a) divided by the reference weight sqrt(2 pi) z^z e^{-z}, written as
/// z^{power} * body with body = e^{F_{1/2 - a}(z)}; power = a - 1/2 may be formal.
struct GammaRatio {
  Poly power;
  Series body;
};

inline GammaRatio gamma_ratio_series(const Poly& a, int M) {
  const Poly n = Rational(1, 2) - a;
  return {a - Rational(1, 2), exp_stirling(n, M)};
}

}  // namespace gwp1
