#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <ostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gwp1/errors.hpp"
#include "gwp1/poly.hpp"
#include "gwp1/rational.hpp"

namespace gwp1 {

using ParamPoly = Poly;
using MultiSeries = Poly;

/// Laurent series in one variable (written z) with Poly coefficients.
///
/// floor() is the lowest exponent whose coefficient is known; everything below it
/// is unknown rather than zero. A series without a floor is exact (a Laurent
/// polynomial). Operations propagate the floor pessimistically.
class Series {
 public:
  Series() = default;
  explicit Series(AlphabetPtr alphabet, std::optional<int> floor = std::nullopt, std::string var = "z")
      : var_(std::move(var)), alpha_(std::move(alphabet)), floor_(floor) {}

  static Series exact_zero(AlphabetPtr alphabet) { return Series(std::move(alphabet)); }

  static Series monomial(AlphabetPtr alphabet, int e, const Poly& c,
                         std::optional<int> floor = std::nullopt) {
    Series s(std::move(alphabet), floor);
    s.set(e, c);
    return s;
  }

  static Series constant(AlphabetPtr alphabet, const Rational& c,
                         std::optional<int> floor = std::nullopt) {
    Series s(alphabet, floor);
    s.set(0, Poly::constant(alphabet, c));
    return s;
  }

  /// z^e with rational coefficient.
  static Series power(AlphabetPtr alphabet, int e, const Rational& c = 1,
                      std::optional<int> floor = std::nullopt) {
    Series s(alphabet, floor);
    s.set(e, Poly::constant(alphabet, c));
    return s;
  }

  const std::string& var() const { return var_; }
  const AlphabetPtr& alphabet() const { return alpha_; }
  const std::map<int, Poly>& terms() const { return c_; }
  std::optional<int> floor() const { return floor_; }
  bool exact() const { return !floor_.has_value(); }
  bool is_exact_zero() const { return c_.empty() && !floor_; }

  /// Highest exponent with a nonzero coefficient.
  std::optional<int> top() const {
    if (c_.empty()) return std::nullopt;
    return c_.rbegin()->first;
  }

  /// Lowest exponent with a stored (nonzero) coefficient.
  std::optional<int> bottom() const {
    if (c_.empty()) return std::nullopt;
    return c_.begin()->first;
  }

  /// Stores c at exponent e (zero erases). Exponents below the floor are dropped.
  void set(int e, Poly c) {
    if (floor_ && e < *floor_) return;
    if (c.is_zero()) {
      c_.erase(e);
      return;
    }
    if (alpha_ && c.alphabet()) require_same_alphabet(alpha_, c.alphabet());
    c_[e] = std::move(c);
  }

  void add_to(int e, const Poly& c) {
    if (floor_ && e < *floor_) return;
    if (c.is_zero()) return;
    auto it = c_.find(e);
    if (it == c_.end()) {
      require_same_alphabet(alpha_, c.alphabet());
      c_.emplace(e, c);
      return;
    }
    it->second += c;
    if (it->second.is_zero()) c_.erase(it);
  }

  Poly coefficient(int e) const {
    if (floor_ && e < *floor_)
      throw UnknownCoefficientError(var_ + "^" + std::to_string(e) + " is below the truncation order " +
                                    std::to_string(*floor_));
    auto it = c_.find(e);
    if (it == c_.end()) return Poly(alpha_);
    return it->second;
  }

  /// Raises the floor (forgets information). Never lowers it.
  Series truncated(int new_floor) const {
    Series r = *this;
    if (r.floor_ && *r.floor_ >= new_floor) return r;
    r.floor_ = new_floor;
    r.c_.erase(r.c_.begin(), r.c_.lower_bound(new_floor));
    return r;
  }

  Series operator-() const {
    Series r = *this;
    for (auto& [e, c] : r.c_) c = -c;
    return r;
  }

  friend Series operator+(const Series& a, const Series& b) { return combine(a, b, 1); }
  friend Series operator-(const Series& a, const Series& b) { return combine(a, b, -1); }
  Series& operator+=(const Series& o) { return *this = combine(*this, o, 1); }
  Series& operator-=(const Series& o) { return *this = combine(*this, o, -1); }

  friend Series operator*(const Series& a, const Series& b) {
    check_compatible(a, b);
    if (a.is_exact_zero() || b.is_exact_zero()) return exact_zero(a.alpha_);
    std::optional<int> fl;
    auto bump = [&](std::optional<int> f, const Series& other) {
      if (!f) return;
      int v = *f + other.upper();
      fl = fl ? std::max(*fl, v) : v;
    };
    bump(a.floor_, b);
    bump(b.floor_, a);
    Series r(a.alpha_, fl, a.var_);
    for (const auto& [ea, ca] : a.c_)
      for (const auto& [eb, cb] : b.c_) {
        if (fl && ea + eb < *fl) continue;
        r.add_to(ea + eb, ca * cb);
      }
    return r;
  }

  Series& operator*=(const Series& o) { return *this = *this * o; }

  friend Series operator*(const Series& a, const Poly& p) {
    if (p.is_zero()) return exact_zero(a.alpha_);
    Series r(a.alpha_, a.floor_, a.var_);
    for (const auto& [e, c] : a.c_) r.set(e, c * p);
    return r;
  }
  friend Series operator*(const Poly& p, const Series& a) { return a * p; }

  friend Series operator*(const Series& a, const Rational& k) {
    if (k == 0) return exact_zero(a.alpha_);
    Series r = a;
    for (auto& [e, c] : r.c_) c *= k;
    return r;
  }
  friend Series operator*(const Rational& k, const Series& a) { return a * k; }

  /// Multiplication by z^k.
  Series shifted_exponent(int k) const {
    Series r(alpha_, floor_ ? std::optional<int>(*floor_ + k) : std::nullopt, var_);
    for (const auto& [e, c] : c_) r.c_.emplace(e + k, c);
    return r;
  }

  /// d/dz.
  Series derivative() const {
    Series r(alpha_, floor_ ? std::optional<int>(*floor_ - 1) : std::nullopt, var_);
    for (const auto& [e, c] : c_)
      if (e != 0) r.c_.emplace(e - 1, c * Rational(e));
    return r;
  }

  /// Applies fn to every coefficient (must be linear and preserve zero).
  template <class Fn>
  Series map_coefficients(Fn fn) const {
    Series r(alpha_, floor_, var_);
    for (const auto& [e, c] : c_) r.set(e, fn(c));
    return r;
  }

  /// Same series over another alphabet, coefficients rebound by variable name.
  Series rebind(const AlphabetPtr& target) const {
    Series r(target, floor_, var_);
    for (const auto& [e, c] : c_) r.set(e, c.rebind(target));
    return r;
  }

  /// f(z) -> f(z + c). For negative powers the binomial series is cut at the floor;
  /// an exact input with negative powers needs depth (the floor to use).
  Series shift_argument(const Rational& c, std::optional<int> depth = std::nullopt) const {
    if (c == 0 || c_.empty()) return *this;
    std::optional<int> fl = floor_;
    if (!fl && c_.begin()->first < 0) {
      if (!depth) throw ContractError("shift of an exact series with negative powers needs a depth");
      fl = *depth;
    }
    Series r(alpha_, fl, var_);
    for (const auto& [j, coef] : c_) {
      // (z+c)^j = sum_i binom(j,i) c^i z^{j-i}
      Rational b = 1, cp = 1;
      const int last = j >= 0 ? j : j - *fl;
      for (int i = 0; i <= last; ++i) {
        const int e = j - i;
        if (fl && e < *fl) break;
        r.add_to(e, coef * (b * cp));
        b *= make_rational(j - i, i + 1);
        cp *= c;
      }
    }
    return r;
  }

  /// exp of a series with no positive powers and nilpotent constant term.
  /// For exact input, depth gives the floor of the result.
  Series exp(std::optional<int> depth = std::nullopt) const {
    if (top() && *top() > 0) throw ContractError("exp_series: argument has positive powers");
    if (floor_ && *floor_ > 0) throw ContractError("exp_series: constant term unknown");
    Poly a0 = c_.count(0) ? c_.at(0) : Poly(alpha_);
    if (!a0.is_zero() && !a0.nilpotent()) throw ContractError("exp_series: non-nilpotent constant term");
    std::optional<int> fl = floor_;
    if (!fl) {
      if (c_.empty() || (c_.size() == 1 && c_.count(0))) {
        Series r(alpha_, std::nullopt, var_);
        r.set(0, a0.is_zero() ? Poly::constant(alpha_, 1) : a0.exp());
        return r;
      }
      if (!depth) throw ContractError("exp_series of an exact series needs a depth");
      fl = *depth;
    }
    const int M = -*fl;
    std::vector<Poly> alpha(M + 1, Poly(alpha_)), E(M + 1, Poly(alpha_));
    for (const auto& [e, c] : c_)
      if (e < 0 && -e <= M) alpha[-e] = c;
    E[0] = Poly::constant(alpha_, 1);
    for (int m = 1; m <= M; ++m) {
      Poly acc(alpha_);
      for (int j = 1; j <= m; ++j)
        if (!alpha[j].is_zero() && !E[m - j].is_zero()) acc += alpha[j] * E[m - j] * Rational(j);
      E[m] = acc * Rational(1, m);
    }
    Series r(alpha_, fl, var_);
    const Poly pre = a0.is_zero() ? Poly::constant(alpha_, 1) : a0.exp();
    for (int m = 0; m <= M; ++m) r.set(-m, E[m] * pre);
    return r;
  }

  /// Equality on the common known range.
  friend bool operator==(const Series& a, const Series& b) {
    if (a.var_ != b.var_) return false;
    if (!a.c_.empty() && !b.c_.empty() && !same_alphabet(a.alpha_, b.alpha_)) return false;
    return a.floor_ == b.floor_ && a.c_ == b.c_;
  }

  /// True if a and b agree at every exponent >= from (both must know them).
  static bool agree_from(const Series& a, const Series& b, int from) {
    if (a.floor_ && *a.floor_ > from) throw UnknownCoefficientError("left operand not known to requested order");
    if (b.floor_ && *b.floor_ > from) throw UnknownCoefficientError("right operand not known to requested order");
    return a.truncated(from).c_ == b.truncated(from).c_;
  }

  /// Largest exponent that may carry a nonzero value, known or not.
  int upper() const {
    int u = c_.empty() ? std::numeric_limits<int>::min() / 4 : c_.rbegin()->first;
    if (floor_) u = std::max(u, *floor_ - 1);
    return u;
  }

  /// Number of nonzero coefficients.
  std::size_t size() const { return c_.size(); }

  std::string to_string() const {
    std::string s;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
      if (!s.empty()) s += " + ";
      s += "[" + it->second.to_string() + "]*" + var_ + "^" + std::to_string(it->first);
    }
    if (s.empty()) s = "0";
    if (floor_) s += " + O(" + var_ + "^" + std::to_string(*floor_ - 1) + ")";
    return s;
  }

 private:
  static void check_compatible(const Series& a, const Series& b) {
    if (a.var_ != b.var_) throw ContractError("series variable mismatch: " + a.var_ + " vs " + b.var_);
    require_same_alphabet(a.alpha_, b.alpha_);
  }

  static Series combine(const Series& a, const Series& b, int sign) {
    check_compatible(a, b);
    std::optional<int> fl = a.floor_;
    if (b.floor_) fl = fl ? std::max(*fl, *b.floor_) : b.floor_;
    Series r(a.alpha_, fl, a.var_);
    for (const auto& [e, c] : a.c_) r.set(e, c);
    for (const auto& [e, c] : b.c_) r.add_to(e, sign > 0 ? c : -c);
    return r;
  }

  std::string var_ = "z";
  AlphabetPtr alpha_;
  std::map<int, Poly> c_;
  std::optional<int> floor_;
};

using TruncatedSeries = Series;

inline std::ostream& operator<<(std::ostream& os, const Series& s) { return os << s.to_string(); }
inline std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.to_string(); }

/// Free-function spellings of the core operations.
inline Series mul(const Series& a, const Series& b) { return a * b; }
inline Series exp_series(const Series& a, std::optional<int> depth = std::nullopt) { return a.exp(depth); }
inline Series shift_argument(const Series& f, const Rational& c, std::optional<int> depth = std::nullopt) {
  return f.shift_argument(c, depth);
}

}  // namespace gwp1
