#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "gwp1/poly.hpp"
#include "gwp1/series.hpp"
#include "gwp1/special.hpp"

namespace gwp1 {

// ---------------------------------------------------------------------------
// g(z) with e^{g(z) d/dz} z = 1 - e^{-z}

/// Dense power series c[0] + c[1] z + ... known through z^{order}.
struct PowerSeries {
  std::vector<Rational> c;
  int order() const { return int(c.size()) - 1; }
  Rational operator[](int j) const { return j < int(c.size()) ? c[j] : Rational(0); }
};

namespace detail {

// e^{g d/dz} applied to z, truncated after z^{M}
inline PowerSeries flow_of_z(const PowerSeries& g, int M) {
  auto apply = [&](const std::vector<Rational>& f) {
    std::vector<Rational> r(M + 1);
    for (int i = 1; i <= M; ++i) {
      if (f[i] == 0) continue;
      const Rational df = f[i] * i;  // coefficient of z^{i-1} in f'
      for (int j = 0; j + i - 1 <= M && j <= g.order(); ++j)
        if (g.c[j] != 0) r[j + i - 1] += g.c[j] * df;
    }
    return r;
  };
  std::vector<Rational> term(M + 1), total(M + 1);
  if (M >= 1) term[1] = total[1] = 1;
  for (int m = 1; m <= M; ++m) {
    term = apply(term);
    bool nonzero = false;
    for (int i = 0; i <= M; ++i) {
      term[i] /= m;
      total[i] += term[i];
      nonzero = nonzero || term[i] != 0;
    }
    if (!nonzero) break;
  }
  return {total};
}

}  // namespace detail

/// g(z) = sum_{j=2}^{M} g_j z^j.
inline PowerSeries g_series(int M) {
  if (M < 2) throw ContractError("g_series needs M >= 2");
  // target: 1 - e^{-z}
  std::vector<Rational> target(M + 1);
  for (int j = 1; j <= M; ++j) target[j] = Rational(j % 2 ? 1 : -1) / factorial(j);
  PowerSeries g{std::vector<Rational>(M + 1)};
  // the z^j coefficient of the flow is g_j + (terms in lower g_i)
  for (int j = 2; j <= M; ++j) {
    const PowerSeries cur = detail::flow_of_z(g, j);
    g.c[j] = target[j] - cur[j];
  }
  return g;
}

/// e^{-y} applied to z^k with y = z g(d/dz); returns dense coefficients in z.
/// Exact as long as g is known through z^{k+1}.
inline std::vector<Rational> exp_minus_y_on_power(const PowerSeries& g, int k) {
  if (g.order() < k + 1) throw TruncationError("g_series order too small for e^{-y} z^k");
  std::vector<Rational> term(k + 1), total(k + 1);
  term[k] = total[k] = 1;
  for (int m = 1; m <= k; ++m) {
    std::vector<Rational> next(k + 1);
    for (int i = 0; i <= k; ++i) {
      if (term[i] == 0) continue;
      // z g(d) z^i = sum_j g_j i!/(i-j)! z^{i-j+1}
      Rational fall = 1;
      for (int j = 1; j <= i; ++j) {
        fall *= (i - j + 1);
        if (j >= 2 && g[j] != 0) next[i - j + 1] += g[j] * fall * term[i];
      }
    }
    bool nonzero = false;
    for (int i = 0; i <= k; ++i) {
      term[i] = -next[i] / m;
      total[i] += term[i];
      nonzero = nonzero || term[i] != 0;
    }
    if (!nonzero) break;
  }
  return total;
}

// ---------------------------------------------------------------------------
// basis vectors

/// Alphabet {qt, n} with qt capped at Q.
inline AlphabetPtr absolute_alphabet(int Q) { return make_alphabet({"qt", "n"}, {{"qt", {1, 0}, Q}}); }

/// Alphabet {s1..sR, n} with weight(s_m) = m capped at W.
inline AlphabetPtr relative_alphabet(int R, int W) {
  std::vector<std::string> names;
  std::vector<int> w;
  for (int m = 1; m <= R; ++m) {
    names.push_back("s" + std::to_string(m));
    w.push_back(m);
  }
  names.push_back("n");
  w.push_back(0);
  return make_alphabet(std::move(names), {{"s", std::move(w), W}});
}

/// Deformation parameters: s[m-1] multiplies e^{-m y} in the integrand.
/// The absolute theory is s = {qt}.
using Deformation = std::vector<Poly>;

inline Deformation absolute_deformation(const AlphabetPtr& a) { return {Poly::variable(a, "qt")}; }

inline Deformation relative_deformation(const AlphabetPtr& a, int R) {
  Deformation s;
  for (int m = 1; m <= R; ++m) s.push_back(Poly::variable(a, "s" + std::to_string(m)));
  return s;
}

/// e^{F_m(z)} known down to z^{-depth}; depth 0 means only the constant 1.
inline Series exp_F(const Poly& m, int depth) {
  if (depth < 0) throw ContractError("negative depth");
  if (depth == 0) return Series::constant(m.alphabet(), 1, 0);
  return exp_stirling(m, depth);
}

/// z^{k-1-|mu|} e^{F_{n-k+|mu|+1}(z)} summed over multisets mu weighted by
/// prod s_m^{c_m}/c_m!, known down to z^{k-1-M}. Any integer k is allowed.
inline Series phi_general(int k, const Poly& n, const Deformation& s, int M) {
  if (M < 0) throw ContractError("phi: order must be nonnegative");
  const AlphabetPtr& a = n.alphabet();
  const int fl = k - 1 - M;
  // collect weight -> coefficient by enumerating multiplicities part by part
  std::map<int, Poly> by_weight;
  by_weight.emplace(0, Poly::constant(a, 1));
  for (int m = 1; m <= int(s.size()); ++m) {
    if (s[m - 1].is_zero()) continue;
    std::map<int, Poly> next;
    for (const auto& [w, c] : by_weight) {
      Poly power = Poly::constant(a, 1);
      for (int cm = 0; w + m * cm <= M; ++cm) {
        if (cm > 0) power = power * s[m - 1];
        if (power.is_zero()) break;
        Poly term = c * power * (1 / factorial(cm));
        if (term.is_zero()) continue;
        auto [it, fresh] = next.try_emplace(w + m * cm, term);
        if (!fresh) it->second += term;
      }
    }
    by_weight = std::move(next);
  }
  Series out(a, fl);
  for (const auto& [w, c] : by_weight) {
    if (c.is_zero()) continue;
    const Series body = exp_F(n + Rational(w + 1 - k), M - w).shifted_exponent(k - 1 - w);
    out += body * c;
  }
  return out;
}

inline Series phi_absolute(int k, const Poly& n, int M) {
  if (k < 1) throw ContractError("phi_absolute needs k >= 1");
  return phi_general(k, n, absolute_deformation(n.alphabet()), M);
}

inline Series phi_relative(int k, const Poly& n, const Deformation& s, int M) {
  if (k < 1) throw ContractError("phi_relative needs k >= 1");
  return phi_general(k, n, s, M);
}

/// W^{-1} applied to a Laurent polynomial: z^j -> z^j e^{F_{-j}(z)}, known down
/// to z^{top - M}.
inline Series w_inverse_transform(const Series& f, int M) {
  if (!f.exact()) throw ContractError("w_inverse_transform expects a Laurent polynomial");
  const AlphabetPtr& a = f.alphabet();
  if (f.terms().empty()) return Series::exact_zero(a);
  const int top = *f.top();
  Series out(a, top - M);
  for (const auto& [j, c] : f.terms())
    out += exp_F(Poly::constant(a, -j), M - (top - j)).shifted_exponent(j) * c;
  return out;
}

// ---------------------------------------------------------------------------
// operators

/// One factor of an operator word.
struct Step {
  enum class Kind { Shift, Multiply, Scale };
  Kind kind = Kind::Scale;
  Rational shift;                                   // Shift: f(z) -> f(z + shift)
  std::function<Series(int floor)> factory;         // Multiply: series known down to floor
  int top = 0;                                      // Multiply: top exponent of that series
  Poly scale;                                       // Scale: z-independent factor
  std::string name;
};

/// Coefficient times steps, the first step acting first.
struct Word {
  Poly coefficient;
  std::vector<Step> steps;
};

/// A finite sum of words in shifts, multiplications and scalings.
class SeriesOperator {
 public:
  SeriesOperator() = default;
  SeriesOperator(std::string name, std::vector<Word> words) : name_(std::move(name)), words_(std::move(words)) {}

  static SeriesOperator identity(const AlphabetPtr& a) {
    return {"1", {Word{Poly::constant(a, 1), {}}}};
  }

  static SeriesOperator shift(const AlphabetPtr& a, const Rational& c) {
    Step s;
    s.kind = Step::Kind::Shift;
    s.shift = c;
    s.name = "e^{" + to_string(c) + " d}";
    return {s.name, {Word{Poly::constant(a, 1), {s}}}};
  }

  static SeriesOperator multiply(const AlphabetPtr& a, std::string name, int top,
                                 std::function<Series(int)> factory) {
    Step s;
    s.kind = Step::Kind::Multiply;
    s.factory = std::move(factory);
    s.top = top;
    s.name = name;
    return {std::move(name), {Word{Poly::constant(a, 1), {s}}}};
  }

  /// Multiplication by a Laurent polynomial.
  static SeriesOperator multiply(const Series& exact, std::string name) {
    if (!exact.exact()) throw ContractError("multiply expects an exact series");
    const int top = exact.top().value_or(0);
    return multiply(exact.alphabet(), std::move(name), top, [exact](int) { return exact; });
  }

  static SeriesOperator scale(const Poly& p) {
    Step s;
    s.kind = Step::Kind::Scale;
    s.scale = p;
    s.name = "(" + p.to_string() + ")";
    return {s.name, {Word{Poly::constant(p.alphabet(), 1), {s}}}};
  }

  const std::string& name() const { return name_; }
  const std::vector<Word>& words() const { return words_; }
  SeriesOperator& rename(std::string n) {
    name_ = std::move(n);
    return *this;
  }

  friend SeriesOperator operator+(const SeriesOperator& x, const SeriesOperator& y) {
    SeriesOperator r{x.name_ + " + " + y.name_, x.words_};
    r.words_.insert(r.words_.end(), y.words_.begin(), y.words_.end());
    return r;
  }

  friend SeriesOperator operator-(const SeriesOperator& x, const SeriesOperator& y) {
    return x + y * Rational(-1);
  }

  friend SeriesOperator operator*(const SeriesOperator& x, const Poly& c) {
    SeriesOperator r = x;
    for (auto& w : r.words_) w.coefficient = w.coefficient * c;
    return r;
  }
  friend SeriesOperator operator*(const SeriesOperator& x, const Rational& c) {
    SeriesOperator r = x;
    for (auto& w : r.words_) w.coefficient *= c;
    return r;
  }

  /// Composition: (x * y) f = x(y(f)).
  friend SeriesOperator operator*(const SeriesOperator& x, const SeriesOperator& y) {
    SeriesOperator r;
    r.name_ = "(" + x.name_ + ")(" + y.name_ + ")";
    for (const auto& wx : x.words_)
      for (const auto& wy : y.words_) {
        Word w{wx.coefficient * wy.coefficient, wy.steps};
        w.steps.insert(w.steps.end(), wx.steps.begin(), wx.steps.end());
        r.words_.push_back(std::move(w));
      }
    return r;
  }

  SeriesOperator pow(int e) const {
    if (e < 0) throw ContractError("negative operator power");
    if (words_.empty()) throw ContractError("power of an empty operator");
    SeriesOperator r = identity(words_.front().coefficient.alphabet());
    for (int i = 0; i < e; ++i) r = *this * r;
    r.name_ = "(" + name_ + ")^" + std::to_string(e);
    return r;
  }

  /// Applies the operator. Exact inputs are expanded down to depth_for_exact
  /// orders below their top exponent whenever an infinite series is involved.
  Series apply(const Series& f, int depth_for_exact = 16) const {
    Series out = Series::exact_zero(f.alphabet());
    for (const auto& w : words_) {
      Series g = f;
      for (const auto& s : w.steps) g = apply_step(s, g, depth_for_exact);
      out += g * w.coefficient;
    }
    return out;
  }

 private:
  static Series apply_step(const Step& s, const Series& g, int depth) {
    switch (s.kind) {
      case Step::Kind::Scale:
        return g * s.scale;
      case Step::Kind::Shift: {
        std::optional<int> d;
        if (g.exact() && g.bottom() && *g.bottom() < 0) d = g.upper() - depth;
        return g.shift_argument(s.shift, d);
      }
      case Step::Kind::Multiply: {
        if (g.is_exact_zero()) return g;
        int fp;
        if (g.exact())
          fp = s.top - depth;
        else
          fp = *g.floor() + s.top - g.upper();
        return s.factory(fp) * g;
      }
    }
    return g;
  }

  std::string name_;
  std::vector<Word> words_;
};

namespace detail {

/// Memoized factory: computes at the requested floor, reuses deeper results.
inline std::function<Series(int)> memoize(std::function<Series(int)> make) {
  struct Cache {
    std::mutex mu;
    std::optional<Series> best;
  };
  auto cache = std::make_shared<Cache>();
  return [cache, make = std::move(make)](int floor) {
    std::lock_guard lock(cache->mu);
    if (!cache->best || *cache->best->floor() > floor) cache->best = make(std::min(floor, -1));
    return cache->best->truncated(floor);
  };
}

}  // namespace detail

/// (z/(z+1))^{n-z} (z+1) e^{-1} = (z+1) exp(sum_m (-1)^m (n/m + 1/(m+1)) z^{-m}),
/// known down to z^{floor}.
inline Series b_prefactor(const Poly& n, int floor) {
  const AlphabetPtr& a = n.alphabet();
  const int depth = std::max(1, 1 - floor);
  Series L(a, -depth);
  for (int m = 1; m <= depth; ++m)
    L.set(-m, (n * make_rational(1, m) + make_rational(1, m + 1)) * Rational(m % 2 ? -1 : 1));
  const Series zp1 = Series::power(a, 1) + Series::constant(a, 1);
  return (zp1 * L.exp()).truncated(floor);
}

/// (z/(z-1))^{n-z} e/(z-1) = (sum_{j>=1} z^{-j}) exp(sum_m (n/m - 1/(m+1)) z^{-m}).
inline Series b_inverse_prefactor(const Poly& n, int floor) {
  const AlphabetPtr& a = n.alphabet();
  const int depth = std::max(1, -1 - floor);
  Series L(a, -depth);
  for (int m = 1; m <= depth; ++m) L.set(-m, n * make_rational(1, m) - make_rational(1, m + 1));
  Series geo(a, -1 - depth);
  for (int j = 1; j <= depth + 1; ++j) geo.set(-j, Poly::constant(a, 1));
  return (geo * L.exp()).truncated(floor);
}

/// b = (z/(z+1))^{n-z} (z+1) e^{d/dz - 1}.
inline SeriesOperator b_operator(const Poly& n) {
  const AlphabetPtr& a = n.alphabet();
  auto pre = SeriesOperator::multiply(a, "P_b", 1, detail::memoize([n](int fl) { return b_prefactor(n, fl); }));
  return (pre * SeriesOperator::shift(a, 1)).rename("b");
}

/// b^{-1} = (z/(z-1))^{n-z} (z-1)^{-1} e^{1 - d/dz}.
inline SeriesOperator b_inverse_operator(const Poly& n) {
  const AlphabetPtr& a = n.alphabet();
  auto pre = SeriesOperator::multiply(a, "P_binv", -1,
                                      detail::memoize([n](int fl) { return b_inverse_prefactor(n, fl); }));
  return (pre * SeriesOperator::shift(a, -1)).rename("b^-1");
}

/// n + 1/2 - z as a multiplication operator.
inline SeriesOperator linear_z_operator(const Poly& n) {
  const AlphabetPtr& a = n.alphabet();
  Series lin = Series::monomial(a, 0, n + make_rational(1, 2)) - Series::power(a, 1);
  return SeriesOperator::multiply(lin, "(n+1/2-z)");
}

/// a = 1 + (n + 1/2 - z) b^{-1} + sum_k k s_k b^{-k-1}; absolute case s = {qt}.
inline SeriesOperator a_operator(const Poly& n, const Deformation& s) {
  const AlphabetPtr& a = n.alphabet();
  const SeriesOperator binv = b_inverse_operator(n);
  SeriesOperator r = SeriesOperator::identity(a) + linear_z_operator(n) * binv;
  SeriesOperator power = binv;
  for (int k = 1; k <= int(s.size()); ++k) {
    power = binv * power;
    if (!s[k - 1].is_zero()) r = r + power * (s[k - 1] * Rational(k));
  }
  return r.rename("a");
}

/// b + sum_k k s_k b^{-k} + n + 1/2 - z; equals a b, written without composing.
inline SeriesOperator ab_operator(const Poly& n, const Deformation& s) {
  const SeriesOperator binv = b_inverse_operator(n);
  SeriesOperator r = b_operator(n) + linear_z_operator(n);
  SeriesOperator power = SeriesOperator::identity(n.alphabet());
  for (int k = 1; k <= int(s.size()); ++k) {
    power = binv * power;
    if (!s[k - 1].is_zero()) r = r + power * (s[k - 1] * Rational(k));
  }
  return r.rename("ab");
}

enum class Direction { Forward, Inverse };

inline Series apply_b(const Series& f, const Poly& n, Direction d = Direction::Forward) {
  return (d == Direction::Forward ? b_operator(n) : b_inverse_operator(n)).apply(f);
}

inline Series apply_a(const Series& f, const Poly& n, const Deformation& s) { return a_operator(n, s).apply(f); }

}  // namespace gwp1
