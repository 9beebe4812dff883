#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gwp1/errors.hpp"
#include "gwp1/rational.hpp"

namespace gwp1 {

inline constexpr std::size_t kMaxVariables = 16;

/// Exponent vector over a fixed alphabet. Unused slots stay zero.
struct Monomial {
  std::array<std::int16_t, kMaxVariables> e{};

  int operator[](std::size_t i) const { return e[i]; }

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend auto operator<=>(const Monomial&, const Monomial&) = default;

  bool is_one() const {
    return std::all_of(e.begin(), e.end(), [](auto x) { return x == 0; });
  }
};

inline Monomial checked_add(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (std::size_t i = 0; i < kMaxVariables; ++i) {
    int s = int(a.e[i]) + int(b.e[i]);
    if (s > std::numeric_limits<std::int16_t>::max() ||
        s < std::numeric_limits<std::int16_t>::min())
      throw ContractError("monomial exponent overflow");
    r.e[i] = static_cast<std::int16_t>(s);
  }
  return r;
}

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto x : m.e) {
      h ^= static_cast<std::uint16_t>(x);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

/// A weighted degree with a cap. Monomials whose weighted degree exceeds the cap
/// are identically zero in the quotient ring the alphabet describes.
struct Grading {
  std::string name;
  std::vector<int> weights;
  int cap = 0;

  friend bool operator==(const Grading&, const Grading&) = default;
};

/// Ordered set of formal parameters plus the truncation ideal. Variables flagged
/// laurent may carry negative exponents; they must have zero weight in every
/// grading.
class Alphabet {
 public:
  Alphabet(std::vector<std::string> names, std::vector<Grading> gradings = {},
           std::vector<bool> laurent = {})
      : names_(std::move(names)), gradings_(std::move(gradings)), laurent_(std::move(laurent)) {
    if (names_.size() > kMaxVariables)
      throw ContractError("alphabet exceeds " + std::to_string(kMaxVariables) + " variables");
    if (laurent_.empty()) laurent_.assign(names_.size(), false);
    if (laurent_.size() != names_.size()) throw ContractError("laurent flags size mismatch");
    for (std::size_t i = 0; i < names_.size(); ++i)
      for (std::size_t j = i + 1; j < names_.size(); ++j)
        if (names_[i] == names_[j]) throw ContractError("duplicate variable " + names_[i]);
    for (const auto& g : gradings_) {
      if (g.weights.size() != names_.size())
        throw ContractError("grading " + g.name + " has wrong number of weights");
      for (std::size_t i = 0; i < names_.size(); ++i) {
        if (g.weights[i] < 0) throw ContractError("negative grading weight in " + g.name);
        if (laurent_[i] && g.weights[i] != 0)
          throw ContractError("laurent variable " + names_[i] + " cannot be graded");
      }
    }
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<Grading>& gradings() const { return gradings_; }
  bool laurent(std::size_t i) const { return laurent_.at(i); }
  const std::vector<bool>& laurent_flags() const { return laurent_; }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    return std::nullopt;
  }

  std::size_t index(std::string_view name) const {
    auto i = find(name);
    if (!i) throw ContractError("unknown variable '" + std::string(name) + "'");
    return *i;
  }

  std::optional<std::size_t> grading_index(std::string_view name) const {
    for (std::size_t i = 0; i < gradings_.size(); ++i)
      if (gradings_[i].name == name) return i;
    return std::nullopt;
  }

  int degree(const Monomial& m, std::size_t grading) const {
    const auto& w = gradings_[grading].weights;
    int d = 0;
    for (std::size_t i = 0; i < names_.size(); ++i) d += w[i] * m.e[i];
    return d;
  }

  bool admits(const Monomial& m) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (m.e[i] < 0 && !laurent_[i]) return false;
    for (std::size_t g = 0; g < gradings_.size(); ++g)
      if (degree(m, g) > gradings_[g].cap) return false;
    return true;
  }

  /// True when some capped grading gives m positive degree, so m^j vanishes for large j.
  bool nilpotent(const Monomial& m) const {
    for (std::size_t g = 0; g < gradings_.size(); ++g)
      if (degree(m, g) > 0) return true;
    return false;
  }

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.names_ == b.names_ && a.gradings_ == b.gradings_ && a.laurent_ == b.laurent_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Grading> gradings_;
  std::vector<bool> laurent_;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

inline AlphabetPtr make_alphabet(std::vector<std::string> names, std::vector<Grading> gradings = {},
                                 std::vector<bool> laurent = {}) {
  return std::make_shared<const Alphabet>(std::move(names), std::move(gradings), std::move(laurent));
}

inline bool same_alphabet(const AlphabetPtr& a, const AlphabetPtr& b) {
  return a == b || (a && b && *a == *b);
}

inline void require_same_alphabet(const AlphabetPtr& a, const AlphabetPtr& b) {
  if (!same_alphabet(a, b)) throw ContractError("parameter alphabet mismatch");
}

/// Polynomial with rational coefficients over an Alphabet, reduced modulo the
/// alphabet's truncation ideal. Terms are kept sorted by monomial with nonzero
/// coefficients; this is the canonical form used for equality and serialization.
class Poly {
 public:
  using Term = std::pair<Monomial, Rational>;

  Poly() = default;
  explicit Poly(AlphabetPtr alphabet) : alpha_(std::move(alphabet)) {}

  static Poly constant(AlphabetPtr alphabet, const Rational& c) {
    Poly p(std::move(alphabet));
    if (c != 0) p.terms_.emplace_back(Monomial{}, c);
    return p;
  }

  static Poly variable(AlphabetPtr alphabet, std::string_view name, int power = 1) {
    Monomial m;
    m.e[alphabet->index(name)] = static_cast<std::int16_t>(power);
    return monomial(std::move(alphabet), m, 1);
  }

  static Poly monomial(AlphabetPtr alphabet, const Monomial& m, const Rational& c) {
    Poly p(std::move(alphabet));
    if (c != 0 && p.alpha_->admits(m)) p.terms_.emplace_back(m, c);
    return p;
  }

  /// Builds from arbitrary (possibly repeated or inadmissible) terms.
  static Poly from_terms(AlphabetPtr alphabet, std::vector<Term> terms) {
    Poly p(std::move(alphabet));
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return a.first < b.first; });
    for (auto& t : terms) {
      if (!p.alpha_->admits(t.first)) continue;
      if (!p.terms_.empty() && p.terms_.back().first == t.first) {
        p.terms_.back().second += t.second;
        if (p.terms_.back().second == 0) p.terms_.pop_back();
      } else if (t.second != 0) {
        p.terms_.push_back(std::move(t));
      }
    }
    return p;
  }

  const AlphabetPtr& alphabet() const { return alpha_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  Rational coefficient(const Monomial& m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, const Monomial& k) { return t.first < k; });
    if (it != terms_.end() && it->first == m) return it->second;
    return 0;
  }

  Rational constant_term() const { return coefficient(Monomial{}); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_one());
  }

  int degree_in(std::size_t var) const {
    int d = std::numeric_limits<int>::min();
    for (const auto& [m, c] : terms_) d = std::max(d, int(m.e[var]));
    return d;
  }

  Poly operator-() const {
    Poly r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
  }

  Poly& operator+=(const Poly& o) { return *this = add(*this, o, 1); }
  Poly& operator-=(const Poly& o) { return *this = add(*this, o, -1); }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  Poly& operator*=(const Rational& c) {
    if (c == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& t : terms_) t.second *= c;
    return *this;
  }

  friend Poly operator+(const Poly& a, const Poly& b) { return add(a, b, 1); }
  friend Poly operator-(const Poly& a, const Poly& b) { return add(a, b, -1); }
  friend Poly operator*(Poly a, const Rational& c) { return a *= c; }
  friend Poly operator*(const Rational& c, Poly a) { return a *= c; }
  friend Poly operator+(const Poly& a, const Rational& c) {
    return a + constant(a.alphabet(), c);
  }
  friend Poly operator-(const Poly& a, const Rational& c) {
    return a - constant(a.alphabet(), c);
  }
  friend Poly operator+(const Rational& c, const Poly& a) { return a + c; }
  friend Poly operator-(const Rational& c, const Poly& a) { return -a + c; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    require_same_alphabet(a.alpha_, b.alpha_);
    Poly r(a.alpha_);
    if (a.is_zero() || b.is_zero()) return r;
    if (a.is_constant()) return b * a.terms_[0].second;
    if (b.is_constant()) return a * b.terms_[0].second;
    const Alphabet& al = *a.alpha_;
    const std::size_t ng = al.gradings().size();
    // Per-term grading degrees let us skip products that land in the ideal.
    auto degrees = [&](const Poly& p) {
      std::vector<int> d(p.terms_.size() * ng);
      for (std::size_t i = 0; i < p.terms_.size(); ++i)
        for (std::size_t g = 0; g < ng; ++g) d[i * ng + g] = al.degree(p.terms_[i].first, g);
      return d;
    };
    const auto da = degrees(a), db = degrees(b);
    std::unordered_map<Monomial, Rational, MonomialHash> acc;
    acc.reserve(a.terms_.size() * 2 + b.terms_.size() * 2);
    Rational tmp;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
      for (std::size_t j = 0; j < b.terms_.size(); ++j) {
        bool keep = true;
        for (std::size_t g = 0; g < ng; ++g)
          if (da[i * ng + g] + db[j * ng + g] > al.gradings()[g].cap) {
            keep = false;
            break;
          }
        if (!keep) continue;
        Monomial m = checked_add(a.terms_[i].first, b.terms_[j].first);
        mpq_mul(tmp.get_mpq_t(), a.terms_[i].second.get_mpq_t(), b.terms_[j].second.get_mpq_t());
        auto [it, inserted] = acc.try_emplace(m, tmp);
        if (!inserted) it->second += tmp;
      }
    }
    r.terms_.reserve(acc.size());
    for (auto& [m, c] : acc)
      if (c != 0) r.terms_.emplace_back(m, std::move(c));
    std::sort(r.terms_.begin(), r.terms_.end(),
              [](const Term& x, const Term& y) { return x.first < y.first; });
    return r;
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    if (a.is_zero() && b.is_zero()) return true;
    return same_alphabet(a.alpha_, b.alpha_) && a.terms_ == b.terms_;
  }

  Poly pow(int e) const {
    if (e < 0) throw ContractError("negative power of a polynomial");
    Poly r = constant(alpha_, 1), b = *this;
    while (e) {
      if (e & 1) r *= b;
      e >>= 1;
      if (e) b *= b;
    }
    return r;
  }

  Poly derivative(std::size_t var) const {
    std::vector<Term> out;
    for (const auto& [m, c] : terms_) {
      if (m.e[var] == 0) continue;
      Monomial mm = m;
      mm.e[var] -= 1;
      out.emplace_back(mm, c * m.e[var]);
    }
    return from_terms(alpha_, std::move(out));
  }

  Poly derivative(std::string_view name) const { return derivative(alpha_->index(name)); }

  /// Replaces a (non-laurent) variable by a polynomial in the same alphabet.
  Poly substitute(std::size_t var, const Poly& value) const {
    require_same_alphabet(alpha_, value.alpha_);
    if (alpha_->laurent(var)) throw ContractError("cannot substitute a laurent variable");
    std::vector<Poly> powers{constant(alpha_, 1)};
    Poly r(alpha_);
    // Group terms by the remaining monomial to keep the number of products small.
    std::vector<Term> rest;
    for (const auto& [m, c] : terms_) {
      const int e = m.e[var];
      while (int(powers.size()) <= e) powers.push_back(powers.back() * value);
      Monomial mm = m;
      mm.e[var] = 0;
      r += monomial(alpha_, mm, c) * powers[e];
    }
    return r;
  }

  Poly substitute(std::string_view name, const Poly& value) const {
    return substitute(alpha_->index(name), value);
  }

  Poly evaluate(std::string_view name, const Rational& value) const {
    const auto var = alpha_->index(name);
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& [m, c] : terms_) {
      Monomial mm = m;
      mm.e[var] = 0;
      out.emplace_back(mm, c * rpow(value, m.e[var]));
    }
    return from_terms(alpha_, std::move(out));
  }

  /// Coefficient of the given exponents in the listed variables, as a polynomial
  /// in the remaining variables.
  Poly coefficient_of(const std::vector<std::pair<std::size_t, int>>& fixed) const {
    std::vector<Term> out;
    for (const auto& [m, c] : terms_) {
      bool match = true;
      for (auto [v, e] : fixed)
        if (m.e[v] != e) {
          match = false;
          break;
        }
      if (!match) continue;
      Monomial mm = m;
      for (auto [v, e] : fixed) mm.e[v] = 0;
      out.emplace_back(mm, c);
    }
    return from_terms(alpha_, std::move(out));
  }

  /// Drops monomials whose degree in the named grading exceeds cap.
  Poly truncated(std::string_view grading, int cap) const {
    auto g = alpha_->grading_index(grading);
    if (!g) throw ContractError("unknown grading " + std::string(grading));
    Poly r(alpha_);
    for (const auto& t : terms_)
      if (alpha_->degree(t.first, *g) <= cap) r.terms_.push_back(t);
    return r;
  }

  /// Keeps the terms satisfying pred.
  template <class Pred>
  Poly filtered(Pred pred) const {
    Poly r(alpha_);
    for (const auto& t : terms_)
      if (pred(t.first)) r.terms_.push_back(t);
    return r;
  }

  /// Re-expresses the polynomial over another alphabet by variable name; target
  /// truncation is applied. Variables absent from the target must not occur.
  Poly rebind(const AlphabetPtr& target) const {
    std::vector<int> map(alpha_->size(), -1);
    for (std::size_t i = 0; i < alpha_->size(); ++i)
      if (auto j = target->find(alpha_->name(i))) map[i] = int(*j);
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& [m, c] : terms_) {
      Monomial mm;
      for (std::size_t i = 0; i < alpha_->size(); ++i) {
        if (m.e[i] == 0) continue;
        if (map[i] < 0) throw ContractError("variable " + alpha_->name(i) + " missing in target alphabet");
        mm.e[map[i]] = m.e[i];
      }
      out.emplace_back(mm, c);
    }
    return from_terms(target, std::move(out));
  }

  bool nilpotent() const {
    for (const auto& [m, c] : terms_)
      if (!alpha_->nilpotent(m)) return false;
    return true;
  }

  /// exp of a nilpotent polynomial (truncates by the alphabet's caps).
  Poly exp() const {
    if (!nilpotent()) throw ContractError("exp of a non-nilpotent polynomial");
    Poly result = constant(alpha_, 1), term = constant(alpha_, 1);
    for (int m = 1; !term.is_zero(); ++m) {
      term = term * *this;
      term *= Rational(1, m);
      result += term;
    }
    return result;
  }

  /// log of 1 + x with x nilpotent.
  Poly log() const {
    if (constant_term() != 1) throw ContractError("log needs constant term 1");
    Poly x = *this - Rational(1);
    if (!x.nilpotent()) throw ContractError("log of a non-unipotent polynomial");
    Poly result(alpha_), power = x;
    for (int m = 1; !power.is_zero(); ++m) {
      result += power * Rational((m % 2) ? 1 : -1, m);
      power = power * x;
    }
    return result;
  }

  /// Applies fn to every (monomial, coefficient) pair, producing new terms.
  template <class Fn>
  Poly transform(Fn fn) const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) fn(t.first, t.second, out);
    return from_terms(alpha_, std::move(out));
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [m, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += "(" + gwp1::to_string(c) + ")";
      for (std::size_t i = 0; i < alpha_->size(); ++i) {
        if (m.e[i] == 0) continue;
        s += "*" + alpha_->name(i);
        if (m.e[i] != 1) s += "^" + std::to_string(m.e[i]);
      }
    }
    return s;
  }

 private:
  static Poly add(const Poly& a, const Poly& b, int sign) {
    if (b.is_zero()) return a;
    if (a.is_zero()) return sign > 0 ? b : -b;
    require_same_alphabet(a.alpha_, b.alpha_);
    Poly r(a.alpha_);
    r.terms_.reserve(a.terms_.size() + b.terms_.size());
    auto i = a.terms_.begin(), j = b.terms_.begin();
    while (i != a.terms_.end() || j != b.terms_.end()) {
      if (j == b.terms_.end() || (i != a.terms_.end() && i->first < j->first)) {
        r.terms_.push_back(*i++);
      } else if (i == a.terms_.end() || j->first < i->first) {
        r.terms_.emplace_back(j->first, sign > 0 ? j->second : Rational(-j->second));
        ++j;
      } else {
        Rational c = sign > 0 ? Rational(i->second + j->second) : Rational(i->second - j->second);
        if (c != 0) r.terms_.emplace_back(i->first, std::move(c));
        ++i;
        ++j;
      }
    }
    return r;
  }

  AlphabetPtr alpha_;
  std::vector<Term> terms_;
};

/// Builds the monomial with the given (variable, exponent) entries.
inline Monomial make_monomial(const Alphabet& alpha,
                              std::initializer_list<std::pair<std::string_view, int>> entries) {
  Monomial m;
  for (auto [name, e] : entries) m.e[alpha.index(name)] = static_cast<std::int16_t>(e);
  return m;
}

/// Ring map into another alphabet: each source variable goes to images[i]
/// (a polynomial over target). Negative exponents need an invertible image, so
/// they are only allowed for images that are single monomials.
inline Poly compose(const Poly& p, const AlphabetPtr& target, const std::vector<Poly>& images) {
  const Alphabet& src = *p.alphabet();
  if (images.size() != src.size()) throw ContractError("compose: one image per variable required");
  std::vector<std::map<int, Poly>> cache(src.size());
  auto power = [&](std::size_t i, int e) -> const Poly& {
    auto it = cache[i].find(e);
    if (it != cache[i].end()) return it->second;
    Poly v;
    if (e >= 0) {
      v = images[i].pow(e);
    } else {
      const auto& t = images[i].terms();
      if (t.size() != 1 || t[0].second != 1) throw ContractError("compose: negative power of a non-monomial image");
      Monomial m;
      for (std::size_t j = 0; j < kMaxVariables; ++j) m.e[j] = static_cast<std::int16_t>(t[0].first.e[j] * e);
      v = Poly::monomial(target, m, 1);
    }
    return cache[i].emplace(e, std::move(v)).first->second;
  };
  Poly r(target);
  for (const auto& [m, c] : p.terms()) {
    Poly term = Poly::constant(target, c);
    for (std::size_t i = 0; i < src.size() && !term.is_zero(); ++i)
      if (m.e[i] != 0) term = term * power(i, m.e[i]);
    r += term;
  }
  return r;
}

}  // namespace gwp1
