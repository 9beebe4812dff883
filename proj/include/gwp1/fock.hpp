#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "gwp1/errors.hpp"
#include "gwp1/poly.hpp"
#include "gwp1/special.hpp"

namespace gwp1 {

// ---------------------------------------------------------------------------
// partitions

/// Weakly decreasing positive parts.
using Partition = std::vector<int>;

inline int size_of(const Partition& p) { return std::accumulate(p.begin(), p.end(), 0); }

/// All partitions of 0..D, by size, then reverse-lexicographic within a size.
inline std::vector<Partition> partitions_up_to(int D) {
  if (D < 0) throw ContractError("partitions_up_to needs D >= 0");
  std::vector<Partition> out;
  std::vector<Partition> cur;
  auto rec = [&](auto&& self, int remaining, int maxpart, Partition& p) -> void {
    if (remaining == 0) {
      cur.push_back(p);
      return;
    }
    for (int part = std::min(remaining, maxpart); part >= 1; --part) {
      p.push_back(part);
      self(self, remaining - part, part, p);
      p.pop_back();
    }
  };
  for (int s = 0; s <= D; ++s) {
    cur.clear();
    Partition p;
    rec(rec, s, s, p);
    out.insert(out.end(), cur.begin(), cur.end());
  }
  return out;
}

inline std::string partition_to_string(const Partition& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + std::to_string(p[i]);
  return s + ")";
}

/// dim(lambda)/|lambda|! from the hook-length formula.
inline Rational hook_dim_over_factorial(const Partition& p) {
  Integer hooks = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (int j = 0; j < p[i]; ++j) {
      int arm = p[i] - j - 1, leg = 0;
      for (std::size_t r = i + 1; r < p.size() && p[r] > j; ++r) ++leg;
      hooks *= arm + leg + 1;
    }
  return Rational(1) / Rational(hooks);
}

// ---------------------------------------------------------------------------
// brute-force charged Fock space

/// Operators understood by the brute-force evaluator.
namespace fockop {
struct J {
  int k;
};  // J_k
struct P {
  int k;
};  // the diagonal operator with eigenvalue c_k(n) + content sums
struct ExpJ {
  int k;
  Poly c;
};  // exp(c J_k)
struct ExpTimes {
  std::vector<Poly> t;
};  // exp(sum_k t_k P_k), t[0] multiplies P_1
struct ExpJminus {
  std::vector<Poly> s;
};  // exp(sum_k s_k J_{-k})
}  // namespace fockop

using FockOp = std::variant<fockop::J, fockop::P, fockop::ExpJ, fockop::ExpTimes, fockop::ExpJminus>;

/// Operator word; the last entry acts first on |n>.
using FockWord = std::vector<FockOp>;

/// States of charge n and energy at most E, on a finite window of modes. Modes
/// below the window are filled, modes above it empty. psi_j fills mode j.
class FockSpace {
 public:
  using Vector = std::map<Partition, Poly>;

  FockSpace(int n, int E, int kmax, AlphabetPtr alphabet)
      : n_(n), E_(E), alpha_(std::move(alphabet)) {
    if (E < 0 || kmax < 1) throw ContractError("FockSpace needs E >= 0 and kmax >= 1");
    lo_ = std::min(n, 0) - E - kmax - 2;
    hi_ = std::max(n, 0) + E + kmax + 2;
  }

  int charge() const { return n_; }
  int cutoff() const { return E_; }

  std::vector<char> occupancy(const Partition& p) const {
    std::vector<char> occ(hi_ - lo_ + 1, 0);
    const int count = n_ - lo_;  // particles inside the window
    for (int i = 1; i <= count; ++i) {
      const int part = i <= int(p.size()) ? p[i - 1] : 0;
      const int m = n_ + part - i;
      if (m > hi_) throw ContractError("state outside the Fock window");
      occ[m - lo_] = 1;
    }
    return occ;
  }

  Partition partition_of(const std::vector<char>& occ) const {
    Partition p;
    int i = 0;
    for (int m = hi_; m >= lo_; --m) {
      if (!occ[m - lo_]) continue;
      ++i;
      const int part = m - (n_ - i);
      if (part < 0) throw ContractError("non-Maya occupancy");
      if (part > 0) p.push_back(part);
    }
    if (i != n_ - lo_) throw ContractError("charge changed");
    return p;
  }

  /// J_k |p> as (state, sign) pairs; states above the cutoff are dropped.
  std::vector<std::pair<Partition, int>> apply_J(int k, const Partition& p) const {
    std::vector<std::pair<Partition, int>> out;
    if (k == 0) {
      // normal-ordered charge: multiplies by n
      if (n_ != 0) out.emplace_back(p, n_);
      return out;
    }
    auto occ = occupancy(p);
    for (int src = lo_; src <= hi_; ++src) {
      if (!occ[src - lo_]) continue;
      const int dst = src - k;
      if (dst < lo_) continue;  // all filled below the window
      if (dst > hi_) throw ContractError("Fock window too small");
      if (occ[dst - lo_]) continue;
      int between = 0;
      for (int m = std::min(src, dst) + 1; m < std::max(src, dst); ++m) between += occ[m - lo_];
      auto o2 = occ;
      o2[src - lo_] = 0;
      o2[dst - lo_] = 1;
      Partition q = partition_of(o2);
      if (size_of(q) > E_) continue;
      out.emplace_back(std::move(q), between % 2 ? -1 : 1);
    }
    return out;
  }

  /// Eigenvalue of P_k summed over the occupation pattern.
  Rational p_value(int k, const Partition& p) const {
    auto occ = occupancy(p);
    Rational v = bernoulli_poly(k + 1)(Rational(1, 2)) / (k + 1);
    for (int m = lo_; m <= hi_; ++m) {
      const Rational x = Rational(m) + Rational(1, 2);
      if (m >= 0 && occ[m - lo_]) v += rpow(x, k);
      if (m < 0 && !occ[m - lo_]) v -= rpow(x, k);
    }
    return v;
  }

  Vector apply(const FockOp& op, const Vector& v) const {
    return std::visit([&](const auto& o) { return apply_one(o, v); }, op);
  }

  Vector vacuum() const { return {{Partition{}, Poly::constant(alpha_, 1)}}; }

  Vector basis(const Partition& p) const { return {{p, Poly::constant(alpha_, 1)}}; }

  /// <n| word |start>.
  Poly matrix_element(const FockWord& word, const Vector& start) const {
    Vector v = start;
    for (auto it = word.rbegin(); it != word.rend(); ++it) v = apply(*it, v);
    auto f = v.find(Partition{});
    return f == v.end() ? Poly(alpha_) : f->second;
  }

 private:
  static void add(Vector& v, const Partition& p, const Poly& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = v.try_emplace(p, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) v.erase(it);
    }
  }

  Vector apply_J_vec(int k, const Vector& v, const Poly* coef) const {
    Vector out;
    for (const auto& [p, c] : v)
      for (const auto& [q, sign] : apply_J(k, p)) add(out, q, (coef ? c * *coef : c) * Rational(sign));
    return out;
  }

  template <class Step>
  Vector exponentiate(const Vector& v, Step step) const {
    Vector total = v, term = v;
    for (int m = 1; !term.empty(); ++m) {
      term = step(term);
      for (auto& [p, c] : term) c *= Rational(1, m);
      for (const auto& [p, c] : term) add(total, p, c);
      if (m > 4 * E_ + 64) throw ContractError("exponential failed to terminate");
    }
    return total;
  }

  Vector apply_one(const fockop::J& o, const Vector& v) const { return apply_J_vec(o.k, v, nullptr); }

  Vector apply_one(const fockop::P& o, const Vector& v) const {
    Vector out;
    for (const auto& [p, c] : v) add(out, p, c * p_value(o.k, p));
    return out;
  }

  Vector apply_one(const fockop::ExpJ& o, const Vector& v) const {
    return exponentiate(v, [&](const Vector& t) { return apply_J_vec(o.k, t, &o.c); });
  }

  Vector apply_one(const fockop::ExpJminus& o, const Vector& v) const {
    return exponentiate(v, [&](const Vector& t) {
      Vector out;
      for (int k = 1; k <= int(o.s.size()); ++k) {
        if (o.s[k - 1].is_zero()) continue;
        for (const auto& [p, c] : apply_J_vec(-k, t, &o.s[k - 1])) add(out, p, c);
      }
      return out;
    });
  }

  Vector apply_one(const fockop::ExpTimes& o, const Vector& v) const {
    Vector out;
    for (const auto& [p, c] : v) {
      Poly x(alpha_);
      for (int k = 1; k <= int(o.t.size()); ++k)
        if (!o.t[k - 1].is_zero()) x += o.t[k - 1] * p_value(k, p);
      add(out, p, c * x.exp());
    }
    return out;
  }

  int n_, E_, lo_ = 0, hi_ = 0;
  AlphabetPtr alpha_;
};

inline int max_mode_shift(const FockWord& word) {
  int k = 1;
  for (const auto& op : word) {
    if (auto* j = std::get_if<fockop::J>(&op)) k = std::max(k, std::abs(j->k));
    if (auto* e = std::get_if<fockop::ExpJ>(&op)) k = std::max(k, std::abs(e->k));
    if (auto* s = std::get_if<fockop::ExpJminus>(&op)) k = std::max(k, int(s->s.size()));
  }
  return k;
}

/// <n| word |n> at cutoff E, re-checked at cutoff 2E.
inline Poly brute_force_vev(const FockWord& word, int n, int E, const AlphabetPtr& alphabet) {
  const int kmax = max_mode_shift(word);
  const Poly lo = FockSpace(n, E, kmax, alphabet).matrix_element(word, FockSpace(n, E, kmax, alphabet).vacuum());
  const FockSpace big(n, 2 * E, kmax, alphabet);
  const Poly hi = big.matrix_element(word, big.vacuum());
  if (!(lo == hi))
    throw OracleMismatch("Fock cutoff " + std::to_string(E) + " is insufficient at charge " + std::to_string(n));
  return lo;
}

/// dim(lambda)/|lambda|! as the matrix element <n| e^{J_1} |lambda; n>.
inline Rational fock_dim_over_factorial(const Partition& p, int n = 0) {
  static std::mutex mu;
  static std::map<std::pair<Partition, int>, Rational> cache;
  {
    std::lock_guard lock(mu);
    auto it = cache.find({p, n});
    if (it != cache.end()) return it->second;
  }
  auto a = make_alphabet({});
  const FockSpace fs(n, size_of(p), 1, a);
  const Poly v = fs.matrix_element({fockop::ExpJ{1, Poly::constant(a, 1)}}, fs.basis(p));
  const Rational r = v.constant_term();
  std::lock_guard lock(mu);
  cache.emplace(std::make_pair(p, n), r);
  return r;
}

// ---------------------------------------------------------------------------
// closed-form pieces of the partition sums

/// c_k(n) + sum_i [(n + lambda_i - i + 1/2)^k - (n - i + 1/2)^k].
inline Poly p_eigenvalue(int k, const Partition& p, const Poly& n) {
  Poly v = c_k(k, n);
  for (std::size_t i = 1; i <= p.size(); ++i) {
    const Poly base = n - Rational(int(i)) + Rational(1, 2);
    v += (base + Rational(p[i - 1])).pow(k) - base.pow(k);
  }
  return v;
}

inline Rational p_eigenvalue(int k, const Partition& p, const Rational& n) {
  Rational v = c_k(k, n);
  for (std::size_t i = 1; i <= p.size(); ++i) {
    const Rational base = n - int(i) + Rational(1, 2);
    v += rpow(base + p[i - 1], k) - rpow(base, k);
  }
  return v;
}

/// Schur polynomial s_lambda from power sums p[0] = p_1, p[1] = p_2, ...
inline Poly schur_from_power_sums(const Partition& lambda, const std::vector<Poly>& p) {
  const int N = size_of(lambda);
  if (int(p.size()) < N) throw ContractError("schur_from_power_sums: not enough power sums");
  if (N == 0) {
    if (p.empty()) throw ContractError("schur_from_power_sums needs an alphabet");
    return Poly::constant(p.front().alphabet(), 1);
  }
  const AlphabetPtr& a = p.front().alphabet();
  // complete homogeneous h_m via Newton's identity m h_m = sum_i p_i h_{m-i}
  std::vector<Poly> h(N + 1, Poly(a));
  h[0] = Poly::constant(a, 1);
  for (int m = 1; m <= N; ++m) {
    Poly acc(a);
    for (int i = 1; i <= m; ++i) acc += p[i - 1] * h[m - i];
    h[m] = acc * Rational(1, m);
  }
  const int L = int(lambda.size());
  auto entry = [&](int i, int j) -> Poly {
    const int idx = lambda[i] - i + j;
    if (idx < 0) return Poly(a);
    return h[idx];
  };
  // Laplace expansion along the first row with memoization on column subsets
  std::map<std::pair<int, unsigned>, Poly> memo;
  auto det = [&](auto&& self, int row, unsigned used) -> Poly {
    if (row == L) return Poly::constant(a, 1);
    auto key = std::make_pair(row, used);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    Poly r(a);
    int sign = 1;
    for (int col = 0; col < L; ++col) {
      if (used & (1u << col)) continue;
      const Poly e = entry(row, col);
      if (!e.is_zero()) r += e * self(self, row + 1, used | (1u << col)) * Rational(sign);
      sign = -sign;
    }
    memo.emplace(key, r);
    return r;
  };
  return det(det, 0, 0u);
}

// ---------------------------------------------------------------------------
// tau-functions as partition sums

/// Alphabet {t1..tK, qt, n}: t-weight(t_k) = k capped at K, qt capped at D.
inline AlphabetPtr stationary_alphabet(int K, int D) {
  std::vector<std::string> names;
  std::vector<int> tw, qw;
  for (int k = 1; k <= K; ++k) {
    names.push_back("t" + std::to_string(k));
    tw.push_back(k);
    qw.push_back(0);
  }
  names.insert(names.end(), {"qt", "n"});
  tw.insert(tw.end(), {0, 0});
  qw.insert(qw.end(), {1, 0});
  return make_alphabet(std::move(names), {{"t", std::move(tw), K}, {"qt", std::move(qw), D}});
}

/// Alphabet {t1..tK, s1..sW, n}: t-weight capped at K, s-weight(s_m) = m capped at W.
inline AlphabetPtr relative_tau_alphabet(int K, int W) {
  std::vector<std::string> names;
  std::vector<int> tw, sw;
  for (int k = 1; k <= K; ++k) {
    names.push_back("t" + std::to_string(k));
    tw.push_back(k);
    sw.push_back(0);
  }
  for (int m = 1; m <= W; ++m) {
    names.push_back("s" + std::to_string(m));
    tw.push_back(0);
    sw.push_back(m);
  }
  names.push_back("n");
  tw.push_back(0);
  sw.push_back(0);
  return make_alphabet(std::move(names), {{"t", std::move(tw), K}, {"s", std::move(sw), W}});
}

/// The variables named prefix1..prefixK present in the alphabet (zero if absent).
inline std::vector<Poly> variables_with_prefix(const AlphabetPtr& a, const std::string& prefix, int count) {
  std::vector<Poly> v;
  for (int k = 1; k <= count; ++k) {
    const std::string name = prefix + std::to_string(k);
    v.push_back(a->find(name) ? Poly::variable(a, name) : Poly(a));
  }
  return v;
}

inline int count_with_prefix(const AlphabetPtr& a, const std::string& prefix) {
  int k = 0;
  while (a->find(prefix + std::to_string(k + 1))) ++k;
  return k;
}

/// exp(sum_k t_k p_k(lambda, n)) with t given as polynomials.
inline Poly times_exponential(const std::vector<Poly>& t, const Partition& p, const Poly& n) {
  Poly x(n.alphabet());
  for (int k = 1; k <= int(t.size()); ++k)
    if (!t[k - 1].is_zero()) x += t[k - 1] * p_eigenvalue(k, p, n);
  return x.exp();
}

/// e^{-qt} sum_lambda (dim/|lambda|!)^2 qt^{|lambda|} exp(sum_k t_k p_k(lambda, n)).
inline Poly tau_stationary(const AlphabetPtr& a, const Poly& n, const std::vector<Poly>& t) {
  const Poly qt = Poly::variable(a, "qt");
  const int D = a->gradings()[*a->grading_index("qt")].cap;
  Poly sum(a);
  for (const auto& p : partitions_up_to(D)) {
    const Rational w = fock_dim_over_factorial(p);
    const Poly weight = qt.pow(size_of(p)) * (w * w);
    if (weight.is_zero()) continue;
    sum += weight * times_exponential(t, p, n);
  }
  return (-qt).exp() * sum;
}

inline Poly tau_stationary(const AlphabetPtr& a, const Poly& n) {
  return tau_stationary(a, n, variables_with_prefix(a, "t", count_with_prefix(a, "t")));
}

/// Convenience: caps K, D with formal n.
inline Poly tau_stationary(int K, int D) {
  auto a = stationary_alphabet(K, D);
  return tau_stationary(a, Poly::variable(a, "n"));
}

/// e^{-s1} sum_lambda (dim/|lambda|!) s_lambda(p_k = k s_k) exp(sum_k t_k p_k(lambda, n)).
inline Poly tau_relative(const AlphabetPtr& a, const Poly& n, const std::vector<Poly>& t) {
  const int W = a->gradings()[*a->grading_index("s")].cap;
  const std::vector<Poly> s = variables_with_prefix(a, "s", W);
  std::vector<Poly> power_sums;
  for (int k = 1; k <= W; ++k) power_sums.push_back(s[k - 1] * Rational(k));
  Poly sum(a);
  for (const auto& p : partitions_up_to(W)) {
    const Poly weight = schur_from_power_sums(p, power_sums) * fock_dim_over_factorial(p);
    if (weight.is_zero()) continue;
    sum += weight * times_exponential(t, p, n);
  }
  const Poly s1 = W >= 1 ? s[0] : Poly(a);
  return (-s1).exp() * sum;
}

inline Poly tau_relative(const AlphabetPtr& a, const Poly& n) {
  return tau_relative(a, n, variables_with_prefix(a, "t", count_with_prefix(a, "t")));
}

inline Poly tau_relative(int K, int W) {
  auto a = relative_tau_alphabet(K, W);
  return tau_relative(a, Poly::variable(a, "n"));
}

// ---------------------------------------------------------------------------
// brute-force counterparts

/// e^{-qt} <n| e^{J_1} e^{sum t_k P_k} e^{qt J_{-1}} |n> at integer n.
inline Poly tau_stationary_brute(const AlphabetPtr& a, int n) {
  const int K = count_with_prefix(a, "t");
  const int D = a->gradings()[*a->grading_index("qt")].cap;
  const Poly qt = Poly::variable(a, "qt");
  const FockWord word{fockop::ExpJ{1, Poly::constant(a, 1)}, fockop::ExpTimes{variables_with_prefix(a, "t", K)},
                      fockop::ExpJ{-1, qt}};
  return (-qt).exp() * brute_force_vev(word, n, D + K + 2, a);
}

/// e^{-s1} <n| e^{J_1} e^{sum t_k P_k} e^{sum s_k J_{-k}} |n> at integer n.
inline Poly tau_relative_brute(const AlphabetPtr& a, int n) {
  const int K = count_with_prefix(a, "t");
  const int W = a->gradings()[*a->grading_index("s")].cap;
  const std::vector<Poly> s = variables_with_prefix(a, "s", W);
  const FockWord word{fockop::ExpJ{1, Poly::constant(a, 1)}, fockop::ExpTimes{variables_with_prefix(a, "t", K)},
                      fockop::ExpJminus{s}};
  return (-s[0]).exp() * brute_force_vev(word, n, W + K + 2, a);
}

// ---------------------------------------------------------------------------
// oracle certification

struct OracleReport {
  std::vector<int> charges;
  std::vector<int> failed;
  bool passed() const { return failed.empty(); }
};

/// Compares the formal-n partition sum with brute force at each integer charge.
/// A t-monomial of weight w has n-degree at most 2w (c_k has degree k+1), so
/// 2K+1 charges pin down the formal result completely.
inline OracleReport oracle_agreement(bool relative, int K, int cap, int nmin, int nmax) {
  const AlphabetPtr a = relative ? relative_tau_alphabet(K, cap) : stationary_alphabet(K, cap);
  const Poly formal = relative ? tau_relative(a, Poly::variable(a, "n")) : tau_stationary(a, Poly::variable(a, "n"));
  OracleReport r;
  for (int n = nmin; n <= nmax; ++n) {
    r.charges.push_back(n);
    const Poly brute = relative ? tau_relative_brute(a, n) : tau_stationary_brute(a, n);
    if (!(formal.evaluate("n", n) == brute)) r.failed.push_back(n);
  }
  return r;
}

inline int charges_needed(int K) { return 2 * K + 1; }

}  // namespace gwp1
