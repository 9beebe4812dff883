#pragma once

// Change of variables to Gromov-Witten times and extraction of connected invariants.

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "gwp1/fock.hpp"
#include "gwp1/serialize.hpp"

namespace gwp1 {

/// Alphabet {tw0..tw(K-1), t01, hbar, q}: weight(tw_k) = k+1 capped at K, q capped at D,
/// hbar a Laurent variable.
inline AlphabetPtr gw_alphabet(int K, int D) {
  std::vector<std::string> names;
  std::vector<int> tw, qw;
  for (int k = 0; k < K; ++k) {
    names.push_back("tw" + std::to_string(k));
    tw.push_back(k + 1);
    qw.push_back(0);
  }
  names.insert(names.end(), {"t01", "hbar", "q"});
  tw.insert(tw.end(), {0, 0, 0});
  qw.insert(qw.end(), {0, 0, 1});
  std::vector<bool> laurent(names.size(), false);
  laurent[K + 1] = true;
  return make_alphabet(std::move(names), {{"t", std::move(tw), K}, {"q", std::move(qw), D}}, std::move(laurent));
}

/// e^{q/hbar^2} tau_n(t) with n = t01/hbar, t_k = hbar^{k-1} tw_{k-1}/k!, qt = q/hbar^2.
inline Poly gw_change_of_variables(const Poly& tau, const AlphabetPtr& target) {
  const AlphabetPtr& src = tau.alphabet();
  const Poly hbar_inv = Poly::variable(target, "hbar", -1);
  const Poly q = Poly::variable(target, "q");
  std::vector<Poly> images;
  for (const auto& name : src->names()) {
    if (name == "qt") {
      images.push_back(q * hbar_inv * hbar_inv);
    } else if (name == "n") {
      images.push_back(Poly::variable(target, "t01") * hbar_inv);
    } else if (name.size() > 1 && name[0] == 't') {
      const int k = std::stoi(name.substr(1));
      const std::string tw = "tw" + std::to_string(k - 1);
      if (!target->find(tw)) {
        images.push_back(Poly(target));
        continue;
      }
      Poly img = Poly::variable(target, tw) * (1 / factorial(k));
      if (k > 1) img = img * Poly::variable(target, "hbar", k - 1);
      images.push_back(img);
    } else {
      throw ContractError("gw_change_of_variables: unexpected variable " + name);
    }
  }
  const Poly body = compose(tau, target, images);
  return (q * hbar_inv * hbar_inv).exp() * body;
}

/// The full pipeline: tau_stationary at caps (K, D), then the change of variables.
inline Poly gw_partition_function(int K, int D) {
  return gw_change_of_variables(tau_stationary(K, D), gw_alphabet(K, D));
}

struct GwEntry {
  int g = 0;
  int d = 0;
  std::vector<int> ks;  // descendant orders of the omega insertions, sorted
  int t01 = 0;          // number of tau_0(1) insertions
  Rational value;

  int marked() const { return int(ks.size()) + t01; }
  auto key() const { return std::tie(g, d, ks, t01); }
  friend bool operator==(const GwEntry& a, const GwEntry& b) { return a.key() == b.key() && a.value == b.value; }
};

inline std::string ks_to_string(const std::vector<int>& ks) {
  std::string s;
  for (std::size_t i = 0; i < ks.size(); ++i) s += (i ? " " : "") + std::to_string(ks[i]);
  return s;
}

/// sum (k_i + 1) = 2g - 2 + m + 2d
inline bool passes_dimension_filter(const GwEntry& e) {
  int lhs = 0;
  for (int k : e.ks) lhs += k + 1;
  return lhs == 2 * e.g - 2 + e.marked() + 2 * e.d;
}

/// Degree-zero terms whose moduli space is unstable (2g - 2 + m <= 0).
inline bool is_unstable(const GwEntry& e) { return e.d == 0 && 2 * e.g - 2 + e.marked() <= 0; }

struct GwTable {
  int t_cap = 0;
  int q_cap = 0;
  std::vector<GwEntry> invariants;
  std::vector<GwEntry> normalization;  // unstable corner terms, kept apart

  const GwEntry* find(int g, int d, std::vector<int> ks, int t01 = 0) const {
    std::sort(ks.begin(), ks.end());
    for (const auto& e : invariants)
      if (e.g == g && e.d == d && e.ks == ks && e.t01 == t01) return &e;
    return nullptr;
  }

  Rational value(int g, int d, std::vector<int> ks, int t01 = 0) const {
    const GwEntry* e = find(g, d, std::move(ks), t01);
    return e ? e->value : Rational(0);
  }

  /// Entries restricted to g <= g_max and d <= d_max.
  GwTable restricted(int g_max, int d_max) const {
    GwTable r{t_cap, q_cap, {}, {}};
    for (const auto& e : invariants)
      if (e.g <= g_max && e.d <= d_max) r.invariants.push_back(e);
    for (const auto& e : normalization)
      if (e.g <= g_max && e.d <= d_max) r.normalization.push_back(e);
    return r;
  }

  std::string to_csv() const {
    std::ostringstream os;
    os << "section,g,d,k,t01,value\n";
    auto emit = [&](const char* section, const std::vector<GwEntry>& v) {
      for (const auto& e : v)
        os << section << ',' << e.g << ',' << e.d << ",\"" << ks_to_string(e.ks) << "\"," << e.t01 << ','
           << to_string(e.value) << '\n';
    };
    emit("invariant", invariants);
    emit("normalization", normalization);
    return os.str();
  }

  json to_json() const {
    auto rows = [](const std::vector<GwEntry>& v) {
      json arr = json::array();
      for (const auto& e : v)
        arr.push_back({{"g", e.g}, {"d", e.d}, {"k", e.ks}, {"t01", e.t01}, {"value", to_string(e.value)}});
      return arr;
    };
    return {{"t_cap", t_cap}, {"q_cap", q_cap}, {"invariants", rows(invariants)}, {"normalization", rows(normalization)}};
  }
};

/// log Z read off monomial by monomial: hbar^{2g-2} q^d prod tw_{k_i} t01^a, times the
/// multiplicity factorials. Odd hbar powers and dimension violations are hard failures.
inline GwTable connected_invariants(const Poly& Z) {
  const AlphabetPtr& a = Z.alphabet();
  if (Z.constant_term() != 1) throw ContractError("connected_invariants needs Z(0) = 1");
  const Poly F = Z.log();
  const std::size_t hbar = a->index("hbar"), q = a->index("q"), t01 = a->index("t01");
  std::vector<std::pair<std::size_t, int>> tw;
  for (int k = 0;; ++k) {
    auto i = a->find("tw" + std::to_string(k));
    if (!i) break;
    tw.emplace_back(*i, k);
  }
  GwTable table;
  table.t_cap = a->gradings()[*a->grading_index("t")].cap;
  table.q_cap = a->gradings()[*a->grading_index("q")].cap;
  for (const auto& [m, c] : F.terms()) {
    const int h = m.e[hbar];
    if (h % 2 != 0)
      throw OracleMismatch("odd power hbar^" + std::to_string(h) + " survives in log Z: " +
                           Poly::monomial(a, m, c).to_string());
    GwEntry e;
    e.g = (h + 2) / 2;
    e.d = m.e[q];
    e.t01 = m.e[t01];
    Rational mult = factorial(e.t01);
    for (auto [idx, k] : tw) {
      for (int r = 0; r < m.e[idx]; ++r) e.ks.push_back(k);
      mult *= factorial(m.e[idx]);
    }
    std::sort(e.ks.begin(), e.ks.end());
    e.value = c * mult;
    if (e.g < 0) throw OracleMismatch("negative genus term in log Z: " + Poly::monomial(a, m, c).to_string());
    if (!passes_dimension_filter(e))
      throw OracleMismatch("dimension constraint violated at g=" + std::to_string(e.g) + " d=" +
                           std::to_string(e.d) + " k=(" + ks_to_string(e.ks) + ") t01=" + std::to_string(e.t01));
    (is_unstable(e) ? table.normalization : table.invariants).push_back(std::move(e));
  }
  auto order = [](const GwEntry& x, const GwEntry& y) { return x.key() < y.key(); };
  std::sort(table.invariants.begin(), table.invariants.end(), order);
  std::sort(table.normalization.begin(), table.normalization.end(), order);
  return table;
}

/// (t01 tw0/hbar^2 + sum_k tw_k d/dtw_{k-1} - d/dt01) Z, exact in the capped ring.
inline Poly string_residual(const Poly& Z) {
  const AlphabetPtr& a = Z.alphabet();
  Poly r = Poly::variable(a, "t01") * Poly::variable(a, "tw0") * Poly::variable(a, "hbar", -2) * Z -
           Z.derivative("t01");
  for (int k = 1;; ++k) {
    auto i = a->find("tw" + std::to_string(k));
    if (!i) break;
    r += Poly::variable(a, "tw" + std::to_string(k)) * Z.derivative("tw" + std::to_string(k - 1));
  }
  return r;
}

/// Entries of the smaller table agree with the larger table on the smaller caps.
inline bool cap_stable(const GwTable& small, const GwTable& big) {
  auto inside = [&](const GwEntry& e) {
    int w = 0;
    for (int k : e.ks) w += k + 1;
    return w <= small.t_cap && e.d <= small.q_cap;
  };
  std::vector<GwEntry> a = small.invariants, b;
  for (const auto& e : big.invariants)
    if (inside(e)) b.push_back(e);
  std::vector<GwEntry> na = small.normalization, nb;
  for (const auto& e : big.normalization)
    if (inside(e)) nb.push_back(e);
  return a == b && na == nb;
}

}  // namespace gwp1
