#pragma once

// Bilinear and lattice identities of the partition-sum tau-functions.

#include <string>
#include <vector>

#include "gwp1/fock.hpp"
#include "gwp1/series.hpp"

namespace gwp1 {

/// Alphabet {t1..tK, tp1..tpK, qt, n}: both time sets share the weighted cap K.
inline AlphabetPtr hirota_alphabet(int K, int D) {
  std::vector<std::string> names;
  std::vector<int> tw, qw;
  for (const char* prefix : {"t", "tp"})
    for (int k = 1; k <= K; ++k) {
      names.push_back(prefix + std::to_string(k));
      tw.push_back(k);
      qw.push_back(0);
    }
  names.insert(names.end(), {"qt", "n"});
  tw.insert(tw.end(), {0, 0});
  qw.insert(qw.end(), {1, 0});
  return make_alphabet(std::move(names), {{"t", std::move(tw), K}, {"qt", std::move(qw), D}});
}

/// tau_m(t + sign [z^{-1}]) as a z-series known down to z^{-depth}, m = n + shift.
inline Series tau_miwa_shifted(const AlphabetPtr& a, const std::string& prefix, int sign, int shift, int depth) {
  const int K = count_with_prefix(a, prefix);
  const int D = a->gradings()[*a->grading_index("qt")].cap;
  const std::vector<Poly> t = variables_with_prefix(a, prefix, K);
  const Poly qt = Poly::variable(a, "qt");
  const Poly m = Poly::variable(a, "n") + Rational(shift);
  Series total(a, -depth);
  for (const auto& p : partitions_up_to(D)) {
    const Rational w = fock_dim_over_factorial(p);
    const Poly weight = qt.pow(size_of(p)) * (w * w);
    if (weight.is_zero()) continue;
    // exp(sign sum_k z^{-k} p_k / k), exact through z^{-depth}
    Series arg(a, -depth);
    for (int k = 1; k <= depth; ++k) arg.set(-k, p_eigenvalue(k, p, m) * make_rational(sign, k));
    total = total + arg.exp() * (weight * times_exponential(t, p, m));
  }
  return total * (-qt).exp();
}

/// Residue at infinity of z^d e^{sum (t_k - t'_k) z^k} tau_{n+d}(t - [z^-1]) tau_n(t' + [z^-1]).
/// Every monomial of the exponential has z-power equal to its t-weight, so the
/// residue only needs the tau product down to z^{-(1 + d + K)}.
namespace detail {
inline Poly hirota_residue_unchecked(int K, int D, int d) {
  auto a = hirota_alphabet(K, D);
  const int depth = std::max(1, 1 + d + K);
  const Series prod = tau_miwa_shifted(a, "t", -1, d, depth) * tau_miwa_shifted(a, "tp", +1, 0, depth);
  // e^{xi} split by z-power, i.e. by t-weight
  const std::vector<Poly> t = variables_with_prefix(a, "t", K), tp = variables_with_prefix(a, "tp", K);
  const std::size_t g = *a->grading_index("t");
  std::vector<Poly> layer(K + 1, Poly(a));
  Poly arg(a);
  for (int k = 1; k <= K; ++k) arg += t[k - 1] - tp[k - 1];
  const Poly ex = arg.exp();
  for (const auto& [mono, c] : ex.terms()) {
    const int w = a->degree(mono, g);
    layer[w] += Poly::monomial(a, mono, c);
  }
  Poly res(a);
  for (int j = 0; j <= K; ++j)
    if (!layer[j].is_zero()) res += layer[j] * prod.coefficient(-1 - d - j);
  return res;
}
}  // namespace detail

inline Poly hirota_residue(int K, int D, int d) {
  if (d < 0) throw ContractError("hirota_residue needs m - n >= 0");
  return detail::hirota_residue_unchecked(K, D, d);
}

/// tau * d2 tau/dt1 ds1 - dtau/dt1 * dtau/ds1 - tau_{n-1}(s;0) tau_{n+1}(s;0) at t = 0,
/// known to s-weight W - 1.
inline Poly toda_residual(int W) {
  auto a = relative_tau_alphabet(1, W);
  const Poly n = Poly::variable(a, "n");
  const Poly tau = tau_relative(a, n);
  const std::size_t t1 = a->index("t1");
  auto at0 = [&](const Poly& f) { return f.coefficient_of({{t1, 0}}); };
  const Poly dt = tau.derivative("t1");
  const Poly lhs = at0(tau) * at0(dt.derivative("s1")) - at0(dt) * at0(tau.derivative("s1"));
  auto shifted = [&](int c) { return at0(tau_relative(a, n + Rational(c))); };
  return (lhs - shifted(-1) * shifted(1)).truncated("s", W - 1);
}

/// (sum_k k s_k d/ds_k - d/dt1 + s1 + c_1(n)) tau_n(s; t), known to t-weight K - 1.
inline Poly relative_constraint_residual(int K, int W) {
  auto a = relative_tau_alphabet(K, W);
  const Poly n = Poly::variable(a, "n");
  const Poly tau = tau_relative(a, n);
  Poly r = (Poly::variable(a, "s1") + c_k(1, n)) * tau - tau.derivative("t1");
  for (int k = 1; k <= W; ++k) {
    const std::string s = "s" + std::to_string(k);
    r += Poly::variable(a, s) * tau.derivative(s) * Rational(k);
  }
  return r.truncated("t", K - 1);
}

}  // namespace gwp1
