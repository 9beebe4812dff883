#pragma once

// Miwa parametrization and the determinant formula for the stationary tau-function.

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "gwp1/fock.hpp"
#include "gwp1/grassmannian.hpp"

namespace gwp1 {

/// t_k = (1/k) sum_l lambda_l^{-k}, k = 1..K.
inline std::vector<Rational> miwa_times(const std::vector<Rational>& lambda, int K) {
  if (K < 1) throw ContractError("miwa_times needs K >= 1");
  std::vector<Rational> t(K, Rational(0));
  for (const auto& l : lambda) {
    if (l == 0) throw DomainError("miwa_times: zero eigenvalue");
    for (int k = 1; k <= K; ++k) t[k - 1] += rpow(1 / l, k) / k;
  }
  return t;
}

/// t^w_k = hbar k! sum_l lambda_l^{-k-1}, k = 0..K-1.
inline std::vector<Rational> miwa_times_gw(const std::vector<Rational>& lambda, int K, const Rational& hbar) {
  if (K < 1) throw ContractError("miwa_times_gw needs K >= 1");
  std::vector<Rational> t(K, Rational(0));
  for (const auto& l : lambda) {
    if (l == 0) throw DomainError("miwa_times_gw: zero eigenvalue");
    for (int k = 0; k < K; ++k) t[k] += hbar * factorial(k) * rpow(1 / l, k + 1);
  }
  return t;
}

/// Alphabet {u1..uN, qt, n} with u_l = 1/lambda_l of total degree capped at C.
inline AlphabetPtr miwa_alphabet(int N, int C, int Q) {
  std::vector<std::string> names;
  std::vector<int> uw, qw;
  for (int l = 1; l <= N; ++l) {
    names.push_back("u" + std::to_string(l));
    uw.push_back(1);
    qw.push_back(0);
  }
  names.insert(names.end(), {"qt", "n"});
  uw.insert(uw.end(), {0, 0});
  qw.insert(qw.end(), {1, 0});
  return make_alphabet(std::move(names), {{"u", std::move(uw), C}, {"qt", std::move(qw), Q}});
}

/// Symbolic Miwa times (1/k) sum_l u_l^k over an alphabet holding u1..uN.
inline std::vector<Poly> miwa_times(const AlphabetPtr& a, int N, int K) {
  std::vector<Poly> t(K, Poly(a));
  for (int l = 1; l <= N; ++l) {
    const Poly u = Poly::variable(a, "u" + std::to_string(l));
    Poly p = Poly::constant(a, 1);
    for (int k = 1; k <= K; ++k) {
      p = p * u;
      t[k - 1] += p * Rational(1, k);
    }
  }
  return t;
}

/// Symbolic GW-mode times t^w_k = hbar k! sum_l u_l^{k+1}; the alphabet must hold hbar.
inline std::vector<Poly> miwa_times_gw(const AlphabetPtr& a, int N, int K) {
  const Poly hbar = Poly::variable(a, "hbar");
  std::vector<Poly> t(K, Poly(a));
  for (int l = 1; l <= N; ++l) {
    const Poly u = Poly::variable(a, "u" + std::to_string(l));
    Poly p = u;
    for (int k = 0; k < K; ++k) {
      t[k] += hbar * p * factorial(k);
      p = p * u;
    }
  }
  return t;
}

inline int vandermonde_degree(int N) { return N * (N - 1) / 2; }

/// Exact division by (u_i - u_j); throws if the remainder is nonzero.
inline Poly divide_by_difference(const Poly& p, std::size_t i, std::size_t j) {
  const AlphabetPtr& a = p.alphabet();
  // group by power of u_i: p = sum_e c_e u_i^e
  std::map<int, Poly> by_power;
  for (const auto& [m, c] : p.terms()) {
    Monomial mm = m;
    const int e = mm.e[i];
    mm.e[i] = 0;
    auto [it, fresh] = by_power.try_emplace(e, Poly(a));
    it->second += Poly::monomial(a, mm, c);
  }
  if (by_power.empty()) return Poly(a);
  const Poly uj = Poly::monomial(a, [&] {
    Monomial m;
    m.e[j] = 1;
    return m;
  }(), 1);
  // synthetic division: q_{e-1} = c_e + u_j q_e
  Poly q(a), carry(a);
  const int top = by_power.rbegin()->first;
  for (int e = top; e >= 1; --e) {
    auto it = by_power.find(e);
    carry = (it == by_power.end() ? Poly(a) : it->second) + uj * carry;
    Monomial ui;
    ui.e[i] = static_cast<std::int16_t>(e - 1);
    q += carry * Poly::monomial(a, ui, 1);
  }
  auto c0 = by_power.find(0);
  const Poly rem = (c0 == by_power.end() ? Poly(a) : c0->second) + uj * carry;
  if (!rem.is_zero()) throw OracleMismatch("Vandermonde division left a remainder");
  return q;
}

struct MiwaDeterminant {
  Poly tau;              // symmetric polynomial in u1..uN
  int certified_degree;  // total u-degree known exactly
};

/// det_{k,l} Phi_k(lambda_l) / Delta(lambda) in u_l = 1/lambda_l, up to total
/// u-degree C - N(N-1)/2. The alphabet must come from miwa_alphabet.
inline MiwaDeterminant tau_determinant(const AlphabetPtr& a, int N, const Poly& n) {
  if (N < 1) throw ContractError("tau_determinant needs N >= 1");
  const int C = a->gradings()[*a->grading_index("u")].cap;
  const int loss = vandermonde_degree(N);
  if (C < loss)
    throw TruncationError("tau_determinant: u-degree cap " + std::to_string(C) + " is below the " +
                          std::to_string(loss) + " orders lost to the Vandermonde; need at least " +
                          std::to_string(loss));
  // entry (k,l) = u_l^{N-1} Phi_k(1/u_l) = sum_j phi_{k,j} u_l^{N-k+j}
  std::vector<std::vector<Poly>> entry(N, std::vector<Poly>(N, Poly(a)));
  for (int k = 1; k <= N; ++k) {
    const Series phi = phi_absolute(k, n, C);
    for (int l = 0; l < N; ++l) {
      const std::size_t ul = a->index("u" + std::to_string(l + 1));
      for (const auto& [e, c] : phi.terms()) {
        const int pw = N - 1 - e;
        if (pw < 0) throw ContractError("tau_determinant: basis vector has too high a power");
        Monomial m;
        m.e[ul] = static_cast<std::int16_t>(pw);
        entry[k - 1][l] += c * Poly::monomial(a, m, 1);
      }
    }
  }
  // Leibniz expansion
  std::vector<int> perm(N);
  std::iota(perm.begin(), perm.end(), 0);
  Poly det(a);
  do {
    int inversions = 0;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) inversions += perm[i] > perm[j];
    Poly term = Poly::constant(a, inversions % 2 ? -1 : 1);
    for (int k = 0; k < N && !term.is_zero(); ++k) term = term * entry[k][perm[k]];
    det += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  // Delta(lambda) = prod_{i<j} (u_i - u_j) / prod_l u_l^{N-1}
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      det = divide_by_difference(det, a->index("u" + std::to_string(i + 1)), a->index("u" + std::to_string(j + 1)));
  return {det.truncated("u", C - loss), C - loss};
}

/// tau_stationary with t_k -> (1/k) sum_l u_l^k, to total u-degree K.
inline Poly tau_stationary_miwa(const AlphabetPtr& a, int N, const Poly& n) {
  const int K = a->gradings()[*a->grading_index("u")].cap;
  const int Q = a->gradings()[*a->grading_index("qt")].cap;
  auto st = stationary_alphabet(K, Q);
  const std::vector<Poly> t = miwa_times(a, N, K);
  const Poly tau = tau_stationary(st, Poly::variable(st, "n"));
  std::vector<Poly> images;
  for (const auto& name : st->names()) {
    if (name == "qt") images.push_back(Poly::variable(a, "qt"));
    else if (name == "n") images.push_back(n);
    else images.push_back(t[std::stoi(name.substr(1)) - 1]);
  }
  return compose(tau, a, images);
}

/// Agreement of the determinant with the partition sum on the certified range.
inline bool miwa_agreement(int N, int certified, int Q) {
  auto a = miwa_alphabet(N, certified + vandermonde_degree(N), Q);
  const Poly n = Poly::variable(a, "n");
  const MiwaDeterminant d = tau_determinant(a, N, n);
  auto b = miwa_alphabet(N, d.certified_degree, Q);
  return d.tau.rebind(b) == tau_stationary_miwa(b, N, Poly::variable(b, "n"));
}

}  // namespace gwp1
