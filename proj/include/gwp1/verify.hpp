#pragma once

// Verification suites shared by the CLI and the acceptance run. Every suite
// returns a certificate listing each identity it checked.

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "gwp1/fock.hpp"
#include "gwp1/grassmannian.hpp"
#include "gwp1/gw.hpp"
#include "gwp1/integrable.hpp"
#include "gwp1/matint.hpp"
#include "gwp1/miwa.hpp"
#include "gwp1/serialize.hpp"

namespace gwp1 {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Certificate {
  std::string suite;
  json params = json::object();
  std::vector<Check> checks;
  double seconds = 0;

  bool passed() const {
    if (checks.empty()) return false;
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }

  void add(std::string name, bool ok, std::string detail = {}) {
    checks.push_back({std::move(name), ok, std::move(detail)});
  }

  /// Runtime is left out on purpose: certificates must be byte-identical across runs.
  json to_json() const {
    json arr = json::array();
    for (const auto& c : checks) arr.push_back({{"check", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return {{"suite", suite}, {"params", params}, {"verdict", passed() ? "PASS" : "FAIL"}, {"checks", arr}};
  }
};

namespace detail {

template <class F>
Certificate timed(std::string suite, json params, F body) {
  Certificate c;
  c.suite = std::move(suite);
  c.params = std::move(params);
  const auto t0 = std::chrono::steady_clock::now();
  body(c);
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

/// Orders below `leading` on which x and y are both known and agree; -1 on a mismatch.
inline int certified_orders(const Series& x, const Series& y, int leading) {
  const int from = std::max(x.floor().value_or(leading - 1000), y.floor().value_or(leading - 1000));
  if (!Series::agree_from(x, y, from)) return -1;
  return leading - from;
}

}  // namespace detail

/// tau_stationary at qt-cap 0 against exp(sum_k c_k(n) t_k).
inline Certificate verify_closed_form(int K) {
  return detail::timed("closed-form", {{"t_cap", K}}, [&](Certificate& c) {
    auto a = stationary_alphabet(K, 0);
    const Poly n = Poly::variable(a, "n");
    Poly x(a);
    for (int k = 1; k <= K; ++k) x += Poly::variable(a, "t" + std::to_string(k)) * c_k(k, n);
    c.add("tau(q=0) = exp(sum c_k t_k)", tau_stationary(a, n) == x.exp());
  });
}

/// Kac-Schwarz identities on Phi_1..Phi_kmax with formal n, each certified to
/// at least `order` orders below its leading term. relative_w > 0 selects the
/// relative deformation with s-weight cap relative_w.
inline Certificate verify_ks(int k_max, int order, int q_cap, int relative_w = 0) {
  json params = {{"k_max", k_max}, {"order", order}};
  if (relative_w > 0)
    params["s_weight_cap"] = relative_w;
  else
    params["q_cap"] = q_cap;
  return detail::timed(relative_w > 0 ? "ks-relative" : "ks", params, [&](Certificate& c) {
    const AlphabetPtr a = relative_w > 0 ? relative_alphabet(relative_w, relative_w) : absolute_alphabet(q_cap);
    const Poly n = Poly::variable(a, "n");
    const Deformation s = relative_w > 0 ? relative_deformation(a, relative_w) : absolute_deformation(a);
    // the lowering operator eats a couple of orders through b^{-1}
    const int M = order + 2;
    auto phi = [&](int k, int m) { return phi_general(k, n, s, m); };
    const SeriesOperator A = a_operator(n, s), B = b_operator(n), AB = ab_operator(n, s);
    const SeriesOperator comm = A * B - B * A;
    auto record = [&](const std::string& name, int got) {
      c.add(name, got >= order, got < 0 ? "mismatch" : "certified " + std::to_string(got) + " orders");
    };
    for (int k = 1; k <= k_max; ++k) {
      const std::string K = std::to_string(k);
      const Series pk = phi(k, M);
      record("b Phi_" + K + " = Phi_" + std::to_string(k + 1),
             detail::certified_orders(B.apply(pk), phi(k + 1, M + 1), k));
      const Series lowered = A.apply(pk);
      if (k == 1) {
        const int got = lowered.terms().empty() && lowered.floor() ? -*lowered.floor() : -1;
        c.add("a Phi_1 = 0", got >= order, "certified " + std::to_string(got) + " orders");
      } else {
        record("a Phi_" + K + " = " + std::to_string(k - 1) + " Phi_" + std::to_string(k - 1),
               detail::certified_orders(lowered, phi(k - 1, M) * Rational(k - 1), k - 2));
      }
      record("[a,b] Phi_" + K + " = Phi_" + K, detail::certified_orders(comm.apply(pk), pk, k - 1));
      record("(b + sum k s_k b^-k + n + 1/2 - z) Phi_" + K + " = " + K + " Phi_" + K,
             detail::certified_orders(AB.apply(pk), pk * Rational(k), k - 1));
    }
  });
}

/// b e^{-d/dz} = z + 1/2 - n + (n^2/2 - 1/24)/z + O(z^-2).
inline Certificate verify_b_expansion() {
  return detail::timed("b-expansion", json::object(), [&](Certificate& c) {
    auto a = absolute_alphabet(0);
    const Poly n = Poly::variable(a, "n");
    const Series expect = Series::power(a, 1) + Series::monomial(a, 0, Rational(1, 2) - n) +
                          Series::monomial(a, -1, n * n * Rational(1, 2) - Rational(1, 24));
    const SeriesOperator op = b_operator(n) * SeriesOperator::shift(a, -1);
    c.add("b e^{-d} 1 through z^-1", op.apply(Series::constant(a, 1, -3)).truncated(-1) == expect.truncated(-1));
    c.add("prefactor through z^-1", b_prefactor(n, -1) == expect.truncated(-1));
  });
}

/// Coefficients g_2..g_{count+1} of g(z) against the given values.
inline Certificate verify_g_series(const std::vector<Rational>& expected) {
  return detail::timed("g-series", {{"count", expected.size()}}, [&](Certificate& c) {
    const PowerSeries g = g_series(int(expected.size()) + 1);
    for (std::size_t j = 0; j < expected.size(); ++j)
      c.add("g_" + std::to_string(j + 2) + " = " + to_string(expected[j]), g[int(j) + 2] == expected[j],
            to_string(g[int(j) + 2]));
  });
}

/// Partition sum against brute-force fermionic matrix elements at each integer charge.
inline Certificate verify_oracle(int K, int cap, int nmin, int nmax) {
  return detail::timed("oracle", {{"t_cap", K}, {"cap", cap}, {"n_min", nmin}, {"n_max", nmax}}, [&](Certificate& c) {
    for (bool relative : {false, true}) {
      const OracleReport r = oracle_agreement(relative, K, cap, nmin, nmax);
      for (int n : r.charges) {
        const bool bad = std::find(r.failed.begin(), r.failed.end(), n) != r.failed.end();
        c.add(std::string(relative ? "relative" : "stationary") + " n=" + std::to_string(n), !bad);
      }
    }
    const int span = nmax - nmin + 1;
    c.params["formal_n_certified"] = span >= charges_needed(K);
  });
}

/// Residue of the bilinear identity for m - n = 0..d_max.
inline Certificate verify_hirota(int K, int D, int d_max) {
  return detail::timed("hirota", {{"t_cap", K}, {"q_cap", D}, {"d_max", d_max}}, [&](Certificate& c) {
    for (int d = 0; d <= d_max; ++d) {
      const Poly r = hirota_residue(K, D, d);
      c.add("m - n = " + std::to_string(d), r.is_zero(), r.is_zero() ? "" : std::to_string(r.terms().size()) + " terms");
    }
  });
}

/// Determinant formula against the partition sum in Miwa variables.
inline Certificate verify_miwa(int N_max, int certified, int Q) {
  return detail::timed("miwa", {{"N_max", N_max}, {"certified_degree", certified}, {"q_cap", Q}}, [&](Certificate& c) {
    for (int N = 1; N <= N_max; ++N)
      c.add("N = " + std::to_string(N), miwa_agreement(N, certified, Q),
            "total degree " + std::to_string(certified) + " in 1/lambda");
  });
}

/// Normalization, first derivative and the first Toda equation for the relative tau.
inline Certificate verify_toda(int W) {
  return detail::timed("toda", {{"s_weight_cap", W}}, [&](Certificate& c) {
    auto a = relative_tau_alphabet(1, W);
    const Poly n = Poly::variable(a, "n");
    const Poly tau = tau_relative(a, n);
    const std::size_t t1 = a->index("t1");
    c.add("tau_n(s;0) = 1", tau.coefficient_of({{t1, 0}}) == Poly::constant(a, 1));
    c.add("d tau/dt1 at 0 = c_1(n) + s1", tau.coefficient_of({{t1, 1}}) == c_k(1, n) + Poly::variable(a, "s1"));
    const Poly r = toda_residual(W);
    c.add("first Toda equation at t = 0", r.is_zero());
    const Poly k = relative_constraint_residual(3, W);
    c.add("(sum k s_k d/ds_k - d/dt1 + s1 + c_1) tau = 0", k.is_zero());
  });
}

/// GW pipeline checks: string equation, dimension filter, odd hbar, cap stability.
inline Certificate verify_string(int K, int D, int g_max, int d_max) {
  return detail::timed("string", {{"t_cap", K}, {"q_cap", D}, {"g_max", g_max}, {"d_max", d_max}},
                       [&](Certificate& c) {
    const Poly Z = gw_partition_function(K, D);
    const Poly r = string_residual(Z);
    c.add("string residual = 0", r.is_zero());
    GwTable table;
    try {
      table = connected_invariants(Z);
      c.add("odd hbar powers vanish", true);
    } catch (const OracleMismatch& e) {
      c.add("odd hbar powers vanish", false, e.what());
      return;
    }
    bool dims = true;
    for (const auto& e : table.invariants) dims = dims && passes_dimension_filter(e);
    c.add("dimension filter", dims, std::to_string(table.invariants.size()) + " invariants");
    const GwTable big = connected_invariants(gw_partition_function(K + 2, D + 2));
    c.add("stable under caps + 2", cap_stable(table.restricted(g_max, d_max), big.restricted(g_max, d_max)));
  });
}

/// Numeric three-term recursion of Psi_k at a few (q, k).
inline Certificate verify_qsc(int digits) {
  return detail::timed("qsc", {{"digits", digits}}, [&](Certificate& c) {
    using namespace matint;
    WorkingPrecision prec(digits);
    const QuadratureSpec spec{digits};
    for (const char* q : {"0", "0.5", "1", "-0.5"})
      for (int k : {1, 2, 3}) {
        const RecursionReport r = qsc_recursion(k, Real("0.5"), Real(q), Real(3), Real("0.25"), spec);
        c.add("q=" + std::string(q) + " k=" + std::to_string(k), r.relative() < pow(Real(10), 10 - digits),
              "relative residual " + r.relative().str(3));
      }
  });
}

/// N = 2 measure identity on random Hermitian matrices, plus shift invariance.
inline Certificate verify_measure(std::uint64_t seed, int trials, int digits) {
  return detail::timed("measure", {{"seed", seed}, {"trials", trials}, {"digits", digits}}, [&](Certificate& c) {
    using namespace matint;
    WorkingPrecision prec(digits);
    const Real tol = pow(Real(10), 5 - digits);
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
      const ComplexMatrix Y = random_hermitian(rng, 2, 1.0);
      const std::vector<Real> y = eigenvalues2(Y);
      const Real dens = measure_density(y);
      const Real viasinh = sinh_determinant(Y), viatrace = double_trace_density(Y, 40 + 3 * digits);
      const Real e1 = abs(dens - viasinh) / abs(dens), e2 = abs(dens - viatrace) / abs(dens);
      c.add("trial " + std::to_string(t) + " sinh determinant", e1 < tol, e1.str(3));
      c.add("trial " + std::to_string(t) + " double trace", e2 < tol, e2.str(3));
      const Real shift(0.375 * (t + 1));
      const Real e3 = abs(measure_density({y[0] + shift, y[1] + shift}) - dens) / abs(dens);
      c.add("trial " + std::to_string(t) + " shift invariance", e3 < tol, e3.str(3));
    }
  });
}

}  // namespace gwp1
