#include <gtest/gtest.h>

#include "gwp1/gw.hpp"

using namespace gwp1;

namespace {

Rational R(long p, long q = 1) { return make_rational(p, q); }

// coefficients of S(z)^p in z^2, S(z) = sinh(z/2)/(z/2), up to z^{2G}
std::vector<Rational> s_power(int p, int G) {
  std::vector<Rational> s(G + 1), r(G + 1, Rational(0));
  for (int j = 0; j <= G; ++j) s[j] = rpow(R(1, 4), j) / factorial(2 * j + 1);
  r[0] = 1;
  for (int i = 0; i < p; ++i) {
    std::vector<Rational> next(G + 1, Rational(0));
    for (int a = 0; a <= G; ++a)
      for (int b = 0; a + b <= G; ++b) next[a + b] += r[a] * s[b];
    r = next;
  }
  return r;
}

const GwTable& table_6_3() {
  static const GwTable t = connected_invariants(gw_partition_function(6, 3));
  return t;
}

}  // namespace

TEST(GwChange, NormalizationAtZeroTimes) {
  const Poly Z = gw_partition_function(4, 2);
  auto a = Z.alphabet();
  std::vector<std::pair<std::size_t, int>> zero;
  for (int k = 0; k < 4; ++k) zero.emplace_back(a->index("tw" + std::to_string(k)), 0);
  // tau_n(0) = 1, so Z at tw = 0 is e^{q/hbar^2}
  const Poly q = Poly::variable(a, "q") * Poly::variable(a, "hbar", -2);
  EXPECT_EQ(Z.coefficient_of(zero), q.exp());
}

TEST(GwChange, FirstDescendantCoefficient) {
  const Poly Z = gw_partition_function(3, 2);
  auto a = Z.alphabet();
  const Poly F = Z.log();
  const Poly c = F.coefficient_of({{a->index("tw0"), 1}, {a->index("tw1"), 0}, {a->index("tw2"), 0}});
  const Poly hm2 = Poly::variable(a, "hbar", -2);
  const Poly t01 = Poly::variable(a, "t01");
  EXPECT_EQ(c, t01 * t01 * hm2 * R(1, 2) - R(1, 24) + Poly::variable(a, "q") * hm2);
}

TEST(GwTable, OddHbarPowersVanishAndDimensionsHold) {
  const GwTable& t = table_6_3();
  EXPECT_FALSE(t.invariants.empty());
  for (const auto& e : t.invariants) EXPECT_TRUE(passes_dimension_filter(e));
}

TEST(GwTable, KnownLowValues) {
  const GwTable& t = table_6_3();
  EXPECT_EQ(t.value(0, 1, {0}), 1);
  EXPECT_EQ(t.value(0, 1, {1}), 0);
  EXPECT_EQ(t.find(0, 1, {1}), nullptr);
  EXPECT_EQ(t.value(1, 0, {0}), R(-1, 24));
  EXPECT_EQ(t.value(0, 0, {0}, 2), 1);
  EXPECT_EQ(t.value(0, 1, {}), 1);
}

TEST(GwTable, OnePointSeriesOracle) {
  // sum_g <tau_{2g-2+2d}(omega)>_{g,d} z^{2g} = S(z)^{2d-1}/(d!)^2
  const int K = 7;
  const GwTable t = connected_invariants(gw_partition_function(K, 3));
  for (int d = 0; d <= 3; ++d) {
    const int G = 3;
    std::vector<Rational> expect;
    if (d == 0) {
      // 1/S(z)
      const auto s = s_power(1, G);
      expect.assign(G + 1, Rational(0));
      expect[0] = 1;
      for (int g = 1; g <= G; ++g)
        for (int j = 1; j <= g; ++j) expect[g] -= s[j] * expect[g - j];
    } else {
      expect = s_power(2 * d - 1, G);
      for (auto& x : expect) x /= factorial(d) * factorial(d);
    }
    for (int g = 0; g <= G; ++g) {
      const int k = 2 * g - 2 + 2 * d;
      if (k < 0 || k + 1 > K) continue;
      EXPECT_EQ(t.value(g, d, {k}), expect[g]) << "g=" << g << " d=" << d;
    }
  }
}

TEST(GwTable, StableUnderLargerCaps) {
  const GwTable big = connected_invariants(gw_partition_function(8, 5));
  EXPECT_TRUE(cap_stable(table_6_3(), big));
}

TEST(GwTable, UnstableTermsAreSegregated) {
  const GwTable& t = table_6_3();
  for (const auto& e : t.normalization) EXPECT_TRUE(is_unstable(e));
  for (const auto& e : t.invariants) EXPECT_FALSE(is_unstable(e));
}

TEST(GwTable, CsvAndJsonAreDeterministic) {
  const GwTable a = connected_invariants(gw_partition_function(3, 2));
  const GwTable b = connected_invariants(gw_partition_function(3, 2));
  EXPECT_EQ(a.to_csv(), b.to_csv());
  EXPECT_EQ(dump(a.to_json()), dump(b.to_json()));
  EXPECT_EQ(a.to_csv().substr(0, 24), "section,g,d,k,t01,value\n");
}

TEST(StringEquation, ResidualVanishes) {
  EXPECT_TRUE(string_residual(gw_partition_function(6, 3)).is_zero());
}

TEST(StringEquation, QZeroSlice) { EXPECT_TRUE(string_residual(gw_partition_function(5, 0)).is_zero()); }

TEST(StringEquation, CorruptedSeriesIsDetected) {
  Poly Z = gw_partition_function(4, 2);
  auto a = Z.alphabet();
  Z += Poly::variable(a, "tw1") * Poly::variable(a, "q") * R(1, 7);
  EXPECT_FALSE(string_residual(Z).is_zero());
}

TEST(GwTable, OddHbarIsRejected) {
  auto a = gw_alphabet(2, 1);
  const Poly bad = Poly::constant(a, 1) + Poly::variable(a, "tw0") * Poly::variable(a, "hbar", -1);
  EXPECT_THROW(connected_invariants(bad), OracleMismatch);
}
