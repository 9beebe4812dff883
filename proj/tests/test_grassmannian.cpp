#include <gtest/gtest.h>

#include <algorithm>

#include <random>

#include "gwp1/grassmannian.hpp"

using namespace gwp1;

namespace {

Rational R(long p, long q = 1) { return make_rational(p, q); }

// Compares two series on the range both know; returns the number of certified
// orders below `leading`.
int certified_equal(const Series& x, const Series& y, int leading) {
  const int from = std::max(x.floor().value_or(-1000), y.floor().value_or(-1000));
  EXPECT_TRUE(Series::agree_from(x, y, from)) << "lhs: " << x << "\nrhs: " << y;
  return leading - from;
}

}  // namespace

TEST(GSeries, DisplayedCoefficients) {
  const PowerSeries g = g_series(11);
  const std::vector<Rational> expect = {R(-1, 2),    R(-1, 12),       R(-1, 48),       R(-1, 180),
                                        R(-11, 8640), R(-1, 6720),     R(11, 241920),   R(29, 1451520),
                                        R(-493, 43545600), R(-2711, 239500800)};
  EXPECT_EQ(g[0], 0);
  EXPECT_EQ(g[1], 0);
  for (int j = 0; j < 10; ++j) EXPECT_EQ(g[j + 2], expect[j]) << "z^" << j + 2;
}

TEST(GSeries, FlowResubstitution) {
  // e^{g d/dz} z via polynomial arithmetic in a graded alphabet
  const int M = 12;
  const PowerSeries g = g_series(M);
  auto a = make_alphabet({"z"}, {{"z", {1}, M}});
  const Poly z = Poly::variable(a, "z");
  Poly gp(a);
  for (int j = 2; j <= M; ++j) gp += z.pow(j) * g[j];
  Poly term = z, total = z;
  for (int m = 1; !term.is_zero(); ++m) {
    term = gp * term.derivative("z") * Rational(1, m);
    total += term;
  }
  Poly target(a);
  for (int j = 1; j <= M; ++j) target += z.pow(j) * (Rational(j % 2 ? 1 : -1) / factorial(j));
  EXPECT_EQ(total, target);
}

TEST(GSeries, ExpMinusYGivesRisingFactorial) {
  const PowerSeries g = g_series(13);
  for (int k = 1; k <= 12; ++k) {
    std::vector<Rational> rising{1};  // prod_{j<k} (z + j)
    for (int j = 0; j < k; ++j) {
      std::vector<Rational> next(rising.size() + 1);
      for (std::size_t i = 0; i < rising.size(); ++i) {
        next[i + 1] += rising[i];
        next[i] += rising[i] * j;
      }
      rising = next;
    }
    EXPECT_EQ(exp_minus_y_on_power(g, k), rising) << "k=" << k;
  }
  EXPECT_THROW(exp_minus_y_on_power(g, 13), TruncationError);
}

TEST(WInverse, Monomials) {
  auto a = absolute_alphabet(2);
  const Series one = Series::constant(a, 1);
  EXPECT_EQ(w_inverse_transform(one, 6), exp_F(Poly::constant(a, 0), 6));
  const Series z = Series::power(a, 1);
  const Series wz = w_inverse_transform(z, 6);
  EXPECT_EQ(wz.coefficient(1).constant_term(), 1);
  // Gamma(z+3/2) = (z+1/2) Gamma(z+1/2)
  const Series rhs = (z + Series::constant(a, R(1, 2))) * exp_F(Poly::constant(a, 0), 6);
  certified_equal(wz, rhs, 1);
  EXPECT_EQ(w_inverse_transform(z + one, 6), wz + w_inverse_transform(one, 6).truncated(*wz.floor()));
}

TEST(Phi, Examples) {
  auto a = absolute_alphabet(0);
  const Series p = phi_absolute(1, Poly::constant(a, 0), 3);
  EXPECT_EQ(p.coefficient(0).constant_term(), 1);
  EXPECT_EQ(p.coefficient(-1).constant_term(), R(-1, 24));
  auto b = absolute_alphabet(3);
  const Poly qt = Poly::variable(b, "qt");
  const Series p1 = phi_absolute(1, Poly::constant(b, 0), 3);
  EXPECT_EQ(p1.coefficient(-1), qt - R(1, 24));
  const Poly n = Poly::variable(b, "n");
  for (int k = 1; k <= 5; ++k) {
    const Series pk = phi_absolute(k, n, 6);
    EXPECT_EQ(pk.top(), std::optional<int>(k - 1));
    EXPECT_EQ(pk.coefficient(k - 1), Poly::constant(b, 1));
    EXPECT_EQ(pk.floor(), std::optional<int>(k - 1 - 6));
  }
}

TEST(Phi, RelativeReductions) {
  auto a = relative_alphabet(3, 4);
  const Poly n = Poly::variable(a, "n");
  const Poly zero(a);
  const Deformation s = relative_deformation(a, 3);
  // all s = 0
  const Series p0 = phi_relative(2, n, {zero, zero, zero}, 6);
  auto q0 = absolute_alphabet(0);
  EXPECT_EQ(p0, phi_absolute(2, Poly::variable(q0, "n"), 6).rebind(a));
  // s_2 only, weight 2 truncation: two terms
  auto a2 = relative_alphabet(2, 2);
  const Poly n2 = Poly::variable(a2, "n"), s2 = Poly::variable(a2, "s2");
  const Series only2 = phi_relative(3, n2, {Poly(a2), s2}, 6);
  const Series expect = exp_F(n2 - Rational(2), 6).shifted_exponent(2) +
                        exp_F(n2, 4).shifted_exponent(0) * s2;
  EXPECT_EQ(only2, expect);
  // s_1 = qt: rename s1 -> qt, the rest vanish
  auto abs4 = absolute_alphabet(4);
  const Series abs = phi_absolute(3, Poly::variable(abs4, "n"), 7);
  auto rel = make_alphabet({"qt", "n"}, {{"qt", {1, 0}, 4}});
  const Series viarel = phi_relative(3, Poly::variable(rel, "n"), {Poly::variable(rel, "qt")}, 7);
  EXPECT_EQ(abs, viarel.rebind(abs4));
  (void)s;
}

TEST(KS, ExpansionOfBTimesShift) {
  auto a = absolute_alphabet(0);
  const Poly n = Poly::variable(a, "n");
  const Series P = b_prefactor(n, -1);
  const Series expect = Series::power(a, 1) + Series::monomial(a, 0, Rational(1, 2) - n) +
                        Series::monomial(a, -1, n * n * R(1, 2) - R(1, 24));
  EXPECT_EQ(P, expect.truncated(-1));
  // same thing through the operator word: b e^{-d} applied to 1
  const SeriesOperator op = b_operator(n) * SeriesOperator::shift(a, -1);
  EXPECT_EQ(op.apply(Series::constant(a, 1, -3)).truncated(-1), expect.truncated(-1));
}

TEST(KS, RecursionAbsolute) {
  auto a = absolute_alphabet(3);
  const Poly n = Poly::variable(a, "n");
  const SeriesOperator b = b_operator(n);
  for (int k = 1; k <= 4; ++k) {
    const Series lhs = b.apply(phi_absolute(k, n, 8));
    const int ord = certified_equal(lhs, phi_absolute(k + 1, n, 9), k);
    EXPECT_GE(ord, 8);
  }
}

TEST(KS, InversePair) {
  auto a = absolute_alphabet(2);
  const Poly n = Poly::variable(a, "n");
  std::mt19937 rng(3);
  Series f(a, -8);
  for (int e = -8; e <= 2; ++e) f.set(e, n * R(int(rng() % 5) - 2) + R(int(rng() % 7) - 3, 2));
  const Series back = apply_b(apply_b(f, n), n, Direction::Inverse);
  certified_equal(back, f, 2);
  EXPECT_EQ(back.floor(), f.floor());
}

TEST(KS, LoweringAbsolute) {
  auto a = absolute_alphabet(3);
  const Poly n = Poly::variable(a, "n");
  const Deformation s = absolute_deformation(a);
  const SeriesOperator A = a_operator(n, s);
  const Series a1 = A.apply(phi_absolute(1, n, 8));
  EXPECT_TRUE(a1.terms().empty()) << a1;
  EXPECT_LE(*a1.floor(), -7);
  for (int k = 2; k <= 4; ++k) {
    const Series lhs = A.apply(phi_absolute(k, n, 8));
    certified_equal(lhs, phi_absolute(k - 1, n, 8) * R(k - 1), k - 2);
  }
}

TEST(KS, LoweringOnMonomials) {
  auto a = absolute_alphabet(2);
  const Poly n = Poly::variable(a, "n");
  const SeriesOperator A = a_operator(n, absolute_deformation(a));
  for (int k = 1; k <= 4; ++k) {
    const Series r = A.apply(Series::power(a, k), 4);
    EXPECT_EQ(r.top(), std::optional<int>(k - 1));
    EXPECT_EQ(r.coefficient(k - 1), Poly::constant(a, k));
  }
}

TEST(KS, CommutatorOnRandomSeries) {
  auto a = absolute_alphabet(2);
  const Poly n = Poly::variable(a, "n");
  const Deformation s = absolute_deformation(a);
  const SeriesOperator A = a_operator(n, s), B = b_operator(n);
  const SeriesOperator comm = A * B - B * A;
  std::mt19937 rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    Series f(a, -9);
    for (int e = -9; e <= 3; ++e)
      f.set(e, n * R(int(rng() % 5) - 2) + s[0] * R(int(rng() % 3) - 1) + R(int(rng() % 7) - 3, 3));
    const Series r = comm.apply(f);
    EXPECT_GE(certified_equal(r, f, 3), 10);
  }
}

TEST(KS, SpectralCurveAbsolute) {
  auto a = absolute_alphabet(3);
  const Poly n = Poly::variable(a, "n");
  const Deformation s = absolute_deformation(a);
  const SeriesOperator AB = ab_operator(n, s), composed = a_operator(n, s) * b_operator(n);
  for (int k = 1; k <= 3; ++k) {
    const Series phi = phi_absolute(k, n, 8);
    certified_equal(AB.apply(phi), phi * R(k), k - 1);
    certified_equal(composed.apply(phi), phi * R(k), k - 1);
  }
}

TEST(KS, RelativeSuite) {
  const int W = 4;
  auto a = relative_alphabet(W, W);
  const Poly n = Poly::variable(a, "n");
  const Deformation s = relative_deformation(a, W);
  const SeriesOperator A = a_operator(n, s), B = b_operator(n), AB = ab_operator(n, s);
  for (int k = 1; k <= 3; ++k) {
    const Series phi = phi_relative(k, n, s, 8);
    certified_equal(B.apply(phi), phi_relative(k + 1, n, s, 9), k);
    const Series lowered = A.apply(phi);
    if (k == 1)
      EXPECT_TRUE(lowered.terms().empty()) << lowered;
    else
      certified_equal(lowered, phi_relative(k - 1, n, s, 8) * R(k - 1), k - 2);
    certified_equal(AB.apply(phi), phi * R(k), k - 1);
  }
}

TEST(KS, DerivativeInSIsInverseB) {
  auto a = relative_alphabet(3, 3);
  const Poly n = Poly::variable(a, "n");
  const Deformation s = relative_deformation(a, 3);
  const SeriesOperator binv = b_inverse_operator(n);
  const Series phi = phi_relative(2, n, s, 8);
  for (int m = 1; m <= 3; ++m) {
    const std::string name = "s" + std::to_string(m);
    const Series d = phi.map_coefficients([&](const Poly& c) { return c.derivative(name); });
    // the derivative lowers the s-weight by m, so compare with b^{-m} restricted accordingly
    const Series rhs = binv.pow(m).apply(phi).map_coefficients(
        [&](const Poly& c) { return c.truncated("s", 3 - m); });
    certified_equal(d, rhs, 1 - m);
  }
}

TEST(KS, StringSeed) {
  auto a = absolute_alphabet(3);
  const Poly n = Poly::variable(a, "n");
  for (int k = 1; k <= 4; ++k) {
    const Series phi = phi_absolute(k, n, 8);
    const Series lhs = Series::monomial(a, -1, n) * phi - phi.derivative();
    const Series dn = phi.map_coefficients([](const Poly& c) { return c.derivative("n"); });
    certified_equal(lhs, dn, k - 1);
  }
}

TEST(KS, StringSeedOppositeSignFails) {
  // (n/z - d/dz) Phi = -d/dn Phi would force d/dn Phi = 0, which is false
  auto a = absolute_alphabet(1);
  const Poly n = Poly::variable(a, "n");
  const Series phi = phi_absolute(1, n, 6);
  const Series lhs = Series::monomial(a, -1, n) * phi - phi.derivative();
  const Series dn = phi.map_coefficients([](const Poly& c) { return c.derivative("n"); });
  EXPECT_FALSE(Series::agree_from(lhs, -dn, std::max(*lhs.floor(), *dn.floor())));
}
