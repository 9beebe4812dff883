#include <gtest/gtest.h>

#include <random>

#include "gwp1/serialize.hpp"
#include "gwp1/series.hpp"

using namespace gwp1;

namespace {

AlphabetPtr plain() { return make_alphabet({}); }

AlphabetPtr params() {
  // q graded with cap 3, n free
  return make_alphabet({"q", "n"}, {{"q", {1, 0}, 3}});
}

Series z(AlphabetPtr a, int e, long num = 1, long den = 1, std::optional<int> fl = std::nullopt) {
  return Series::power(std::move(a), e, make_rational(num, den), fl);
}

Series random_series(std::mt19937& rng, const AlphabetPtr& a, int top, int fl) {
  std::uniform_int_distribution<int> coef(-5, 5), pick(0, 2);
  Series s(a, fl);
  const Poly q = Poly::variable(a, "q"), n = Poly::variable(a, "n");
  for (int e = fl; e <= top; ++e) {
    Poly c = Poly::constant(a, make_rational(coef(rng), 1 + pick(rng)));
    c += q * Rational(coef(rng)) + n * make_rational(coef(rng), 3);
    if (pick(rng) == 0) c += q * n * Rational(coef(rng));
    s.set(e, c);
  }
  return s;
}

}  // namespace

TEST(Rational, CanonicalForm) {
  EXPECT_EQ(to_string(make_rational(6, -4)), "-3/2");
  EXPECT_EQ(to_string(make_rational(5)), "5/1");
  EXPECT_EQ(parse_rational("10/-4"), make_rational(-5, 2));
  EXPECT_THROW(parse_rational("1/0"), ContractError);
  EXPECT_THROW(parse_rational("x"), ContractError);
}

TEST(Poly, CapsAreRespected) {
  auto a = params();
  const Poly q = Poly::variable(a, "q");
  EXPECT_TRUE(q.pow(4).is_zero());
  EXPECT_EQ(q.pow(3).size(), 1u);
  EXPECT_EQ((q + Rational(1)).pow(5).coefficient(make_monomial(*a, {{"q", 3}})), Rational(10));
}

TEST(Poly, AlphabetMismatchIsContractError) {
  auto a = params(), b = make_alphabet({"q"});
  EXPECT_THROW(Poly::variable(a, "q") * Poly::variable(b, "q"), ContractError);
  EXPECT_THROW(Poly::variable(a, "q") + Poly::variable(b, "q"), ContractError);
  // structurally identical alphabets are compatible
  EXPECT_NO_THROW(Poly::variable(a, "q") * Poly::variable(params(), "n"));
}

TEST(Poly, ExpLogRoundTrip) {
  auto a = make_alphabet({"x", "y"}, {{"deg", {1, 2}, 6}});
  const Poly x = Poly::variable(a, "x"), y = Poly::variable(a, "y");
  const Poly f = x * Rational(3, 2) - y + x * y * Rational(1, 5);
  EXPECT_EQ(f.exp().log(), f);
  EXPECT_EQ((f + x).exp(), f.exp() * x.exp());
  EXPECT_THROW((f + Rational(1)).exp(), ContractError);
}

TEST(Series, DifferenceOfSquares) {
  auto a = plain();
  const Series one = Series::constant(a, 1);
  const Series p = (one + z(a, -1)) * (one - z(a, -1));
  EXPECT_EQ(p, one - z(a, -2));
}

TEST(Series, ProductWithZeroIsExactZero) {
  auto a = plain();
  const Series f = z(a, -1, 1, 1, -4) + Series::constant(a, 3);
  const Series r = f * Series::exact_zero(a);
  EXPECT_TRUE(r.is_exact_zero());
}

TEST(Series, ProductSimple) {
  auto a = plain();
  EXPECT_EQ((z(a, 1) + Series::constant(a, 1)) * z(a, -1), Series::constant(a, 1) + z(a, -1));
}

TEST(Series, FloorPropagation) {
  auto a = plain();
  // (z + O(z^-3)) * (1 + O(z^-2)): z * O(z^-2) = O(z^-1)
  const Series f = z(a, 1, 1, 1, -2);
  const Series g = Series::constant(a, 1, -1);
  EXPECT_EQ((f * g).floor(), std::optional<int>(0));
  EXPECT_EQ((f + g).floor(), std::optional<int>(-1));
  EXPECT_EQ(f.derivative().floor(), std::optional<int>(-3));
}

TEST(Series, ExpOfInverseZ) {
  auto a = plain();
  const Series e = z(a, -1, 1, 1, -3).exp();
  EXPECT_EQ(e, Series::constant(a, 1, -3) + z(a, -1, 1, 1, -3) + z(a, -2, 1, 2, -3) + z(a, -3, 1, 6, -3));
  EXPECT_EQ(Series::exact_zero(a).exp(), Series::constant(a, 1));
  // exp(c1(0)/z) with c1(0) = -1/24
  const Series c = z(a, -1, -1, 24, -1).exp();
  EXPECT_EQ(c, Series::constant(a, 1, -1) + z(a, -1, -1, 24, -1));
}

TEST(Series, ExpRejectsBadArguments) {
  auto a = params();
  EXPECT_THROW(Series::constant(a, 1, -3).exp(), ContractError);
  EXPECT_THROW(z(a, 1, 1, 1, -3).exp(), ContractError);
  // nilpotent constant terms are fine
  const Series s = Series::monomial(a, 0, Poly::variable(a, "q"), -2);
  EXPECT_EQ(s.exp().coefficient(0), Poly::variable(a, "q").exp());
}

TEST(Series, ShiftArgument) {
  auto a = plain();
  const Series s = z(a, -1, 1, 1, -6).shift_argument(1);
  for (int e = -1; e >= -6; --e) EXPECT_EQ(s.coefficient(e).constant_term(), Rational((-e) % 2 ? 1 : -1));
  EXPECT_EQ(z(a, 2).shift_argument(1), z(a, 2) + z(a, 1, 2) + z(a, 0, 1));
  const Series c = Series::constant(a, 7, -5);
  EXPECT_EQ(c.shift_argument(make_rational(3, 2)), c);
  EXPECT_THROW(z(a, -1).shift_argument(1), ContractError);
  EXPECT_EQ(z(a, -1).shift_argument(1, -3).floor(), std::optional<int>(-3));
}

TEST(Series, CoefficientAccess) {
  auto a = plain();
  const Series s = Series::constant(a, 1, -2) - z(a, -2);
  EXPECT_EQ(s.coefficient(-2).constant_term(), Rational(-1));
  EXPECT_TRUE(s.coefficient(-1).is_zero());
  EXPECT_THROW(s.coefficient(-3), UnknownCoefficientError);
}

TEST(Series, MismatchedAlphabetsThrow) {
  EXPECT_THROW(Series::constant(params(), 1) * Series::constant(make_alphabet({"q"}), 1), ContractError);
}

class SeriesProperties : public ::testing::TestWithParam<int> {};

TEST_P(SeriesProperties, RingAxioms) {
  std::mt19937 rng(GetParam());
  auto a = params();
  const Series x = random_series(rng, a, 2, -5), y = random_series(rng, a, 1, -4), w = random_series(rng, a, 0, -6);
  const Series l = (x * y) * w, r = x * (y * w);
  ASSERT_EQ(l.floor(), r.floor());
  EXPECT_EQ(l, r);
  EXPECT_EQ(x * y, y * x);
  const Series d1 = x * (y + w), d2 = x * y + x * w;
  ASSERT_TRUE(d1.floor() && d2.floor());
  const int common = std::max(*d1.floor(), *d2.floor());
  EXPECT_TRUE(Series::agree_from(d1, d2, common));
}

TEST_P(SeriesProperties, ExpIsAdditive) {
  std::mt19937 rng(GetParam());
  auto a = params();
  Series x = random_series(rng, a, -1, -7), y = random_series(rng, a, -1, -7);
  x.set(0, Poly::variable(a, "q") * Rational(2));
  EXPECT_EQ((x + y).exp(), x.exp() * y.exp());
}

TEST_P(SeriesProperties, ShiftRoundTrip) {
  std::mt19937 rng(GetParam());
  auto a = params();
  const Series f = random_series(rng, a, 3, -6);
  const Rational c = make_rational(int(rng() % 7) - 3, 1 + rng() % 4);
  EXPECT_EQ(f.shift_argument(c).shift_argument(-c), f);
}

TEST_P(SeriesProperties, TruncationSoundness) {
  // Same pipeline at two precisions agrees on the lower one's known range.
  std::mt19937 rng(GetParam());
  auto a = params();
  const Series hi = random_series(rng, a, 1, -10);
  const Series lo = hi.truncated(-5);
  auto pipeline = [](const Series& f) {
    Series g = f.shift_argument(2) * f;
    return g.derivative() * f.shift_argument(-1);
  };
  const Series ph = pipeline(hi), pl = pipeline(lo);
  EXPECT_TRUE(Series::agree_from(ph, pl, *pl.floor()));
}

TEST_P(SeriesProperties, JsonRoundTripIsExact) {
  std::mt19937 rng(GetParam());
  auto a = params();
  const Series f = random_series(rng, a, 2, -4);
  const std::string text = dump(to_json(f));
  const Series g = series_from_json(json::parse(text));
  EXPECT_EQ(f, g);
  EXPECT_EQ(dump(to_json(g)), text);
  const Poly p = f.coefficient(-1);
  EXPECT_EQ(poly_from_json(json::parse(dump(to_json(p)))), p);
}

INSTANTIATE_TEST_SUITE_P(Seeds, SeriesProperties, ::testing::Range(1, 11));
