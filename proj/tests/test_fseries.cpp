#include <gtest/gtest.h>

#include <random>

#include "permorb/fseries.hpp"

using namespace permorb;

namespace {

const std::vector<std::string> X{"x"};

FracSeries xpow(Frac e, Scalar c = Scalar(1)) { return FracSeries::monomial(X, {e}, c); }

Scalar q(long long n, long long d = 1) { return Scalar(make_rat(n, d)); }

}  // namespace

TEST(Series, Multiplication) {
  EXPECT_EQ((xpow(Frac(1, 2)) * xpow(Frac(1, 2))).to_string(), xpow(1).to_string());
  FracSeries phi = FracSeries::monomial(X, {0}, Scalar(1), true);
  EXPECT_TRUE((phi * phi).is_zero());
  FracSeries a = xpow(0) + xpow(1), b = xpow(0) - xpow(1);
  EXPECT_EQ((a * b).to_string(), (xpow(0) - xpow(2)).to_string());
}

TEST(Series, LatticeMergesByLcm) {
  FracSeries a = xpow(Frac(1, 4)), b = xpow(Frac(1, 6));
  EXPECT_EQ(a.lattice("x"), 4);
  FracSeries c = a + b;
  EXPECT_EQ(c.lattice("x"), 12);
  EXPECT_TRUE(c.on_lattice());
  c.declare_lattice("x", 48);
  EXPECT_EQ(c.lattice("x"), 48);
}

TEST(Series, BinomialExpansion) {
  const std::vector<std::string> v{"x1", "x2"};
  FracSeries sq = binom_expand(v, "x1", -1, "x2", Frac(2), 5);
  FracSeries want = FracSeries::monomial(v, {2, 0}, q(1)) + FracSeries::monomial(v, {1, 1}, q(-2)) +
                    FracSeries::monomial(v, {0, 2}, q(1));
  EXPECT_EQ(sq.to_string(), want.to_string());
  EXPECT_EQ(sq.meta(), "exact");

  const std::vector<std::string> u{"u"};
  FracSeries half = binom_expand(u, "", 1, "u", Frac(1, 2), 3);
  FracSeries oracle = FracSeries::monomial(u, {0}, q(1)) + FracSeries::monomial(u, {1}, q(1, 2)) +
                      FracSeries::monomial(u, {2}, q(-1, 8)) + FracSeries::monomial(u, {3}, q(1, 16));
  EXPECT_EQ(half.to_string(), oracle.to_string());

  const std::vector<std::string> w{"x2", "x0"};
  FracSeries third = binom_expand(w, "x2", 1, "x0", Frac(-1, 3), 2);
  FracSeries o3 = FracSeries::monomial(w, {Frac(-1, 3), 0}, q(1)) +
                  FracSeries::monomial(w, {Frac(-4, 3), 1}, q(-1, 3)) +
                  FracSeries::monomial(w, {Frac(-7, 3), 2}, q(2, 9));
  EXPECT_EQ(third.to_string(), o3.to_string());
}

TEST(Series, DeltaTruncatedPlain) {
  const std::vector<std::string> v{"x1", "x2"};
  DeltaArg arg{"x1", 1, "", "x2"};
  FracSeries d = delta_truncated(v, arg, Frac(0), -3, 3, 0);
  EXPECT_EQ(d.size(), 7u);
  for (int n = -3; n <= 3; ++n) EXPECT_EQ(d.coeff({n, -n}), Scalar(1));
}

TEST(Series, Residue) {
  FracSeries s = xpow(-1) + xpow(0, q(2)) + xpow(1);
  EXPECT_EQ(residue(s, "x").to_string(), FracSeries::constant({}, q(1)).to_string());
  const std::vector<std::string> v{"x", "y"};
  FracSeries t = FracSeries::monomial(v, {-1, 2}, q(1));
  EXPECT_EQ(residue(t, "x").to_string(), FracSeries::monomial({"y"}, {2}, q(1)).to_string());
}

TEST(Series, Substitutions) {
  EXPECT_EQ(substitute_power(xpow(2), "x", Frac(1, 3)).to_string(), xpow(Frac(2, 3)).to_string());
  // Principal branch: (x^k)^{1/k} = x.
  for (int k = 1; k <= 5; ++k)
    EXPECT_EQ(substitute_power(xpow(k), "x", Frac(1, k)).to_string(), xpow(1).to_string());
  FracSeries tw = substitute_eta(xpow(Frac(1, 3)), "x", 3, 1);
  EXPECT_EQ(tw.coeff({Frac(1, 3)}), Scalar::eta(3));
  EXPECT_THROW(substitute_eta(xpow(Frac(1, 2)), "x", 3, 1), CompositionDomainError);
}

TEST(Series, WindowComparison) {
  FracSeries a = xpow(0) + xpow(1);
  Window w;
  w.set("x", Frac(0), Frac(5));
  EXPECT_TRUE(assert_equal_on_window(a, a, w).pass);
  FracSeries b = a + xpow(6);
  EXPECT_TRUE(assert_equal_on_window(a, b, w).pass);
  FracSeries c = a + xpow(3);
  auto rep = assert_equal_on_window(a, c, w);
  EXPECT_FALSE(rep.pass);
  EXPECT_NE(rep.first_mismatch.find("x^3"), std::string::npos);
}

TEST(Series, PowSeriesSquareRoot) {
  const std::vector<std::string> u{"u"};
  FracSeries one_plus = FracSeries::constant(u, q(1)) + FracSeries::monomial(u, {1}, q(1));
  FracSeries r = pow_series(one_plus, Frac(1, 2), "u", Frac(8));
  FracSeries sq = mul_trunc(r, r, "u", Frac(8));
  Window w;
  w.upto("u", Frac(8));
  EXPECT_TRUE(assert_equal_on_window(sq, one_plus, w).pass);
  // Leading coefficient 4 has an exact square root.
  FracSeries four = FracSeries::constant(u, q(4)) + FracSeries::monomial(u, {1}, q(4));
  FracSeries r4 = pow_series(four, Frac(1, 2), "u", Frac(4));
  EXPECT_EQ(r4.coeff({0}), q(2));
  EXPECT_THROW(pow_series(FracSeries::constant(u, q(2)) + FracSeries::monomial(u, {1}, q(1)),
                          Frac(1, 2), "u", Frac(3)),
               CompositionDomainError);
}

TEST(Series, CompositionRoundTrip) {
  // f(x) = x + x^2 and its inverse sum (-1)^{n-1} Catalan(n-1) x^n.
  const long long order = 7;
  FracSeries f = xpow(1) + xpow(2);
  FracSeries finv(X);
  long long cat = 1;
  for (long long n = 1; n <= order; ++n) {
    finv += xpow(n, Scalar(static_cast<long long>((n % 2 == 1) ? cat : -cat)));
    cat = cat * 2 * (2 * n - 1) / (n + 1);
  }
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> c(-4, 4);
  for (int trial = 0; trial < 20; ++trial) {
    FracSeries s(X);
    for (int e = 0; e <= 4; ++e) s += xpow(e, q(c(rng)));
    FracSeries once = substitute(s, "x", f, "x", Frac(order), Frac(order));
    FracSeries back = substitute(once, "x", finv, "x", Frac(order), Frac(order));
    Window w;
    w.upto("x", Frac(order));
    EXPECT_TRUE(assert_equal_on_window(back, s, w).pass) << s.to_string();
  }
}

TEST(Series, CompositionDomain) {
  FracSeries s = xpow(-1);
  FracSeries bad = xpow(0) + xpow(1);
  EXPECT_THROW(substitute(s, "x", bad, "x", Frac(4), Frac(4)), CompositionDomainError);
}

TEST(SeriesProperty, Supercommutative) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> c(-3, 3), e(-4, 4), ph(0, 1);
  const std::vector<std::string> v{"x", "y"};
  for (int trial = 0; trial < 100; ++trial) {
    int pa = ph(rng), pb = ph(rng);
    FracSeries a(v), b(v);
    for (int i = 0; i < 4; ++i) {
      a.add_term({{Frac(e(rng), 2), Frac(e(rng), 3)}, pa == 1}, q(c(rng)));
      b.add_term({{Frac(e(rng), 2), Frac(e(rng), 3)}, pb == 1}, q(c(rng)));
    }
    FracSeries ab = a * b, ba = b * a;
    FracSeries want = (pa && pb) ? -ba : ba;
    EXPECT_EQ(ab.to_string(), want.to_string());
  }
}

TEST(SeriesProperty, Derivative) {
  const std::vector<std::string> v{"x"};
  FracSeries a = xpow(Frac(5, 3), q(2)) + xpow(-2);
  FracSeries d = derivative(a, "x");
  EXPECT_EQ(d.coeff({Frac(2, 3)}), q(10, 3));
  EXPECT_EQ(d.coeff({-3}), q(-2));
}

TEST(Series, JsonIsCanonical) {
  FracSeries a = xpow(2) + xpow(Frac(-1, 2), q(3, 4));
  FracSeries b = xpow(Frac(-1, 2), q(3, 4)) + xpow(2);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  EXPECT_EQ(a.to_json()["terms"][0]["exps"][0], "-1/2");
}

class DeltaIdentities : public ::testing::TestWithParam<std::tuple<int, Frac>> {};

TEST_P(DeltaIdentities, HoldOnTrustedWindow) {
  auto [k, r] = GetParam();
  for (const auto& rep : delta_identity_checks(k, r, 4, 4)) {
    EXPECT_TRUE(rep.pass) << rep.identity << " " << rep.first_mismatch;
    EXPECT_GT(rep.compared, 0) << rep.identity;
  }
}

INSTANTIATE_TEST_SUITE_P(Grid, DeltaIdentities,
                         ::testing::Combine(::testing::Values(1, 2, 3, 5),
                                            ::testing::Values(Frac(0), Frac(1, 2), Frac(1, 3))));

TEST(DeltaIdentities, DetectsBrokenTruncation) {
  // Widening the window past the trusted region must expose truncation.
  const std::vector<std::string> v{"x0", "x1", "x2"};
  FracSeries lhs = delta_truncated(v, {"x1", -1, "x0", "x2"}, Frac(0), -2, 2, 2);
  FracSeries rhs = delta_truncated(v, {"x1", -1, "x0", "x2"}, Frac(0), -3, 3, 2);
  Window w;
  w.set("x0", Frac(0), Frac(2));
  EXPECT_FALSE(assert_equal_on_window(lhs, rhs, w).pass);
}
