#include <gtest/gtest.h>

#include "permorb/qchar.hpp"

using namespace permorb;

TEST(QChar, FermionDimensions) {
  FreeFermion V;
  QSeries d = graded_dim(V, 8);
  const std::vector<std::pair<Frac, long long>> want{
      {Frac(0), 1}, {Frac(1, 2), 1}, {Frac(3, 2), 1}, {Frac(2), 1}, {Frac(5, 2), 1},
      {Frac(3), 1}, {Frac(7, 2), 1}, {Frac(4), 2}};
  EXPECT_EQ(d.terms().size(), want.size());
  for (const auto& [e, c] : want) EXPECT_EQ(d.coeff(e - Frac(1, 48)), c) << e.to_string();
  EXPECT_EQ(d.coeff(Frac(1) - Frac(1, 48)), 0);
}

TEST(QChar, TrivialModule) {
  QSeries t(48);
  t.add(Frac(0), 1);
  EXPECT_EQ(t.to_string(), "1*q^0 + O(q^>0)");
  EXPECT_THROW(t.add(Frac(1, 7), 1), std::invalid_argument);
}

TEST(QChar, TwistedVacuumExponent) {
  FreeFermion V;
  TwistedModule tm(V, 3);
  QSeries d = graded_dim(tm, 4);
  EXPECT_EQ(d.terms().begin()->first, Frac(1, 18) - Frac(1, 48));
  QSeries tot = graded_dim(tm, 4, true);
  EXPECT_EQ(tot.terms().begin()->first, Frac(1, 18) - Frac(3, 48));
}

TEST(QChar, CharacterIdentityForOddK) {
  for (int k : {1, 3, 5}) {
    auto r = corollary_check(k, 8);
    EXPECT_TRUE(r.pass) << k << " " << r.first_mismatch;
    EXPECT_GT(r.compared, 5);
  }
}

TEST(QChar, PerturbedA2IsCaught) {
  for (int k : {3, 5}) {
    auto r = corollary_check(k, 6, perturbed_a2(k));
    EXPECT_FALSE(r.pass);
    EXPECT_NE(r.first_mismatch.find("q^"), std::string::npos);
  }
}

TEST(QChar, TensorPowerIsProduct) {
  FreeFermion V;
  for (int k : {2, 3}) {
    TensorPower T(V, k);
    QSeries prod = graded_dim(V, 6);
    for (int i = 1; i < k; ++i) prod = prod * graded_dim(V, 6);
    QSeries direct = graded_dim(T, 6);
    auto r = compare_qseries(direct, prod, "tensor product", "");
    EXPECT_TRUE(r.pass) << k << " " << r.first_mismatch;
    EXPECT_GT(r.compared, 4);
  }
}

TEST(QChar, EvenEvidence) {
  auto j = evidence_even(2, 6);
  EXPECT_EQ(j["label"], "evidence, not construction");
  EXPECT_EQ(j["certificate"]["coset"], "1/4 + (1/2)Z");
  EXPECT_NO_THROW(evidence_even(4, 4));
  EXPECT_THROW(evidence_even(3, 4), std::invalid_argument);
}
