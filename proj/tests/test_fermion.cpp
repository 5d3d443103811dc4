#include <gtest/gtest.h>

#include <random>

#include "permorb/fermion.hpp"
#include "permorb/jacobi.hpp"

using namespace permorb;

namespace {

Scalar q(long long n, long long d = 1) { return Scalar(make_rat(n, d)); }

FermionVector st(std::vector<int> modes, Scalar c = Scalar(1)) {
  return FermionVector(FermionState{std::move(modes)}, c);
}

FermionVector dpsi() { return st({-2}); }

JacobiData<FermionVector> untwisted(FreeFermion& V, const FermionVector& u, const FermionVector& v) {
  JacobiData<FermionVector> d;
  d.u = [&V, u](Frac m, const FermionVector& w) {
    return m.is_integer() ? V.mode(u, static_cast<int>(m.num()), w) : FermionVector{};
  };
  d.v = [&V, v](Frac p, const FermionVector& w) {
    return p.is_integer() ? V.mode(v, static_cast<int>(p.num()), w) : FermionVector{};
  };
  d.rhs = [&V, u, v](int, long long i, Frac qq, const FermionVector& w) {
    FermionVector uv = V.mode(u, static_cast<int>(i), v);
    return qq.is_integer() ? V.mode(uv, static_cast<int>(qq.num()), w) : FermionVector{};
  };
  d.wt_u = Frac(twice_weight_of(u), 2);
  d.wt_v = Frac(twice_weight_of(v), 2);
  d.parity_u = parity_of(u);
  d.parity_v = parity_of(v);
  return d;
}

}  // namespace

TEST(Fermion, StateLabels) {
  EXPECT_EQ(FreeFermion::vac().to_string(), "|0>");
  EXPECT_EQ((FermionState{{-4, -1}}).to_string(), "psi(-7/2)psi(-1/2)|0>");
  EXPECT_EQ((FermionState{{-4, -1}}).weight(), Frac(4));
}

TEST(Fermion, CliffordRelations) {
  auto basis = FreeFermion::basis(6);
  for (int a = -4; a <= 3; ++a)
    for (int b = -4; b <= 3; ++b)
      for (const auto& w : basis) {
        FermionVector lhs = clifford_apply(a, clifford_apply(b, w)) + clifford_apply(b, clifford_apply(a, w));
        FermionVector want = (a + b + 1 == 0) ? FermionVector(w) : FermionVector{};
        EXPECT_EQ(lhs, want) << a << " " << b << " " << w.to_string();
      }
  EXPECT_TRUE(clifford_apply(0, FreeFermion::vac()).is_zero());
  EXPECT_EQ(clifford_apply(-1, FermionState{{-2}}), st({-2, -1}, q(-1)));
}

TEST(Fermion, GeneratorModesAreClifford) {
  FreeFermion V;
  for (const auto& w : FreeFermion::basis(7))
    for (int n = -4; n <= 4; ++n) EXPECT_EQ(V.mode(FreeFermion::psi(), n, w), clifford_apply(n, w));
}

TEST(Fermion, GradedDimensions) {
  const std::vector<int> want{1, 1, 0, 1, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3};
  std::vector<int> got(want.size());
  for (const auto& s : FreeFermion::basis(static_cast<int>(want.size()) - 1)) ++got[s.twice_weight()];
  EXPECT_EQ(got, want);
}

TEST(Fermion, VirasoroRelations) {
  FreeFermion V;
  const Rat c = FreeFermion::central_charge();
  for (const auto& b : FreeFermion::basis(8)) {
    FermionVector w(b);
    EXPECT_EQ(V.L(0, w), Scalar(b.weight().rat()) * w);
    for (int m = -3; m <= 3; ++m)
      for (int n = -3; n <= 3; ++n) {
        FermionVector lhs = V.L(m, V.L(n, w)) - V.L(n, V.L(m, w));
        FermionVector rhs = Scalar(m - n) * V.L(m + n, w);
        if (m + n == 0) rhs += Scalar(c * (m * m * m - m) / 12) * w;
        EXPECT_EQ(lhs, rhs) << m << " " << n << " " << b.to_string();
      }
  }
}

TEST(Fermion, OmegaNormalization) {
  FreeFermion V;
  EXPECT_EQ(V.L(2, FreeFermion::omega()), Scalar(make_rat(1, 4)) * FreeFermion::vac_vector());
  EXPECT_EQ(V.L(-1, FreeFermion::psi_vector()), dpsi());
  EXPECT_EQ(V.mode(FreeFermion::psi_vector(), -2, FreeFermion::psi_vector()), st({-2, -1}));
}

TEST(Fermion, DerivativeProperty) {
  FreeFermion V;
  for (const auto& v : {FreeFermion::psi_vector(), FreeFermion::omega(), dpsi()}) {
    FermionVector dv = V.L(-1, v);
    for (const auto& b : FreeFermion::basis(6))
      for (int n = -4; n <= 4; ++n)
        EXPECT_EQ(V.mode(dv, n, FermionVector(b)), Scalar(-n) * V.mode(v, n - 1, FermionVector(b)));
  }
}

TEST(Fermion, SkewSymmetry) {
  FreeFermion V;
  auto basis = FreeFermion::basis(5);
  for (const auto& ub : basis)
    for (const auto& vb : basis) {
      FermionVector u(ub), v(vb);
      int eps = ub.parity() && vb.parity() ? -1 : 1;
      for (int n = -3; n <= 3; ++n) {
        FermionVector rhs;
        int top = FreeFermion::max_mode(ub.twice_weight(), vb.twice_weight());
        for (int j = 0; n + j <= top; ++j) {
          FermionVector t = V.mode(v, n + j, u);
          Rat fact(1);
          for (int i = 0; i < j; ++i) {
            t = V.L(-1, t);
            fact *= (i + 1);
          }
          int s = (n + j + 1) % 2 ? -1 : 1;
          rhs += Scalar(Rat(eps * s) / fact) * t;
        }
        EXPECT_EQ(V.mode(u, n, v), rhs) << ub.to_string() << " " << vb.to_string() << " " << n;
      }
    }
}

TEST(Fermion, JacobiIdentity) {
  FreeFermion V;
  const std::vector<FermionVector> gens{FreeFermion::psi_vector(), FreeFermion::omega(), dpsi()};
  auto basis = FreeFermion::basis(6);
  int checked = 0;
  for (const auto& u : gens)
    for (const auto& v : gens) {
      auto d = untwisted(V, u, v);
      for (const auto& b : basis)
        for (int A = -3; A <= 2; ++A)
          for (int B = -3; B <= 2; ++B)
            for (int C = -3; C <= 2; ++C) {
              auto r = jacobi_coefficient(d, A, Frac(B), Frac(C), FermionVector(b), b.weight());
              ASSERT_TRUE(r.residual().is_zero())
                  << u.to_string() << " " << v.to_string() << " " << b.to_string() << " " << A << B << C;
              if (!r.rhs.is_zero()) ++checked;
            }
    }
  EXPECT_GT(checked, 500);
}

TEST(Fermion, JacobiDetectsSignError) {
  // Flipping the supercommutation sign for odd pairs breaks the identity.
  FreeFermion V;
  auto d = untwisted(V, FreeFermion::psi_vector(), FreeFermion::psi_vector());
  d.parity_u = 0;
  bool broken = false;
  for (const auto& b : FreeFermion::basis(4))
    for (int A = -2; A <= 1 && !broken; ++A)
      for (int B = -2; B <= 1 && !broken; ++B)
        for (int C = -2; C <= 1 && !broken; ++C)
          broken = !jacobi_coefficient(d, A, Frac(B), Frac(C), FermionVector(b), b.weight())
                        .residual()
                        .is_zero();
  EXPECT_TRUE(broken);
}

TEST(Tensor, KoszulSigns) {
  FreeFermion V;
  TensorPower T(V, 2);
  TensorVector a = T.slot(1, FreeFermion::psi_vector()), b = T.slot(2, FreeFermion::psi_vector());
  TensorState both{{FreeFermion::psi(), FreeFermion::psi()}};
  EXPECT_EQ(T.mode(a, -1, b), TensorVector(both));
  EXPECT_EQ(T.mode(b, -1, a), TensorVector(both, q(-1)));
  EXPECT_TRUE(T.mode(a, 0, b).is_zero());
}

TEST(Tensor, JacobiIdentityAcrossSlots) {
  FreeFermion V;
  TensorPower T(V, 2);
  std::vector<TensorVector> gens{T.slot(1, FreeFermion::psi_vector()), T.slot(2, FreeFermion::psi_vector()),
                                 T.omega()};
  for (const auto& u : gens)
    for (const auto& v : gens) {
      JacobiData<TensorVector> d;
      d.u = [&T, u](Frac m, const TensorVector& w) { return T.mode(u, static_cast<int>(m.num()), w); };
      d.v = [&T, v](Frac p, const TensorVector& w) { return T.mode(v, static_cast<int>(p.num()), w); };
      d.rhs = [&T, u, v](int, long long i, Frac qq, const TensorVector& w) {
        return T.mode(T.mode(u, static_cast<int>(i), v), static_cast<int>(qq.num()), w);
      };
      d.wt_u = Frac(twice_weight_of(u), 2);
      d.wt_v = Frac(twice_weight_of(v), 2);
      d.parity_u = parity_of(u);
      d.parity_v = parity_of(v);
      for (const auto& b : T.basis(3))
        for (int A = -2; A <= 1; ++A)
          for (int B = -2; B <= 1; ++B)
            for (int C = -2; C <= 1; ++C)
              ASSERT_TRUE(jacobi_coefficient(d, A, Frac(B), Frac(C), TensorVector(b), b.weight())
                              .residual()
                              .is_zero())
                  << u.to_string() << " " << v.to_string() << " " << b.to_string();
    }
}

TEST(Tensor, OmegaGrading) {
  FreeFermion V;
  TensorPower T(V, 3);
  TensorVector om = T.omega();
  for (const auto& b : T.basis(4)) {
    TensorVector w(b);
    EXPECT_EQ(T.mode(om, 1, w), Scalar(b.weight().rat()) * w);
  }
}

TEST(Tensor, CycleHasOrderK) {
  FreeFermion V;
  for (int k = 1; k <= 4; ++k) {
    TensorPower T(V, k);
    for (const auto& b : T.basis(4)) {
      TensorVector w(b);
      EXPECT_EQ(T.g(w, k), w);
      if (k > 1 && !b.is_vacuum() && b.slots.front() != b.slots.back()) {
        EXPECT_NE(T.g(w), w);
      }
    }
  }
  TensorPower T(V, 3);
  // g v^j = v^{j-1}.
  EXPECT_EQ(T.g(T.slot(2, FreeFermion::psi_vector())), T.slot(1, FreeFermion::psi_vector()));
  EXPECT_EQ(T.g(T.slot(1, FreeFermion::psi_vector())), T.slot(3, FreeFermion::psi_vector()));
}

TEST(Tensor, CycleIsAutomorphism) {
  FreeFermion V;
  TensorPower T(V, 3);
  auto basis = T.basis(3);
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> pick(0, basis.size() - 1);
  std::uniform_int_distribution<int> mode(-3, 2);
  for (int trial = 0; trial < 200; ++trial) {
    TensorVector u(basis[pick(rng)]), v(basis[pick(rng)]);
    int n = mode(rng);
    EXPECT_EQ(T.g(T.mode(u, n, v)), T.mode(T.g(u), n, T.g(v)));
  }
}

TEST(Tensor, EigenprojectionDecomposes) {
  FreeFermion V;
  for (int k : {2, 3, 4}) {
    TensorPower T(V, k);
    for (const auto& b : T.basis(3)) {
      TensorVector w(b), sum;
      for (int j = 0; j < k; ++j) {
        TensorVector p = T.eigenprojection(w, j);
        EXPECT_EQ(T.g(p), Scalar::eta(k, j) * p) << k << " " << j;
        sum += p;
      }
      EXPECT_EQ(sum, w);
    }
  }
}
