#pragma once

// Coefficient extraction for the (twisted) Jacobi identity
//
//   x0^{-1} d((x1-x2)/x0) Y(u,x1)Y(v,x2) - e x0^{-1} d((x2-x1)/(-x0)) Y(v,x2)Y(u,x1)
//     = x2^{-1} (1/k) sum_j d(eta^j ((x1-x0)/x2)^{1/k}) Y(Y(g^j u,x0)v, x2)
//
// applied to a module vector w. The coefficient of x0^A x1^B x2^C on each side
// is a finite sum once the truncation bounds below are used.

#include <functional>
#include <stdexcept>

#include "permorb/exactnum.hpp"
#include "permorb/frac.hpp"

namespace permorb {

template <class W>
struct JacobiData {
  /// u_m w and v_p w on the module.
  std::function<W(Frac, const W&)> u, v;
  /// (Y((g^j u)_i v, x2))_q w; with eigen = true, j is ignored.
  std::function<W(int j, long long i, Frac q, const W&)> rhs;
  /// Conformal weights of u and v in the algebra.
  Frac wt_u, wt_v;
  int parity_u = 0, parity_v = 0;
  int k = 1;
  /// When set, u lies in the eta^r eigenspace of g and the j-sum collapses.
  bool eigen = false;
  int r = 0;
};

template <class W>
struct JacobiCoefficient {
  W lhs1, lhs2, rhs;
  W residual() const { return lhs1 + lhs2 - rhs; }
};

/// Coefficient of x0^A x1^B x2^C applied to w, whose weight above the lowest
/// weight of the module is depth.
template <class W>
JacobiCoefficient<W> jacobi_coefficient(const JacobiData<W>& d, long long A, Frac B, Frac C,
                                        const W& w, Frac depth) {
  JacobiCoefficient<W> out;
  const long long n = -A - 1;
  const Frac top1 = d.wt_v + depth + C;
  for (long long l = 0; Frac(l) <= top1; ++l) {
    Rat c = binom(make_rat(n, 1), l);
    if (l % 2) c = -c;
    if (c == 0) continue;
    Frac m = Frac(n - l - 1) - B, p = Frac(l - 1) - C;
    W vw = d.v(p, w);
    if (vw.is_zero()) continue;
    out.lhs1 += Scalar(c) * d.u(m, vw);
  }
  const int eps = d.parity_u && d.parity_v ? -1 : 1;
  const Frac top2 = d.wt_u + depth + B;
  for (long long l = 0; Frac(l) <= top2; ++l) {
    Rat c = binom(make_rat(n, 1), l);
    if ((l + n) % 2) c = -c;
    c *= -eps;
    if (c == 0) continue;
    Frac m = Frac(l - 1) - B, p = Frac(n - l - 1) - C;
    W uw = d.u(m, w);
    if (uw.is_zero()) continue;
    out.lhs2 += Scalar(c) * d.v(p, uw);
  }
  const Frac top3 = d.wt_u + d.wt_v + Frac(A);
  for (long long l = 0; Frac(l) <= top3; ++l) {
    Frac N = (B + Frac(l)) * Frac(d.k);
    if (N.den() != 1) continue;
    Rat c = binom(B + Frac(l), l);
    if (l % 2) c = -c;
    if (c == 0) continue;
    const long long i = l - A - 1;
    const Frac q = Frac(-2 - l) - B - C;
    if (d.eigen) {
      if (((N.num() + d.r) % d.k + d.k) % d.k != 0) continue;
      out.rhs += Scalar(c) * d.rhs(0, i, q, w);
    } else {
      W acc;
      for (int j = 0; j < d.k; ++j)
        acc += Scalar::eta(d.k, static_cast<long long>(j) * N.num()) * d.rhs(j, i, q, w);
      out.rhs += (Scalar(c) * Scalar(make_rat(1, d.k))) * acc;
    }
  }
  return out;
}

}  // namespace permorb
