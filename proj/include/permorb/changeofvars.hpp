#pragma once

// Change-of-variables calculus: coefficients of exp(sum A_j x^{j+1} d/dx), the a_j
// sequence, f and its inverse, the Theta_j series and the representation
// identities on C[x, x^{-1}][phi].

#include <optional>
#include <string>
#include <vector>

#include "permorb/fseries.hpp"

namespace permorb {

/// a0, an optional chosen square root of a0, and A_1..A_N (A[j-1] = A_j).
template <class R>
struct ExpCoeffs {
  R a0;
  std::optional<R> a0_sqrt;
  std::vector<R> A;
};

/// Scalar coefficients.
struct ScalarOps {
  using value_type = Scalar;
  Scalar zero() const { return Scalar(); }
  Scalar one() const { return Scalar(1); }
  Scalar mul(const Scalar& a, const Scalar& b) const { return a * b; }
  Scalar scale(const Scalar& a, const Rat& q) const { return a * Scalar(q); }
  Scalar inv(const Scalar& a) const { return a.inverse(); }
  Scalar sqrt(const Scalar& a) const {
    FracSeries s = pow_series(FracSeries::constant({"u"}, a), Frac(1, 2), "u", Frac(0));
    return s.coeff({Frac(0)});
  }
  bool is_zero(const Scalar& a) const { return a.is_zero(); }
};

/// Coefficients in a series ring, truncated at var <= hi.
struct SeriesOps {
  using value_type = FracSeries;
  std::vector<std::string> vars;
  std::string var;
  Frac hi;
  FracSeries zero() const { return FracSeries(vars); }
  FracSeries one() const { return FracSeries::constant(vars, Scalar(1)); }
  FracSeries mul(const FracSeries& a, const FracSeries& b) const {
    return mul_trunc(a.aligned(vars), b.aligned(vars), var, hi);
  }
  FracSeries scale(const FracSeries& a, const Rat& q) const { return a.scaled(Scalar(q)); }
  FracSeries inv(const FracSeries& a) const { return power(a, Frac(-1)); }
  FracSeries sqrt(const FracSeries& a) const { return power(a, Frac(1, 2)); }
  bool is_zero(const FracSeries& a) const { return a.is_zero(); }

  FracSeries power(const FracSeries& a, Frac e) const {
    auto lead = a.min_exponent(var);
    if (!lead) throw NotAUnit("zero series is not invertible");
    Frac rel = hi - *lead * e;
    if (rel < Frac(0)) return zero();
    return pow_series(a.aligned(vars), e, var, rel).truncated(var, hi);
  }
};

namespace detail {

// Polynomials in the solve variable, index = degree.
template <class Ops>
using Poly = std::vector<typename Ops::value_type>;

// sign * sum_j A_j x^{j+1} d/dx applied to p, degrees above top dropped.
template <class Ops>
Poly<Ops> vector_field(const Ops& ops, const std::vector<typename Ops::value_type>& A, int sign,
                       const Poly<Ops>& p) {
  const int top = static_cast<int>(p.size()) - 1;
  Poly<Ops> out(p.size(), ops.zero());
  for (int d = 1; d <= top; ++d) {
    if (ops.is_zero(p[d])) continue;
    for (int j = 1; j <= static_cast<int>(A.size()) && d + j <= top; ++j) {
      if (ops.is_zero(A[j - 1])) continue;
      out[d + j] = out[d + j] + ops.scale(ops.mul(A[j - 1], p[d]), Rat(sign * d));
    }
  }
  return out;
}

template <class Ops>
Poly<Ops> exp_vector_field(const Ops& ops, const std::vector<typename Ops::value_type>& A,
                           int sign, const Poly<Ops>& p) {
  Poly<Ops> result = p, term = p;
  for (int m = 1;; ++m) {
    term = vector_field(ops, A, sign, term);
    bool all_zero = true;
    for (auto& c : term) {
      c = ops.scale(c, Rat(1, m));
      if (!ops.is_zero(c)) all_zero = false;
    }
    if (all_zero) break;
    if (m > static_cast<int>(p.size()) + 1)
      throw std::logic_error("operator exponential failed to terminate");
    for (std::size_t i = 0; i < p.size(); ++i) result[i] = result[i] + term[i];
  }
  return result;
}

}  // namespace detail

/// Solves exp(sign * sum_{j<=N} A_j x^{j+1} d/dx) a0^{x d/dx} x = f through
/// order x^{N+1}. f[i] is the coefficient of x^{i+1}.
template <class Ops>
ExpCoeffs<typename Ops::value_type> exp_solve(const Ops& ops,
                                                std::vector<typename Ops::value_type> f, int N,
                                                int sign) {
  using V = typename Ops::value_type;
  f.resize(N + 1, ops.zero());
  if (ops.is_zero(f[0])) throw NotAUnit("leading coefficient of f vanishes");
  ExpCoeffs<V> out;
  out.a0 = f[0];
  V a0inv = ops.inv(f[0]);
  out.A.assign(N, ops.zero());
  detail::Poly<Ops> seed(N + 2, ops.zero());
  seed[1] = f[0];
  for (int n = 1; n <= N; ++n) {
    auto cur = detail::exp_vector_field(ops, out.A, sign, seed);
    V diff = f[n] - cur[n + 1];
    out.A[n - 1] = ops.scale(ops.mul(diff, a0inv), Rat(sign));
  }
  return out;
}

/// Coefficients of exp(sign * sum A_j x^{j+1} d/dx) a0 x through x^{N+1}.
template <class Ops>
std::vector<typename Ops::value_type> exp_expand(const Ops& ops,
                                                   const ExpCoeffs<typename Ops::value_type>& c,
                                                   int N, int sign) {
  detail::Poly<Ops> seed(N + 2, ops.zero());
  seed[1] = c.a0;
  auto p = detail::exp_vector_field(ops, c.A, sign, seed);
  return {p.begin() + 1, p.end()};
}

/// The phi-component g(x) of exp(sum A_j (x^{j+1} d/dx + (j+1)/2 x^j phi d/dphi))
/// applied to a0_sqrt * phi, through x^N. Its square is f'(x).
template <class Ops>
std::vector<typename Ops::value_type> super_component(
    const Ops& ops, const ExpCoeffs<typename Ops::value_type>& c, int N) {
  using V = typename Ops::value_type;
  if (!c.a0_sqrt) throw std::invalid_argument("a0_sqrt not chosen");
  std::vector<V> g(N + 1, ops.zero()), term(N + 1, ops.zero());
  g[0] = term[0] = *c.a0_sqrt;
  for (int m = 1; m <= N + 1; ++m) {
    std::vector<V> next(N + 1, ops.zero());
    for (int d = 0; d <= N; ++d) {
      if (ops.is_zero(term[d])) continue;
      for (int j = 1; j <= static_cast<int>(c.A.size()) && d + j <= N; ++j) {
        Rat w = Rat(d) + Rat(j + 1, 2);
        next[d + j] = next[d + j] + ops.scale(ops.mul(c.A[j - 1], term[d]), w / m);
      }
    }
    term = next;
    for (int d = 0; d <= N; ++d) g[d] = g[d] + term[d];
  }
  return g;
}

/// a_1..a_N with exp(-sum a_j x^{j+1} d/dx) x = (1+x)^k/k - 1/k.
inline ExpCoeffs<Scalar> compute_a(int k, int N) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  std::vector<Scalar> f(N + 1);
  for (int i = 0; i <= N; ++i) f[i] = Scalar(binom(Rat(k), i + 1) / k);
  auto c = exp_solve(ScalarOps{}, f, N, -1);
  c.a0_sqrt = Scalar(1);
  return c;
}

/// exp(sign * sum_j c_j x^{j+1} d/dx) applied to s, keeping var <= hi. The
/// coefficients c_j are series in the other variables.
template <class C>
Series<C> exp_vector_field_series(const std::vector<FracSeries>& coeffs, int sign,
                                  const Series<C>& s, const std::string& var, Frac hi) {
  Series<C> result = s.truncated(var, hi), term = result;
  auto lo = s.min_exponent(var);
  long long guard = lo ? (hi - *lo).floor() + 3 : 1;
  for (long long m = 1; !term.is_zero(); ++m) {
    if (m > guard) throw std::logic_error("operator exponential failed to terminate");
    Series<C> d = derivative(term, var);
    Series<C> next(term.vars(), term.grassmann());
    for (std::size_t j = 1; j <= coeffs.size(); ++j) {
      std::vector<Frac> e(1, Frac(static_cast<long long>(j) + 1));
      FracSeries xj = mul(FracSeries::monomial({var}, e, Scalar(1)), coeffs[j - 1]);
      next += mul_trunc(xj, d, var, hi);
    }
    term = next.scaled(Scalar(make_rat(sign, m)));
    result += term;
  }
  return result;
}

/// f(x) = (z^{1/k}/k)((1+x)^k - 1) exactly, and f^{-1}(x) through x^order
/// computed as z^{-1/k} exp(sum a_j z^{-j/k} x^{j+1} d/dx) x.
inline std::pair<FracSeries, FracSeries> f_and_inverse(int k, int order) {
  const std::vector<std::string> v{"x", "z"};
  FracSeries f(v);
  for (int i = 1; i <= k; ++i)
    f += FracSeries::monomial(v, {Frac(i), Frac(1, k)}, Scalar(binom(Rat(k), i) / k));
  auto a = compute_a(k, std::max(order - 1, 1));
  std::vector<FracSeries> coeffs;
  for (int j = 1; j <= static_cast<int>(a.A.size()); ++j)
    coeffs.push_back(FracSeries::monomial(v, {Frac(0), Frac(-j, k)}, a.A[j - 1]));
  FracSeries x = FracSeries::monomial(v, {Frac(1), Frac(0)}, Scalar(1));
  FracSeries g = exp_vector_field_series(coeffs, 1, x, "x", Frac(order));
  FracSeries finv = mul(FracSeries::monomial(v, {Frac(0), Frac(-1, k)}, Scalar(1)), g);
  finv.set_meta("operator exponential truncated at x^" + std::to_string(order));
  return {f, finv};
}

/// Theta_1..Theta_N and exp(Theta_0) as series in x and z.
struct ThetaSeries {
  int k = 1;
  std::vector<FracSeries> theta;  // theta[j-1] = Theta_j
  FracSeries exp_theta0;
  FracSeries a0;
  std::string convention;
};

/// Solves f(z^{-1/k} w + f^{-1}(x)) - x = exp(sum Theta_j w^{j+1} d/dw) a0^{w d/dw} w
/// parametrically, with coefficients truncated at x <= x_order. exp(Theta_0)
/// is the square root of a0 with constant term 1; `inverse_theta0` selects
/// the reciprocal instead.
inline ThetaSeries theta_extract(int k, int N, int x_order, bool inverse_theta0 = false) {
  const std::vector<std::string> v{"w", "x", "z"};
  const std::vector<std::string> xz{"x", "z"};
  const Frac hi(x_order);
  auto [f, finv] = f_and_inverse(k, x_order);
  FracSeries Y = finv.aligned(v) + FracSeries::monomial(v, {1, 0, Frac(-1, k)}, Scalar(1));
  FracSeries onePlusY = FracSeries::constant(v, Scalar(1)) + Y;
  FracSeries P = FracSeries::constant(v, Scalar(1));
  for (int i = 0; i < k; ++i) P = mul_trunc(P, onePlusY, "x", hi);
  FracSeries F = mul(FracSeries::monomial(v, {0, 0, Frac(1, k)}, Scalar(make_rat(1, k))),
                     P - FracSeries::constant(v, Scalar(1)));
  F -= FracSeries::monomial(v, {0, 1, 0}, Scalar(1));
  F = F.truncated("x", hi);
  if (!F.coefficient_of("w", Frac(0)).is_zero())
    throw std::logic_error("f(f^{-1}(x)) != x inside the truncation window");
  std::vector<FracSeries> coeffs;
  for (int i = 1; i <= N + 1; ++i) coeffs.push_back(F.coefficient_of("w", Frac(i)).aligned(xz));
  SeriesOps ops{xz, "x", hi};
  auto sol = exp_solve(ops, coeffs, N, +1);
  ThetaSeries out;
  out.k = k;
  out.theta = sol.A;
  out.a0 = sol.a0;
  FracSeries root = ops.sqrt(sol.a0);
  if (inverse_theta0) {
    out.exp_theta0 = ops.inv(root);
    out.convention = "exp(-Theta_0 2L_0(w,rho)) rho = exp(-Theta_0) rho";
  } else {
    out.exp_theta0 = root;
    out.convention = "exp(-Theta_0 2L_0(w,rho)) rho = exp(Theta_0) rho";
  }
  return out;
}

/// x^e z^b -> c^e z^{b + alpha e} z0^e, i.e. x = c z^alpha z0.
inline FracSeries substitute_x_linear(const FracSeries& s, const Scalar& c, Frac alpha) {
  const std::vector<std::string> v{"z", "z0"};
  std::size_t ix = s.var_index("x"), iz = s.var_index("z");
  FracSeries out(v);
  for (const auto& [key, coef] : s.terms()) {
    Frac e = key.e[ix];
    if (!e.is_integer()) throw CompositionDomainError("fractional power of x");
    out.add_term({{key.e[iz] + alpha * e, e}, key.phi}, c.pow(e.num()) * coef);
  }
  return out;
}

struct ThetaVerification {
  std::vector<CheckReport> reports;
  std::string convention;
  bool pass() const {
    for (const auto& r : reports)
      if (!r.pass) return false;
    return true;
  }
};

/// Substitutes x = (1/k) z^{1/k-1} z0 and compares with
/// -a_j (z+z0)^{-j/k} and z^{-(k-1)/2k} (z+z0)^{(k-1)/2k} for z0 <= x_order.
/// Tries the exp(Theta_0) convention that makes the second form hold.
inline ThetaVerification theta_verify(int k, int N, int x_order) {
  const std::vector<std::string> v{"z", "z0"};
  auto a = compute_a(k, N);
  Window w;
  w.upto("z0", Frac(x_order));
  ThetaVerification out;
  const Scalar c(make_rat(1, k));
  const Frac alpha = Frac(1, k) - Frac(1);
  for (bool inverse : {false, true}) {
    ThetaSeries th = theta_extract(k, N, x_order, inverse);
    std::vector<CheckReport> reps;
    for (int j = 1; j <= N; ++j) {
      FracSeries lhs = substitute_x_linear(th.theta[j - 1], c, alpha);
      FracSeries rhs = binom_expand(v, "z", 1, "z0", Frac(-j, k), x_order).scaled(-a.A[j - 1]);
      reps.push_back(assert_equal_on_window(lhs, rhs, w,
                                            "theta.j(k=" + std::to_string(k) + ",j=" +
                                                std::to_string(j) + ")",
                                            "Theta_j = -a_j (z+z0)^{-j/k}"));
    }
    FracSeries lhs0 = substitute_x_linear(th.exp_theta0, c, alpha);
    FracSeries rhs0 = mul(FracSeries::monomial(v, {Frac(-(k - 1), 2 * k), 0}, Scalar(1)),
                          binom_expand(v, "z", 1, "z0", Frac(k - 1, 2 * k), x_order));
    auto r0 = assert_equal_on_window(lhs0, rhs0, w, "theta.zero(k=" + std::to_string(k) + ")",
                                     "exp(Theta_0) = z^{-(k-1)/2k} (z+z0)^{(k-1)/2k}");
    r0.detail = "convention: " + th.convention;
    reps.push_back(r0);
    out.reports = reps;
    out.convention = th.convention;
    if (r0.pass) break;
  }
  return out;
}

/// Closed forms of Delta_k^{(x,phi)}(z) and its inverse on x and phi,
/// truncated at relative order `order` in x.
struct RepClosedForms {
  FracSeries X, Phi, Xinv, Phiinv;
};

inline RepClosedForms rep_closed_forms(int k, int order) {
  const std::vector<std::string> v{"x", "z"};
  RepClosedForms r;
  r.X = FracSeries(v);
  for (int i = 1; i <= k; ++i)
    r.X += FracSeries::monomial(v, {Frac(i), Frac(k - i, k)}, Scalar(binom(Rat(k), i)));
  // phi k^{1/2} z^{(k-1)/2k} (1 + z^{-1/k} x)^{(k-1)/2}
  FracSeries h = FracSeries::constant(v, Scalar(1)) +
                 FracSeries::monomial(v, {Frac(1), Frac(-1, k)}, Scalar(1));
  r.Phi = mul(FracSeries::monomial(v, {0, Frac(k - 1, 2 * k)}, Scalar::sqrt_k(k), true),
              pow_series(h, Frac(k - 1, 2), "x", Frac(order)));
  // z^{1/k} ((1 + x/z)^{1/k} - 1)
  FracSeries g = FracSeries::constant(v, Scalar(1)) +
                 FracSeries::monomial(v, {Frac(1), Frac(-1)}, Scalar(1));
  r.Xinv = mul(FracSeries::monomial(v, {0, Frac(1, k)}, Scalar(1)),
               pow_series(g, Frac(1, k), "x", Frac(order + 1)) - FracSeries::constant(v, Scalar(1)));
  // phi k^{-1/2} z^{(1-k)/2k} (1 + x/z)^{(1-k)/2k}
  Scalar kinvhalf = Scalar::sqrt_k(k) * Scalar(make_rat(1, k));
  r.Phiinv = mul(FracSeries::monomial(v, {0, Frac(1 - k, 2 * k)}, kinvhalf, true),
                 pow_series(g, Frac(1 - k, 2 * k), "x", Frac(order)));
  return r;
}

/// Both operator identities on x^n and phi x^n for |n| <= nmax.
inline std::vector<CheckReport> rep_identity_check(int k, int nmax, int order = 8) {
  const std::vector<std::string> v{"x", "z"};
  auto cf = rep_closed_forms(k, order);
  auto powX = [&](const FracSeries& X, long long n) {
    if (n == 0) return FracSeries::constant(v, Scalar(1));
    return pow_series(X, Frac(n), "x", Frac(order));
  };
  auto zmono = [&](Frac e, const Scalar& c) { return FracSeries::monomial(v, {0, e}, c); };
  const Scalar kk(k), kinv(make_rat(1, k));
  std::vector<CheckReport> out;
  for (int odd = 0; odd <= 1; ++odd) {
    for (int n = -nmax; n <= nmax; ++n) {
      // Forward: -D d/dx + k^{-1} z^{1/k-1} d/dx D = d/dz D.
      auto image = [&](const FracSeries& X, const FracSeries& Phi, long long m) {
        FracSeries p = powX(X, m);
        return odd ? mul(Phi, p) : p;
      };
      Window w;
      w.upto("x", Frac(n + order - 2));
      FracSeries Db = image(cf.X, cf.Phi, n);
      FracSeries lhs = zmono(Frac(1, k) - 1, kinv) * derivative(Db, "x");
      if (n != 0) lhs -= image(cf.X, cf.Phi, n - 1).scaled(Scalar(n));
      FracSeries rhs = derivative(Db, "z");
      std::string tag = std::string(odd ? "phi x^" : "x^") + std::to_string(n);
      auto r1 = assert_equal_on_window(lhs, rhs, w,
                                       "rep.forward(k=" + std::to_string(k) + ", " + tag + ")",
                                       "-D d/dx + k^{-1} z^{1/k-1} d/dx D = d/dz D");
      out.push_back(r1);
      // Inverse: -D^{-1} d/dx + k z^{1-1/k} d/dx D^{-1} = k z^{1-1/k} d/dz D^{-1}.
      FracSeries Ib = image(cf.Xinv, cf.Phiinv, n);
      FracSeries lhs2 = zmono(Frac(1) - Frac(1, k), kk) * derivative(Ib, "x");
      if (n != 0) lhs2 -= image(cf.Xinv, cf.Phiinv, n - 1).scaled(Scalar(n));
      FracSeries rhs2 = zmono(Frac(1) - Frac(1, k), kk) * derivative(Ib, "z");
      out.push_back(assert_equal_on_window(
          lhs2, rhs2, w, "rep.inverse(k=" + std::to_string(k) + ", " + tag + ")",
          "-D^{-1} d/dx + k z^{1-1/k} d/dx D^{-1} = k z^{1-1/k} d/dz D^{-1}"));
    }
  }
  return out;
}

}  // namespace permorb
