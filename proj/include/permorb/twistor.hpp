#pragma once

// Twisted modules for the k-cycle acting on tensor powers of the free fermion.
//
// The operator
//   Delta_k(x) = exp(sum_j a_j x^{-j/k} L(j)) (k^{1/2})^{-2L(0)} (x^{(1-k)/2k})^{2L(0)}
// turns the untwisted module M = V_fer into a g-twisted module for V_fer^{(x)k}:
//   Ybar(u,x) = Y_M(Delta_k(x)u, x^{1/k}) is the field of u in slot 1,
//   Y_g(u^{j+1},x) = Ybar(u,x) with x^{1/k} -> eta^j x^{1/k},
// and multi-slot fields follow from the twisted iterate formula.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "permorb/changeofvars.hpp"
#include "permorb/fermion.hpp"
#include "permorb/fseries.hpp"
#include "permorb/jacobi.hpp"

namespace permorb {

class ObstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using FermionSeries = Series<FermionVector>;

/// k^{-p} for p = twice_p / 2.
inline Scalar k_power(int k, int twice_p) { return Scalar::sqrt_k(k).pow(-twice_p); }

/// Delta_k(x) and its inverse on graded vectors of V_fer.
class DeltaOp {
 public:
  DeltaOp(FreeFermion& V, int k, std::optional<ExpCoeffs<Scalar>> coeffs = {})
      : V_(V), k_(k), custom_(coeffs.has_value()) {
    if (k < 1) throw std::invalid_argument("k must be positive");
    a_ = coeffs ? coeffs->A : compute_a(k, 8).A;
  }

  int k() const { return k_; }
  FreeFermion& base() { return V_; }
  const std::vector<Scalar>& a() const { return a_; }

  /// Coefficient of y^j in exp(sign * sum_i a_i y^i L(i)) u, for u of one weight.
  std::vector<FermionVector> exp_pieces(const FermionVector& u, int sign) {
    const int tw = twice_weight_of(u);
    ensure_coeffs(tw / 2);
    std::vector<FermionVector> out(tw / 2 + 1), term(tw / 2 + 1);
    out[0] = term[0] = u;
    for (int n = 1;; ++n) {
      std::vector<FermionVector> next(term.size());
      bool any = false;
      for (std::size_t j = 0; j < term.size(); ++j) {
        if (term[j].is_zero()) continue;
        for (std::size_t i = 1; j + i < term.size(); ++i) {
          if (a_[i - 1].is_zero()) continue;
          FermionVector l = V_.L(static_cast<int>(i), term[j]);
          if (l.is_zero()) continue;
          next[j + i] += (Scalar(sign) * a_[i - 1] * Scalar(make_rat(1, n))) * l;
          any = true;
        }
      }
      if (!any) break;
      term = std::move(next);
      for (std::size_t j = 0; j < term.size(); ++j) out[j] += term[j];
    }
    return out;
  }

  /// u(j) with Delta_k(x)u = sum_j u(j) x^{p/k - p - j/k}.
  const std::vector<FermionVector>& pieces(const FermionState& u) {
    auto it = pieces_.find(u);
    if (it != pieces_.end()) return it->second;
    auto p = exp_pieces(FermionVector(u), 1);
    Scalar c = k_power(k_, u.twice_weight());
    for (auto& v : p) v = c * v;
    return pieces_.emplace(u, std::move(p)).first->second;
  }

  /// u[j] with Delta_k(x)^{-1}u = sum_j u[j] x^{p - p/k - j}.
  std::vector<FermionVector> inverse_pieces(const FermionVector& u) {
    const int tw = twice_weight_of(u);
    auto p = exp_pieces(u, -1);
    for (std::size_t j = 0; j < p.size(); ++j)
      p[j] = k_power(k_, -(tw - 2 * static_cast<int>(j))) * p[j];
    return p;
  }

  Frac exponent(int twice_p, long long j) const {
    Frac p(twice_p, 2);
    return p / Frac(k_) - p - Frac(j, k_);
  }
  Frac inverse_exponent(int twice_p, long long j) const {
    Frac p(twice_p, 2);
    return p - p / Frac(k_) - Frac(j);
  }

  /// Delta_k(x)u, or its inverse, as a finite series in x.
  FermionSeries apply(const FermionVector& u, bool invert = false) {
    FermionSeries out({"x"});
    for (const auto& [tw, part] : weight_components(u)) {
      if (invert) {
        auto p = inverse_pieces(part);
        for (std::size_t j = 0; j < p.size(); ++j)
          out.add_term({{inverse_exponent(tw, static_cast<long long>(j))}, false}, p[j]);
      } else {
        for (const auto& [s, c] : part.terms()) {
          const auto& p = pieces(s);
          for (std::size_t j = 0; j < p.size(); ++j)
            out.add_term({{exponent(tw, static_cast<long long>(j))}, false}, c * p[j]);
        }
      }
    }
    return out;
  }

  /// Coefficient of x^{-m-1} in Ybar(u,x)w from the closed mode formula
  /// sum_j u(j)_{(1-k)p - j - 1 + km + k}.
  FermionVector ybar_mode(const FermionState& u, Frac m, const FermionState& w) {
    return ybar_mode_with(
        u, m, w, [this](const FermionVector& a, int n, const FermionState& b) {
          return V_.mode(a, n, FermionVector(b));
        });
  }

  template <class BaseMode>
  FermionVector ybar_mode_with(const FermionState& u, Frac m, const FermionState& w,
                               const BaseMode& base) {
    FermionVector out;
    const Frac p = u.weight();
    const auto& pc = pieces(u);
    for (std::size_t j = 0; j < pc.size(); ++j) {
      if (pc[j].is_zero()) continue;
      Frac n = (Frac(1) - Frac(k_)) * p - Frac(static_cast<long long>(j) + 1) + Frac(k_) * m +
               Frac(k_);
      if (!n.is_integer()) continue;
      out += base(pc[j], static_cast<int>(n.num()), w);
    }
    return out;
  }

  FermionVector ybar_mode(const FermionVector& u, Frac m, const FermionVector& w) {
    FermionVector out;
    for (const auto& [a, ca] : u.terms())
      for (const auto& [b, cb] : w.terms()) out += (ca * cb) * ybar_mode(a, m, b);
    return out;
  }

  /// Ybar(u,x)w on x-exponents in [lo, hi], computed as a series: Delta_k(x)u
  /// is expanded, Y_M is applied, and x -> x^{1/k} is substituted.
  FermionSeries ybar(const FermionVector& u, const FermionVector& w, Frac lo, Frac hi) {
    FermionSeries out({"x"});
    FermionSeries du = apply(u);
    for (const auto& [key, piece] : du.terms()) {
      const Frac e = key.e[0];
      FermionSeries y = V_.vertex_op(piece, w, Frac(k_) * (lo - e), Frac(k_) * (hi - e));
      FermionSeries sub = substitute_power(y, "x", Frac(1, k_));
      out += mul(FracSeries::monomial({"x"}, {e}, Scalar(1)), sub);
    }
    return out;
  }

 private:
  void ensure_coeffs(int n) {
    if (static_cast<int>(a_.size()) >= n) return;
    if (custom_) throw std::invalid_argument("coefficient table shorter than " + std::to_string(n));
    a_ = compute_a(k_, n).A;
  }

  FreeFermion& V_;
  int k_;
  bool custom_;
  std::vector<Scalar> a_;
  std::map<FermionState, std::vector<FermionVector>> pieces_;
};

/// The g-twisted V_fer^{(x)k}-module built on M = V_fer; k must be odd.
class TwistedModule {
 public:
  using BaseMode = std::function<FermionVector(const FermionVector&, int, const FermionState&)>;

  TwistedModule(FreeFermion& V, int k, std::optional<ExpCoeffs<Scalar>> coeffs = {},
                BaseMode base = {})
      : V_(V), delta_(V, k, std::move(coeffs)), T_(V, k), base_(std::move(base)) {
    if (k % 2 == 0)
      throw ObstructionError("k = " + std::to_string(k) +
                             " is even: odd fields would carry exponents in 1/" +
                             std::to_string(2 * k) + " + (1/" + std::to_string(k) +
                             ")Z; see obstruction_report");
    if (!base_)
      base_ = [&V](const FermionVector& a, int n, const FermionState& b) {
        return V.mode(a, n, FermionVector(b));
      };
  }

  int k() const { return T_.k(); }
  DeltaOp& delta() { return delta_; }
  TensorPower& tensor() { return T_; }
  FreeFermion& base() { return V_; }

  /// L^g(0) eigenvalue offset of the lowest weight space: (k^2 - 1)c/(24k).
  Rat vacuum_shift() const {
    long long k = T_.k();
    return make_rat(k * k - 1, 24 * k) * FreeFermion::central_charge();
  }
  /// L^g(0)-weight of w above the lowest weight.
  Frac depth(const FermionState& w) const { return Frac(w.twice_weight(), 2 * T_.k()); }

  /// (u^1)^g_m w.
  const FermionVector& single(const FermionState& u, Frac m, const FermionState& w) {
    auto key = std::make_tuple(u, m, w);
    auto it = single_.find(key);
    if (it != single_.end()) return it->second;
    FermionVector r;
    if (!(m > u.weight() + depth(w) - Frac(1))) r = delta_.ybar_mode_with(u, m, w, base_);
    return single_.emplace(std::move(key), std::move(r)).first->second;
  }

  /// (u^s)^g_m w = eta^{-(s-1)km} (u^1)^g_m w.
  FermionVector slot_mode(int s, const FermionState& u, Frac m, const FermionState& w) {
    Frac km = Frac(k()) * m;
    if (!km.is_integer()) return {};
    const FermionVector& r = single(u, m, w);
    if (r.is_zero() || s == 1) return r;
    return Scalar::eta(k(), -static_cast<long long>(s - 1) * km.num()) * r;
  }

  /// a^g_m w for a basis vector of the tensor power.
  const FermionVector& mode(const TensorState& a, Frac m, const FermionState& w) {
    auto key = std::make_tuple(a, m, w);
    auto it = multi_.find(key);
    if (it != multi_.end()) return it->second;
    FermionVector r = compute_mode(a, m, w);
    return multi_.emplace(std::move(key), std::move(r)).first->second;
  }

  FermionVector mode(const TensorVector& a, Frac m, const FermionVector& w) {
    FermionVector out;
    for (const auto& [sa, ca] : a.terms())
      for (const auto& [sw, cw] : w.terms()) {
        const auto& r = mode(sa, m, sw);
        if (!r.is_zero()) out += (ca * cw) * r;
      }
    return out;
  }

  /// L^g(n) = (sum_j omega^j)^g_{n+1}.
  FermionVector Lg(int n, const FermionVector& w) { return mode(T_.omega(), Frac(n + 1), w); }

  /// Extra terms of the iterate formula for a = first slot, b = rest: the
  /// coefficient of x2^e in G_r(M) for M >= floor(wt a + wt b) must vanish.
  FermionVector iterate_audit(const TensorState& t, long long M, Frac e, const FermionState& w) {
    FermionVector out;
    auto split = split_first(t);
    if (!split) return out;
    for (int r = 0; r < k(); ++r) out += G(*split, r, M, e, w);
    return out;
  }

  long long iterate_top(const TensorState& t) const { return t.weight().floor(); }

  std::size_t cache_size() const { return single_.size() + multi_.size(); }

 private:
  struct Split {
    int slot;
    FermionState a;
    TensorState rest;
  };

  std::optional<Split> split_first(const TensorState& t) const {
    int s = 0;
    while (s < k() && t.slots[s].is_vacuum()) ++s;
    if (s == k()) return std::nullopt;
    Split out{s + 1, t.slots[s], t};
    out.rest.slots[s] = FermionState{};
    return out;
  }

  FermionVector compute_mode(const TensorState& t, Frac m, const FermionState& w) {
    if (m > t.weight() + depth(w) - Frac(1)) return {};
    auto split = split_first(t);
    if (!split) return m == Frac(-1) ? FermionVector(w) : FermionVector{};
    if (split->rest.is_vacuum()) return slot_mode(split->slot, split->a, m, w);
    // t = a_{-1} b with a in one slot; invert the residue of the eigen-form
    // Jacobi identity weighted by x1^{r/k} for each eigencomponent of a.
    FermionVector out;
    const long long N = iterate_top(t);
    for (int r = 0; r < k(); ++r) {
      const Frac rk(r, k());
      for (long long i = 0; i <= N; ++i) {
        Rat c = binom(-rk, i);
        if (c == 0) continue;
        FermionVector g = G(*split, r, i - 1, -m - Frac(1) + Frac(i) + rk, w);
        if (!g.is_zero()) out += Scalar(c) * g;
      }
    }
    return out;
  }

  // Coefficient of x2^e in
  //   sum_l C(M,l)(-x2)^l a_{r/k+M-l} Y(b,x2) - eps sum_l C(M,l)(-1)^{M-l} x2^{M-l} Y(b,x2) a_{r/k+l}.
  FermionVector G(const Split& sp, int r, long long M, Frac e, const FermionState& w) {
    FermionVector out;
    const Frac rk(r, k());
    const Frac wa = sp.a.weight(), wb = sp.rest.weight(), dw = depth(w);
    const int eps = sp.a.parity() && sp.rest.parity() ? -1 : 1;
    const Rat Mr = make_rat(M, 1);
    for (long long l = 0; Frac(l) <= wb + dw + e; ++l) {
      if (M >= 0 && l > M) break;
      Rat c = binom(Mr, l);
      if (l % 2) c = -c;
      Frac p = Frac(l - 1) - e;
      const FermionVector& bw = mode(sp.rest, p, w);
      if (bw.is_zero()) continue;
      Frac mu = rk + Frac(M - l);
      FermionVector acc;
      for (const auto& [s, cs] : bw.terms()) acc += cs * slot_mode(sp.slot, sp.a, mu, s);
      out += Scalar(c) * acc;
    }
    for (long long l = 0; rk + Frac(l) <= wa + dw - Frac(1); ++l) {
      if (M >= 0 && l > M) break;
      Rat c = binom(Mr, l);
      if ((M - l) % 2) c = -c;
      if (eps > 0) c = -c;
      FermionVector aw = slot_mode(sp.slot, sp.a, rk + Frac(l), w);
      if (aw.is_zero()) continue;
      Frac p = Frac(M - l - 1) - e;
      FermionVector acc;
      for (const auto& [s, cs] : aw.terms()) acc += cs * mode(sp.rest, p, s);
      out += Scalar(c) * acc;
    }
    return out;
  }

  FreeFermion& V_;
  DeltaOp delta_;
  TensorPower T_;
  BaseMode base_;
  std::map<std::tuple<FermionState, Frac, FermionState>, FermionVector> single_;
  std::map<std::tuple<TensorState, Frac, FermionState>, FermionVector> multi_;
};

/// Frac values lo, lo + step, ..., up to hi.
inline std::vector<Frac> frac_range(Frac lo, Frac hi, Frac step) {
  std::vector<Frac> out;
  for (Frac x = lo; x <= hi; x += step) out.push_back(x);
  return out;
}

namespace detail {

inline void record(CheckReport& rep, bool ok, const std::string& where) {
  ++rep.compared;
  if (!ok && rep.pass) {
    rep.pass = false;
    rep.first_mismatch = where;
  }
}

inline std::string label(const FermionVector& v) { return v.to_string(); }

}  // namespace detail

/// Ybar(u,x) with x^{1/k} -> eta^j x^{1/k}: the field of u in slot j+1.
inline FermionSeries other_slots(int k, const FermionSeries& field, long long j) {
  return substitute_eta(field, "x", k, j);
}

/// Delta_k(z) Y(u,z0) Delta_k(z)^{-1} v against Y(Delta_k(z+z0)u, (z+z0)^{1/k} - z^{1/k}) v,
/// both exact through z0^H.
inline CheckReport conjugation_check(DeltaOp& D, const FermionVector& u, const FermionVector& v,
                                     long long H) {
  FreeFermion& V = D.base();
  const int k = D.k();
  const std::vector<std::string> vars{"z", "z0"};
  CheckReport rep;
  rep.identity = "conjugation";
  rep.anchor = "Delta(z) Y(u,z0) Delta(z)^-1 = Y(Delta(z+z0)u, (z+z0)^(1/k) - z^(1/k))";
  Window win;
  win.upto("z0", Frac(H));
  rep.window = win.to_string();
  if (u.is_zero() || v.is_zero()) throw std::invalid_argument("conjugation_check needs nonzero u, v");
  const int tw_u = weight_components(u).rbegin()->first;
  const int tw_v = weight_components(v).rbegin()->first;

  FermionSeries lhs(vars);
  for (const auto& [tw, vpart] : weight_components(v)) {
    auto vinv = D.inverse_pieces(vpart);
    for (std::size_t j = 0; j < vinv.size(); ++j) {
      if (vinv[j].is_zero()) continue;
      Frac ej = D.inverse_exponent(tw, static_cast<long long>(j));
      int top = FreeFermion::max_mode(tw_u, tw - 2 * static_cast<int>(j));
      for (int n = static_cast<int>(-H - 1); n <= top; ++n) {
        FermionVector t = V.mode(u, n, vinv[j]);
        if (t.is_zero()) continue;
        FermionSeries dt = D.apply(t);
        for (const auto& [key, c] : dt.terms())
          lhs.add_term({{key.e[0] + ej, Frac(-n - 1)}, false}, c);
      }
    }
  }

  const long long wmax = Frac(tw_u + tw_v, 2).ceil();
  FracSeries R = binom_expand(vars, "z", 1, "z0", Frac(1, k), H + wmax + 2) -
                 FracSeries::monomial(vars, {Frac(1, k), Frac(0)}, Scalar(1));
  std::map<long long, FracSeries> xpow;
  auto Xpow = [&](long long alpha) -> const FracSeries& {
    auto it = xpow.find(alpha);
    if (it != xpow.end()) return it->second;
    return xpow.emplace(alpha, pow_series(R, Frac(alpha), "z0", Frac(H - alpha))).first->second;
  };
  FermionSeries rhs(vars);
  for (const auto& [tw, upart] : weight_components(u)) {
    for (const auto& [us, uc] : upart.terms()) {
      const auto& pc = D.pieces(us);
      for (std::size_t J = 0; J < pc.size(); ++J) {
        if (pc[J].is_zero()) continue;
        Frac eJ = D.exponent(tw, static_cast<long long>(J));
        int top = FreeFermion::max_mode(tw - 2 * static_cast<int>(J), tw_v);
        for (int n = static_cast<int>(-H - 1); n <= top; ++n) {
          FermionVector t = V.mode(uc * pc[J], n, v);
          if (t.is_zero()) continue;
          const long long alpha = -n - 1;
          FracSeries bz = binom_expand(vars, "z", 1, "z0", eJ, H - alpha);
          std::string tv = "z0";
          Frac hi(H);
          FracSeries f = mul(bz, Xpow(alpha), &tv, &hi);
          rhs += mul(f, FermionSeries::constant(vars, t));
        }
      }
    }
  }
  auto r = assert_equal_on_window(lhs, rhs, win, rep.identity, rep.anchor);
  r.detail = "k=" + std::to_string(k) + " u=" + u.to_string() + " v=" + v.to_string();
  return r;
}

/// [Ybar(u,x1), Ybar(v,x2)] against
/// Res_x0 (1/k) x2^{-1} ((x1-x0)/x2)^{e} delta(((x1-x0)/x2)^{1/k}) Ybar(Y(u,x0)v, x2)
/// with e = |u|(1-k)/2k, or e = 0 when with_factor is false.
inline CheckReport supercommutator_check(DeltaOp& D, const FermionVector& u,
                                         const FermionVector& v,
                                         const std::vector<FermionState>& states, Frac lo,
                                         Frac hi, bool with_factor = true) {
  FreeFermion& V = D.base();
  const int k = D.k();
  CheckReport rep;
  rep.identity = with_factor ? "twisted supercommutator" : "twisted supercommutator without factor";
  rep.anchor = "[Ybar(u,x1),Ybar(v,x2)] = Res_x0 (1/k) x2^-1 ((x1-x0)/x2)^(|u|(1-k)/2k) "
               "delta(((x1-x0)/x2)^(1/k)) Ybar(Y(u,x0)v,x2)";
  rep.window = "x1, x2 in [" + lo.to_string() + ", " + hi.to_string() + "] step 1/" +
               std::to_string(2 * k);
  const int pu = parity_of(u), pv = parity_of(v);
  const int eps = pu && pv ? -1 : 1;
  const Frac e = with_factor ? Frac(pu * (1 - k), 2 * k) : Frac(0);
  const int tw_u = twice_weight_of(u), tw_v = twice_weight_of(v);
  std::vector<FermionVector> uv;
  for (int i = 0; i <= FreeFermion::max_mode(tw_u, tw_v); ++i) uv.push_back(V.mode(u, i, v));
  const auto grid = frac_range(lo, hi, Frac(1, 2 * k));
  long long nonzero = 0;
  for (const auto& ws : states) {
    FermionVector w(ws);
    for (Frac a : grid)
      for (Frac b : grid) {
        Frac m1 = -a - Frac(1), m2 = -b - Frac(1);
        FermionVector lhs = D.ybar_mode(u, m1, D.ybar_mode(v, m2, w)) -
                            Scalar(eps) * D.ybar_mode(v, m2, D.ybar_mode(u, m1, w));
        FermionVector rhs;
        for (std::size_t i = 0; i < uv.size(); ++i) {
          if (uv[i].is_zero()) continue;
          Frac sel = Frac(k) * (a - e + Frac(static_cast<long long>(i)));
          if (!sel.is_integer()) continue;
          Rat c = binom(a + Frac(static_cast<long long>(i)), static_cast<long long>(i)) /
                  k;
          if (i % 2) c = -c;
          Frac q = Frac(-2) - a - b - Frac(static_cast<long long>(i));
          rhs += Scalar(c) * D.ybar_mode(uv[i], q, w);
        }
        if (!lhs.is_zero()) ++nonzero;
        detail::record(rep, lhs == rhs,
                       "x1^" + a.to_string() + " x2^" + b.to_string() + " on " + ws.to_string() +
                           ": " + lhs.to_string() + " vs " + rhs.to_string());
      }
  }
  rep.detail = "k=" + std::to_string(k) + " u=" + u.to_string() + " v=" + v.to_string() +
               " nonzero_lhs=" + std::to_string(nonzero);
  return rep;
}

/// Jacobi data for the twisted module with u, v in the tensor power.
inline JacobiData<FermionVector> twisted_jacobi_data(TwistedModule& tm, const TensorVector& u,
                                                     const TensorVector& v,
                                                     std::optional<int> eigen_r = {}) {
  JacobiData<FermionVector> d;
  TensorPower& T = tm.tensor();
  d.u = [&tm, u](Frac m, const FermionVector& w) { return tm.mode(u, m, w); };
  d.v = [&tm, v](Frac p, const FermionVector& w) { return tm.mode(v, p, w); };
  auto gu = std::make_shared<std::vector<TensorVector>>();
  for (int j = 0; j < T.k(); ++j) gu->push_back(T.g(u, j));
  auto cache = std::make_shared<std::map<std::pair<int, long long>, TensorVector>>();
  d.rhs = [&tm, &T, gu, v, cache, eigen_r](int j, long long i, Frac q, const FermionVector& w) {
    int jj = eigen_r ? 0 : j;
    auto key = std::make_pair(jj, i);
    auto it = cache->find(key);
    if (it == cache->end()) it = cache->emplace(key, T.mode((*gu)[jj], static_cast<int>(i), v)).first;
    return tm.mode(it->second, q, w);
  };
  d.wt_u = Frac(twice_weight_of(u), 2);
  d.wt_v = Frac(twice_weight_of(v), 2);
  d.parity_u = parity_of(u);
  d.parity_v = parity_of(v);
  d.k = T.k();
  if (eigen_r) {
    d.eigen = true;
    d.r = *eigen_r;
  }
  return d;
}

/// The twisted Jacobi identity for u^{su}, v^{sv}; with eigen set, u is first
/// replaced by each of its eigencomponents and the eigenspace form is used.
inline CheckReport twisted_jacobi_check(TwistedModule& tm, int su, const FermionVector& u, int sv,
                                        const FermionVector& v,
                                        const std::vector<FermionState>& states, long long Alo,
                                        long long Ahi, Frac lo, Frac hi, bool eigen = false) {
  TensorPower& T = tm.tensor();
  const int k = T.k();
  CheckReport rep;
  rep.identity = eigen ? "twisted Jacobi (eigenspace form)" : "twisted Jacobi";
  rep.anchor = eigen ? "x2^-1 ((x1-x0)/x2)^(-r/k) delta((x1-x0)/x2) Y_g(Y(u,x0)v,x2)"
                     : "(x2^-1/k) sum_j delta(eta^j (x1-x0)^(1/k)/x2^(1/k)) Y_g(Y(g^j u,x0)v,x2)";
  rep.window = "x0 in [" + std::to_string(Alo) + ", " + std::to_string(Ahi) + "], x1, x2 in [" +
               lo.to_string() + ", " + hi.to_string() + "] step 1/" + std::to_string(k);
  TensorVector U = T.slot(su, u), Vv = T.slot(sv, v);
  std::vector<std::pair<std::optional<int>, TensorVector>> cases;
  if (eigen) {
    for (int r = 0; r < k; ++r) {
      TensorVector ur = T.eigenprojection(U, r);
      if (!ur.is_zero()) cases.emplace_back(r, ur);
    }
  } else {
    cases.emplace_back(std::nullopt, U);
  }
  const auto grid = frac_range(lo, hi, Frac(1, k));
  long long nonzero = 0;
  for (const auto& [r, uu] : cases) {
    auto d = twisted_jacobi_data(tm, uu, Vv, r);
    for (const auto& ws : states) {
      FermionVector w(ws);
      for (long long A = Alo; A <= Ahi; ++A)
        for (Frac B : grid)
          for (Frac C : grid) {
            auto c = jacobi_coefficient(d, A, B, C, w, tm.depth(ws));
            FermionVector res = c.residual();
            if (!c.rhs.is_zero()) ++nonzero;
            detail::record(rep, res.is_zero(),
                           "x0^" + std::to_string(A) + " x1^" + B.to_string() + " x2^" +
                               C.to_string() + " on " + ws.to_string() + ": residual " +
                               res.to_string());
          }
    }
  }
  rep.detail = "k=" + std::to_string(k) + " slots (" + std::to_string(su) + "," +
               std::to_string(sv) + ") u=" + u.to_string() + " v=" + v.to_string() +
               " nonzero_rhs=" + std::to_string(nonzero);
  return rep;
}

/// Ybar(L(-1)u,x) = d/dx Ybar(u,x) on x-exponents in [lo-1, hi-1].
inline CheckReport lminus1_check(DeltaOp& D, const FermionVector& u,
                                 const std::vector<FermionState>& states, Frac lo, Frac hi) {
  FreeFermion& V = D.base();
  CheckReport rep;
  rep.identity = "L(-1) derivative";
  rep.anchor = "Ybar(L(-1)u,x) = d/dx Ybar(u,x)";
  Window win;
  win.set("x", lo - Frac(1), hi - Frac(1));
  rep.window = win.to_string();
  FermionVector du = V.L(-1, u);
  for (const auto& ws : states) {
    FermionVector w(ws);
    FermionSeries left = du.is_zero() ? FermionSeries({"x"}) : D.ybar(du, w, lo - Frac(1), hi - Frac(1));
    FermionSeries right = derivative(D.ybar(u, w, lo, hi), "x");
    auto r = assert_equal_on_window(left, right, win);
    rep.compared += r.compared;
    if (!r.pass && rep.pass) {
      rep.pass = false;
      rep.first_mismatch = ws.to_string() + ": " + r.first_mismatch;
    }
  }
  rep.detail = "k=" + std::to_string(D.k()) + " u=" + u.to_string();
  return rep;
}

/// The closed mode formula against coefficient extraction from the Ybar series.
inline CheckReport mode_formula_check(DeltaOp& D, const FermionVector& u,
                                      const std::vector<FermionState>& states, Frac mmax) {
  CheckReport rep;
  rep.identity = "twisted mode formula";
  rep.anchor = "(u^1)^g_m = sum_j u(j)_{(1-k)p-j-1+km+k}";
  rep.window = "|m| <= " + mmax.to_string();
  const int k = D.k();
  for (const auto& ws : states) {
    FermionVector w(ws);
    FermionSeries s = D.ybar(u, w, -mmax - Frac(1), mmax - Frac(1));
    for (Frac m : frac_range(-mmax, mmax, Frac(1, 2 * k))) {
      FermionVector a = D.ybar_mode(u, m, w);
      FermionVector b = s.coeff({-m - Frac(1)});
      detail::record(rep, a == b, "m=" + m.to_string() + " on " + ws.to_string());
    }
  }
  rep.detail = "k=" + std::to_string(k) + " u=" + u.to_string();
  return rep;
}

/// Y_M(u,x) recovered as Y_g((Delta_k(x^k)^{-1}u)^1, x^k), on x-exponents in [lo, hi].
inline FermionSeries untwist(TwistedModule& tm, const FermionVector& u, const FermionVector& w,
                             long long lo, long long hi) {
  const int k = tm.k();
  DeltaOp& D = tm.delta();
  FermionSeries out({"x"});
  FermionSeries inv = substitute_power(D.apply(u, true), "x", Frac(k));
  for (const auto& [key, piece] : inv.terms()) {
    const Frac f = key.e[0];
    if (!f.is_integer())
      throw ObstructionError("untwisted field has exponent " + f.to_string());
    // x^f * sum_m piece_m x^{-k(m+1)} with exponent in [lo, hi].
    for (long long e = lo; e <= hi; ++e) {
      Frac m = (f - Frac(e)) / Frac(k) - Frac(1);
      FermionVector c;
      for (const auto& [ps, pc] : piece.terms())
        for (const auto& [ws, wc] : w.terms()) c += (pc * wc) * tm.single(ps, m, ws);
      if (!c.is_zero()) out.add_term({{Frac(e)}, false}, c);
    }
  }
  return out;
}

/// u_n w of the untwisted module recovered from the twisted one.
inline FermionVector untwist_mode(TwistedModule& tm, const FermionVector& u, int n,
                                  const FermionState& w) {
  FermionSeries s = untwist(tm, u, FermionVector(w), -n - 1, -n - 1);
  return s.coeff({Frac(-n - 1)});
}

/// U(T(M)) = M on modes of the given vectors, and T(U(T(M))) = T(M) on
/// single-slot modes with |m| <= mmax.
inline std::vector<CheckReport> roundtrip_check(TwistedModule& tm,
                                                const std::vector<FermionVector>& us,
                                                const std::vector<FermionState>& states,
                                                int nmax) {
  FreeFermion& V = tm.base();
  const int k = tm.k();
  CheckReport ut, tu;
  ut.identity = "untwist after twist";
  ut.anchor = "Y_M(u,x) = Y_g((Delta_k(x^k)^-1 u)^1, x^k)";
  ut.window = "|n| <= " + std::to_string(nmax);
  tu.identity = "twist after untwist";
  tu.anchor = "T_g^k o U_g^k = id";
  tu.window = "|m| <= " + std::to_string(nmax);
  for (const auto& u : us)
    for (const auto& ws : states) {
      FermionVector w(ws);
      FermionSeries s = untwist(tm, u, w, -nmax - 1, nmax - 1);
      for (int n = -nmax; n <= nmax; ++n)
        detail::record(ut, s.coeff({Frac(-n - 1)}) == V.mode(u, n, w),
                       u.to_string() + " n=" + std::to_string(n) + " on " + ws.to_string());
    }
  ExpCoeffs<Scalar> same;
  same.a0 = Scalar(1);
  same.A = tm.delta().a();
  TwistedModule again(V, k, same,
                      [&tm](const FermionVector& a, int n, const FermionState& b) {
                        return untwist_mode(tm, a, n, b);
                      });
  for (const auto& u : us)
    for (const auto& [us_, uc] : u.terms())
      for (const auto& ws : states)
        for (Frac m : frac_range(Frac(-nmax), Frac(nmax), Frac(1, k)))
          detail::record(tu, again.single(us_, m, ws) == tm.single(us_, m, ws),
                         us_.to_string() + " m=" + m.to_string() + " on " + ws.to_string());
  ut.detail = tu.detail = "k=" + std::to_string(k);
  return {ut, tu};
}

/// Grading, parity, and L^g(0) on the cutoff basis.
inline std::vector<CheckReport> grading_check(TwistedModule& tm,
                                              const std::vector<FermionState>& gens,
                                              const std::vector<FermionState>& states, Frac mmax) {
  const int k = tm.k();
  CheckReport gr, par, lg;
  gr.identity = "twisted grading";
  gr.anchor = "(u^1)^g_m maps T(n) into T(n + wt u - m - 1)";
  par.identity = "twisted parity";
  par.anchor = "v^g_n in (End M)^(|v|)";
  lg.identity = "L^g(0)";
  lg.anchor = "L^g(0) = L(0)/k + (k^2-1)c/(24k)";
  gr.window = par.window = "|m| <= " + mmax.to_string();
  lg.window = "basis of the cutoff";
  for (const auto& u : gens)
    for (const auto& ws : states)
      for (Frac m : frac_range(-mmax, mmax, Frac(1, k))) {
        const FermionVector& r = tm.single(u, m, ws);
        Frac want = tm.depth(ws) + u.weight() - m - Frac(1);
        bool ok = true, pok = true;
        for (const auto& [s, c] : r.terms()) {
          ok = ok && tm.depth(s) == want;
          pok = pok && s.parity() == (ws.parity() + u.parity()) % 2;
        }
        std::string where = u.to_string() + " m=" + m.to_string() + " on " + ws.to_string();
        detail::record(gr, ok, where);
        detail::record(par, pok, where);
      }
  for (const auto& ws : states) {
    FermionVector w(ws);
    FermionVector want = Scalar(tm.depth(ws).rat() + tm.vacuum_shift()) * w;
    detail::record(lg, tm.Lg(0, w) == want, ws.to_string() + ": " + tm.Lg(0, w).to_string());
  }
  gr.detail = par.detail = lg.detail = "k=" + std::to_string(k);
  return {gr, par, lg};
}

/// Desk-scale irreducibility proxy: the basis states up to the cutoff are
/// strongly connected under the generator modes, so no coordinate subspace is
/// invariant.
inline CheckReport irreducibility_proxy(TwistedModule& tm, int twice_cutoff) {
  auto basis = FreeFermion::basis(twice_cutoff);
  std::map<FermionState, std::set<FermionState>> adj;
  const Frac span(twice_cutoff + 2, 2);
  for (const auto& b : basis)
    for (Frac m : frac_range(-span, span, Frac(1, tm.k())))
      for (const auto& [s, c] : tm.single(FreeFermion::psi(), m, b).terms())
        if (s.twice_weight() <= twice_cutoff) adj[b].insert(s);
  auto reach = [&](const FermionState& from, bool reverse) {
    std::set<FermionState> seen{from};
    std::vector<FermionState> stack{from};
    while (!stack.empty()) {
      FermionState x = stack.back();
      stack.pop_back();
      for (const auto& y : basis) {
        bool edge = reverse ? adj[y].count(x) > 0 : adj[x].count(y) > 0;
        if (edge && seen.insert(y).second) stack.push_back(y);
      }
    }
    return seen.size();
  };
  CheckReport rep;
  rep.identity = "irreducibility proxy";
  rep.anchor = "no proper invariant coordinate subspace up to the cutoff (proxy, not a proof)";
  rep.window = "weight <= " + Frac(twice_cutoff, 2).to_string();
  rep.compared = static_cast<long long>(basis.size());
  rep.pass = reach(FreeFermion::vac(), false) == basis.size() &&
             reach(FreeFermion::vac(), true) == basis.size();
  if (!rep.pass) rep.first_mismatch = "basis graph is not strongly connected";
  rep.detail = "k=" + std::to_string(tm.k()) + " proxy";
  return rep;
}

/// Certificate that an odd field cannot live in a g-twisted module for even k.
struct ObstructionCertificate {
  int k = 0;
  std::string u;
  int parity = 0;
  Frac offset, step;
  std::vector<Frac> exponents;
  bool off_lattice = false;
  bool all_in_coset = true;
  Frac untwist_shift;

  std::string coset() const { return offset.to_string() + " + (" + step.to_string() + ")Z"; }
  bool obstructed() const { return off_lattice && all_in_coset; }

  nlohmann::json to_json() const {
    nlohmann::json ex = nlohmann::json::array();
    for (const auto& e : exponents) ex.push_back(e.to_string());
    return {{"k", k},
            {"u", u},
            {"coset", coset()},
            {"off_lattice", off_lattice},
            {"all_in_coset", all_in_coset},
            {"witnessed_exponents", ex},
            {"untwist_exponent_shift", untwist_shift.to_string()}};
  }
};

/// Exponent support of Ybar(u,x) on a few states, and the exponent shift
/// that untwisting a (1/k)Z-moded field would produce.
inline ObstructionCertificate obstruction_report(DeltaOp& D, const FermionState& u,
                                                 int twice_cutoff = 2) {
  const int k = D.k();
  ObstructionCertificate cert;
  cert.k = k;
  cert.u = u.to_string();
  cert.parity = u.parity();
  cert.step = Frac(1, k);
  Frac raw = Frac(u.parity(), 2 * k);
  cert.offset = raw - cert.step * Frac((raw / cert.step).floor());
  std::set<Frac> seen;
  for (const auto& ws : FreeFermion::basis(twice_cutoff)) {
    FermionSeries s = D.ybar(FermionVector(u), FermionVector(ws), Frac(-4), Frac(2));
    for (const auto& [key, c] : s.terms()) seen.insert(key.e[0]);
  }
  for (Frac e : seen) {
    cert.exponents.push_back(e);
    if (!((e - cert.offset) / cert.step).is_integer()) cert.all_in_coset = false;
  }
  cert.off_lattice = !(cert.offset / cert.step).is_integer();
  Frac f = D.inverse_exponent(u.twice_weight(), 0) * Frac(k);
  cert.untwist_shift = f - Frac(f.floor());
  return cert;
}

}  // namespace permorb
