#pragma once

// Sparse multivariate formal Laurent series with fractional exponents and an
// optional odd variable phi (phi^2 = 0).

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "permorb/exactnum.hpp"
#include "permorb/frac.hpp"

namespace permorb {

class CompositionDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ExpKey {
  std::vector<Frac> e;
  bool phi = false;
  friend bool operator==(const ExpKey&, const ExpKey&) = default;
  friend auto operator<=>(const ExpKey& a, const ExpKey& b) {
    if (auto c = a.e <=> b.e; c != 0) return c;
    return a.phi <=> b.phi;
  }
};

/// Closed exponent intervals per variable; a missing bound is unbounded.
class Window {
 public:
  struct Bound {
    std::optional<Frac> lo, hi;
  };

  Window& set(const std::string& var, std::optional<Frac> lo, std::optional<Frac> hi) {
    bounds_[var] = Bound{lo, hi};
    return *this;
  }
  Window& upto(const std::string& var, Frac hi) {
    bounds_[var].hi = hi;
    return *this;
  }
  Window& from(const std::string& var, Frac lo) {
    bounds_[var].lo = lo;
    return *this;
  }

  bool contains(const std::vector<std::string>& vars, const ExpKey& key) const {
    for (std::size_t i = 0; i < vars.size(); ++i) {
      auto it = bounds_.find(vars[i]);
      if (it == bounds_.end()) continue;
      if (it->second.lo && key.e[i] < *it->second.lo) return false;
      if (it->second.hi && key.e[i] > *it->second.hi) return false;
    }
    return true;
  }

  const std::map<std::string, Bound>& bounds() const { return bounds_; }

  std::string to_string() const {
    std::string out;
    for (const auto& [v, b] : bounds_) {
      if (!out.empty()) out += ", ";
      out += v + " in [" + (b.lo ? b.lo->to_string() : "-inf") + ", " +
             (b.hi ? b.hi->to_string() : "inf") + "]";
    }
    return out.empty() ? "all" : out;
  }

 private:
  std::map<std::string, Bound> bounds_;
};

/// Outcome of comparing two sides of an identity.
struct CheckReport {
  std::string identity;
  std::string anchor;
  std::string window;
  bool pass = true;
  std::string first_mismatch;
  std::string detail;
  long long compared = 0;

  nlohmann::json to_json() const {
    return {{"identity", identity},
            {"anchor", anchor},
            {"window", window},
            {"status", pass ? "pass" : "fail"},
            {"first_mismatch", first_mismatch},
            {"compared", compared},
            {"detail", detail}};
  }
};

template <class C>
class Series {
 public:
  using Coeff = C;
  using Terms = std::map<ExpKey, C>;

  Series() = default;
  explicit Series(std::vector<std::string> vars, bool grassmann = false)
      : vars_(std::move(vars)), lattice_(vars_.size(), 1), grassmann_(grassmann) {}

  static Series monomial(std::vector<std::string> vars, std::vector<Frac> e, const C& c,
                         bool phi = false) {
    Series s(std::move(vars), phi);
    if (e.size() != s.vars_.size()) throw std::invalid_argument("exponent arity mismatch");
    s.add_term(ExpKey{std::move(e), phi}, c);
    return s;
  }
  static Series constant(std::vector<std::string> vars, const C& c) {
    std::vector<Frac> e(vars.size(), Frac(0));
    return monomial(std::move(vars), std::move(e), c);
  }

  const std::vector<std::string>& vars() const { return vars_; }
  const Terms& terms() const { return terms_; }
  bool grassmann() const { return grassmann_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::string& meta() const { return meta_; }
  void set_meta(std::string m) { meta_ = std::move(m); }

  std::size_t var_index(const std::string& v) const {
    auto it = std::find(vars_.begin(), vars_.end(), v);
    if (it == vars_.end()) throw std::invalid_argument("unknown variable " + v);
    return static_cast<std::size_t>(it - vars_.begin());
  }
  bool has_var(const std::string& v) const {
    return std::find(vars_.begin(), vars_.end(), v) != vars_.end();
  }

  long long lattice(const std::string& v) const { return lattice_[var_index(v)]; }
  void declare_lattice(const std::string& v, long long d) {
    auto& l = lattice_[var_index(v)];
    l = std::lcm(l, d);
  }
  bool on_lattice() const {
    for (const auto& [k, c] : terms_)
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (lattice_[i] % k.e[i].den() != 0) return false;
    return true;
  }

  void add_term(const ExpKey& key, const C& c) {
    if (c.is_zero()) return;
    if (key.phi) grassmann_ = true;
    for (std::size_t i = 0; i < key.e.size(); ++i)
      lattice_[i] = std::lcm(lattice_[i], key.e[i].den());
    auto [it, inserted] = terms_.try_emplace(key, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  C coeff(const ExpKey& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? C{} : it->second;
  }
  C coeff(std::vector<Frac> e, bool phi = false) const { return coeff(ExpKey{std::move(e), phi}); }

  /// Same series expressed over a superset of variables (in the given order).
  Series aligned(const std::vector<std::string>& vars) const {
    if (vars == vars_) return *this;
    std::vector<int> pos(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      auto it = std::find(vars.begin(), vars.end(), vars_[i]);
      if (it == vars.end()) throw std::invalid_argument("alignment drops variable " + vars_[i]);
      pos[i] = static_cast<int>(it - vars.begin());
    }
    Series out(vars, grassmann_);
    for (std::size_t i = 0; i < vars_.size(); ++i) out.lattice_[pos[i]] = lattice_[i];
    for (const auto& [k, c] : terms_) {
      ExpKey nk{std::vector<Frac>(vars.size(), Frac(0)), k.phi};
      for (std::size_t i = 0; i < vars_.size(); ++i) nk.e[pos[i]] = k.e[i];
      out.terms_.emplace(std::move(nk), c);
    }
    out.meta_ = meta_;
    return out;
  }

  static std::vector<std::string> union_vars(const std::vector<std::string>& a,
                                             const std::vector<std::string>& b) {
    std::vector<std::string> out = a;
    for (const auto& v : b)
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return out;
  }

  Series& operator+=(const Series& o) {
    if (o.vars_ != vars_) {
      auto u = union_vars(vars_, o.vars_);
      *this = aligned(u);
      return *this += o.aligned(u);
    }
    for (std::size_t i = 0; i < vars_.size(); ++i)
      lattice_[i] = std::lcm(lattice_[i], o.lattice_[i]);
    grassmann_ = grassmann_ || o.grassmann_;
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
  }
  Series& operator-=(const Series& o) { return *this += -o; }
  Series operator-() const {
    Series r = *this;
    for (auto& [k, c] : r.terms_) c = -c;
    return r;
  }
  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }

  Series scaled(const Scalar& s) const {
    Series r(vars_, grassmann_);
    r.lattice_ = lattice_;
    for (const auto& [k, c] : terms_) r.add_term(k, s * c);
    return r;
  }

  /// Drops terms with exponent of var above hi.
  Series truncated(const std::string& var, Frac hi) const {
    std::size_t i = var_index(var);
    Series r(vars_, grassmann_);
    r.lattice_ = lattice_;
    for (const auto& [k, c] : terms_)
      if (k.e[i] <= hi) r.terms_.emplace(k, c);
    r.meta_ = meta_ + (meta_.empty() ? "" : "; ") + "truncated " + var + " <= " + hi.to_string();
    return r;
  }

  Series restricted(const Window& w) const {
    Series r(vars_, grassmann_);
    r.lattice_ = lattice_;
    for (const auto& [k, c] : terms_)
      if (w.contains(vars_, k)) r.terms_.emplace(k, c);
    return r;
  }

  std::optional<Frac> min_exponent(const std::string& var) const {
    std::size_t i = var_index(var);
    std::optional<Frac> m;
    for (const auto& [k, c] : terms_)
      if (!m || k.e[i] < *m) m = k.e[i];
    return m;
  }
  std::optional<Frac> max_exponent(const std::string& var) const {
    std::size_t i = var_index(var);
    std::optional<Frac> m;
    for (const auto& [k, c] : terms_)
      if (!m || k.e[i] > *m) m = k.e[i];
    return m;
  }

  /// Coefficient of var^e as a series in the remaining variables.
  Series coefficient_of(const std::string& var, Frac e) const {
    std::size_t i = var_index(var);
    std::vector<std::string> rest;
    for (std::size_t j = 0; j < vars_.size(); ++j)
      if (j != i) rest.push_back(vars_[j]);
    Series r(rest, grassmann_);
    for (std::size_t j = 0, t = 0; j < vars_.size(); ++j)
      if (j != i) r.lattice_[t++] = lattice_[j];
    for (const auto& [k, c] : terms_) {
      if (k.e[i] != e) continue;
      ExpKey nk{{}, k.phi};
      for (std::size_t j = 0; j < vars_.size(); ++j)
        if (j != i) nk.e.push_back(k.e[j]);
      r.terms_.emplace(std::move(nk), c);
    }
    return r;
  }

  nlohmann::json to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [k, c] : terms_) {
      nlohmann::json e = nlohmann::json::array();
      for (const auto& x : k.e) e.push_back(x.to_string());
      terms.push_back({{"exps", e}, {"phi", k.phi ? 1 : 0}, {"coeff", to_text(c)}});
    }
    return {{"vars", vars_}, {"meta", meta_}, {"terms", terms}};
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [k, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += "(" + to_text(c) + ")";
      if (k.phi) out += "*phi";
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (k.e[i] != Frac(0)) out += "*" + vars_[i] + "^" + k.e[i].to_string();
    }
    return out;
  }

 private:
  std::vector<std::string> vars_;
  std::vector<long long> lattice_;
  bool grassmann_ = false;
  Terms terms_;
  std::string meta_;
};

using FracSeries = Series<Scalar>;

/// Product with an optional cap on the exponent of one variable. The left
/// factor has scalar coefficients; phi-odd times phi-odd vanishes.
template <class A, class B>
Series<B> mul(const Series<A>& a0, const Series<B>& b0, const std::string* trunc_var = nullptr,
              const Frac* trunc_hi = nullptr) {
  auto vars = Series<B>::union_vars(a0.vars(), b0.vars());
  Series<A> a = a0.aligned(vars);
  Series<B> b = b0.aligned(vars);
  Series<B> out(vars, a.grassmann() || b.grassmann());
  for (const auto& v : vars) {
    out.declare_lattice(v, a.lattice(v));
    out.declare_lattice(v, b.lattice(v));
  }
  std::optional<std::size_t> ti;
  if (trunc_var) ti = out.var_index(*trunc_var);
  ExpKey key{std::vector<Frac>(vars.size()), false};
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      if (ka.phi && kb.phi) continue;
      if (ti && ka.e[*ti] + kb.e[*ti] > *trunc_hi) continue;
      for (std::size_t i = 0; i < vars.size(); ++i) key.e[i] = ka.e[i] + kb.e[i];
      key.phi = ka.phi || kb.phi;
      out.add_term(key, ca * cb);
    }
  }
  return out;
}

template <class B>
Series<B> mul_trunc(const FracSeries& a, const Series<B>& b, const std::string& var, Frac hi) {
  return mul(a, b, &var, &hi);
}

inline FracSeries operator*(const FracSeries& a, const FracSeries& b) { return mul(a, b); }

template <class C>
Series<C> derivative(const Series<C>& s, const std::string& var) {
  std::size_t i = s.var_index(var);
  Series<C> r(s.vars(), s.grassmann());
  for (const auto& [k, c] : s.terms()) {
    if (k.e[i] == Frac(0)) continue;
    ExpKey nk = k;
    nk.e[i] = k.e[i] - Frac(1);
    r.add_term(nk, Scalar(k.e[i].rat()) * c);
  }
  return r;
}

/// Coefficient of var^{-1}, with var removed.
template <class C>
Series<C> residue(const Series<C>& s, const std::string& var) {
  return s.coefficient_of(var, Frac(-1));
}

/// var -> var^alpha. With alpha = 1/k this is the principal-branch rule
/// (x^k)^{1/k} = x.
template <class C>
Series<C> substitute_power(const Series<C>& s, const std::string& var, Frac alpha) {
  std::size_t i = s.var_index(var);
  Series<C> r(s.vars(), s.grassmann());
  for (const auto& [k, c] : s.terms()) {
    ExpKey nk = k;
    nk.e[i] = k.e[i] * alpha;
    r.add_term(nk, c);
  }
  return r;
}

/// x^{1/k} -> eta^j x^{1/k}: the coefficient of x^q picks up eta^{j k q}.
template <class C>
Series<C> substitute_eta(const Series<C>& s, const std::string& var, int k, long long j) {
  std::size_t i = s.var_index(var);
  Series<C> r(s.vars(), s.grassmann());
  for (const auto& [key, c] : s.terms()) {
    Frac kq = key.e[i] * Frac(k);
    if (!kq.is_integer())
      throw CompositionDomainError("exponent " + key.e[i].to_string() + " not in (1/" +
                                   std::to_string(k) + ")Z");
    r.add_term(key, Scalar::eta(k, j * kq.num()) * c);
  }
  return r;
}

/// The single term of a monomial series.
inline std::pair<ExpKey, Scalar> leading_monomial(const FracSeries& s, const std::string& var) {
  auto lo = s.min_exponent(var);
  if (!lo) throw CompositionDomainError("zero series has no leading term");
  std::size_t i = s.var_index(var);
  std::optional<std::pair<ExpKey, Scalar>> found;
  for (const auto& [k, c] : s.terms()) {
    if (k.e[i] != *lo) continue;
    if (found) throw CompositionDomainError("leading part in " + var + " is not a monomial");
    found.emplace(k, c);
  }
  return *found;
}

/// Power of a monomial term c*m with exponent e. A fractional power needs c = 1.
inline FracSeries monomial_power(const std::vector<std::string>& vars, const ExpKey& k,
                                 const Scalar& c, Frac e) {
  if (k.phi) throw CompositionDomainError("power of an odd monomial");
  Scalar ce;
  if (e.is_integer())
    ce = c.pow(e.num());
  else if (c == Scalar(1))
    ce = Scalar(1);
  else if (c.is_rational() && c.rational() > 0) {
    // Exact rational roots only.
    Rat q = c.rational();
    mpz_class n = q.get_num(), d = q.get_den();
    Rat qe;
    bool ok = true;
    auto root = [&](const mpz_class& x, long long r, mpz_class& out) {
      mpz_root(out.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(r));
      mpz_class back;
      mpz_pow_ui(back.get_mpz_t(), out.get_mpz_t(), static_cast<unsigned long>(r));
      return back == x;
    };
    mpz_class rn, rd;
    ok = root(n, e.den(), rn) && root(d, e.den(), rd);
    if (!ok) throw CompositionDomainError("no exact root of " + c.to_string());
    qe = Rat(rn, rd);
    qe.canonicalize();
    ce = Scalar(qe).pow(e.num());
  } else {
    throw CompositionDomainError("fractional power of non-unit coefficient " + c.to_string());
  }
  std::vector<Frac> ex(k.e.size());
  for (std::size_t i = 0; i < ex.size(); ++i) ex[i] = k.e[i] * e;
  return FracSeries::monomial(vars, ex, ce);
}

/// R^e for a series whose leading part in var is a monomial L: R = L(1+h)
/// and R^e = L^e sum_j C(e,j) h^j. Terms whose var-exponent exceeds
/// e*lead + order are dropped; everything kept is exact.
inline FracSeries pow_series(const FracSeries& R, Frac e, const std::string& var, Frac order) {
  auto [lk, lc] = leading_monomial(R, var);
  const auto& vars = R.vars();
  FracSeries Linv = monomial_power(vars, lk, lc, Frac(-1));
  FracSeries h = mul(Linv, R) - FracSeries::constant(vars, Scalar(1));
  FracSeries Le = monomial_power(vars, lk, lc, e);
  if (auto hm = h.min_exponent(var); hm && *hm <= Frac(0))
    throw CompositionDomainError("series tail does not raise the order");
  FracSeries acc = FracSeries::constant(vars, Scalar(1));
  FracSeries hp = acc;
  for (long long j = 1;; ++j) {
    hp = mul_trunc(h, hp, var, order);
    if (hp.is_zero()) break;
    Rat b = binom(e, j);
    if (b == 0) break;
    acc += hp.scaled(Scalar(b));
  }
  FracSeries out = mul(Le, acc);
  out.set_meta("power " + e.to_string() + " truncated at relative order " + order.to_string() +
               " in " + var);
  return out;
}

/// Formal composition: each var^e in s (integer e, or fractional e with a
/// unit-leading replacement) is replaced by R^e truncated at relative order.
/// The result is truncated at absolute order `hi` in trunc_var.
template <class C>
Series<C> substitute(const Series<C>& s, const std::string& var, const FracSeries& R,
                     const std::string& trunc_var, Frac order, Frac hi) {
  if (!R.has_var(trunc_var)) throw CompositionDomainError("replacement lacks " + trunc_var);
  auto lead = R.min_exponent(trunc_var);
  if (!lead) throw CompositionDomainError("replacement is zero");
  std::size_t vi = s.var_index(var);
  auto lo = s.min_exponent(var);
  if (lo && *lo < Frac(0) && *lead <= Frac(0))
    throw CompositionDomainError("composition not well defined");
  // Group by exponent of var.
  std::map<Frac, Series<C>> groups;
  std::vector<std::string> rest;
  for (std::size_t j = 0; j < s.vars().size(); ++j)
    if (j != vi) rest.push_back(s.vars()[j]);
  for (const auto& [k, c] : s.terms()) {
    auto& g = groups.try_emplace(k.e[vi], Series<C>(rest, s.grassmann())).first->second;
    ExpKey nk{{}, k.phi};
    for (std::size_t j = 0; j < k.e.size(); ++j)
      if (j != vi) nk.e.push_back(k.e[j]);
    g.add_term(nk, c);
  }
  auto vars = Series<C>::union_vars(rest, R.vars());
  Series<C> out(vars, s.grassmann());
  for (const auto& [e, g] : groups) {
    FracSeries p = pow_series(R, e, trunc_var, order);
    out += mul(p, g, &trunc_var, &hi);
  }
  return out;
}

/// Truncated generalized binomial expansion of (v1 + sign*v2)^e in
/// nonnegative powers of v2. An empty v1 stands for the constant 1.
inline FracSeries binom_expand(const std::vector<std::string>& vars, const std::string& v1,
                               int sign, const std::string& v2, Frac e, long long order) {
  FracSeries out(vars);
  std::size_t i2 = out.var_index(v2);
  std::optional<std::size_t> i1;
  if (!v1.empty()) i1 = out.var_index(v1);
  bool exact = false;
  for (long long j = 0; j <= order; ++j) {
    Rat b = binom(e, j);
    if (b == 0) {
      exact = true;
      break;
    }
    if (sign < 0 && j % 2 == 1) b = -b;
    ExpKey k{std::vector<Frac>(vars.size(), Frac(0)), false};
    if (i1) k.e[*i1] = e - Frac(j);
    k.e[i2] = Frac(j);
    out.add_term(k, Scalar(b));
  }
  if (e.is_integer() && e.num() >= 0 && order >= e.num()) exact = true;
  out.set_meta(exact ? "exact" : "binomial truncated at order " + std::to_string(order));
  return out;
}

/// Description of delta(eta^j ((lead + sign*second)/(den_sign*den))^root).
struct DeltaArg {
  std::string lead;
  int sign = -1;
  std::string second;  // may be empty
  std::string den;
  int den_sign = 1;
  Frac root = Frac(1);
  int eta_ring = 0;
  long long eta_power = 0;
};

/// sum_{n=nlo}^{nhi} eta^{jn} (lead + sign*second)^{n*root+shift} (den_sign*den)^{-(n*root+shift)},
/// each binomial expanded to binom_order in the second variable.
inline FracSeries delta_truncated(const std::vector<std::string>& vars, const DeltaArg& arg,
                                  Frac shift, long long nlo, long long nhi,
                                  long long binom_order) {
  FracSeries out(vars);
  std::size_t id = out.var_index(arg.den);
  for (long long n = nlo; n <= nhi; ++n) {
    Frac p = Frac(n) * arg.root + shift;
    FracSeries num = arg.second.empty()
                         ? FracSeries::monomial(vars, [&] {
                             std::vector<Frac> e(vars.size(), Frac(0));
                             e[out.var_index(arg.lead)] = p;
                             return e;
                           }(), Scalar(1))
                         : binom_expand(vars, arg.lead, arg.sign, arg.second, p, binom_order);
    std::vector<Frac> e(vars.size(), Frac(0));
    e[id] = -p;
    Scalar c(1);
    if (arg.den_sign < 0) {
      if (!p.is_integer()) throw CompositionDomainError("fractional power of a negated variable");
      if (p.num() % 2 != 0) c = Scalar(-1);
    }
    if (arg.eta_ring > 0) c = c * Scalar::eta(arg.eta_ring, arg.eta_power * n);
    out += mul(FracSeries::monomial(vars, e, c), num);
  }
  out.set_meta("delta truncated to n in [" + std::to_string(nlo) + ", " + std::to_string(nhi) +
               "], binomial order " + std::to_string(binom_order));
  return out;
}

/// Compares a and b on the window; reports the first differing coefficient.
template <class C>
CheckReport assert_equal_on_window(const Series<C>& a0, const Series<C>& b0, const Window& w,
                                   std::string identity = "", std::string anchor = "") {
  auto vars = Series<C>::union_vars(a0.vars(), b0.vars());
  Series<C> a = a0.aligned(vars), b = b0.aligned(vars);
  CheckReport rep;
  rep.identity = std::move(identity);
  rep.anchor = std::move(anchor);
  rep.window = w.to_string();
  Series<C> diff = a - b;
  for (const auto& [k, c] : a.terms())
    if (w.contains(vars, k)) ++rep.compared;
  for (const auto& [k, c] : diff.terms()) {
    if (!w.contains(vars, k)) continue;
    rep.pass = false;
    std::string mono = k.phi ? "phi" : "";
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (!mono.empty()) mono += "*";
      mono += vars[i] + "^" + k.e[i].to_string();
    }
    rep.first_mismatch = mono + ": " + to_text(a.coeff(k)) + " vs " + to_text(b.coeff(k));
    break;
  }
  return rep;
}

/// The basic delta-function identities at shift r and root 1/k, truncated
/// to |n| <= N with binomial order M, compared on their trusted windows.
inline std::vector<CheckReport> delta_identity_checks(int k, Frac r, long long N, long long M) {
  const std::vector<std::string> v{"x0", "x1", "x2"};
  auto mono = [&](Frac e0, Frac e1, Frac e2) {
    return FracSeries::monomial(v, {e0, e1, e2}, Scalar(1));
  };
  std::vector<CheckReport> out;
  {
    // x2^{-1}((x1-x0)/x2)^r delta((x1-x0)/x2) = x1^{-1}((x2+x0)/x1)^{-r} delta((x2+x0)/x1)
    FracSeries lhs = mul(mono(0, 0, -1), delta_truncated(v, {"x1", -1, "x0", "x2"}, r, -N, N, M));
    FracSeries rhs = mul(mono(0, -1, 0), delta_truncated(v, {"x2", 1, "x0", "x1"}, -r, -N, N, M));
    Window w;
    w.set("x0", Frac(0), Frac(M)).set("x2", Frac(-N - 1) - r, Frac(N - 1) - r);
    w.set("x1", Frac(-N - 1) + r, Frac(N - 1) + r);
    out.push_back(assert_equal_on_window(
        lhs, rhs, w, "delta.shifted_swap(r=" + r.to_string() + ")",
        "x2^{-1}((x1-x0)/x2)^r delta((x1-x0)/x2) = x1^{-1}((x2+x0)/x1)^{-r} delta((x2+x0)/x1)"));
  }
  {
    // sum_p ((x1-x0)/x2)^{p/k} x2^{-1} delta((x1-x0)/x2) = x2^{-1} delta((x1-x0)^{1/k}/x2^{1/k})
    FracSeries lhs(v);
    for (int p = 0; p < k; ++p)
      lhs += mul(mono(0, 0, -1), delta_truncated(v, {"x1", -1, "x0", "x2"}, Frac(p, k), -N, N, M));
    DeltaArg root{"x1", -1, "x0", "x2", 1, Frac(1, k)};
    FracSeries rhs = mul(mono(0, 0, -1), delta_truncated(v, root, Frac(0), -k * N, k * N, M));
    Window w;
    w.set("x0", Frac(0), Frac(M)).set("x2", Frac(-N - 1), Frac(N - 2));
    out.push_back(assert_equal_on_window(
        lhs, rhs, w, "delta.root_sum(k=" + std::to_string(k) + ")",
        "sum_{p=0}^{k-1} ((x1-x0)/x2)^{p/k} x2^{-1} delta((x1-x0)/x2) = x2^{-1} "
        "delta((x1-x0)^{1/k}/x2^{1/k})"));
  }
  {
    // x2^{-1} delta((x1-x0)^{1/k}/x2^{1/k}) = x1^{-1} delta((x2+x0)^{1/k}/x1^{1/k})
    DeltaArg a{"x1", -1, "x0", "x2", 1, Frac(1, k)};
    DeltaArg b{"x2", 1, "x0", "x1", 1, Frac(1, k)};
    FracSeries lhs = mul(mono(0, 0, -1), delta_truncated(v, a, Frac(0), -k * N, k * N, M));
    FracSeries rhs = mul(mono(0, -1, 0), delta_truncated(v, b, Frac(0), -k * N, k * N, M));
    Window w;
    w.set("x0", Frac(0), Frac(M)).set("x1", Frac(-N - 1), Frac(N - 1));
    w.set("x2", Frac(-N - 1), Frac(N - 1));
    out.push_back(assert_equal_on_window(
        lhs, rhs, w, "delta.root_swap(k=" + std::to_string(k) + ")",
        "x2^{-1} delta((x1-x0)^{1/k}/x2^{1/k}) = x1^{-1} delta((x2+x0)^{1/k}/x1^{1/k})"));
  }
  {
    // x0^{-1} delta((x1-x2)/x0) - x0^{-1} delta((x2-x1)/(-x0)) = x2^{-1} delta((x1-x0)/x2)
    FracSeries t1 = mul(mono(-1, 0, 0), delta_truncated(v, {"x1", -1, "x2", "x0"}, Frac(0), -N, N, M));
    FracSeries t2 =
        mul(mono(-1, 0, 0), delta_truncated(v, {"x2", -1, "x1", "x0", -1}, Frac(0), -N, N, M));
    FracSeries rhs = mul(mono(0, 0, -1), delta_truncated(v, {"x1", -1, "x0", "x2"}, Frac(0), -N, N, M));
    long long top = std::min(N - 1, M);
    Window w;
    w.set("x0", Frac(-N - 1), Frac(top)).set("x1", std::nullopt, Frac(M));
    w.set("x2", Frac(-N - 1), Frac(top));
    // x1 is bounded below on the support by homogeneity: a = -1 - b - c.
    w.from("x1", Frac(-1 - 2 * top));
    out.push_back(assert_equal_on_window(
        t1 - t2, rhs, w, "delta.three_term",
        "x0^{-1} delta((x1-x2)/x0) - x0^{-1} delta((x2-x1)/(-x0)) = x2^{-1} delta((x1-x0)/x2)"));
  }
  return out;
}

}  // namespace permorb
