#pragma once

// The NS free fermion V_fer (c = 1/2) and its tensor powers.
//
// Mode indexing follows Y(v,x) = sum_n v_n x^{-n-1}. The generator
// psi = psi_{-1}|0> has modes psi_n = b_{n+1/2} in half-integer labels, with
// {psi_a, psi_b} = delta_{a+b+1,0} and psi_n|0> = 0 for n >= 0.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "permorb/fseries.hpp"
#include "permorb/lincomb.hpp"

namespace permorb {

/// psi_{n_1} ... psi_{n_r} |0> with n_1 < ... < n_r < 0.
struct FermionState {
  std::vector<int> modes;

  friend bool operator==(const FermionState&, const FermionState&) = default;
  friend auto operator<=>(const FermionState&, const FermionState&) = default;

  /// Twice the conformal weight.
  int twice_weight() const {
    int w = 0;
    for (int n : modes) w += -2 * n - 1;
    return w;
  }
  Frac weight() const { return Frac(twice_weight(), 2); }
  int parity() const { return static_cast<int>(modes.size() % 2); }
  bool is_vacuum() const { return modes.empty(); }

  std::string to_string() const {
    std::string out;
    for (int n : modes) out += "psi(" + Frac(2 * n + 1, 2).to_string() + ")";
    return out + "|0>";
  }
};

using FermionVector = LinComb<FermionState>;

/// Parity of a vector; throws if the vector mixes parities.
template <class B>
int parity_of(const LinComb<B>& v) {
  int p = -1;
  for (const auto& [b, c] : v.terms()) {
    if (p < 0) p = b.parity();
    if (b.parity() != p) throw std::invalid_argument("vector is not parity-homogeneous");
  }
  return p < 0 ? 0 : p;
}

/// Twice the weight of a weight-homogeneous vector.
template <class B>
int twice_weight_of(const LinComb<B>& v) {
  int w = -1;
  for (const auto& [b, c] : v.terms()) {
    if (w < 0) w = b.twice_weight();
    if (b.twice_weight() != w) throw std::invalid_argument("vector is not weight-homogeneous");
  }
  return w < 0 ? 0 : w;
}

/// Splits a vector into weight-homogeneous parts keyed by twice the weight.
template <class B>
std::map<int, LinComb<B>> weight_components(const LinComb<B>& v) {
  std::map<int, LinComb<B>> out;
  for (const auto& [b, c] : v.terms()) out[b.twice_weight()].add(b, c);
  return out;
}

/// Applies the Clifford generator psi_r.
inline FermionVector clifford_apply(int r, const FermionState& s) {
  FermionVector out;
  if (r >= 0) {
    int target = -r - 1;
    auto it = std::find(s.modes.begin(), s.modes.end(), target);
    if (it == s.modes.end()) return out;
    long pos = it - s.modes.begin();
    FermionState t = s;
    t.modes.erase(t.modes.begin() + pos);
    out.add(t, Scalar(pos % 2 == 0 ? 1 : -1));
    return out;
  }
  auto it = std::lower_bound(s.modes.begin(), s.modes.end(), r);
  if (it != s.modes.end() && *it == r) return out;
  long pos = it - s.modes.begin();
  FermionState t = s;
  t.modes.insert(t.modes.begin() + pos, r);
  out.add(t, Scalar(pos % 2 == 0 ? 1 : -1));
  return out;
}

inline FermionVector clifford_apply(int r, const FermionVector& v) {
  FermionVector out;
  for (const auto& [b, c] : v.terms()) out += c * clifford_apply(r, b);
  return out;
}

/// Vertex operators of V_fer acting on V_fer, memoized per instance. An
/// instance must not be shared between threads.
class FreeFermion {
 public:
  static Rat central_charge() { return make_rat(1, 2); }
  static FermionState vac() { return {}; }
  static FermionState psi() { return {{-1}}; }
  static FermionVector vac_vector() { return FermionVector(vac()); }
  static FermionVector psi_vector() { return FermionVector(psi()); }
  static FermionVector omega() { return FermionVector(FermionState{{-2, -1}}, Scalar(make_rat(1, 2))); }

  /// a_n b for basis states.
  const FermionVector& mode(const FermionState& a, int n, const FermionState& b) {
    auto key = std::make_tuple(a, n, b);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    FermionVector r = compute_mode(a, n, b);
    return cache_.emplace(std::move(key), std::move(r)).first->second;
  }

  FermionVector mode(const FermionVector& a, int n, const FermionVector& b) {
    FermionVector out;
    for (const auto& [sa, ca] : a.terms())
      for (const auto& [sb, cb] : b.terms()) {
        const auto& r = mode(sa, n, sb);
        if (!r.is_zero()) out += (ca * cb) * r;
      }
    return out;
  }

  /// Largest n with a_n b possibly nonzero: wt a + wt b - 1.
  static int max_mode(int twice_wa, int twice_wb) {
    return Frac(twice_wa + twice_wb - 2, 2).floor();
  }

  /// L(n) = omega_{n+1}.
  FermionVector L(int n, const FermionVector& v) { return mode(omega(), n + 1, v); }

  /// Y(v,x)w restricted to exponents of x in [lo, hi].
  Series<FermionVector> vertex_op(const FermionVector& v, const FermionVector& w, Frac lo,
                                  Frac hi) {
    Series<FermionVector> out({"x"});
    for (long long e = lo.ceil(); e <= hi.floor(); ++e) {
      int n = static_cast<int>(-e - 1);
      out.add_term({{Frac(e)}, false}, mode(v, n, w));
    }
    return out;
  }

  /// All basis states of weight <= twice_max / 2.
  static std::vector<FermionState> basis(int twice_max) {
    std::vector<FermionState> out;
    std::vector<int> cur;
    // modes chosen in decreasing order of |n|, stored increasing.
    std::function<void(int, int)> rec = [&](int min_mode, int budget) {
      FermionState s;
      s.modes = cur;
      std::sort(s.modes.begin(), s.modes.end());
      out.push_back(s);
      for (int n = min_mode; n < 0; ++n) {
        int cost = -2 * n - 1;
        if (cost > budget) continue;
        cur.push_back(n);
        rec(n + 1, budget - cost);
        cur.pop_back();
      }
    };
    rec(-(twice_max + 1) / 2 - 1, twice_max);
    std::sort(out.begin(), out.end(), [](const FermionState& a, const FermionState& b) {
      return std::make_pair(a.twice_weight(), a) < std::make_pair(b.twice_weight(), b);
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::size_t cache_size() const { return cache_.size(); }

 private:
  FermionVector compute_mode(const FermionState& a, int n, const FermionState& b) {
    FermionVector out;
    if (a.is_vacuum()) {
      if (n == -1) out.add(b, Scalar(1));
      return out;
    }
    if (n > max_mode(a.twice_weight(), b.twice_weight())) return out;
    // a = psi_p a', expanded by the iterate formula in the generator field.
    int p = a.modes.front();
    FermionState rest;
    rest.modes.assign(a.modes.begin() + 1, a.modes.end());
    const int eps = rest.parity();
    const int tw_rest = rest.twice_weight(), tw_b = b.twice_weight();
    const Scalar sgn2((p % 2 == 0 ? -1 : 1) * (eps ? -1 : 1));  // -(-1)^p (-1)^{|a'|}
    // First part: psi_{p-i} (a'_{n+i} b), needs n+i <= wt a' + wt b - 1.
    for (int i = 0; n + i <= max_mode(tw_rest, tw_b); ++i) {
      Rat c = binom(Rat(p), i);
      if (i % 2) c = -c;
      const FermionVector& inner = mode(rest, n + i, b);
      if (inner.is_zero()) continue;
      out += Scalar(c) * clifford_apply(p - i, inner);
    }
    // Second part: a'_{p+n-i} (psi_i b), needs psi_i b != 0, i.e. 2i+1 <= 2 wt b.
    for (int i = 0; 2 * i + 1 <= tw_b; ++i) {
      Rat c = binom(Rat(p), i);
      if (i % 2) c = -c;
      FermionVector inner = clifford_apply(i, b);
      if (inner.is_zero()) continue;
      FermionVector r;
      for (const auto& [s, cs] : inner.terms()) r += cs * mode(rest, p + n - i, s);
      out += (Scalar(c) * sgn2) * r;
    }
    return out;
  }

  std::map<std::tuple<FermionState, int, FermionState>, FermionVector> cache_;
};

/// v_1 (x) ... (x) v_k.
struct TensorState {
  std::vector<FermionState> slots;

  friend bool operator==(const TensorState&, const TensorState&) = default;
  friend auto operator<=>(const TensorState&, const TensorState&) = default;

  int twice_weight() const {
    int w = 0;
    for (const auto& s : slots) w += s.twice_weight();
    return w;
  }
  Frac weight() const { return Frac(twice_weight(), 2); }
  int parity() const {
    int p = 0;
    for (const auto& s : slots) p += s.parity();
    return p % 2;
  }
  bool is_vacuum() const {
    return std::all_of(slots.begin(), slots.end(), [](const auto& s) { return s.is_vacuum(); });
  }
  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (i) out += " (x) ";
      out += slots[i].to_string();
    }
    return "[" + out + "]";
  }
};

using TensorVector = LinComb<TensorState>;

/// V_fer^{(x)k} with the Koszul-signed tensor vertex operator.
class TensorPower {
 public:
  TensorPower(FreeFermion& V, int k) : V_(V), k_(k) {
    if (k < 1) throw std::invalid_argument("k must be positive");
  }

  int k() const { return k_; }
  FreeFermion& base() { return V_; }

  /// a placed in slot s (1-based), vacuum elsewhere.
  TensorState slot(int s, const FermionState& a) const {
    TensorState t;
    t.slots.assign(k_, FermionState{});
    t.slots.at(s - 1) = a;
    return t;
  }
  TensorVector slot(int s, const FermionVector& a) const {
    TensorVector out;
    for (const auto& [b, c] : a.terms()) out.add(slot(s, b), c);
    return out;
  }
  TensorState vac() const { return TensorState{std::vector<FermionState>(k_)}; }

  /// sum_j omega^j.
  TensorVector omega() const {
    TensorVector out;
    for (int s = 1; s <= k_; ++s) out += slot(s, FreeFermion::omega());
    return out;
  }

  /// a_n b with Y(a_1 (x)...(x) a_k, x) = (-1)^{sum_{t<s}|a_s||b_t|} prod Y(a_t, x) b_t.
  TensorVector mode(const TensorState& a, int n, const TensorState& b) {
    int sign = 0;
    for (int s = 0; s < k_; ++s)
      for (int t = 0; t < s; ++t) sign += a.slots[s].parity() * b.slots[t].parity();
    // Each factor Y(a_t,x)b_t has x-exponents >= -(wt a_t + wt b_t).
    std::vector<int> lo(k_);
    int lo_sum = 0;
    for (int t = 0; t < k_; ++t) {
      lo[t] = a.slots[t].is_vacuum() ? 0 : -(FreeFermion::max_mode(a.slots[t].twice_weight(),
                                                                    b.slots[t].twice_weight()) + 1);
      lo_sum += lo[t];
    }
    const int target = -n - 1;
    TensorVector out;
    if (target < lo_sum) return out;
    std::vector<int> e(k_);
    std::function<void(int, int, TensorVector)> rec = [&](int t, int remaining, TensorVector acc) {
      if (acc.is_zero()) return;
      if (t == k_) {
        if (remaining == 0) out += acc;
        return;
      }
      int rest_lo = 0;
      for (int u = t + 1; u < k_; ++u) rest_lo += lo[u];
      int emin = lo[t], emax = remaining - rest_lo;
      if (a.slots[t].is_vacuum()) emin = emax = 0;
      for (int et = emin; et <= emax; ++et) {
        FermionVector f;
        if (a.slots[t].is_vacuum()) {
          if (et != 0) continue;
          f = FermionVector(b.slots[t]);
        } else {
          f = V_.mode(a.slots[t], -et - 1, b.slots[t]);
        }
        if (f.is_zero()) continue;
        TensorVector next;
        for (const auto& [ts, tc] : acc.terms())
          for (const auto& [fs, fc] : f.terms()) {
            TensorState ns = ts;
            ns.slots[t] = fs;
            next.add(ns, tc * fc);
          }
        rec(t + 1, remaining - et, next);
      }
    };
    TensorVector seed(b, Scalar(sign % 2 ? -1 : 1));
    rec(0, target, seed);
    return out;
  }

  TensorVector mode(const TensorVector& a, int n, const TensorVector& b) {
    TensorVector out;
    for (const auto& [sa, ca] : a.terms())
      for (const auto& [sb, cb] : b.terms()) out += (ca * cb) * mode(sa, n, sb);
    return out;
  }

  /// Result slot i holds input slot sigma[i] (0-based), with the Koszul sign
  /// of the reordering. The k-cycle g is sigma = (1, 2, ..., k-1, 0).
  TensorVector permute(const std::vector<int>& sigma, const TensorVector& w) const {
    if (static_cast<int>(sigma.size()) != k_) throw std::invalid_argument("permutation size");
    TensorVector out;
    for (const auto& [b, c] : w.terms()) {
      TensorState t;
      int sign = 0;
      for (int i = 0; i < k_; ++i) {
        t.slots.push_back(b.slots[sigma[i]]);
        for (int j = i + 1; j < k_; ++j)
          if (sigma[i] > sigma[j]) sign += b.slots[sigma[i]].parity() * b.slots[sigma[j]].parity();
      }
      out.add(t, sign % 2 ? -c : c);
    }
    return out;
  }

  std::vector<int> cycle() const {
    std::vector<int> s(k_);
    for (int i = 0; i < k_; ++i) s[i] = (i + 1) % k_;
    return s;
  }

  /// g^power w for the cycle g = (1 2 ... k); g v^j = v^{j-1}.
  TensorVector g(const TensorVector& w, int power = 1) const {
    power = ((power % k_) + k_) % k_;
    TensorVector out = w;
    for (int i = 0; i < power; ++i) out = permute(cycle(), out);
    return out;
  }

  /// (1/k) sum_i eta^{-ij} g^i w.
  TensorVector eigenprojection(const TensorVector& w, int j) const {
    TensorVector out;
    for (int i = 0; i < k_; ++i)
      out += (Scalar::eta(k_, -static_cast<long long>(i) * j) * Scalar(make_rat(1, k_))) * g(w, i);
    return out;
  }

  /// Basis states of total weight <= twice_max / 2.
  std::vector<TensorState> basis(int twice_max) const {
    auto single = FreeFermion::basis(twice_max);
    std::vector<TensorState> out;
    std::function<void(int, int, TensorState)> rec = [&](int t, int budget, TensorState cur) {
      if (t == k_) {
        out.push_back(cur);
        return;
      }
      for (const auto& s : single) {
        if (s.twice_weight() > budget) continue;
        TensorState nx = cur;
        nx.slots.push_back(s);
        rec(t + 1, budget - s.twice_weight(), nx);
      }
    };
    rec(0, twice_max, TensorState{});
    std::sort(out.begin(), out.end(), [](const TensorState& a, const TensorState& b) {
      return std::make_pair(a.twice_weight(), a) < std::make_pair(b.twice_weight(), b);
    });
    return out;
  }

 private:
  FreeFermion& V_;
  int k_;
};

}  // namespace permorb
