#pragma once

// Exact scalars: rationals and the ring Q[t,s]/(Phi_k(t), s^2 - k).

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace permorb {

using Rat = mpq_class;

class RingMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NotAUnit : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline Rat make_rat(long long num, long long den = 1) {
  Rat q(static_cast<long>(num), static_cast<long>(den));
  q.canonicalize();
  return q;
}

inline std::string rat_text(const Rat& q) { return q.get_str(); }

namespace detail {

// Reduction data for one value of k.
struct CycloData {
  int k = 1;
  int deg = 1;
  int sqrt_root = -1;  // integer square root of k, or -1
  // tpow[m] = t^m reduced, for 0 <= m < 2*deg + k, as dense integer coefficients.
  std::vector<std::vector<long long>> tpow;
};

inline std::vector<long long> poly_divide_exact(std::vector<long long> num,
                                                const std::vector<long long>& den) {
  // den is monic; coefficients low to high.
  int dn = static_cast<int>(den.size()) - 1;
  int nn = static_cast<int>(num.size()) - 1;
  std::vector<long long> q(std::max(nn - dn + 1, 1), 0);
  for (int i = nn; i >= dn; --i) {
    long long c = num[i];
    q[i - dn] = c;
    for (int j = 0; j <= dn; ++j) num[i - dn + j] -= c * den[j];
  }
  return q;
}

inline std::vector<long long> cyclotomic_poly_uncached(int k) {
  std::vector<long long> p(k + 1, 0);
  p[0] = -1;
  p[k] = 1;
  for (int d = 1; d < k; ++d)
    if (k % d == 0) p = poly_divide_exact(p, cyclotomic_poly_uncached(d));
  return p;
}

inline const CycloData& cyclo(int k) {
  static std::map<int, CycloData> cache;
  static std::mutex mu;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
  }
  const auto phi = cyclotomic_poly_uncached(k);
  CycloData d;
  d.k = k;
  d.deg = static_cast<int>(phi.size()) - 1;
  for (int r = 1; r * r <= k; ++r)
    if (r * r == k) d.sqrt_root = r;
  int span = 2 * d.deg + k;
  d.tpow.assign(span, std::vector<long long>(d.deg, 0));
  std::vector<long long> one(d.deg, 0);
  one[0] = 1;
  d.tpow[0] = one;
  std::vector<long long> v = one;
  for (int m = 1; m < span; ++m) {
    // multiply v by t, reduce using t^deg = -sum phi[i] t^i
    std::vector<long long> w(d.deg, 0);
    long long top = v[d.deg - 1];
    for (int i = d.deg - 1; i >= 1; --i) w[i] = v[i - 1];
    w[0] = 0;
    for (int i = 0; i < d.deg; ++i) w[i] -= top * phi[i];
    v = w;
    d.tpow[m] = v;
  }
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(k, std::move(d)).first->second;
}

}  // namespace detail

/// Element of Q[t,s]/(Phi_k(t), s^2 - k), with t a primitive k-th root of
/// unity and s the square root of k. A value with ring() == 0 is a plain
/// rational and combines with any ring.
class Scalar {
 public:
  Scalar() = default;
  Scalar(int v) : Scalar(Rat(v)) {}
  Scalar(long v) : Scalar(Rat(v)) {}
  Scalar(long long v) : Scalar(make_rat(v)) {}
  Scalar(const Rat& q) {
    if (q != 0) terms_.emplace_back(0, q);
  }

  static Scalar sqrt_k(int k) {
    check_k(k);
    const auto& d = detail::cyclo(k);
    Scalar r;
    r.k_ = k;
    if (d.sqrt_root > 0)
      r.terms_.emplace_back(0, Rat(d.sqrt_root));
    else
      r.terms_.emplace_back(d.deg, Rat(1));
    return r;
  }

  /// t^p reduced, for any integer p.
  static Scalar eta(int k, long long p = 1) {
    check_k(k);
    const auto& d = detail::cyclo(k);
    long long m = ((p % k) + k) % k;
    std::vector<Rat> dense(2 * d.deg);
    for (int i = 0; i < d.deg; ++i) dense[i] = Rat(static_cast<long>(d.tpow[m][i]));
    Scalar out;
    out.k_ = k;
    out.assign_dense(dense, d.deg);
    return out;
  }

  /// q * s^eps * t^m (reduced).
  static Scalar monomial(int k, const Rat& q, int eps, long long m) {
    Scalar r = Scalar(q) * eta(k, m);
    if (eps) r = r * sqrt_k(k);
    return r;
  }

  int ring() const { return k_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0);
  }
  Rat rational() const {
    if (!is_rational()) throw std::domain_error("scalar is not rational: " + to_string());
    return terms_.empty() ? Rat(0) : terms_[0].second;
  }
  const std::vector<std::pair<int, Rat>>& terms() const { return terms_; }

  Scalar operator-() const {
    Scalar r = *this;
    for (auto& [i, q] : r.terms_) q = -q;
    return r;
  }

  Scalar& operator+=(const Scalar& o) {
    int k = join(k_, o.k_);
    std::vector<std::pair<int, Rat>> out;
    out.reserve(terms_.size() + o.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
      if (j == o.terms_.size() || (i < terms_.size() && terms_[i].first < o.terms_[j].first)) {
        out.push_back(terms_[i++]);
      } else if (i == terms_.size() || o.terms_[j].first < terms_[i].first) {
        out.push_back(o.terms_[j++]);
      } else {
        Rat q = terms_[i].second + o.terms_[j].second;
        if (q != 0) out.emplace_back(terms_[i].first, q);
        ++i;
        ++j;
      }
    }
    terms_ = std::move(out);
    k_ = k;
    return *this;
  }
  Scalar& operator-=(const Scalar& o) { return *this += -o; }

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }

  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    int k = join(a.k_, b.k_);
    if (a.is_zero() || b.is_zero()) {
      Scalar z;
      z.k_ = k;
      return z;
    }
    if (a.is_rational()) return b.scaled(a.terms_[0].second, k);
    if (b.is_rational()) return a.scaled(b.terms_[0].second, k);
    const auto& d = detail::cyclo(k);
    std::vector<Rat> dense(2 * d.deg);
    for (const auto& [ia, qa] : a.terms_) {
      int ea = ia / d.deg, ma = ia % d.deg;
      for (const auto& [ib, qb] : b.terms_) {
        int eb = ib / d.deg, mb = ib % d.deg;
        Rat q = qa * qb;
        int e = ea + eb;
        if (e == 2) {
          q *= k;
          e = 0;
        }
        const auto& red = d.tpow[ma + mb];
        for (int i = 0; i < d.deg; ++i)
          if (red[i] != 0) dense[e * d.deg + i] += q * static_cast<long>(red[i]);
      }
    }
    Scalar out;
    out.k_ = k;
    out.assign_dense(dense, d.deg);
    return out;
  }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    if (a.k_ != 0 && b.k_ != 0 && a.k_ != b.k_)
      throw RingMismatch("comparing scalars from rings k=" + std::to_string(a.k_) +
                         " and k=" + std::to_string(b.k_));
    return a.terms_ == b.terms_;
  }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  /// Inverse of a monomial unit q*s^eps*t^m. Anything else throws NotAUnit.
  Scalar inverse() const {
    if (is_zero()) throw NotAUnit("cannot invert zero");
    if (terms_.size() != 1)
      throw NotAUnit("not a monomial unit: " + to_string());
    const auto& [idx, q] = terms_[0];
    if (idx == 0) return Scalar(Rat(1) / q);
    const auto& d = detail::cyclo(k_);
    int eps = idx / d.deg, m = idx % d.deg;
    Scalar r = monomial(k_, Rat(1) / q, 0, k_ - m);
    if (eps) r = r * monomial(k_, Rat(1, k_), 1, 0);
    return r;
  }

  Scalar pow(long long n) const {
    if (n < 0) return inverse().pow(-n);
    Scalar acc(Rat(1));
    acc.k_ = k_;
    Scalar b = *this;
    while (n > 0) {
      if (n & 1) acc = acc * b;
      b = b * b;
      n >>= 1;
    }
    return acc;
  }

  /// Canonical text, e.g. "-1/2*s*t^2 + 3*t + 1/3". Zero renders as "0".
  std::string to_string() const {
    if (terms_.empty()) return "0";
    int deg = k_ == 0 ? 1 : detail::cyclo(k_).deg;
    std::string out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      int eps = it->first / deg, m = it->first % deg;
      if (!out.empty()) out += " + ";
      std::string mono;
      if (eps) mono += "s";
      if (m > 0) {
        if (!mono.empty()) mono += "*";
        mono += m == 1 ? "t" : "t^" + std::to_string(m);
      }
      if (mono.empty())
        out += rat_text(it->second);
      else if (it->second == 1)
        out += mono;
      else
        out += rat_text(it->second) + "*" + mono;
    }
    return out;
  }

  /// Parses the grammar produced by to_string (terms joined by '+', each a
  /// product of a rational, "s" and "t^m" factors in any order).
  static Scalar parse(std::string_view text, int k) {
    std::string cleaned;
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) cleaned += c;
    if (cleaned.empty()) throw std::invalid_argument("empty scalar text");
    Scalar total;
    if (k > 0) total.k_ = k;
    std::size_t pos = 0;
    while (pos < cleaned.size()) {
      std::size_t next = cleaned.find('+', pos);
      // A '+' directly after '^' or at position 0 cannot occur in our grammar.
      std::string term = cleaned.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      total += parse_term(term, k);
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    return total;
  }

 private:
  static void check_k(int k) {
    if (k < 1) throw std::invalid_argument("ring parameter k must be >= 1");
  }

  static int join(int a, int b) {
    if (a == 0) return b;
    if (b == 0 || a == b) return a;
    throw RingMismatch("mixing scalars from rings k=" + std::to_string(a) + " and k=" +
                       std::to_string(b));
  }

  Scalar scaled(const Rat& q, int k) const {
    Scalar r;
    r.k_ = k;
    r.terms_ = terms_;
    for (auto& t : r.terms_) t.second *= q;
    return r;
  }

  void assign_dense(const std::vector<Rat>& dense, int deg) {
    terms_.clear();
    for (int i = 0; i < 2 * deg; ++i)
      if (dense[i] != 0) terms_.emplace_back(i, dense[i]);
  }

  static Scalar parse_term(const std::string& term, int k) {
    if (term.empty()) throw std::invalid_argument("malformed scalar text");
    Rat coef(1);
    int eps = 0;
    long long m = 0;
    std::size_t pos = 0;
    while (pos <= term.size()) {
      std::size_t star = term.find('*', pos);
      std::string f = term.substr(pos, star == std::string::npos ? std::string::npos : star - pos);
      if (f == "s") {
        eps += 1;
      } else if (f == "t") {
        m += 1;
      } else if (f.rfind("t^", 0) == 0) {
        m += std::stoll(f.substr(2));
      } else {
        Rat q;
        if (q.set_str(f, 10) != 0) throw std::invalid_argument("malformed rational: " + f);
        q.canonicalize();
        coef *= q;
      }
      if (star == std::string::npos) break;
      pos = star + 1;
    }
    if ((eps || m) && k < 1) throw std::invalid_argument("s or t requires a ring parameter");
    if (!eps && !m) return Scalar(coef);
    Scalar r = monomial(k, coef, 0, m);
    for (int i = 0; i < eps; ++i) r = r * sqrt_k(k);
    return r;
  }

  int k_ = 0;
  std::vector<std::pair<int, Rat>> terms_;  // (eps*deg + m, coefficient), sorted
};

inline std::string to_text(const Scalar& s) { return s.to_string(); }

}  // namespace permorb
