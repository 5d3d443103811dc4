#pragma once

// Small exact rationals for exponents and mode indices.

#include <compare>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>

#include "permorb/exactnum.hpp"

namespace permorb {

class Frac {
 public:
  constexpr Frac() = default;
  constexpr Frac(long long n) : num_(n), den_(1) {}
  Frac(long long n, long long d) : num_(n), den_(d) {
    if (d == 0) throw std::domain_error("zero denominator");
    normalize();
  }

  long long num() const { return num_; }
  long long den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  long long floor() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }
  long long ceil() const { return -Frac(-num_, den_).floor(); }
  Rat rat() const { return make_rat(num_, den_); }

  Frac operator-() const { return Frac(-num_, den_); }
  friend Frac operator+(const Frac& a, const Frac& b) {
    long long g = std::gcd(a.den_, b.den_);
    return Frac(a.num_ * (b.den_ / g) + b.num_ * (a.den_ / g), a.den_ / g * b.den_);
  }
  friend Frac operator-(const Frac& a, const Frac& b) { return a + (-b); }
  friend Frac operator*(const Frac& a, const Frac& b) {
    long long g1 = std::gcd(std::llabs(a.num_), b.den_);
    long long g2 = std::gcd(std::llabs(b.num_), a.den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    return Frac((a.num_ / g1) * (b.num_ / g2), (a.den_ / g2) * (b.den_ / g1));
  }
  friend Frac operator/(const Frac& a, const Frac& b) {
    if (b.num_ == 0) throw std::domain_error("division by zero exponent");
    return a * Frac(b.den_, b.num_);
  }
  Frac& operator+=(const Frac& o) { return *this = *this + o; }
  Frac& operator-=(const Frac& o) { return *this = *this - o; }

  friend bool operator==(const Frac& a, const Frac& b) = default;
  friend std::strong_ordering operator<=>(const Frac& a, const Frac& b) {
    __int128 l = static_cast<__int128>(a.num_) * b.den_;
    __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l < r ? std::strong_ordering::less
                 : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  std::string to_string() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  void normalize() {
    if (den_ < 0) {
      den_ = -den_;
      num_ = -num_;
    }
    long long g = std::gcd(std::llabs(num_), den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  long long num_ = 0;
  long long den_ = 1;
};

/// Generalized binomial coefficient C(e, j) = e(e-1)...(e-j+1)/j!.
inline Rat binom(const Rat& e, long long j) {
  if (j < 0) return Rat(0);
  Rat r(1);
  for (long i = 0; i < j; ++i) {
    r *= (e - i);
    r /= (i + 1);
  }
  return r;
}

inline Rat binom(const Frac& e, long long j) { return binom(e.rat(), j); }

}  // namespace permorb
