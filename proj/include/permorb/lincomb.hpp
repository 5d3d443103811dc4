#pragma once

// Finite linear combinations of basis elements with Scalar coefficients.

#include <map>
#include <ostream>
#include <string>
#include <utility>

#include "permorb/exactnum.hpp"

namespace permorb {

template <class B>
class LinComb {
 public:
  using Basis = B;

  LinComb() = default;
  explicit LinComb(const B& b, const Scalar& c = Scalar(1)) { add(b, c); }

  const std::map<B, Scalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Scalar coeff(const B& b) const {
    auto it = terms_.find(b);
    return it == terms_.end() ? Scalar() : it->second;
  }

  void add(const B& b, const Scalar& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(b, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  LinComb& operator+=(const LinComb& o) {
    for (const auto& [b, c] : o.terms_) add(b, c);
    return *this;
  }
  LinComb& operator-=(const LinComb& o) {
    for (const auto& [b, c] : o.terms_) add(b, -c);
    return *this;
  }
  LinComb operator-() const {
    LinComb r = *this;
    for (auto& [b, c] : r.terms_) c = -c;
    return r;
  }
  friend LinComb operator+(LinComb a, const LinComb& b) { return a += b; }
  friend LinComb operator-(LinComb a, const LinComb& b) { return a -= b; }

  friend LinComb operator*(const Scalar& s, const LinComb& v) {
    LinComb r;
    if (s.is_zero()) return r;
    for (const auto& [b, c] : v.terms_) r.add(b, s * c);
    return r;
  }
  friend LinComb operator*(const LinComb& v, const Scalar& s) { return s * v; }

  friend bool operator==(const LinComb& a, const LinComb& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (const auto& [k, c] : a.terms_)
      if (b.coeff(k) != c) return false;
    return true;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [b, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += "(" + c.to_string() + ")" + b.to_string();
    }
    return out;
  }

 private:
  std::map<B, Scalar> terms_;
};

template <class B>
std::string to_text(const LinComb<B>& v) {
  return v.to_string();
}

template <class B>
std::ostream& operator<<(std::ostream& os, const LinComb<B>& v) {
  return os << v.to_string();
}

}  // namespace permorb
