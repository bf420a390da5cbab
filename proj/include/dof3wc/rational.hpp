#pragma once

// Exact rational scalar used throughout the polyhedral layer. Thin value
// wrapper over GMP's mpq_class, kept canonical at all times: lowest terms,
// denominator strictly positive, zero stored as 0/1.

#include <gmpxx.h>

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace dof3wc {

class Rational {
 public:
  Rational() : v_(0) {}
  // Implicit from integers so coefficient tables read naturally.
  Rational(int n) : v_(n) {}
  Rational(long n) : v_(n) {}
  Rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }
  explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }
  explicit Rational(const mpz_class& n) : v_(n) {}

  // Accepts "p" or "p/q" with optional leading '-' on p, base 10 only.
  // Anything else (floats, whitespace, empty) is rejected.
  static Rational parse(const std::string& text) {
    if (!looks_like_rational(text))
      throw std::invalid_argument("Rational: cannot parse '" + text + "'");
    mpq_class q;
    if (mpq_set_str(q.get_mpq_t(), text.c_str(), 10) != 0)
      throw std::invalid_argument("Rational: cannot parse '" + text + "'");
    if (mpz_sgn(mpq_denref(q.get_mpq_t())) == 0)
      throw std::invalid_argument("Rational: zero denominator in '" + text + "'");
    q.canonicalize();
    return Rational(std::move(q), already_canonical{});
  }

  mpz_class numerator() const { return v_.get_num(); }
  mpz_class denominator() const { return v_.get_den(); }

  // "p" when the denominator is one, else "p/q".
  std::string str() const { return v_.get_str(); }
  double to_double() const { return v_.get_d(); }

  int sign() const { return sgn(v_); }
  bool is_zero() const { return sign() == 0; }
  bool is_integer() const { return v_.get_den() == 1; }

  Rational abs() const { return Rational(::abs(v_), already_canonical{}); }
  // max(value, 0); antenna differences use this a lot.
  Rational pos_part() const { return sign() > 0 ? *this : Rational(); }

  Rational operator-() const { return Rational(mpq_class(-v_), already_canonical{}); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::invalid_argument("Rational: division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
  }

  const mpq_class& raw() const { return v_; }

 private:
  struct already_canonical {};
  Rational(mpq_class q, already_canonical) : v_(std::move(q)) {}

  static bool looks_like_rational(const std::string& s) {
    std::size_t i = 0, digits = 0;
    auto run = [&]() {
      std::size_t n = 0;
      while (i < s.size() && s[i] >= '0' && s[i] <= '9') { ++i; ++n; }
      return n;
    };
    if (i < s.size() && s[i] == '-') ++i;
    digits = run();
    if (digits == 0) return false;
    if (i == s.size()) return true;
    if (s[i] != '/') return false;
    ++i;
    digits = run();
    return digits > 0 && i == s.size();
  }

  mpq_class v_;
};

inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace dof3wc
