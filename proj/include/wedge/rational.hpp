#pragma once
#include <gmpxx.h>
#include <optional>
#include <string>

namespace wedge::sym {

// Exact rational scalar, arbitrary precision.  Thin value wrapper around
// GMP's mpq_class so the rest of the code never touches GMP directly.
class Rational {
public:
  Rational() : v_(0) {}
  Rational(long n) : v_(n) {}
  Rational(long num, long den);
  explicit Rational(const mpq_class& v) : v_(v) { v_.canonicalize(); }

  // accepts "7", "-3/4", "007/21"
  static Rational from_string(const std::string& s);

  bool is_zero() const { return sgn(v_) == 0; }
  bool is_one() const { return v_ == 1; }
  bool is_negative() const { return sgn(v_) < 0; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  Rational operator-() const { return Rational(mpq_class(-v_)); }
  Rational operator+(const Rational& o) const { return Rational(mpq_class(v_ + o.v_)); }
  Rational operator-(const Rational& o) const { return Rational(mpq_class(v_ - o.v_)); }
  Rational operator*(const Rational& o) const { return Rational(mpq_class(v_ * o.v_)); }
  Rational operator/(const Rational& o) const; // throws on /0
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }

  bool operator==(const Rational& o) const { return v_ == o.v_; }
  bool operator!=(const Rational& o) const { return v_ != o.v_; }
  bool operator<(const Rational& o) const { return v_ < o.v_; }
  int cmp(const Rational& o) const { return ::cmp(v_, o.v_); }

  Rational abs() const { return Rational(mpq_class(::abs(v_))); }
  Rational pow(long k) const; // integer power, throws on 0^negative
  // exact square root if both numerator and denominator are perfect squares
  // (and the value is non-negative); nullopt otherwise
  std::optional<Rational> exact_sqrt() const;

  double to_double() const { return v_.get_d(); }
  std::string str() const; // "3", "-3/4"
  const mpq_class& raw() const { return v_; }

private:
  mpq_class v_;
};

} // namespace wedge::sym
