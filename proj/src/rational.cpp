#include "wedge/rational.hpp"
#include <stdexcept>

namespace wedge::sym {

Rational::Rational(long num, long den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational Rational::from_string(const std::string& s) {
  mpq_class v;
  if (v.set_str(s, 10) != 0)
    throw std::invalid_argument("Rational: cannot parse '" + s + "'");
  if (v.get_den() == 0) throw std::domain_error("Rational: zero denominator");
  v.canonicalize();
  return Rational(v);
}

Rational Rational::operator/(const Rational& o) const {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  return Rational(mpq_class(v_ / o.v_));
}

Rational Rational::pow(long k) const {
  if (k == 0) return Rational(1);
  if (is_zero() && k < 0) throw std::domain_error("Rational: 0^negative");
  mpz_class num, den;
  unsigned long a = static_cast<unsigned long>(k < 0 ? -k : k);
  mpz_pow_ui(num.get_mpz_t(), v_.get_num().get_mpz_t(), a);
  mpz_pow_ui(den.get_mpz_t(), v_.get_den().get_mpz_t(), a);
  mpq_class r = (k > 0) ? mpq_class(num, den) : mpq_class(den, num);
  r.canonicalize();
  return Rational(r);
}

std::optional<Rational> Rational::exact_sqrt() const {
  if (is_negative()) return std::nullopt;
  const mpz_class &num = v_.get_num(), &den = v_.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) ||
      !mpz_perfect_square_p(den.get_mpz_t()))
    return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  mpq_class r(rn, rd);
  r.canonicalize();
  return Rational(r);
}

std::string Rational::str() const {
  return v_.get_str();
}

} // namespace wedge::sym
