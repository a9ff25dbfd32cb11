#pragma once

#include <gmpxx.h>

#include <map>
#include <string>

namespace cuecrit {

// Finite sum  sum_p c_p pi^p  with exact rational c_p and integer (possibly
// negative) exponents p. Zero coefficients are never stored.
class PiPolynomial {
 public:
  PiPolynomial() = default;
  PiPolynomial(const mpq_class& c, int pi_power = 0);

  static PiPolynomial monomial(const mpq_class& c, int pi_power) { return {c, pi_power}; }

  bool is_zero() const { return terms_.empty(); }
  const std::map<int, mpq_class>& terms() const { return terms_; }
  mpq_class coefficient(int pi_power) const;

  // Adds c pi^p to this polynomial.
  void add_term(const mpq_class& c, int pi_power);

  PiPolynomial& operator+=(const PiPolynomial& o);
  PiPolynomial& operator-=(const PiPolynomial& o);
  PiPolynomial& operator*=(const mpq_class& c);
  PiPolynomial shifted(int pi_power) const;  // this * pi^p

  friend PiPolynomial operator+(PiPolynomial a, const PiPolynomial& b) { return a += b; }
  friend PiPolynomial operator-(PiPolynomial a, const PiPolynomial& b) { return a -= b; }
  friend PiPolynomial operator*(const PiPolynomial& a, const PiPolynomial& b);
  friend PiPolynomial operator*(PiPolynomial a, const mpq_class& c) { return a *= c; }
  friend bool operator==(const PiPolynomial& a, const PiPolynomial& b) { return a.terms_ == b.terms_; }

  // Evaluated in 256-bit floating point, then rounded to double.
  double value() const;

  // e.g. "1/36*pi^2", "-64/225*pi^-1", "0".
  std::string to_string() const;

 private:
  std::map<int, mpq_class> terms_;
};

}  // namespace cuecrit
