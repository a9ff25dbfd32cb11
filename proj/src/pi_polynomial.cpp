#include "cuecrit/pi_polynomial.hpp"

#include <mpfr.h>

#include <sstream>

namespace cuecrit {

PiPolynomial::PiPolynomial(const mpq_class& c, int pi_power) { add_term(c, pi_power); }

mpq_class PiPolynomial::coefficient(int pi_power) const {
  const auto it = terms_.find(pi_power);
  return it == terms_.end() ? mpq_class(0) : it->second;
}

void PiPolynomial::add_term(const mpq_class& c, int pi_power) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(pi_power, c);
  if (inserted) return;
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

PiPolynomial& PiPolynomial::operator+=(const PiPolynomial& o) {
  for (const auto& [p, c] : o.terms_) add_term(c, p);
  return *this;
}

PiPolynomial& PiPolynomial::operator-=(const PiPolynomial& o) {
  for (const auto& [p, c] : o.terms_) add_term(-c, p);
  return *this;
}

PiPolynomial& PiPolynomial::operator*=(const mpq_class& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [p, v] : terms_) v *= c;
  return *this;
}

PiPolynomial PiPolynomial::shifted(int pi_power) const {
  PiPolynomial out;
  for (const auto& [p, c] : terms_) out.terms_.emplace(p + pi_power, c);
  return out;
}

PiPolynomial operator*(const PiPolynomial& a, const PiPolynomial& b) {
  PiPolynomial out;
  for (const auto& [p, c] : a.terms_)
    for (const auto& [q, d] : b.terms_) out.add_term(c * d, p + q);
  return out;
}

double PiPolynomial::value() const {
  constexpr mpfr_prec_t kBits = 256;
  mpfr_t pi, sum, term, pw;
  mpfr_inits2(kBits, pi, sum, term, pw, static_cast<mpfr_ptr>(nullptr));
  mpfr_const_pi(pi, MPFR_RNDN);
  mpfr_set_zero(sum, 1);
  for (const auto& [p, c] : terms_) {
    mpfr_set_q(term, c.get_mpq_t(), MPFR_RNDN);
    mpfr_pow_si(pw, pi, p, MPFR_RNDN);
    mpfr_mul(term, term, pw, MPFR_RNDN);
    mpfr_add(sum, sum, term, MPFR_RNDN);
  }
  const double out = mpfr_get_d(sum, MPFR_RNDN);
  mpfr_clears(pi, sum, term, pw, static_cast<mpfr_ptr>(nullptr));
  return out;
}

std::string PiPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [p, c] : terms_) {
    if (!first) out << (c < 0 ? " - " : " + ");
    else if (c < 0) out << "-";
    first = false;
    const mpq_class mag = abs(c);
    out << mag.get_num().get_str();
    if (mag.get_den() != 1) out << "/" << mag.get_den().get_str();
    if (p != 0) {
      out << "*pi";
      if (p != 1) out << "^" << p;
    }
  }
  return out.str();
}

}  // namespace cuecrit
