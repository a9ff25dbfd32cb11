#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cuecrit/pi_polynomial.hpp"

namespace cuecrit {

inline constexpr int kMaxGapOrder = 40;
inline constexpr int kDefaultLMax = 30;

// Taylor series of the sine-kernel gap probability
//   E(s) = det(I - K_s),  K(x, y) = sin(pi (x - y)) / (pi (x - y)) on [0, s],
// through s^max_order. Every coefficient is an exact rational combination of
// powers of pi. E_l, the spacing-density coefficients, sit at order l + 4.
class GapProbabilitySeries {
 public:
  GapProbabilitySeries(int max_order, std::vector<PiPolynomial> coefficients);

  int max_order() const { return max_order_; }
  const PiPolynomial& coefficient(int order) const { return coefficients_.at(order); }
  const std::vector<PiPolynomial>& coefficients() const { return coefficients_; }

  // Coefficient of s^(l+4). Throws CapabilityError beyond max_order.
  const PiPolynomial& e(int l) const;

  // Coefficients rounded to double, index = order.
  const std::vector<double>& numeric() const { return numeric_; }

  friend bool operator==(const GapProbabilitySeries& a, const GapProbabilitySeries& b) {
    return a.max_order_ == b.max_order_ && a.coefficients_ == b.coefficients_;
  }

 private:
  int max_order_;
  std::vector<PiPolynomial> coefficients_;
  std::vector<double> numeric_;
};

// log det(I - K_s) = -sum_m Tr(K_s^m)/m with the sinc kernel expanded into its
// even power series. On [0,1]^2 the truncated kernel is a finite sum of
// monomials x^a y^b, so every trace reduces to exact rational matrix algebra
// against the moment (Hilbert) matrix 1/(a+b+1). 4 <= max_order <= 40.
GapProbabilitySeries gap_series(int max_order);

// Same coefficients from the Jimbo-Miwa-Okamoto sigma form of Painleve V,
//   (t s'')^2 + 4 (t s' - s)(t s' - s + s'^2) = 0,  s(t) = -t/pi - t^2/pi^2 - ...
// with E(s) = exp(int_0^{pi s} s(t)/t dt), solved order by order.
GapProbabilitySeries gap_series_sigma(int max_order);

// Cache file, version 1:
//   # cuecrit gap-series v1
//   max_order <M>
//   <order> <numerator>/<denominator> <pi_power>      (one line per term)
// Orders with a zero coefficient get a single "<order> 0/1 0" line.
void save_gap_series(const GapProbabilitySeries& series, const std::filesystem::path& path);
GapProbabilitySeries load_gap_series(const std::filesystem::path& path);

// Loads <cache_dir>/gap_series_v1_order<M>.txt when present, otherwise
// computes with gap_series and writes the file.
GapProbabilitySeries gap_series_cached(int max_order, const std::filesystem::path& cache_dir);

// Largest s at which the highest-order term of the truncated spacing density
// stays below 1e-6.
double trust_radius(const GapProbabilitySeries& series);

struct SpacingDensityValue {
  double value;
  double tail_estimate;  // magnitude of the last retained term
};

// P_CUE(s) = E''(s) = sum_l (l+4)(l+3) E_l s^(l+2), floored at zero.
// Throws DomainError for s < 0 or s > trust_radius(series).
SpacingDensityValue p_cue_with_tail(const GapProbabilitySeries& series, double s);
double p_cue(const GapProbabilitySeries& series, double s);

// sum_{l <= l_max} (2/(beta pi^2))^((l+3)/2) (l+4) E_l x^((l+3)/2).
// Throws CapabilityError when l_max > max_order - 4.
double ipx_small_x(const GapProbabilitySeries& series, double x, double beta = 0.5,
                   int l_max = kDefaultLMax);

struct IpxTerm {
  int exponent_numerator;  // exponent = (l+3)/2
  int exponent_denominator;
  double coefficient;
};

std::vector<IpxTerm> ipx_coefficients(const GapProbabilitySeries& series, double beta, int l_max);

struct ExactIpxTerm {
  mpq_class exponent;
  PiPolynomial coefficient;
};

// Exact version for a rational beta with 2/beta a rational square (beta = 1/2
// gives 2/beta = 4). Throws CapabilityError otherwise.
std::vector<ExactIpxTerm> exact_ipx_coefficients(const GapProbabilitySeries& series,
                                                 const mpq_class& beta, int l_max);

}  // namespace cuecrit
