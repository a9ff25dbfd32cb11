#pragma once

#include <cstdint>
#include <vector>

#include "cuecrit/linalg.hpp"

namespace cuecrit {

enum class SymbolKind { g, h };

// Parameters of the real symbols
//   g(theta) = Re(conj(w) q) - alpha Re(q^2),  h(theta) = Re(conj(w) q) - alpha Im(q^2),
// q = 1 / (z - e^{i theta}). Requires |z| < 1.
struct SzegoParameters {
  Complex w{0.0};
  double alpha = 0.0;
  Complex z{0.0};

  void validate() const;  // DomainError unless |z| < 1
};

// Fourier coefficients f_k for -K <= k <= K of a symbol on the unit circle.
class ToeplitzSymbol {
 public:
  ToeplitzSymbol(int truncation, std::vector<Complex> coefficients);

  static ToeplitzSymbol constant(Complex value, int truncation);

  int truncation() const { return truncation_; }
  Complex operator[](int k) const;  // zero outside [-K, K]

 private:
  int truncation_;
  std::vector<Complex> coefficients_;  // index k + K
};

// g_0 = 0, g_k = -(w/2) conj(z)^(k-1) - (alpha/2)(k-1) conj(z)^(k-2), g_{-k} = conj(g_k).
Complex g_hat(const SzegoParameters& params, int k);
// As g_hat with i alpha in place of alpha.
Complex h_hat(const SzegoParameters& params, int k);
Complex symbol_hat(const SzegoParameters& params, SymbolKind which, int k);

// Closed-form sum_{k >= 1} k |f_k|^2 for f = g or h.
double szego_sum(const SzegoParameters& params, SymbolKind which);

// Value of g or h at theta from the geometric-series closed form.
double symbol_value(const SzegoParameters& params, SymbolKind which, double theta);

// Fourier coefficients of exp(i g) (or exp(i h)) from `grid_size` samples and
// an FFT; truncation K = grid_size / 8. grid_size must be a power of two >= 8.
// Throws ResolutionError if |f_K| / max_k |f_k| > 1e-13.
ToeplitzSymbol symbol_fourier(const SzegoParameters& params, SymbolKind which, int grid_size);

// det of the n x n matrix with (j, k) entry f_{k-j}. Requires n <= truncation.
Complex toeplitz_determinant(const ToeplitzSymbol& symbol, int n);

// Grid used by the Szego helpers for an n x n determinant of a symbol with
// pole modulus r = |z|: large enough that the truncation passes the decay check.
int default_grid_size(int n, double r = 0.0);

// |D_n[exp(i f)] - exp(-E(f))|, evaluated in quad precision (coefficients by
// direct DFT, determinant by pivoted LU) so the decay is visible below 1e-16.
double szego_limit_error(const SzegoParameters& params, SymbolKind which, int n);

struct SecondDerivativeCheck {
  double finite_difference;  // real part of d^2/d alpha^2 (D[e^{ig}] + D[e^{ih}]) at alpha = 0
  double closed_form;        // [|w|^2 r^2/(1-r^2)^6 - 6r^2/(1-r^2)^4 - 2/(1-r^2)^3] exp(-|w|^2/(4(1-r^2)^2))
};

// Central second difference in alpha with step delta_alpha in [1e-4, 1e-2];
// repeated at delta/2 and Richardson-extrapolated when the two differ by more
// than 0.2%.
SecondDerivativeCheck second_derivative_check(Complex w, Complex z, int n,
                                              double delta_alpha = 1e-3);

// Closed form of the bracket formula alone.
double second_derivative_closed_form(Complex w, double r);

struct ComplexEstimate {
  Complex mean;
  double std_error_re;
  double std_error_im;
};

// Monte Carlo average of prod_j exp(i f(theta_j)) over Haar U(n), the
// right-hand side of the Heine-Szego identity for toeplitz_determinant.
ComplexEstimate heine_szego_mc(const SzegoParameters& params, SymbolKind which, int n,
                               int num_samples, std::uint64_t seed, int threads = 1);

struct MomentEstimate {
  double estimate;
  double std_error;
  double exact;        // prod_k k^{a_k} a_k!
  bool exact_regime;   // sum of parts <= n
};

// Monte Carlo estimate of E prod_k |Tr U^k|^{2 a_k} over Haar U(n), where a_k
// counts the parts equal to k in `partition`.
MomentEstimate ds_moment_mc(const std::vector<int>& partition, int n, int num_samples,
                            std::uint64_t seed, int threads = 1);

}  // namespace cuecrit
