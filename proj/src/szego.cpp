#include "cuecrit/szego.hpp"

#include <fftw3.h>
#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "cuecrit/ensemble.hpp"
#include "cuecrit/errors.hpp"
#include "cuecrit/haar.hpp"

namespace cuecrit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// FFTW planning is not thread-safe.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

Complex ipow(Complex base, int e) {
  Complex out(1.0);
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

double symbol_sum_closed_form(const SzegoParameters& p, SymbolKind which) {
  const double r2 = std::norm(p.z);
  const double one_minus = 1.0 - r2;
  const double c = std::norm(p.w) / (4.0 * one_minus * one_minus) +
                   0.5 * p.alpha * p.alpha *
                       (3.0 * r2 / std::pow(one_minus, 4) + 1.0 / std::pow(one_minus, 3));
  const Complex wz = p.w * std::conj(p.z);
  const double cross = which == SymbolKind::g ? wz.real() : wz.imag();
  return c + p.alpha * cross / std::pow(one_minus, 3);
}

// Quad-precision complex numbers for the limit error, whose true value drops
// far below double round-off once n passes a few dozen.
struct Quad {
  __float128 re = 0;
  __float128 im = 0;
};

Quad operator+(Quad a, Quad b) { return {a.re + b.re, a.im + b.im}; }
Quad operator-(Quad a, Quad b) { return {a.re - b.re, a.im - b.im}; }
Quad operator*(Quad a, Quad b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
Quad operator/(Quad a, Quad b) {
  const __float128 d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
__float128 qabs(Quad a) { return hypotq(a.re, a.im); }
Quad qpolar(__float128 theta) { return {cosq(theta), sinq(theta)}; }
Quad qfrom(Complex c) { return {c.real(), c.imag()}; }

__float128 quad_symbol_value(const SzegoParameters& p, SymbolKind which, __float128 theta) {
  const Quad q = Quad{1, 0} / (qfrom(p.z) - qpolar(theta));
  const Quad q2 = q * q;
  const Quad wc{p.w.real(), -p.w.imag()};
  const __float128 linear = (wc * q).re;
  const __float128 alpha = p.alpha;
  return which == SymbolKind::g ? linear - alpha * q2.re : linear - alpha * q2.im;
}

__float128 quad_symbol_sum(const SzegoParameters& p, SymbolKind which) {
  const __float128 zr = p.z.real(), zi = p.z.imag(), wr = p.w.real(), wi = p.w.imag();
  const __float128 r2 = zr * zr + zi * zi;
  const __float128 om = 1 - r2;
  const __float128 alpha = p.alpha;
  const __float128 c =
      (wr * wr + wi * wi) / (4 * om * om) + alpha * alpha / 2 * (3 * r2 / (om * om * om * om) + 1 / (om * om * om));
  // w conj(z)
  const __float128 cross = which == SymbolKind::g ? wr * zr + wi * zi : wi * zr - wr * zi;
  return c + alpha * cross / (om * om * om);
}

// D_n[exp(i f)] with Fourier coefficients from a direct DFT on `grid` points
// and the determinant from pivoted LU, all in quad precision.
Quad quad_toeplitz_determinant(const SzegoParameters& p, SymbolKind which, int n, int grid) {
  const __float128 two_pi = 2 * M_PIq;
  std::vector<Quad> samples(grid), twiddle(grid);
  for (int j = 0; j < grid; ++j) {
    const __float128 theta = two_pi * j / grid;
    samples[j] = qpolar(quad_symbol_value(p, which, theta));
    twiddle[j] = qpolar(-theta);
  }
  std::vector<Quad> coeff(2 * n - 1);  // index k + n - 1
  for (int k = -(n - 1); k <= n - 1; ++k) {
    Quad acc;
    const long kk = (k % grid + grid) % grid;
    for (int j = 0; j < grid; ++j) acc = acc + samples[j] * twiddle[(kk * j) % grid];
    coeff[k + n - 1] = {acc.re / grid, acc.im / grid};
  }
  std::vector<Quad> a(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) a[j * n + k] = coeff[k - j + n - 1];
  Quad det{1, 0};
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row)
      if (qabs(a[row * n + col]) > qabs(a[pivot * n + col])) pivot = row;
    if (qabs(a[pivot * n + col]) == 0) return {};
    if (pivot != col) {
      for (int k = 0; k < n; ++k) std::swap(a[col * n + k], a[pivot * n + k]);
      det = Quad{0, 0} - det;
    }
    const Quad d = a[col * n + col];
    det = det * d;
    for (int row = col + 1; row < n; ++row) {
      const Quad factor = a[row * n + col] / d;
      for (int k = col + 1; k < n; ++k) a[row * n + k] = a[row * n + k] - factor * a[col * n + k];
    }
  }
  return det;
}

}  // namespace

void SzegoParameters::validate() const {
  if (!(std::abs(z) < 1.0)) throw DomainError("Szego parameters need |z| < 1");
}

ToeplitzSymbol::ToeplitzSymbol(int truncation, std::vector<Complex> coefficients)
    : truncation_(truncation), coefficients_(std::move(coefficients)) {
  if (truncation_ < 1) throw PreconditionError("ToeplitzSymbol: truncation must be positive");
  if (coefficients_.size() != static_cast<std::size_t>(2 * truncation_ + 1))
    throw DimensionError("ToeplitzSymbol: expected 2K+1 coefficients");
}

ToeplitzSymbol ToeplitzSymbol::constant(Complex value, int truncation) {
  std::vector<Complex> c(2 * truncation + 1, Complex(0.0));
  c[truncation] = value;
  return ToeplitzSymbol(truncation, std::move(c));
}

Complex ToeplitzSymbol::operator[](int k) const {
  if (k < -truncation_ || k > truncation_) return Complex(0.0);
  return coefficients_[k + truncation_];
}

Complex g_hat(const SzegoParameters& params, int k) {
  if (k == 0) return Complex(0.0);
  if (k < 0) return std::conj(g_hat(params, -k));
  const Complex zc = std::conj(params.z);
  Complex out = -0.5 * params.w * ipow(zc, k - 1);
  if (k >= 2) out -= 0.5 * params.alpha * static_cast<double>(k - 1) * ipow(zc, k - 2);
  return out;
}

Complex h_hat(const SzegoParameters& params, int k) {
  if (k == 0) return Complex(0.0);
  if (k < 0) return std::conj(h_hat(params, -k));
  const Complex zc = std::conj(params.z);
  Complex out = -0.5 * params.w * ipow(zc, k - 1);
  if (k >= 2)
    out -= Complex(0.0, 0.5 * params.alpha) * static_cast<double>(k - 1) * ipow(zc, k - 2);
  return out;
}

Complex symbol_hat(const SzegoParameters& params, SymbolKind which, int k) {
  return which == SymbolKind::g ? g_hat(params, k) : h_hat(params, k);
}

double szego_sum(const SzegoParameters& params, SymbolKind which) {
  params.validate();
  return symbol_sum_closed_form(params, which);
}

double symbol_value(const SzegoParameters& params, SymbolKind which, double theta) {
  const Complex q = 1.0 / (params.z - std::polar(1.0, theta));
  const Complex q2 = q * q;
  const double linear = (std::conj(params.w) * q).real();
  return which == SymbolKind::g ? linear - params.alpha * q2.real()
                                : linear - params.alpha * q2.imag();
}

ToeplitzSymbol symbol_fourier(const SzegoParameters& params, SymbolKind which, int grid_size) {
  params.validate();
  if (grid_size < 8 || (grid_size & (grid_size - 1)) != 0)
    throw PreconditionError("symbol_fourier: grid_size must be a power of two >= 8");
  const int truncation = grid_size / 8;

  std::vector<Complex> samples(grid_size);
  for (int j = 0; j < grid_size; ++j) {
    const double theta = kTwoPi * j / grid_size;
    samples[j] = std::polar(1.0, symbol_value(params, which, theta));
  }
  std::vector<Complex> spectrum(grid_size);
  {
    auto* in = reinterpret_cast<fftw_complex*>(samples.data());
    auto* out = reinterpret_cast<fftw_complex*>(spectrum.data());
    fftw_plan plan;
    {
      std::lock_guard lock(fftw_planner_mutex());
      plan = fftw_plan_dft_1d(grid_size, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  std::vector<Complex> coeffs(2 * truncation + 1);
  const double inv = 1.0 / grid_size;
  double largest = 0.0;
  for (int k = -truncation; k <= truncation; ++k) {
    const Complex c = spectrum[(k + grid_size) % grid_size] * inv;
    coeffs[k + truncation] = c;
    largest = std::max(largest, std::abs(c));
  }
  const double edge = std::max(std::abs(coeffs.front()), std::abs(coeffs.back()));
  if (largest > 0.0 && edge / largest > 1e-13) {
    std::ostringstream msg;
    msg << "symbol_fourier: coefficients at |k| = " << truncation << " are still " << edge / largest
        << " of the largest; increase grid_size";
    throw ResolutionError(msg.str());
  }
  return ToeplitzSymbol(truncation, std::move(coeffs));
}

Complex toeplitz_determinant(const ToeplitzSymbol& symbol, int n) {
  if (n < 1) throw PreconditionError("toeplitz_determinant: n must be positive");
  if (n > symbol.truncation()) {
    std::ostringstream msg;
    msg << "toeplitz_determinant: n = " << n << " exceeds symbol truncation " << symbol.truncation();
    throw CapabilityError(msg.str());
  }
  ComplexDenseMatrix t(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) t(j, k) = symbol[k - j];
  return determinant(t);
}

int default_grid_size(int n, double r) {
  // Coefficients of exp(i f) decay roughly like k r^k; keep K = grid/8 well
  // past the point where r^k drops below 1e-16.
  int min_truncation = 2 * n;
  if (r > 0.0) min_truncation = std::max(min_truncation, static_cast<int>(std::ceil(std::log(1e-16) / std::log(r))) + 16);
  int grid = 256;
  while (grid / 8 < min_truncation) grid *= 2;
  return grid;
}

double szego_limit_error(const SzegoParameters& params, SymbolKind which, int n) {
  params.validate();
  if (n < 1) throw PreconditionError("szego_limit_error: n must be positive");
  // The zero symbol gives the identity matrix and E = 0; skip the DFT round-off.
  if (params.w == Complex(0.0) && params.alpha == 0.0) return 0.0;
  const Quad det = quad_toeplitz_determinant(params, which, n, default_grid_size(n, std::abs(params.z)));
  const Quad limit{expq(-quad_symbol_sum(params, which)), 0};
  return static_cast<double>(qabs(det - limit));
}

double second_derivative_closed_form(Complex w, double r) {
  const double r2 = r * r;
  const double om = 1.0 - r2;
  const double w2 = std::norm(w);
  const double bracket = w2 * r2 / std::pow(om, 6) - 6.0 * r2 / std::pow(om, 4) - 2.0 / std::pow(om, 3);
  return bracket * std::exp(-w2 / (4.0 * om * om));
}

SecondDerivativeCheck second_derivative_check(Complex w, Complex z, int n, double delta_alpha) {
  if (!(delta_alpha >= 1e-4 && delta_alpha <= 1e-2))
    throw PreconditionError("second_derivative_check: delta_alpha must lie in [1e-4, 1e-2]");
  SzegoParameters base{w, 0.0, z};
  base.validate();
  const int grid = default_grid_size(n, std::abs(z));

  auto det_sum = [&](double alpha) {
    SzegoParameters p = base;
    p.alpha = alpha;
    return toeplitz_determinant(symbol_fourier(p, SymbolKind::g, grid), n) +
           toeplitz_determinant(symbol_fourier(p, SymbolKind::h, grid), n);
  };
  const Complex center = det_sum(0.0);
  auto second_difference = [&](double d) {
    return ((det_sum(d) - 2.0 * center + det_sum(-d)) / (d * d)).real();
  };

  const double coarse = second_difference(delta_alpha);
  const double fine = second_difference(0.5 * delta_alpha);
  double fd = coarse;
  if (std::abs(fine - coarse) > 2e-3 * std::abs(fine)) fd = (4.0 * fine - coarse) / 3.0;
  return {fd, second_derivative_closed_form(w, std::abs(z))};
}

ComplexEstimate heine_szego_mc(const SzegoParameters& params, SymbolKind which, int n,
                               int num_samples, std::uint64_t seed, int threads) {
  params.validate();
  const EnsembleConfig config{n, num_samples, seed};
  const auto values = map_ensemble(config, threads, [&](std::size_t, std::uint64_t s) {
    const EigenPhaseSpectrum spectrum = sample_eigenphases(n, s);
    double phase = 0.0;
    for (double t : spectrum.phases()) phase += symbol_value(params, which, t);
    return std::polar(1.0, phase);
  });
  Complex sum(0.0);
  for (const auto& v : values) sum += v;
  const double count = static_cast<double>(values.size());
  const Complex mean = sum / count;
  double var_re = 0.0, var_im = 0.0;
  for (const auto& v : values) {
    var_re += (v.real() - mean.real()) * (v.real() - mean.real());
    var_im += (v.imag() - mean.imag()) * (v.imag() - mean.imag());
  }
  const double denom = count > 1 ? count * (count - 1) : 1.0;
  return {mean, std::sqrt(var_re / denom), std::sqrt(var_im / denom)};
}

MomentEstimate ds_moment_mc(const std::vector<int>& partition, int n, int num_samples,
                            std::uint64_t seed, int threads) {
  if (partition.empty()) throw PreconditionError("ds_moment_mc: empty partition");
  std::map<int, int> multiplicity;
  int total = 0;
  for (int part : partition) {
    if (part < 1) throw PreconditionError("ds_moment_mc: parts must be positive");
    ++multiplicity[part];
    total += part;
  }
  double exact = 1.0;
  for (const auto& [k, a] : multiplicity) {
    exact *= std::pow(static_cast<double>(k), a) * std::tgamma(a + 1.0);
  }

  const EnsembleConfig config{n, num_samples, seed};
  const auto values = map_ensemble(config, threads, [&](std::size_t, std::uint64_t s) {
    const EigenPhaseSpectrum spectrum = sample_eigenphases(n, s);
    double product = 1.0;
    for (const auto& [k, a] : multiplicity) {
      Complex trace(0.0);
      for (double t : spectrum.phases()) trace += std::polar(1.0, k * t);
      product *= std::pow(std::norm(trace), a);
    }
    return product;
  });
  double sum = 0.0;
  for (double v : values) sum += v;
  const double count = static_cast<double>(values.size());
  const double mean = sum / count;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double se = count > 1 ? std::sqrt(var / (count * (count - 1))) : 0.0;
  return {mean, se, exact, total <= n};
}

}  // namespace cuecrit
