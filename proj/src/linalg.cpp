#include "cuecrit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "cuecrit/errors.hpp"

namespace cuecrit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_square(const ComplexDenseMatrix& a, const char* who) {
  if (!a.is_square()) {
    std::ostringstream msg;
    msg << who << ": expected a square matrix, got " << a.rows() << "x" << a.cols();
    throw DimensionError(msg.str());
  }
}

// Householder vector for x (in place). Returns beta with H = I - beta v v^H
// mapping x to alpha e_1, where alpha has the opposite phase of x_0.
// beta == 0 signals that x is already zero.
struct Reflector {
  double beta;
  Complex alpha;
};

Reflector make_reflector(std::span<Complex> v) {
  double norm2 = 0.0;
  for (const auto& x : v) norm2 += std::norm(x);
  if (norm2 == 0.0) return {0.0, Complex(0.0)};
  const double norm = std::sqrt(norm2);
  const double a0 = std::abs(v[0]);
  const Complex phase = a0 == 0.0 ? Complex(1.0) : v[0] / a0;
  const Complex alpha = -phase * norm;
  v[0] -= alpha;
  // v^H v = norm2 - 2 Re(conj(alpha) x0) + |alpha|^2 = 2 norm (norm + |x0|)
  const double vnorm2 = 2.0 * norm * (norm + a0);
  return {2.0 / vnorm2, alpha};
}

struct Givens {
  double c;
  Complex s;
};

// G = [c s; -conj(s) c] with G [a; b] = [r; 0].
Givens make_givens(Complex a, Complex b) {
  const double abs_a = std::abs(a);
  const double abs_b = std::abs(b);
  if (abs_b == 0.0) return {1.0, Complex(0.0)};
  if (abs_a == 0.0) return {0.0, std::conj(b) / abs_b};
  const double norm = std::hypot(abs_a, abs_b);
  return {abs_a / norm, (a / abs_a) * std::conj(b) / norm};
}

std::pair<Complex, Complex> eigen2x2(Complex a, Complex b, Complex c, Complex d) {
  const Complex mean = 0.5 * (a + d);
  const Complex half_diff = 0.5 * (a - d);
  const Complex disc = std::sqrt(half_diff * half_diff + b * c);
  Complex big = mean + disc;
  if (std::abs(mean - disc) > std::abs(big)) big = mean - disc;
  if (big == Complex(0.0)) return {Complex(0.0), Complex(0.0)};
  const Complex small = (a * d - b * c) / big;
  return {big, small};
}

void reduce_to_hessenberg(ComplexDenseMatrix& h) {
  const std::size_t n = h.rows();
  if (n < 3) return;
  std::vector<Complex> v(n);
  std::vector<Complex> w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    for (std::size_t i = 0; i < m; ++i) v[i] = h(k + 1 + i, k);
    const Reflector ref = make_reflector(std::span<Complex>(v.data(), m));
    if (ref.beta == 0.0) continue;

    // Left: rows k+1.., columns k..
    std::fill(w.begin(), w.end(), Complex(0.0));
    for (std::size_t i = 0; i < m; ++i) {
      const Complex vi = std::conj(v[i]);
      const Complex* row = &h(k + 1 + i, 0);
      for (std::size_t j = k; j < n; ++j) w[j] += vi * row[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
      const Complex f = ref.beta * v[i];
      Complex* row = &h(k + 1 + i, 0);
      for (std::size_t j = k; j < n; ++j) row[j] -= f * w[j];
    }
    h(k + 1, k) = ref.alpha;
    for (std::size_t i = 1; i < m; ++i) h(k + 1 + i, k) = Complex(0.0);

    // Right: all rows, columns k+1..
    for (std::size_t i = 0; i < n; ++i) {
      Complex* row = &h(i, 0);
      Complex s(0.0);
      for (std::size_t j = 0; j < m; ++j) s += row[k + 1 + j] * v[j];
      s *= ref.beta;
      for (std::size_t j = 0; j < m; ++j) row[k + 1 + j] -= s * std::conj(v[j]);
    }
  }
}

}  // namespace

ComplexDenseMatrix::ComplexDenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex(0.0)) {
  if (rows == 0 || cols == 0) throw DimensionError("matrix dimensions must be positive");
}

ComplexDenseMatrix::ComplexDenseMatrix(std::size_t rows, std::size_t cols,
                                       std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows == 0 || cols == 0) throw DimensionError("matrix dimensions must be positive");
  if (data_.size() != rows * cols) {
    std::ostringstream msg;
    msg << "expected " << rows * cols << " entries, got " << data_.size();
    throw DimensionError(msg.str());
  }
  for (const auto& x : data_) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      throw PreconditionError("matrix entries must be finite");
  }
}

ComplexDenseMatrix ComplexDenseMatrix::identity(std::size_t n) {
  ComplexDenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexDenseMatrix ComplexDenseMatrix::diagonal(std::span<const Complex> diag) {
  ComplexDenseMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexDenseMatrix ComplexDenseMatrix::adjoint() const {
  ComplexDenseMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

double ComplexDenseMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& x : data_) m = std::max(m, std::abs(x));
  return m;
}

ComplexDenseMatrix operator*(const ComplexDenseMatrix& a, const ComplexDenseMatrix& b) {
  if (a.cols_ != b.rows_) throw DimensionError("matrix product: inner dimensions differ");
  ComplexDenseMatrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    Complex* orow = &out(i, 0);
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex(0.0)) continue;
      const Complex* brow = &b(k, 0);
      for (std::size_t j = 0; j < b.cols_; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

ComplexDenseMatrix operator-(const ComplexDenseMatrix& a, const ComplexDenseMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
    throw DimensionError("matrix difference: shapes differ");
  ComplexDenseMatrix out(a.rows_, a.cols_);
  for (std::size_t i = 0; i < a.data_.size(); ++i) out.data_[i] = a.data_[i] - b.data_[i];
  return out;
}

EigenPhaseSpectrum::EigenPhaseSpectrum(std::vector<double> phases) : phases_(std::move(phases)) {
  if (phases_.empty()) throw PreconditionError("spectrum must contain at least one phase");
  for (std::size_t j = 0; j < phases_.size(); ++j) {
    const double t = phases_[j];
    if (!(t >= 0.0 && t < kTwoPi)) throw PreconditionError("phase outside [0, 2pi)");
    if (j > 0 && t < phases_[j - 1]) throw PreconditionError("phases must be sorted");
  }
}

EigenPhaseSpectrum EigenPhaseSpectrum::from_angles(std::span<const double> angles) {
  std::vector<double> phases;
  phases.reserve(angles.size());
  for (double a : angles) {
    double t = std::fmod(a, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    phases.push_back(t);
  }
  std::stable_sort(phases.begin(), phases.end());
  return EigenPhaseSpectrum(std::move(phases));
}

std::vector<Complex> EigenPhaseSpectrum::unit_roots() const {
  std::vector<Complex> out;
  out.reserve(phases_.size());
  for (double t : phases_) out.push_back(std::polar(1.0, t));
  return out;
}

QrFactorization householder_qr(const ComplexDenseMatrix& a) {
  require_square(a, "householder_qr");
  const std::size_t n = a.rows();
  ComplexDenseMatrix r = a;
  ComplexDenseMatrix q = ComplexDenseMatrix::identity(n);
  std::vector<Complex> v(n);
  std::vector<Complex> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t m = n - k;
    for (std::size_t i = 0; i < m; ++i) v[i] = r(k + i, k);
    const Reflector ref = make_reflector(std::span<Complex>(v.data(), m));
    if (ref.beta == 0.0) continue;

    std::fill(w.begin(), w.end(), Complex(0.0));
    for (std::size_t i = 0; i < m; ++i) {
      const Complex vi = std::conj(v[i]);
      const Complex* row = &r(k + i, 0);
      for (std::size_t j = k; j < n; ++j) w[j] += vi * row[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
      const Complex f = ref.beta * v[i];
      Complex* row = &r(k + i, 0);
      for (std::size_t j = k; j < n; ++j) row[j] -= f * w[j];
    }
    r(k, k) = ref.alpha;
    for (std::size_t i = 1; i < m; ++i) r(k + i, k) = Complex(0.0);

    // Q <- Q H_k, touching columns k..
    for (std::size_t i = 0; i < n; ++i) {
      Complex* row = &q(i, 0);
      Complex s(0.0);
      for (std::size_t j = 0; j < m; ++j) s += row[k + j] * v[j];
      s *= ref.beta;
      for (std::size_t j = 0; j < m; ++j) row[k + j] -= s * std::conj(v[j]);
    }
  }
  return {std::move(q), std::move(r)};
}

std::vector<Complex> eigenvalues(const ComplexDenseMatrix& a) {
  require_square(a, "eigenvalues");
  const std::size_t n = a.rows();
  ComplexDenseMatrix h = a;
  reduce_to_hessenberg(h);

  std::vector<Complex> eig(n);
  std::vector<Givens> rot(n);
  const long max_sweeps = 40 * static_cast<long>(n);
  long sweeps = 0;
  int since_deflation = 0;

  long hi = static_cast<long>(n) - 1;
  while (hi >= 0) {
    long l = hi;
    for (; l > 0; --l) {
      const double sub = std::abs(h(l, l - 1));
      if (sub <= 1e-14 * (std::abs(h(l - 1, l - 1)) + std::abs(h(l, l)))) {
        h(l, l - 1) = Complex(0.0);
        break;
      }
    }
    if (l == hi) {
      eig[hi] = h(hi, hi);
      --hi;
      since_deflation = 0;
      continue;
    }
    if (l == hi - 1) {
      const auto [e1, e2] = eigen2x2(h(l, l), h(l, hi), h(hi, l), h(hi, hi));
      eig[l] = e1;
      eig[hi] = e2;
      hi -= 2;
      since_deflation = 0;
      continue;
    }
    if (sweeps >= max_sweeps) {
      double worst = 0.0;
      for (long k = l + 1; k <= hi; ++k) worst = std::max(worst, std::abs(h(k, k - 1)));
      std::ostringstream msg;
      msg << "Hessenberg QR did not converge after " << sweeps << " sweeps; active window ["
          << l << ", " << hi << "], largest subdiagonal " << worst;
      throw ConvergenceError(msg.str(), worst, static_cast<int>(sweeps));
    }

    Complex mu;
    ++since_deflation;
    if (since_deflation % 11 == 0) {
      // exceptional shift
      mu = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1)) + std::abs(h(hi - 1, hi - 2));
    } else {
      const auto [e1, e2] =
          eigen2x2(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
      mu = std::abs(e1 - h(hi, hi)) <= std::abs(e2 - h(hi, hi)) ? e1 : e2;
    }

    for (long k = l; k <= hi; ++k) h(k, k) -= mu;
    for (long k = l; k < hi; ++k) {
      const Givens g = make_givens(h(k, k), h(k + 1, k));
      rot[k] = g;
      Complex* rk = &h(k, 0);
      Complex* rk1 = &h(k + 1, 0);
      for (long j = k; j <= hi; ++j) {
        const Complex x = rk[j];
        const Complex y = rk1[j];
        rk[j] = g.c * x + g.s * y;
        rk1[j] = -std::conj(g.s) * x + g.c * y;
      }
    }
    for (long k = l; k < hi; ++k) {
      const Givens g = rot[k];
      const long last = std::min(k + 2, hi);
      for (long i = l; i <= last; ++i) {
        const Complex x = h(i, k);
        const Complex y = h(i, k + 1);
        h(i, k) = g.c * x + std::conj(g.s) * y;
        h(i, k + 1) = -g.s * x + g.c * y;
      }
    }
    for (long k = l; k <= hi; ++k) h(k, k) += mu;
    ++sweeps;
  }
  return eig;
}

double unitarity_defect(const ComplexDenseMatrix& u) {
  require_square(u, "unitarity_defect");
  const std::size_t n = u.rows();
  // (u^H u)_ij = sum_k conj(u_ki) u_kj
  std::vector<Complex> gram(n * n, Complex(0.0));
  for (std::size_t k = 0; k < n; ++k) {
    const Complex* row = &u(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex ci = std::conj(row[i]);
      Complex* g = &gram[i * n];
      for (std::size_t j = 0; j < n; ++j) g[j] += ci * row[j];
    }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      worst = std::max(worst, std::abs(gram[i * n + j] - (i == j ? 1.0 : 0.0)));
  return worst;
}

EigenPhaseSpectrum eigenphases(const ComplexDenseMatrix& u) {
  require_square(u, "eigenphases");
  const std::size_t n = u.rows();
  const double defect = unitarity_defect(u);
  if (defect > 1e-10 * static_cast<double>(n)) {
    std::ostringstream msg;
    msg << "eigenphases: input is not unitary (defect " << defect << ")";
    throw PreconditionError(msg.str());
  }
  const std::vector<Complex> eig = eigenvalues(u);

  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double modulus = std::abs(eig[j]);
    if (std::abs(modulus - 1.0) > 1e-8) {
      std::ostringstream msg;
      msg << "eigenphases: eigenvalue " << j << " has modulus " << modulus;
      throw ConvergenceError(msg.str(), std::abs(modulus - 1.0), 0);
    }
    double t = std::arg(eig[j]);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    keyed.emplace_back(t, j);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<double> phases;
  phases.reserve(n);
  for (const auto& [t, j] : keyed) phases.push_back(t);
  return EigenPhaseSpectrum(std::move(phases));
}

Complex determinant(const ComplexDenseMatrix& a) {
  require_square(a, "determinant");
  const std::size_t n = a.rows();
  ComplexDenseMatrix lu = a;
  Complex det(1.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu(i, k));
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (best == 0.0) return Complex(0.0);
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(pivot, j));
      det = -det;
    }
    const Complex d = lu(k, k);
    det *= d;
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = lu(i, k) / d;
      if (f == Complex(0.0)) continue;
      Complex* ri = &lu(i, 0);
      const Complex* rk = &lu(k, 0);
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= f * rk[j];
    }
  }
  return det;
}

}  // namespace cuecrit
