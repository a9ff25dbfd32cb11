#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cuecrit {

using Complex = std::complex<double>;

// Dense complex matrix, row-major storage.
class ComplexDenseMatrix {
 public:
  ComplexDenseMatrix(std::size_t rows, std::size_t cols);
  // Throws DimensionError on size mismatch and PreconditionError on a
  // non-finite entry.
  ComplexDenseMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static ComplexDenseMatrix identity(std::size_t n);
  static ComplexDenseMatrix diagonal(std::span<const Complex> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const Complex> entries() const { return data_; }

  ComplexDenseMatrix adjoint() const;
  double max_abs() const;

  friend ComplexDenseMatrix operator*(const ComplexDenseMatrix& a, const ComplexDenseMatrix& b);
  friend ComplexDenseMatrix operator-(const ComplexDenseMatrix& a, const ComplexDenseMatrix& b);

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Complex> data_;
};

// Sorted eigenvalue phases of a unitary matrix, each in [0, 2*pi).
class EigenPhaseSpectrum {
 public:
  // Validates range and ordering; throws PreconditionError otherwise.
  explicit EigenPhaseSpectrum(std::vector<double> phases);

  // Reduces arbitrary angles to [0, 2*pi) and sorts them (stable, so equal
  // phases keep their input order).
  static EigenPhaseSpectrum from_angles(std::span<const double> angles);

  std::size_t n() const { return phases_.size(); }
  std::span<const double> phases() const { return phases_; }
  double operator[](std::size_t j) const { return phases_[j]; }

  // e^{i theta_j} for every phase.
  std::vector<Complex> unit_roots() const;

 private:
  std::vector<double> phases_;
};

struct QrFactorization {
  ComplexDenseMatrix q;
  ComplexDenseMatrix r;
};

// Householder QR of a square matrix. q is unitary, r upper triangular.
QrFactorization householder_qr(const ComplexDenseMatrix& a);

// All eigenvalues of a general square complex matrix: Householder reduction
// to Hessenberg form, then single-shift QR with Wilkinson shifts.
// Deflation: |h(k+1,k)| <= 1e-14 (|h(k,k)| + |h(k+1,k+1)|); at most 40 n
// sweeps in total before ConvergenceError.
std::vector<Complex> eigenvalues(const ComplexDenseMatrix& a);

// Eigenphases of a unitary matrix. Requires ||u^H u - I||_max <= 1e-10 n.
// Raw eigenvalue moduli must be within 1e-8 of one; each eigenvalue is then
// projected onto the unit circle.
EigenPhaseSpectrum eigenphases(const ComplexDenseMatrix& u);

// Determinant by LU with partial pivoting. Singular input gives 0.
Complex determinant(const ComplexDenseMatrix& a);

// max_ij |(u^H u - I)_ij|
double unitarity_defect(const ComplexDenseMatrix& u);

}  // namespace cuecrit
