#include "cuecrit/haar.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "cuecrit/errors.hpp"

namespace cuecrit {

namespace {

// Uniform on (0, 1].
double uniform_open_closed(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

void EnsembleConfig::validate() const {
  if (n < 1) throw PreconditionError("ensemble: n must be >= 1");
  if (num_samples < 1) throw PreconditionError("ensemble: num_samples must be >= 1");
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

ComplexDenseMatrix sample_ginibre(int n, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("sample_ginibre: n must be >= 1");
  std::mt19937_64 gen(seed);
  const auto count = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  std::vector<Complex> entries;
  entries.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    // radius sqrt(-log u) gives each component variance 1/2
    const double u1 = uniform_open_closed(gen);
    const double u2 = uniform_open_closed(gen);
    const double radius = std::sqrt(-std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    entries.emplace_back(radius * std::cos(angle), radius * std::sin(angle));
  }
  return ComplexDenseMatrix(n, n, std::move(entries));
}

ComplexDenseMatrix sample_haar_unitary(int n, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("sample_haar_unitary: n must be >= 1");
  for (std::uint64_t attempt_seed = seed;; attempt_seed = mix64(attempt_seed)) {
    QrFactorization qr = householder_qr(sample_ginibre(n, attempt_seed));
    bool degenerate = false;
    for (int j = 0; j < n && !degenerate; ++j) degenerate = qr.r(j, j) == Complex(0.0);
    if (degenerate) continue;
    for (int j = 0; j < n; ++j) {
      const Complex phase = qr.r(j, j) / std::abs(qr.r(j, j));
      for (int i = 0; i < n; ++i) qr.q(i, j) *= phase;
    }
    return std::move(qr.q);
  }
}

EigenPhaseSpectrum sample_eigenphases(int n, std::uint64_t seed) {
  return eigenphases(sample_haar_unitary(n, seed));
}

}  // namespace cuecrit
