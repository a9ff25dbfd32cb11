#pragma once

#include <cstdint>

#include "cuecrit/linalg.hpp"

namespace cuecrit {

// Parameters of a seeded CUE ensemble. Sample i uses seed
// derive_seed(master_seed, i), so any subset of samples can be regenerated
// independently of the others.
struct EnsembleConfig {
  int n = 2;
  int num_samples = 1;
  std::uint64_t master_seed = 0;

  // Throws PreconditionError unless n >= 1 and num_samples >= 1.
  void validate() const;
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Per-sample seed: a hash of (master, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// n x n matrix of independent complex Gaussians; real and imaginary parts are
// each N(0, 1/2). Box-Muller on top of mt19937_64 seeded with `seed`.
ComplexDenseMatrix sample_ginibre(int n, std::uint64_t seed);

// Haar-distributed unitary: Q from the QR factorization of a Ginibre draw,
// right-multiplied by diag(r_jj / |r_jj|) so the factorization is the one with
// positive diagonal R.
ComplexDenseMatrix sample_haar_unitary(int n, std::uint64_t seed);

EigenPhaseSpectrum sample_eigenphases(int n, std::uint64_t seed);

}  // namespace cuecrit
