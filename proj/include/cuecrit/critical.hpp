#pragma once

#include <span>
#include <vector>

#include "cuecrit/linalg.hpp"

namespace cuecrit {

// The n-1 roots of Z'(U, z) for one spectrum of size n.
struct CriticalPointSet {
  int n = 0;
  std::vector<Complex> points;
  // Relative backward error of each root:
  //   |sum_k 1/(z - w_k)| / sum_k |1/(z - w_k)|
  // i.e. |Z'(z)| measured against the size of its n summands. Bounded by
  // 1e-8 n for every accepted root.
  std::vector<double> residuals;
  // Size of the cluster of iterates merged into one multiple root (every
  // member then holds the same point), 1 for a simple root.
  std::vector<int> multiplicity;
};

// sum_j 1 / (z - e^{i theta_j}). Throws PoleError within 1e-14 of a root.
Complex log_derivative(const EigenPhaseSpectrum& spectrum, Complex z);

// Aberth-Ehrlich iteration on Z', driven entirely by the eigenphases (no
// monomial coefficients). Iterates start at the chord midpoints between
// circularly adjacent eigenvalues, pulled in by (1 - 1/(4n)); the midpoint of
// the widest gap is dropped so that n-1 starts remain.
// Requires n >= 2 and pairwise distinct phases (gap >= 1e-12).
CriticalPointSet critical_points(const EigenPhaseSpectrum& spectrum);

// Independent route for small n (2 <= n <= 64): eigenvalues of
// diag(e^{i theta}) (I - J/n), J the all-ones matrix, minus the one zero
// eigenvalue from the rank deficiency.
CriticalPointSet critical_points_oracle(const EigenPhaseSpectrum& spectrum);

// Largest pair distance under an optimal one-to-one assignment (minimum total
// Euclidean distance; Hungarian method up to 64 points, greedy above).
// Throws DimensionError when the sizes differ.
double matching_distance(std::span<const Complex> a, std::span<const Complex> b);

}  // namespace cuecrit
