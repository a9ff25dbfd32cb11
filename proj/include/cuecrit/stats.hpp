#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cuecrit/critical.hpp"
#include "cuecrit/linalg.hpp"

namespace cuecrit {

// x = (n-1)(1 - |lambda|) for every critical point of one matrix.
struct ScaledRadialSample {
  int n = 0;
  std::vector<double> x_values;
};

// Fraction of roots with scaled distance <= x, on a grid. sample_count is the
// number of pooled roots (0 for analytic curves); binomial error bars follow
// from it.
struct IpxCurve {
  std::vector<double> x_grid;
  std::vector<double> values;
  std::size_t sample_count = 0;

  std::vector<double> std_errors() const;
};

struct SpacingPair {
  double s;  // rescaled gap n |theta_{j+1} - theta_j| / (2 pi)
  double x;  // scaled distance of the critical point assigned to the gap
};

struct SpacingCorrelationSample {
  std::vector<SpacingPair> pairs;
};

// Least-squares slope through the origin of x against pi^2 S^2 / 2.
struct BetaFit {
  double beta_hat = 0.0;
  double std_error = 0.0;
  std::size_t used = 0;
};

ScaledRadialSample scaled_distances(const CriticalPointSet& cps);

// `points` values geometrically spaced on [lo, hi], both ends included.
std::vector<double> geometric_grid(double lo, double hi, int points);

// Throws PreconditionError for an empty pool or a grid that is not strictly
// increasing.
IpxCurve empirical_ipx(std::span<const ScaledRadialSample> samples, std::span<const double> x_grid);

// 1 - 1/x (not clamped). Throws DomainError for x <= 0.
double ipx_large_x(double x);

// 2 / (pi (n-1) (1-r^2)^2). Throws DomainError unless 0 <= r < 1 and n >= 2.
double rho_asymptotic(double r, int n);

// Each critical point is assigned to the gap between circularly adjacent
// eigenphases whose midpoint direction is angularly nearest to arg(lambda).
SpacingCorrelationSample spacing_correlation(const EigenPhaseSpectrum& spectrum,
                                             const CriticalPointSet& cps);

BetaFit fit_beta(std::span<const SpacingPair> pairs, double x_max = 1.0);

// Rescaled gaps n (theta_{j+k+1} - theta_j) / (2 pi), circularly; k = 0 gives
// nearest-neighbour spacings, k = 1 next-nearest.
std::vector<double> rescaled_spacings(const EigenPhaseSpectrum& spectrum, int k = 0);

// Slope of log(density) against log(value) over [lo, hi], from a histogram
// with `bins` logarithmically spaced bins. Throws StatisticsError when a bin
// holds fewer than `min_count` values.
double loglog_density_slope(std::span<const double> values, double lo, double hi, int bins = 8,
                            std::size_t min_count = 5);

// Exponent of the next-nearest spacing density near zero, pooled over
// `spectra`, measured on the window [lo, hi] (0 < lo < hi < 1) with four
// logarithmic bins.
double next_spacing_probe(std::span<const EigenPhaseSpectrum> spectra, double lo, double hi);

}  // namespace cuecrit
