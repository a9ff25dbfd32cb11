#include "cuecrit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cuecrit/errors.hpp"

namespace cuecrit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double circular_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

}  // namespace

std::vector<double> IpxCurve::std_errors() const {
  std::vector<double> out(values.size(), 0.0);
  if (sample_count == 0) return out;
  const auto count = static_cast<double>(sample_count);
  for (std::size_t k = 0; k < values.size(); ++k)
    out[k] = std::sqrt(values[k] * (1.0 - values[k]) / count);
  return out;
}

ScaledRadialSample scaled_distances(const CriticalPointSet& cps) {
  ScaledRadialSample out;
  out.n = cps.n;
  out.x_values.reserve(cps.points.size());
  const double scale = static_cast<double>(cps.n - 1);
  for (const Complex& p : cps.points) out.x_values.push_back(scale * (1.0 - std::abs(p)));
  return out;
}

std::vector<double> geometric_grid(double lo, double hi, int points) {
  if (!(lo > 0.0 && hi > lo) || points < 2)
    throw PreconditionError("geometric_grid: need 0 < lo < hi and at least two points");
  std::vector<double> grid(points);
  const double ratio = std::log(hi / lo) / static_cast<double>(points - 1);
  for (int k = 0; k < points; ++k) grid[k] = lo * std::exp(ratio * k);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

IpxCurve empirical_ipx(std::span<const ScaledRadialSample> samples, std::span<const double> x_grid) {
  for (std::size_t k = 1; k < x_grid.size(); ++k)
    if (!(x_grid[k] > x_grid[k - 1])) throw PreconditionError("empirical_ipx: grid must be strictly increasing");
  std::vector<double> pool;
  for (const auto& s : samples) pool.insert(pool.end(), s.x_values.begin(), s.x_values.end());
  if (pool.empty()) throw PreconditionError("empirical_ipx: no roots to aggregate");
  std::sort(pool.begin(), pool.end());

  IpxCurve curve;
  curve.x_grid.assign(x_grid.begin(), x_grid.end());
  curve.sample_count = pool.size();
  curve.values.reserve(x_grid.size());
  const auto total = static_cast<double>(pool.size());
  for (double x : x_grid) {
    const auto below = std::upper_bound(pool.begin(), pool.end(), x) - pool.begin();
    curve.values.push_back(static_cast<double>(below) / total);
  }
  return curve;
}

double ipx_large_x(double x) {
  if (!(x > 0.0)) throw DomainError("ipx_large_x: x must be positive");
  return 1.0 - 1.0 / x;
}

double rho_asymptotic(double r, int n) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("rho_asymptotic: need 0 <= r < 1");
  if (n < 2) throw DomainError("rho_asymptotic: need n >= 2");
  const double one_minus = 1.0 - r * r;
  return 2.0 / (kPi * static_cast<double>(n - 1) * one_minus * one_minus);
}

SpacingCorrelationSample spacing_correlation(const EigenPhaseSpectrum& spectrum,
                                             const CriticalPointSet& cps) {
  const auto phases = spectrum.phases();
  const std::size_t n = phases.size();
  if (static_cast<int>(n) != cps.n) throw PreconditionError("spacing_correlation: size mismatch");

  std::vector<double> midpoint(n);
  std::vector<double> spacing(n);
  const double to_unit = static_cast<double>(n) / kTwoPi;
  for (std::size_t j = 0; j < n; ++j) {
    const double gap = j + 1 < n ? phases[j + 1] - phases[j] : phases[0] + kTwoPi - phases[j];
    midpoint[j] = phases[j] + 0.5 * gap;
    spacing[j] = to_unit * gap;
  }

  const ScaledRadialSample radial = scaled_distances(cps);
  SpacingCorrelationSample out;
  out.pairs.reserve(cps.points.size());
  for (std::size_t i = 0; i < cps.points.size(); ++i) {
    const double angle = std::arg(cps.points[i]);
    std::size_t best = 0;
    double best_d = kTwoPi;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = circular_distance(angle, midpoint[j]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    out.pairs.push_back({spacing[best], radial.x_values[i]});
  }
  return out;
}

BetaFit fit_beta(std::span<const SpacingPair> pairs, double x_max) {
  double sxy = 0.0;
  double syy = 0.0;
  std::size_t used = 0;
  for (const auto& p : pairs) {
    if (p.x > x_max) continue;
    const double y = 0.5 * kPi * kPi * p.s * p.s;
    sxy += p.x * y;
    syy += y * y;
    ++used;
  }
  if (used < 2 || syy == 0.0) throw StatisticsError("fit_beta: fewer than two usable pairs");
  BetaFit fit;
  fit.beta_hat = sxy / syy;
  fit.used = used;
  double sse = 0.0;
  for (const auto& p : pairs) {
    if (p.x > x_max) continue;
    const double r = p.x - fit.beta_hat * 0.5 * kPi * kPi * p.s * p.s;
    sse += r * r;
  }
  fit.std_error = std::sqrt(sse / static_cast<double>(used - 1) / syy);
  return fit;
}

std::vector<double> rescaled_spacings(const EigenPhaseSpectrum& spectrum, int k) {
  const auto phases = spectrum.phases();
  const std::size_t n = phases.size();
  if (k < 0 || static_cast<std::size_t>(k) >= n)
    throw PreconditionError("rescaled_spacings: k out of range");
  std::vector<double> out(n);
  const double to_unit = static_cast<double>(n) / kTwoPi;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t ahead = j + static_cast<std::size_t>(k) + 1;
    const double end = ahead < n ? phases[ahead] : phases[ahead - n] + kTwoPi;
    out[j] = to_unit * (end - phases[j]);
  }
  return out;
}

double loglog_density_slope(std::span<const double> values, double lo, double hi, int bins,
                            std::size_t min_count) {
  if (!(lo > 0.0 && hi > lo) || bins < 2)
    throw PreconditionError("loglog_density_slope: need 0 < lo < hi and bins >= 2");
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / bins;
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    if (!(v >= lo && v < hi)) continue;
    auto b = static_cast<int>((std::log(v) - log_lo) / step);
    counts[std::clamp(b, 0, bins - 1)] += 1;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int b = 0; b < bins; ++b) {
    if (counts[b] < min_count)
      throw StatisticsError("loglog_density_slope: too few values in the window");
    const double left = std::exp(log_lo + step * b);
    const double right = std::exp(log_lo + step * (b + 1));
    const double lx = log_lo + step * (b + 0.5);
    const double ly = std::log(static_cast<double>(counts[b]) / (right - left));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = bins;
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double next_spacing_probe(std::span<const EigenPhaseSpectrum> spectra, double lo, double hi) {
  if (!(lo > 0.0 && hi < 1.0 && lo < hi))
    throw PreconditionError("next_spacing_probe: window must lie inside (0, 1)");
  std::vector<double> pooled;
  for (const auto& s : spectra) {
    if (s.n() < 3) throw PreconditionError("next_spacing_probe: need n >= 3");
    const auto v = rescaled_spacings(s, 1);
    pooled.insert(pooled.end(), v.begin(), v.end());
  }
  return loglog_density_slope(pooled, lo, hi, 4);
}

}  // namespace cuecrit
