#include "cuecrit/critical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cuecrit/errors.hpp"

namespace cuecrit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxSweeps = 200;
constexpr double kDisplacementTol = 1e-13;
// A root of multiplicity m is only resolved to about eps^(1/m), so iterates
// converging to it scatter far beyond round-off. Iterates closer than this are
// candidates for one multiple root.
constexpr double kClusterRadius = 1e-3;

struct LogDerivative {
  Complex s;       // sum 1/(z - w)
  Complex ds;      // d/dz of s
  double scale;    // sum |1/(z - w)|
};

LogDerivative evaluate(std::span<const Complex> roots, Complex z) {
  LogDerivative out{Complex(0.0), Complex(0.0), 0.0};
  for (const Complex& w : roots) {
    const Complex inv = 1.0 / (z - w);
    out.s += inv;
    out.ds -= inv * inv;
    out.scale += std::abs(inv);
  }
  return out;
}

void check_distinct(const EigenPhaseSpectrum& spectrum) {
  const auto phases = spectrum.phases();
  const std::size_t n = phases.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double gap = j + 1 < n ? phases[j + 1] - phases[j] : phases[0] + kTwoPi - phases[j];
    if (gap < 1e-12) {
      std::ostringstream msg;
      msg << "critical_points: eigenphases " << j << " and " << (j + 1) % n
          << " are degenerate (gap " << gap << ")";
      throw PreconditionError(msg.str());
    }
  }
}

std::vector<Complex> midpoint_starts(const EigenPhaseSpectrum& spectrum,
                                     std::span<const Complex> roots) {
  const auto phases = spectrum.phases();
  const std::size_t n = phases.size();
  std::size_t widest = 0;
  double widest_gap = -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double gap = j + 1 < n ? phases[j + 1] - phases[j] : phases[0] + kTwoPi - phases[j];
    if (gap > widest_gap) {
      widest_gap = gap;
      widest = j;
    }
  }
  const double pull = 1.0 - 1.0 / (4.0 * static_cast<double>(n));
  std::vector<Complex> starts;
  starts.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == widest) continue;
    starts.push_back(pull * 0.5 * (roots[j] + roots[(j + 1) % n]));
  }
  return starts;
}

double relative_residual(const LogDerivative& d) {
  return d.scale == 0.0 ? 0.0 : std::abs(d.s) / d.scale;
}

// Groups iterates by single linkage within kClusterRadius. A group is accepted
// as one multiple root when its centroid passes the residual gate; its members
// are then replaced by the centroid and carry the group size as multiplicity.
std::vector<int> merge_clusters(std::span<const Complex> roots, std::vector<Complex>& z, double tol) {
  const std::size_t m = z.size();
  std::vector<std::size_t> parent(m);
  for (std::size_t i = 0; i < m; ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (std::abs(z[i] - z[j]) <= kClusterRadius) parent[find(i)] = find(j);

  std::vector<int> multiplicity(m, 1);
  std::vector<std::vector<std::size_t>> groups(m);
  for (std::size_t i = 0; i < m; ++i) groups[find(i)].push_back(i);
  for (const auto& g : groups) {
    if (g.size() < 2) continue;
    Complex centroid(0.0);
    for (std::size_t i : g) centroid += z[i];
    centroid /= static_cast<double>(g.size());
    if (relative_residual(evaluate(roots, centroid)) > tol) continue;
    for (std::size_t i : g) {
      z[i] = centroid;
      multiplicity[i] = static_cast<int>(g.size());
    }
  }
  return multiplicity;
}

}  // namespace

Complex log_derivative(const EigenPhaseSpectrum& spectrum, Complex z) {
  Complex sum(0.0);
  for (double t : spectrum.phases()) {
    const Complex diff = z - std::polar(1.0, t);
    if (std::abs(diff) < 1e-14) throw PoleError("log_derivative: z coincides with an eigenvalue");
    sum += 1.0 / diff;
  }
  return sum;
}

CriticalPointSet critical_points(const EigenPhaseSpectrum& spectrum) {
  const std::size_t n = spectrum.n();
  if (n < 2) throw PreconditionError("critical_points: need n >= 2");
  check_distinct(spectrum);

  const std::vector<Complex> roots = spectrum.unit_roots();
  std::vector<Complex> z = midpoint_starts(spectrum, roots);
  const std::size_t m = z.size();

  // Aberth-Ehrlich, Gauss-Seidel ordering. The Newton correction for
  // q = Z' is q/q' = S / (S' + S^2) with S = Z'/Z.
  std::vector<char> frozen(m, 0);
  int sweep = 0;
  double max_step = std::numeric_limits<double>::infinity();
  for (; sweep < kMaxSweeps && max_step > kDisplacementTol; ++sweep) {
    max_step = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (frozen[i]) continue;
      const LogDerivative d = evaluate(roots, z[i]);
      const Complex denom = d.ds + d.s * d.s;
      if (d.s == Complex(0.0) || denom == Complex(0.0)) {
        frozen[i] = 1;
        continue;
      }
      const Complex newton = d.s / denom;
      Complex repulsion(0.0);
      for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        const Complex diff = z[i] - z[j];
        if (diff != Complex(0.0)) repulsion += 1.0 / diff;
      }
      const Complex step = newton / (1.0 - newton * repulsion);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[i] -= step;
      const double len = std::abs(step);
      max_step = std::max(max_step, len);
      if (len <= kDisplacementTol * std::max(1.0, std::abs(z[i]))) frozen[i] = 1;
    }
    if (std::all_of(frozen.begin(), frozen.end(), [](char f) { return f != 0; })) break;
  }

  const double tol = 1e-8 * static_cast<double>(n);
  CriticalPointSet out;
  out.n = static_cast<int>(n);
  out.multiplicity = merge_clusters(roots, z, tol);

  // Newton polish on S for simple roots; a step is kept only if it lowers |S|.
  for (std::size_t i = 0; i < m; ++i) {
    if (out.multiplicity[i] != 1) continue;
    for (int k = 0; k < 3; ++k) {
      const LogDerivative d = evaluate(roots, z[i]);
      if (d.ds == Complex(0.0)) break;
      const Complex candidate = z[i] - d.s / d.ds;
      if (std::abs(evaluate(roots, candidate).s) < std::abs(d.s)) {
        z[i] = candidate;
      } else {
        break;
      }
    }
  }

  out.points = std::move(z);
  out.residuals.resize(m);
  double worst = 0.0;
  std::size_t worst_index = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double res = relative_residual(evaluate(roots, out.points[i]));
    out.residuals[i] = res;
    if (res > worst) {
      worst = res;
      worst_index = i;
    }
  }
  if (worst > tol) {
    std::ostringstream msg;
    msg << "critical_points: Aberth iteration did not converge after " << sweep
        << " sweeps; worst relative residual " << worst << " at root " << worst_index;
    throw ConvergenceError(msg.str(), worst, sweep);
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!(std::abs(out.points[i]) < 1.0)) {
      std::ostringstream msg;
      msg << "critical_points: root " << i << " left the unit disk (|z| = "
          << std::abs(out.points[i]) << ")";
      throw ConvergenceError(msg.str(), out.residuals[i], sweep);
    }
  }
  return out;
}

CriticalPointSet critical_points_oracle(const EigenPhaseSpectrum& spectrum) {
  const std::size_t n = spectrum.n();
  if (n < 2 || n > 64) throw PreconditionError("critical_points_oracle: need 2 <= n <= 64");
  const std::vector<Complex> roots = spectrum.unit_roots();
  ComplexDenseMatrix a(n, n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = roots[i] * ((i == j ? 1.0 : 0.0) - inv_n);

  std::vector<Complex> eig = eigenvalues(a);
  const auto smallest = std::min_element(eig.begin(), eig.end(), [](Complex x, Complex y) {
    return std::abs(x) < std::abs(y);
  });
  eig.erase(smallest);

  CriticalPointSet out;
  out.n = static_cast<int>(n);
  out.multiplicity = merge_clusters(roots, eig, 1e-8 * static_cast<double>(n));
  out.residuals.reserve(eig.size());
  for (const Complex& p : eig) out.residuals.push_back(relative_residual(evaluate(roots, p)));
  out.points = std::move(eig);
  return out;
}

namespace {

// Hungarian method (potentials form), cost[i][j] for an m x m problem.
// Returns assignment row -> column.
std::vector<std::size_t> hungarian(const std::vector<double>& cost, std::size_t m) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(m + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (std::size_t i = 1; i <= m; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assign(m);
  for (std::size_t j = 1; j <= m; ++j) assign[p[j] - 1] = j - 1;
  return assign;
}

}  // namespace

double matching_distance(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw DimensionError("matching_distance: sizes differ");
  const std::size_t m = a.size();
  if (m == 0) return 0.0;
  if (m <= 64) {
    std::vector<double> cost(m * m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) cost[i * m + j] = std::abs(a[i] - b[j]);
    const auto assign = hungarian(cost, m);
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) worst = std::max(worst, cost[i * m + assign[i]]);
    return worst;
  }
  std::vector<char> taken(m, 0);
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t best = m;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      if (taken[j]) continue;
      const double d = std::abs(a[i] - b[j]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    taken[best] = 1;
    worst = std::max(worst, best_d);
  }
  return worst;
}

}  // namespace cuecrit
