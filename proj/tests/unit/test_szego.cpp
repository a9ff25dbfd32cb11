#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "cuecrit/errors.hpp"
#include "cuecrit/szego.hpp"

using namespace cuecrit;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

std::vector<SzegoParameters> parameter_grid() {
  std::vector<SzegoParameters> out;
  for (double r : {0.0, 0.3, 0.5, 0.9})
    for (double alpha : {0.0, 0.7})
      out.push_back({Complex(0.8, -0.6), alpha, std::polar(r, 1.1)});
  return out;
}

Complex simpson_step(const std::function<Complex(double)>& f, double a, double b, Complex fa, Complex fm,
                     Complex fb, Complex whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const Complex flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  const Complex left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const Complex right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

Complex adaptive_simpson(const std::function<Complex(double)>& f, double a, double b, double tol) {
  // Split first so the initial estimate is not accidentally exact.
  const int pieces = 16;
  Complex sum(0.0);
  for (int p = 0; p < pieces; ++p) {
    const double lo = a + (b - a) * p / pieces, hi = a + (b - a) * (p + 1) / pieces;
    const Complex fa = f(lo), fm = f(0.5 * (lo + hi)), fb = f(hi);
    sum += simpson_step(f, lo, hi, fa, fm, fb, (hi - lo) / 6.0 * (fa + 4.0 * fm + fb), tol / pieces, 40);
  }
  return sum;
}

}  // namespace

TEST_CASE("g_hat and h_hat") {
  const Complex w(0.3, -1.2);
  const SzegoParameters p{w, 0.4, Complex(0.2, 0.5)};
  CHECK(g_hat(p, 0) == Complex(0.0));
  CHECK(h_hat(p, 0) == Complex(0.0));
  CHECK(std::abs(g_hat(p, 1) + w / 2.0) < 1e-15);
  CHECK(std::abs(h_hat(p, 1) + w / 2.0) < 1e-15);

  const SzegoParameters origin{w, 2.0, 0.0};
  CHECK(std::abs(g_hat(origin, 2) - Complex(-1.0)) < 1e-15);
  CHECK(std::abs(h_hat(origin, 2) + kI) < 1e-15);

  const SzegoParameters flat{w, 0.0, Complex(0.4, -0.1)};
  for (int k = -6; k <= 6; ++k) CHECK(g_hat(flat, k) == h_hat(flat, k));

  for (int k = 1; k <= 10; ++k) {
    const Complex zb = std::conj(p.z);
    const Complex expected = -(w / 2.0) * std::pow(zb, k - 1) - (p.alpha / 2.0) * (k - 1.0) * std::pow(zb, k - 2);
    CHECK(std::abs(g_hat(p, k) - expected) < 1e-15);
    CHECK(g_hat(p, -k) == std::conj(g_hat(p, k)));
    CHECK(h_hat(p, -k) == std::conj(h_hat(p, k)));
    CHECK(symbol_hat(p, SymbolKind::h, k) == h_hat(p, k));
  }
}

TEST_CASE("szego_sum") {
  CHECK(szego_sum({0.0, 0.0, Complex(0.3, 0.1)}, SymbolKind::g) == 0.0);
  for (double r : {0.0, 0.5, 0.8}) {
    const Complex w(1.5, 0.5);
    const SzegoParameters p{w, 0.0, std::polar(r, 0.7)};
    const double expected = std::norm(w) / (4.0 * std::pow(1.0 - r * r, 2));
    CHECK(szego_sum(p, SymbolKind::g) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(szego_sum(p, SymbolKind::h) == doctest::Approx(expected).epsilon(1e-14));
  }
  // Direct partial sums up to K = 2000; for r <= 0.9 the neglected tail is
  // below k^2 r^(2k) ~ 1e-170.
  for (const auto& p : parameter_grid()) {
    for (SymbolKind which : {SymbolKind::g, SymbolKind::h}) {
      double direct = 0.0;
      for (int k = 1; k <= 2000; ++k) direct += k * std::norm(symbol_hat(p, which, k));
      const double closed = szego_sum(p, which);
      CAPTURE(std::abs(p.z));
      CHECK(std::abs(direct - closed) <= 1e-12 * std::max(1.0, std::abs(closed)));
    }
  }
  CHECK_THROWS_AS(szego_sum({1.0, 0.0, 1.0}, SymbolKind::g), DomainError);
  CHECK_THROWS_AS(szego_sum({1.0, 0.0, Complex(0.8, 0.8)}, SymbolKind::h), DomainError);
}

TEST_CASE("symbol_value matches its Fourier series and is real") {
  for (const auto& p : parameter_grid()) {
    if (std::abs(p.z) > 0.6) continue;
    for (SymbolKind which : {SymbolKind::g, SymbolKind::h}) {
      for (double theta : {0.0, 0.4, 2.0, 3.5, 6.0}) {
        Complex sum = symbol_hat(p, which, 0);
        for (int k = 1; k <= 200; ++k) {
          sum += symbol_hat(p, which, k) * std::polar(1.0, k * theta);
          sum += symbol_hat(p, which, -k) * std::polar(1.0, -k * theta);
        }
        CHECK(std::abs(sum.imag()) < 1e-12);
        CHECK(symbol_value(p, which, theta) == doctest::Approx(sum.real()).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("symbol_fourier") {
  SUBCASE("zero parameters give the constant symbol 1") {
    const auto s = symbol_fourier({0.0, 0.0, 0.0}, SymbolKind::g, 64);
    CHECK(std::abs(s[0] - 1.0) < 1e-14);
    for (int k = 1; k <= s.truncation(); ++k) {
      CHECK(std::abs(s[k]) <= 1e-14);
      CHECK(std::abs(s[-k]) <= 1e-14);
    }
  }
  SUBCASE("Parseval for a unimodular function") {
    for (const auto& p : parameter_grid()) {
      if (std::abs(p.z) > 0.6) continue;
      for (SymbolKind which : {SymbolKind::g, SymbolKind::h}) {
        const auto s = symbol_fourier(p, which, default_grid_size(8, std::abs(p.z)));
        double total = 0.0;
        for (int k = -s.truncation(); k <= s.truncation(); ++k) total += std::norm(s[k]);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
  SUBCASE("first coefficient against adaptive quadrature") {
    const SzegoParameters p{1.0, 0.0, 0.5};
    const auto s = symbol_fourier(p, SymbolKind::g, default_grid_size(8, 0.5));
    const auto integrand = [&](double t) {
      return std::exp(kI * symbol_value(p, SymbolKind::g, t)) * std::polar(1.0, -t) / (2.0 * kPi);
    };
    const Complex oracle = adaptive_simpson(integrand, 0.0, 2.0 * kPi, 1e-14);
    CHECK(std::abs(s[1] - oracle) <= 1e-10);
    const Complex oracle_minus = adaptive_simpson(
        [&](double t) { return std::exp(kI * symbol_value(p, SymbolKind::g, t)) * std::polar(1.0, t) / (2.0 * kPi); },
        0.0, 2.0 * kPi, 1e-14);
    CHECK(std::abs(s[-1] - oracle_minus) <= 1e-10);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(symbol_fourier({1.0, 0.5, 0.9}, SymbolKind::g, 8), ResolutionError);
    CHECK_THROWS_AS(symbol_fourier({1.0, 0.0, 0.5}, SymbolKind::g, 12), PreconditionError);
    CHECK_THROWS_AS(symbol_fourier({1.0, 0.0, 0.5}, SymbolKind::g, 4), PreconditionError);
    CHECK_THROWS_AS(symbol_fourier({1.0, 0.0, 1.0}, SymbolKind::g, 64), DomainError);
  }
}

TEST_CASE("toeplitz_determinant") {
  const auto one = ToeplitzSymbol::constant(1.0, 10);
  for (int n : {1, 4, 10}) CHECK(std::abs(toeplitz_determinant(one, n) - 1.0) < 1e-15);
  const auto s = symbol_fourier({Complex(0.4, 0.2), 0.3, Complex(0.1, 0.2)}, SymbolKind::h, 256);
  CHECK(toeplitz_determinant(s, 1) == s[0]);
  // 2 x 2 by hand: f0^2 - f1 f_{-1}.
  CHECK(std::abs(toeplitz_determinant(s, 2) - (s[0] * s[0] - s[1] * s[-1])) < 1e-15);
  CHECK_THROWS_AS(toeplitz_determinant(one, 11), CapabilityError);
  CHECK_THROWS_AS(toeplitz_determinant(one, 0), PreconditionError);
}

TEST_CASE("Heine-Szego identity against Haar Monte Carlo") {
  SUBCASE("n = 6, r = 0.5, w = 1") {
    const SzegoParameters p{1.0, 0.0, 0.5};
    const Complex det = toeplitz_determinant(symbol_fourier(p, SymbolKind::g, default_grid_size(6, 0.5)), 6);
    const auto mc = heine_szego_mc(p, SymbolKind::g, 6, 100000, 2718);
    CHECK(std::abs(mc.mean.real() - det.real()) <= 4.0 * mc.std_error_re);
    CHECK(std::abs(mc.mean.imag() - det.imag()) <= 4.0 * mc.std_error_im);
  }
  SUBCASE("n = 4, complex parameters, both symbols") {
    const SzegoParameters p{Complex(0.7, -0.4), 0.3, Complex(0.3, 0.4)};
    for (SymbolKind which : {SymbolKind::g, SymbolKind::h}) {
      const Complex det = toeplitz_determinant(symbol_fourier(p, which, default_grid_size(4, 0.5)), 4);
      const auto mc = heine_szego_mc(p, which, 4, 40000, 99);
      CHECK(std::abs(mc.mean.real() - det.real()) <= 4.0 * mc.std_error_re);
      CHECK(std::abs(mc.mean.imag() - det.imag()) <= 4.0 * mc.std_error_im);
    }
  }
  SUBCASE("thread count does not change the estimate") {
    const SzegoParameters p{1.0, 0.2, 0.3};
    const auto a = heine_szego_mc(p, SymbolKind::g, 5, 2000, 7, 1);
    const auto b = heine_szego_mc(p, SymbolKind::g, 5, 2000, 7, 3);
    CHECK(a.mean == b.mean);
  }
}

TEST_CASE("szego_limit_error") {
  for (int n : {1, 5, 20}) CHECK(szego_limit_error({0.0, 0.0, 0.5}, SymbolKind::g, n) == 0.0);
  const SzegoParameters p{1.0, 0.0, 0.5};
  double previous = INFINITY;
  for (int n : {8, 16, 32, 64}) {
    const double e = szego_limit_error(p, SymbolKind::g, n);
    CAPTURE(n);
    CHECK(e < previous);
    previous = e;
  }
  CHECK(previous <= 1e-2);
  CHECK(szego_limit_error(p, SymbolKind::h, 64) <= 1e-2);
  // In double precision the quad-precision value agrees with toeplitz_determinant.
  const Complex det = toeplitz_determinant(symbol_fourier(p, SymbolKind::g, default_grid_size(8, 0.5)), 8);
  CHECK(szego_limit_error(p, SymbolKind::g, 8) ==
        doctest::Approx(std::abs(det - std::exp(-szego_sum(p, SymbolKind::g)))).epsilon(1e-8));
  CHECK_THROWS_AS(szego_limit_error(p, SymbolKind::g, 0), PreconditionError);
  CHECK_THROWS_AS(szego_limit_error({1.0, 0.0, 1.2}, SymbolKind::g, 8), DomainError);
}

TEST_CASE("second-derivative formula") {
  CHECK(second_derivative_closed_form(0.0, 0.0) == doctest::Approx(-2.0));
  // -6 r^2/(1-r^2)^4 - 2/(1-r^2)^3 at r = 1/2 is -256/27.
  CHECK(second_derivative_closed_form(0.0, 0.5) == doctest::Approx(-256.0 / 27.0).epsilon(1e-14));
  CHECK(-256.0 / 27.0 == doctest::Approx(-9.4815).epsilon(1e-5));
  const double r = 0.5, w2 = 1.0, d = 1.0 - r * r;
  const double bracket = w2 * r * r / std::pow(d, 6) - 6.0 * r * r / std::pow(d, 4) - 2.0 / std::pow(d, 3);
  CHECK(second_derivative_closed_form(1.0, 0.5) ==
        doctest::Approx(bracket * std::exp(-w2 / (4.0 * d * d))).epsilon(1e-14));

  const auto check = second_derivative_check(1.0, 0.5, 64, 1e-3);
  CHECK(check.closed_form == doctest::Approx(second_derivative_closed_form(1.0, 0.5)));
  CHECK(std::abs(check.finite_difference - check.closed_form) <= 0.01 * std::abs(check.closed_form));
  CHECK_THROWS_AS(second_derivative_check(1.0, 0.5, 8, 1e-5), PreconditionError);
  CHECK_THROWS_AS(second_derivative_check(1.0, 0.5, 8, 0.1), PreconditionError);
}

TEST_CASE("ds_moment_mc") {
  const std::vector<std::vector<int>> partitions{{1},    {2},       {1, 1},       {3},    {2, 1},      {1, 1, 1},
                                                 {4},    {3, 1},    {2, 2},       {2, 1, 1}, {1, 1, 1, 1}};
  const std::vector<double> exact{1, 2, 2, 3, 2, 6, 4, 3, 8, 4, 24};
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    const auto m = ds_moment_mc(partitions[i], 8, 20000, 1000 + i);
    CAPTURE(i);
    CHECK(m.exact == exact[i]);
    CHECK(m.exact_regime);
    CHECK(std::abs(m.estimate - m.exact) <= 4.0 * m.std_error);
  }
  const auto outside = ds_moment_mc({5}, 4, 2000, 3);
  CHECK_FALSE(outside.exact_regime);
  CHECK(std::isfinite(outside.estimate));
  CHECK_THROWS_AS(ds_moment_mc({}, 4, 10, 1), PreconditionError);
  CHECK_THROWS_AS(ds_moment_mc({0}, 4, 10, 1), PreconditionError);
}
