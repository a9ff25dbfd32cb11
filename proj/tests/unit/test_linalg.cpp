#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "cuecrit/errors.hpp"
#include "cuecrit/haar.hpp"
#include "cuecrit/linalg.hpp"

using namespace cuecrit;

namespace {

constexpr double kPi = std::numbers::pi;

double max_lower(const ComplexDenseMatrix& r) {
  double worst = 0.0;
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) worst = std::max(worst, std::abs(r(i, j)));
  return worst;
}

// Laplace expansion along the first row.
Complex cofactor_det(const ComplexDenseMatrix& a) {
  const std::size_t n = a.rows();
  if (n == 1) return a(0, 0);
  Complex sum(0.0);
  for (std::size_t c = 0; c < n; ++c) {
    ComplexDenseMatrix minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0, k = 0; j < n; ++j)
        if (j != c) minor(i - 1, k++) = a(i, j);
    const double sign = c % 2 == 0 ? 1.0 : -1.0;
    sum += sign * a(0, c) * cofactor_det(minor);
  }
  return sum;
}

ComplexDenseMatrix leading_block(const ComplexDenseMatrix& a, std::size_t k) {
  ComplexDenseMatrix out(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) out(i, j) = a(i, j);
  return out;
}

double phase_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 2.0 * kPi);
  return std::min(d, 2.0 * kPi - d);
}

}  // namespace

TEST_CASE("matrix construction validates shape and entries") {
  CHECK_THROWS_AS(ComplexDenseMatrix(2, 2, std::vector<Complex>(3)), DimensionError);
  std::vector<Complex> bad(4, Complex(1.0));
  bad[2] = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(ComplexDenseMatrix(2, 2, bad), PreconditionError);
  bad[2] = Complex(0.0, INFINITY);
  CHECK_THROWS_AS(ComplexDenseMatrix(2, 2, bad), PreconditionError);
}

TEST_CASE("householder_qr on trivial inputs") {
  SUBCASE("identity") {
    const auto qr = householder_qr(ComplexDenseMatrix::identity(3));
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        if (i == j) {
          CHECK(std::abs(qr.q(i, j)) == doctest::Approx(1.0).epsilon(1e-14));
          CHECK(std::abs(qr.r(i, j)) == doctest::Approx(1.0).epsilon(1e-14));
        } else {
          CHECK(std::abs(qr.q(i, j)) < 1e-14);
          CHECK(std::abs(qr.r(i, j)) < 1e-14);
        }
      }
    }
  }
  SUBCASE("diagonal") {
    const std::vector<Complex> d{2.0, 3.0};
    const auto qr = householder_qr(ComplexDenseMatrix::diagonal(d));
    CHECK(std::abs(qr.r(0, 0)) == doctest::Approx(2.0));
    CHECK(std::abs(qr.r(1, 1)) == doctest::Approx(3.0));
    CHECK(std::abs(qr.r(0, 1)) < 1e-14);
  }
  SUBCASE("non-square input") {
    CHECK_THROWS_AS(householder_qr(ComplexDenseMatrix(2, 3)), DimensionError);
  }
}

TEST_CASE("householder_qr reconstruction property") {
  for (int n : {1, 2, 3, 5, 8, 13, 21, 40}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const ComplexDenseMatrix a = sample_ginibre(n, 1000 + seed);
      const auto qr = householder_qr(a);
      const double budget = 1e-12 * n * a.max_abs();
      CHECK((qr.q * qr.r - a).max_abs() <= budget);
      CHECK(unitarity_defect(qr.q) <= 1e-12 * n);
      CHECK(max_lower(qr.r) == 0.0);
    }
  }
}

TEST_CASE("eigenphases of trivial unitaries") {
  SUBCASE("identity") {
    const auto s = eigenphases(ComplexDenseMatrix::identity(4));
    REQUIRE(s.n() == 4);
    for (double t : s.phases()) CHECK(phase_distance(t, 0.0) < 1e-14);
  }
  SUBCASE("diag(1, i)") {
    const std::vector<Complex> d{1.0, Complex(0.0, 1.0)};
    const auto s = eigenphases(ComplexDenseMatrix::diagonal(d));
    REQUIRE(s.n() == 2);
    CHECK(s[0] == doctest::Approx(0.0));
    CHECK(s[1] == doctest::Approx(kPi / 2));
  }
  SUBCASE("swap permutation") {
    const ComplexDenseMatrix p(2, 2, {0.0, 1.0, 1.0, 0.0});
    const auto s = eigenphases(p);
    REQUIRE(s.n() == 2);
    CHECK(phase_distance(s[0], 0.0) < 1e-12);
    CHECK(s[1] == doctest::Approx(kPi));
  }
  SUBCASE("non-unitary input") {
    const std::vector<Complex> d{1.0, 2.0};
    CHECK_THROWS_AS(eigenphases(ComplexDenseMatrix::diagonal(d)), PreconditionError);
    CHECK_THROWS_AS(eigenphases(ComplexDenseMatrix(2, 3)), DimensionError);
  }
}

TEST_CASE("eigenphases: unimodularity, completeness, eigen-consistency") {
  for (int n : {2, 6, 20, 50}) {
    const ComplexDenseMatrix u = sample_haar_unitary(n, 77 + n);
    for (const Complex& ev : eigenvalues(u)) CHECK(std::abs(std::abs(ev) - 1.0) <= 1e-8);

    const auto s = eigenphases(u);
    REQUIRE(s.n() == static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < s.n(); ++j) {
      CHECK(s[j] >= 0.0);
      CHECK(s[j] < 2.0 * kPi);
      if (j > 0) CHECK(s[j - 1] <= s[j]);
    }
    // det(u) equals the product of the eigenvalues.
    double phase_sum = 0.0;
    for (double t : s.phases()) phase_sum += t;
    CHECK(phase_distance(phase_sum, std::arg(determinant(u))) <= 1e-8);

    if (n <= 20) {
      // det(u - lambda_j I) vanishes relative to prod_{k != j} |lambda_k - lambda_j|.
      const auto roots = s.unit_roots();
      for (std::size_t j = 0; j < roots.size(); ++j) {
        ComplexDenseMatrix shifted = u;
        for (int i = 0; i < n; ++i) shifted(i, i) -= roots[j];
        double scale = 1.0;
        for (std::size_t k = 0; k < roots.size(); ++k)
          if (k != j) scale *= std::abs(roots[k] - roots[j]);
        CHECK(std::abs(determinant(shifted)) <= 1e-10 * std::max(scale, 1e-300) + 1e-300);
      }
    }
  }
}

TEST_CASE("eigenvalues of a general matrix: trace and determinant identities") {
  for (int n : {3, 9, 15}) {
    const ComplexDenseMatrix a = sample_ginibre(n, 5 + n);
    const auto ev = eigenvalues(a);
    REQUIRE(ev.size() == static_cast<std::size_t>(n));
    Complex trace(0.0), sum(0.0), prod(1.0);
    for (int i = 0; i < n; ++i) trace += a(i, i);
    for (const Complex& e : ev) {
      sum += e;
      prod *= e;
    }
    const Complex det = determinant(a);
    CHECK(std::abs(sum - trace) <= 1e-10 * n);
    CHECK(std::abs(prod - det) <= 1e-9 * std::abs(det));
  }
  SUBCASE("triangular input has its diagonal as spectrum") {
    ComplexDenseMatrix t(3, 3, {1.0, 5.0, Complex(0, 2), 0.0, Complex(0, 3), 4.0, 0.0, 0.0, -2.0});
    auto ev = eigenvalues(t);
    std::vector<Complex> expected{1.0, Complex(0, 3), -2.0};
    for (const Complex& e : expected) {
      double best = 1e9;
      for (const Complex& f : ev) best = std::min(best, std::abs(e - f));
      CHECK(best < 1e-12);
    }
  }
}

TEST_CASE("determinant") {
  CHECK(std::abs(determinant(ComplexDenseMatrix::identity(5)) - 1.0) == 0.0);
  const std::vector<Complex> d{2.0, Complex(0.0, 1.0)};
  CHECK(std::abs(determinant(ComplexDenseMatrix::diagonal(d)) - Complex(0.0, 2.0)) < 1e-15);
  CHECK(determinant(ComplexDenseMatrix(3, 3)) == Complex(0.0));
  CHECK_THROWS_AS(determinant(ComplexDenseMatrix(2, 3)), DimensionError);

  SUBCASE("upper triangular input is exact") {
    ComplexDenseMatrix t(3, 3, {2.0, 7.0, 1.0, 0.0, Complex(0, 3), 9.0, 0.0, 0.0, 0.5});
    CHECK(determinant(t) == Complex(0.0, 3.0));
  }
  SUBCASE("random draw against cofactor expansion") {
    const ComplexDenseMatrix a = sample_ginibre(10, 2024);
    for (std::size_t k : {4u, 6u}) {
      const auto block = leading_block(a, k);
      const Complex oracle = cofactor_det(block);
      CHECK(std::abs(determinant(block) - oracle) <= 1e-12 * std::max(1.0, std::abs(oracle)));
    }
  }
}

TEST_CASE("EigenPhaseSpectrum validation") {
  CHECK_THROWS_AS(EigenPhaseSpectrum({0.5, 0.1}), PreconditionError);
  CHECK_THROWS_AS(EigenPhaseSpectrum({-0.1}), PreconditionError);
  CHECK_THROWS_AS(EigenPhaseSpectrum({2.0 * kPi}), PreconditionError);
  CHECK_THROWS_AS(EigenPhaseSpectrum(std::vector<double>{}), PreconditionError);
  const std::vector<double> raw{-kPi / 2, 7.0 * kPi, 0.25};
  const auto s = EigenPhaseSpectrum::from_angles(raw);
  REQUIRE(s.n() == 3);
  CHECK(s[0] == doctest::Approx(0.25));
  CHECK(s[1] == doctest::Approx(kPi));
  CHECK(s[2] == doctest::Approx(1.5 * kPi));
}
