#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cuecrit/ensemble.hpp"
#include "cuecrit/errors.hpp"
#include "cuecrit/haar.hpp"
#include "cuecrit/stats.hpp"

using namespace cuecrit;

namespace {

constexpr double kPi = std::numbers::pi;

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - m) * (x - m);
  var /= static_cast<double>(v.size() - 1);
  return {m, std::sqrt(var / static_cast<double>(v.size()))};
}

// One-sample Kolmogorov-Smirnov statistic against Uniform[0, 2pi).
double ks_uniform(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = v[i] / (2.0 * kPi);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

// Asymptotic 1% critical value of the KS statistic: sqrt(-ln(0.005)/2)/sqrt(n).
double ks_critical_1pct(std::size_t n) {
  return std::sqrt(-std::log(0.005) / 2.0) / std::sqrt(static_cast<double>(n));
}

}  // namespace

TEST_CASE("sample_ginibre: shape and determinism") {
  const auto a = sample_ginibre(3, 42);
  const auto b = sample_ginibre(3, 42);
  CHECK(std::equal(a.entries().begin(), a.entries().end(), b.entries().begin()));
  const auto c = sample_ginibre(3, 43);
  CHECK_FALSE(std::equal(a.entries().begin(), a.entries().end(), c.entries().begin()));
  const auto d = sample_ginibre(2, 1);
  CHECK(d.rows() == 2);
  CHECK(d.cols() == 2);
  CHECK_THROWS_AS(sample_ginibre(0, 1), PreconditionError);
}

TEST_CASE("sample_ginibre: entry moments") {
  const int count = 100000;
  std::vector<double> re, im, mod2;
  Complex sum(0.0);
  for (int s = 0; s < count; ++s) {
    const Complex z = sample_ginibre(1, derive_seed(9, s))(0, 0);
    sum += z;
    re.push_back(z.real());
    im.push_back(z.imag());
    mod2.push_back(std::norm(z));
  }
  // Unit-variance complex entries: the sample mean has standard deviation 1/sqrt(count).
  CHECK(std::abs(sum / static_cast<double>(count)) <= 4.0 * std::sqrt(1.0 / count));
  const auto m2 = mean_se(mod2);
  CHECK(std::abs(m2.mean - 1.0) <= 4.0 * m2.se);
  double var_re = 0.0, var_im = 0.0, cov = 0.0;
  for (int s = 0; s < count; ++s) {
    var_re += re[s] * re[s];
    var_im += im[s] * im[s];
    cov += re[s] * im[s];
  }
  // Each part has variance 1/2 (the fourth moment of N(0,1/2) gives se ~ sqrt(2)/2/sqrt(count)).
  const double se = std::sqrt(2.0) * 0.5 / std::sqrt(count);
  CHECK(std::abs(var_re / count - 0.5) <= 4.0 * se);
  CHECK(std::abs(var_im / count - 0.5) <= 4.0 * se);
  CHECK(std::abs(cov / count) <= 4.0 * 0.5 / std::sqrt(count));
}

TEST_CASE("sample_haar_unitary: unitarity contract") {
  for (int n : {1, 2, 5, 17, 40, 100})
    for (std::uint64_t seed = 0; seed < 3; ++seed)
      CHECK(unitarity_defect(sample_haar_unitary(n, seed)) <= 1e-12 * n);
}

TEST_CASE("sample_haar_unitary: U(1) phase is uniform") {
  std::vector<double> phases;
  const std::size_t count = 100000;
  for (std::size_t s = 0; s < count; ++s) {
    double t = std::arg(sample_haar_unitary(1, derive_seed(3, s))(0, 0));
    if (t < 0) t += 2.0 * kPi;
    phases.push_back(t);
  }
  CHECK(ks_uniform(phases) < ks_critical_1pct(count));
}

TEST_CASE("sample_haar_unitary: trace moments at n = 8") {
  const int count = 10000;
  std::vector<double> re, im, mod2;
  for (int s = 0; s < count; ++s) {
    const auto u = sample_haar_unitary(8, derive_seed(21, s));
    Complex tr(0.0);
    for (int i = 0; i < 8; ++i) tr += u(i, i);
    re.push_back(tr.real());
    im.push_back(tr.imag());
    mod2.push_back(std::norm(tr));
  }
  const auto r = mean_se(re), i = mean_se(im), m = mean_se(mod2);
  CHECK(std::abs(r.mean) <= 4.0 * r.se);
  CHECK(std::abs(i.mean) <= 4.0 * i.se);
  CHECK(std::abs(m.mean - 1.0) <= 4.0 * m.se);
}

TEST_CASE("sample_haar_unitary: invariance under a fixed rotation") {
  // |U_00|^2 is Beta(1, n-1) under Haar measure, with mean 1/n. The same must
  // hold for V U with V a fixed unitary.
  const int n = 4, count = 20000;
  const auto v = sample_haar_unitary(n, 123456);
  std::vector<double> plain, rotated;
  for (int s = 0; s < count; ++s) {
    const auto u = sample_haar_unitary(n, derive_seed(31, s));
    plain.push_back(std::norm(u(0, 0)));
    rotated.push_back(std::norm((v * u)(0, 0)));
  }
  const auto a = mean_se(plain), b = mean_se(rotated);
  CHECK(std::abs(a.mean - 1.0 / n) <= 4.0 * a.se);
  CHECK(std::abs(b.mean - 1.0 / n) <= 4.0 * b.se);
}

TEST_CASE("sample_eigenphases") {
  SUBCASE("n = 1 is uniform across seeds") {
    std::vector<double> phases;
    for (std::uint64_t s = 0; s < 5000; ++s) phases.push_back(sample_eigenphases(1, derive_seed(8, s))[0]);
    CHECK(ks_uniform(phases) < ks_critical_1pct(phases.size()));
  }
  SUBCASE("determinism") {
    const auto a = sample_eigenphases(30, 99), b = sample_eigenphases(30, 99);
    CHECK(std::equal(a.phases().begin(), a.phases().end(), b.phases().begin()));
  }
  SUBCASE("n = 2: spacing after a uniformly chosen eigenvalue has mean 1") {
    std::vector<double> s;
    for (std::uint64_t k = 0; k < 100000; ++k) {
      const std::uint64_t seed = derive_seed(17, k);
      const auto gaps = rescaled_spacings(sample_eigenphases(2, seed));
      s.push_back(gaps[mix64(seed) & 1]);
    }
    const auto m = mean_se(s);
    CHECK(std::abs(m.mean - 1.0) <= 4.0 * m.se);
  }
  SUBCASE("n = 50: pooled phases are uniform over 20 bins") {
    const int bins = 20;
    std::vector<double> counts(bins, 0.0);
    double total = 0.0;
    for (std::uint64_t k = 0; k < 400; ++k) {
      const auto spectrum = sample_eigenphases(50, derive_seed(5, k));
      for (double t : spectrum.phases()) {
        counts[std::min(bins - 1, static_cast<int>(t / (2.0 * kPi) * bins))] += 1.0;
        total += 1.0;
      }
    }
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - total / bins) * (c - total / bins) / (total / bins);
    // Upper 0.1% point of chi-square with 19 degrees of freedom.
    CHECK(chi2 < 43.82);
  }
}

TEST_CASE("trace-power moments E|Tr U^k|^2 = k for k <= n") {
  const int n = 6, count = 6000;
  std::vector<std::vector<double>> mod2(n + 1);
  for (int s = 0; s < count; ++s) {
    const auto spectrum = sample_eigenphases(n, derive_seed(44, s));
    for (int k = 1; k <= n; ++k) {
      Complex tr(0.0);
      for (double t : spectrum.phases()) tr += std::polar(1.0, k * t);
      mod2[k].push_back(std::norm(tr));
    }
  }
  for (int k = 1; k <= n; ++k) {
    const auto m = mean_se(mod2[k]);
    CHECK(std::abs(m.mean - k) <= 4.0 * m.se);
  }
}

TEST_CASE("seed schedule and ensemble mapping") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));

  CHECK_THROWS_AS((EnsembleConfig{0, 1, 0}.validate()), PreconditionError);
  CHECK_THROWS_AS((EnsembleConfig{2, 0, 0}.validate()), PreconditionError);

  const EnsembleConfig cfg{12, 9, 314};
  const auto one = sample_critical_ensemble(cfg, 1);
  const auto three = sample_critical_ensemble(cfg, 3);
  REQUIRE(one.size() == 9);
  REQUIRE(three.size() == 9);
  for (std::size_t i = 0; i < one.size(); ++i) {
    const auto expected = sample_eigenphases(12, derive_seed(314, i));
    CHECK(std::equal(one[i].spectrum.phases().begin(), one[i].spectrum.phases().end(),
                     expected.phases().begin()));
    CHECK(one[i].critical.points == three[i].critical.points);
  }

  std::size_t last = 0;
  sample_spectrum_ensemble(cfg, 2, [&](std::size_t done, std::size_t total) {
    CHECK(total == 9);
    CHECK(done == last + 1);
    last = done;
  });
  CHECK(last == 9);

  auto failing = [](std::size_t i, std::uint64_t) -> int {
    if (i == 4) throw StatisticsError("boom");
    return static_cast<int>(i);
  };
  CHECK_THROWS_AS(map_ensemble(cfg, 2, failing), StatisticsError);
}
