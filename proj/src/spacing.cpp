#include "cuecrit/spacing.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cuecrit/errors.hpp"

namespace cuecrit {

namespace {

void check_order(int max_order, const char* who) {
  if (max_order < 4) throw PreconditionError(std::string(who) + ": max_order must be >= 4");
  if (max_order > kMaxGapOrder) {
    std::ostringstream msg;
    msg << who << ": max_order " << max_order << " exceeds the supported " << kMaxGapOrder;
    throw CapabilityError(msg.str());
  }
}

// exp of a power series with zero constant term: k E_k = sum_j j L_j E_{k-j}.
std::vector<PiPolynomial> exp_series(const std::vector<PiPolynomial>& log_coeffs, int max_order) {
  std::vector<PiPolynomial> out(max_order + 1);
  out[0] = PiPolynomial(1);
  for (int k = 1; k <= max_order; ++k) {
    PiPolynomial acc;
    for (int j = 1; j <= k; ++j) {
      if (log_coeffs[j].is_zero() || out[k - j].is_zero()) continue;
      acc += (log_coeffs[j] * out[k - j]) * mpq_class(j);
    }
    acc *= mpq_class(1, k);
    out[k] = std::move(acc);
  }
  return out;
}

mpz_class factorial(int n) {
  mpz_class f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

mpz_class binomial(int n, int k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return b;
}

using Matrix = std::vector<std::vector<mpq_class>>;

}  // namespace

GapProbabilitySeries::GapProbabilitySeries(int max_order, std::vector<PiPolynomial> coefficients)
    : max_order_(max_order), coefficients_(std::move(coefficients)) {
  if (static_cast<int>(coefficients_.size()) != max_order_ + 1)
    throw DimensionError("GapProbabilitySeries: coefficient count must be max_order + 1");
  numeric_.reserve(coefficients_.size());
  for (const auto& c : coefficients_) numeric_.push_back(c.value());
}

const PiPolynomial& GapProbabilitySeries::e(int l) const {
  if (l < 0) throw PreconditionError("E_l needs l >= 0");
  if (l + 4 > max_order_) {
    std::ostringstream msg;
    msg << "E_" << l << " needs order " << l + 4 << " but the series stops at " << max_order_;
    throw CapabilityError(msg.str());
  }
  return coefficients_[l + 4];
}

GapProbabilitySeries gap_series(int max_order) {
  check_order(max_order, "gap_series");
  const int m_max = max_order;
  const int d = max_order;  // monomial degrees 0..max_order-1

  // On [0,1]: K(x,y) = s sinc(pi s (x-y)) = s sum_{a,b} R[a][b] (pi s)^(a+b) x^a y^b with
  // R[a][b] = (-1)^((a+b)/2) C(a+b, a) (-1)^b / (a+b+1)! for a+b even.
  // Writing u = pi s, K = s P(u) and Tr(K^m) = s^m Tr((P H)^m), H[b][c] = 1/(b+c+1).
  Matrix r(d, std::vector<mpq_class>(d));
  for (int a = 0; a < d; ++a) {
    for (int b = 0; a + b < d; ++b) {
      const int e = a + b;
      if (e % 2 != 0) continue;
      mpq_class v(binomial(e, a), factorial(e + 1));
      v.canonicalize();
      if ((e / 2 + b) % 2 != 0) v = -v;
      r[a][b] = v;
    }
  }
  Matrix h(d, std::vector<mpq_class>(d));
  for (int b = 0; b < d; ++b)
    for (int c = 0; c < d; ++c) h[b][c] = mpq_class(1, b + c + 1);

  // z[deg] holds the u^deg part of (P H)^k, rows 0..deg (a row index a
  // carries at least u^a). Only even degrees occur. The trace of
  // (P H)^k at degree deg contributes to s^(k+deg) pi^deg of log E.
  std::vector<PiPolynomial> log_e(max_order + 1);
  std::vector<Matrix> z(max_order);
  for (int deg = 0; deg < max_order; deg += 2) {
    z[deg].assign(deg + 1, std::vector<mpq_class>(d));
    for (int a = 0; a <= deg; ++a) {
      const mpq_class& coeff = r[a][deg - a];
      if (coeff == 0) continue;
      for (int c = 0; c < d; ++c) z[deg][a][c] = coeff * h[deg - a][c];
    }
  }

  for (int k = 1; k <= m_max; ++k) {
    // Tr at each degree.
    for (int deg = 0; k + deg <= max_order; deg += 2) {
      mpq_class tr = 0;
      for (int a = 0; a <= deg; ++a) tr += z[deg][a][a];
      if (tr == 0) continue;
      tr /= k;
      log_e[k + deg].add_term(-tr, deg);
    }
    if (k == m_max) break;

    // v[deg'][b][c] = sum_a H[b][a] z[deg'][a][c], rows b up to the remaining budget.
    const int budget = max_order - (k + 1);  // max degree needed for k+1
    if (budget < 0) break;
    std::vector<Matrix> v(budget + 1);
    for (int dp = 0; dp <= budget; dp += 2) {
      const int rows = budget - dp + 1;  // b <= budget - dp
      v[dp].assign(rows, std::vector<mpq_class>(d));
      for (int b = 0; b < rows; ++b) {
        auto& vrow = v[dp][b];
        for (int a = 0; a <= dp; ++a) {
          const mpq_class& hb = h[b][a];
          const auto& zrow = z[dp][a];
          for (int c = 0; c < d; ++c) {
            if (zrow[c] == 0) continue;
            vrow[c] += hb * zrow[c];
          }
        }
      }
    }
    std::vector<Matrix> next(max_order);
    for (int deg = 0; deg <= budget; deg += 2) {
      next[deg].assign(deg + 1, std::vector<mpq_class>(d));
      for (int a = 0; a <= deg; ++a) {
        auto& out = next[deg][a];
        for (int e = a + a % 2; e <= deg; e += 2) {  // e = a + b must be even
          const int b = e - a;
          const mpq_class& coeff = r[a][b];
          if (coeff == 0) continue;
          const int dp = deg - e;
          if (b >= static_cast<int>(v[dp].size())) continue;
          const auto& vrow = v[dp][b];
          for (int c = 0; c < d; ++c) {
            if (vrow[c] == 0) continue;
            out[c] += coeff * vrow[c];
          }
        }
      }
    }
    z = std::move(next);
  }

  return GapProbabilitySeries(max_order, exp_series(log_e, max_order));
}

GapProbabilitySeries gap_series_sigma(int max_order) {
  check_order(max_order, "gap_series_sigma");
  // a[k] is the t^k coefficient of sigma, a Laurent polynomial in pi.
  std::vector<PiPolynomial> a(max_order + 1);
  a[1] = PiPolynomial(mpq_class(-1), -1);
  a[2] = PiPolynomial(mpq_class(-1), -2);

  // Coefficient of t^n in (t s'')^2 + 4 A (A + s'^2), A = t s' - s, with
  // whatever a[] currently holds.
  auto residual = [&](int n) {
    PiPolynomial out;
    // (t s'')^2: sum_{i+j=n+2} i(i-1) j(j-1) a_i a_j
    for (int i = 2; i <= n; ++i) {
      const int j = n + 2 - i;
      if (j < 2 || j > n) continue;
      if (a[i].is_zero() || a[j].is_zero()) continue;
      out += (a[i] * a[j]) * mpq_class(i * (i - 1) * j * (j - 1));
    }
    // 4 A_p B_q with B = A + s'^2, p + q = n, A_p = (p-1) a_p
    for (int p = 2; p <= n; ++p) {
      if (a[p].is_zero()) continue;
      const int q = n - p;
      PiPolynomial bq;
      if (q >= 2) bq += a[q] * mpq_class(q - 1);
      for (int i = 1; i <= q + 1; ++i) {
        const int j = q + 2 - i;
        if (j < 1) continue;
        if (a[i].is_zero() || a[j].is_zero()) continue;
        bq += (a[i] * a[j]) * mpq_class(i * j);
      }
      if (bq.is_zero()) continue;
      out += (a[p] * bq) * mpq_class(4 * (p - 1));
    }
    return out;
  };

  for (int n = 3; n <= max_order; ++n) {
    a[n] = PiPolynomial();
    // The t^n equation is linear in a_n with coefficient -4 (n-1)^2 / pi^2.
    const PiPolynomial rest = residual(n);
    a[n] = rest.shifted(2) * mpq_class(1, 4 * (n - 1) * (n - 1));
  }

  // log E(s) = sum_k a_k (pi s)^k / k
  std::vector<PiPolynomial> log_e(max_order + 1);
  for (int k = 1; k <= max_order; ++k) log_e[k] = a[k].shifted(k) * mpq_class(1, k);
  return GapProbabilitySeries(max_order, exp_series(log_e, max_order));
}

void save_gap_series(const GapProbabilitySeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write gap-series cache " + path.string());
  out << "# cuecrit gap-series v1\n";
  out << "max_order " << series.max_order() << "\n";
  for (int k = 0; k <= series.max_order(); ++k) {
    const auto& terms = series.coefficient(k).terms();
    if (terms.empty()) {
      out << k << " 0/1 0\n";
      continue;
    }
    for (const auto& [p, c] : terms)
      out << k << " " << c.get_num().get_str() << "/" << c.get_den().get_str() << " " << p << "\n";
  }
  if (!out) throw Error("failed writing gap-series cache " + path.string());
}

GapProbabilitySeries load_gap_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read gap-series cache " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "# cuecrit gap-series v1")
    throw Error("gap-series cache: unsupported header in " + path.string());
  std::string key;
  int max_order = -1;
  if (!std::getline(in, line)) throw Error("gap-series cache: missing max_order");
  std::istringstream(line) >> key >> max_order;
  if (key != "max_order" || max_order < 0 || max_order > kMaxGapOrder)
    throw Error("gap-series cache: bad max_order line");
  std::vector<PiPolynomial> coeffs(max_order + 1);
  std::vector<char> seen(max_order + 1, 0);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    int order = -1;
    std::string rational;
    int power = 0;
    if (!(fields >> order >> rational >> power) || order < 0 || order > max_order)
      throw Error("gap-series cache: malformed line '" + line + "'");
    mpq_class c;
    if (c.set_str(rational, 10) != 0) throw Error("gap-series cache: bad rational '" + rational + "'");
    c.canonicalize();
    coeffs[order].add_term(c, power);
    seen[order] = 1;
  }
  for (int k = 0; k <= max_order; ++k)
    if (!seen[k]) throw Error("gap-series cache: order " + std::to_string(k) + " missing");
  return GapProbabilitySeries(max_order, std::move(coeffs));
}

GapProbabilitySeries gap_series_cached(int max_order, const std::filesystem::path& cache_dir) {
  check_order(max_order, "gap_series_cached");
  const auto path = cache_dir / ("gap_series_v1_order" + std::to_string(max_order) + ".txt");
  if (std::filesystem::exists(path)) return load_gap_series(path);
  GapProbabilitySeries series = gap_series(max_order);
  std::filesystem::create_directories(cache_dir);
  save_gap_series(series, path);
  return series;
}

double trust_radius(const GapProbabilitySeries& series) {
  const auto& e = series.numeric();
  for (int k = series.max_order(); k >= 4; --k) {
    const double term = static_cast<double>(k) * (k - 1) * std::abs(e[k]);
    if (term == 0.0) continue;
    return std::pow(1e-6 / term, 1.0 / static_cast<double>(k - 2));
  }
  return 0.0;
}

SpacingDensityValue p_cue_with_tail(const GapProbabilitySeries& series, double s) {
  if (!(s >= 0.0)) throw DomainError("p_cue: s must be nonnegative");
  const double radius = trust_radius(series);
  if (s > radius) {
    std::ostringstream msg;
    msg << "p_cue: s = " << s << " beyond the trust radius " << radius << " of order "
        << series.max_order();
    throw DomainError(msg.str());
  }
  const auto& e = series.numeric();
  double sum = 0.0;
  double last = 0.0;
  for (int k = series.max_order(); k >= 2; --k) {
    const double c = static_cast<double>(k) * (k - 1) * e[k];
    if (last == 0.0 && c != 0.0) last = std::abs(c) * std::pow(s, k - 2);
    sum = sum * s + c;
  }
  return {std::max(0.0, sum), last};
}

double p_cue(const GapProbabilitySeries& series, double s) { return p_cue_with_tail(series, s).value; }

namespace {

void check_lmax(const GapProbabilitySeries& series, int l_max) {
  if (l_max < 0) throw PreconditionError("l_max must be nonnegative");
  if (l_max > series.max_order() - 4) {
    std::ostringstream msg;
    msg << "l_max " << l_max << " needs a gap series of order " << l_max + 4 << ", have "
        << series.max_order();
    throw CapabilityError(msg.str());
  }
}

}  // namespace

std::vector<IpxTerm> ipx_coefficients(const GapProbabilitySeries& series, double beta, int l_max) {
  check_lmax(series, l_max);
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  constexpr double pi = std::numbers::pi;
  const double base = 2.0 / (beta * pi * pi);
  std::vector<IpxTerm> out;
  out.reserve(l_max + 1);
  for (int l = 0; l <= l_max; ++l) {
    const double c = std::pow(base, 0.5 * (l + 3)) * (l + 4) * series.numeric()[l + 4];
    if ((l + 3) % 2 == 0)
      out.push_back({(l + 3) / 2, 1, c});
    else
      out.push_back({l + 3, 2, c});
  }
  return out;
}

double ipx_small_x(const GapProbabilitySeries& series, double x, double beta, int l_max) {
  if (!(x >= 0.0)) throw DomainError("ipx_small_x: x must be nonnegative");
  const auto terms = ipx_coefficients(series, beta, l_max);
  if (x == 0.0) return 0.0;
  const double root = std::sqrt(x);
  double sum = 0.0;
  for (int l = l_max; l >= 0; --l) sum += terms[l].coefficient * std::pow(root, l + 3);
  return sum;
}

std::vector<ExactIpxTerm> exact_ipx_coefficients(const GapProbabilitySeries& series,
                                                 const mpq_class& beta, int l_max) {
  check_lmax(series, l_max);
  if (beta <= 0) throw DomainError("beta must be positive");
  mpq_class ratio = 2 / beta;
  ratio.canonicalize();
  mpz_class num_root, den_root;
  mpz_sqrt(num_root.get_mpz_t(), ratio.get_num_mpz_t());
  mpz_sqrt(den_root.get_mpz_t(), ratio.get_den_mpz_t());
  if (num_root * num_root != ratio.get_num() || den_root * den_root != ratio.get_den())
    throw CapabilityError("exact_ipx_coefficients: 2/beta must be the square of a rational");
  const mpq_class root(num_root, den_root);

  std::vector<ExactIpxTerm> out;
  out.reserve(l_max + 1);
  mpq_class scale = 1;
  for (int i = 0; i < 3; ++i) scale *= root;  // (2/beta)^((l+3)/2) at l = 0
  for (int l = 0; l <= l_max; ++l) {
    // (2/(beta pi^2))^((l+3)/2) = root^(l+3) pi^-(l+3)
    PiPolynomial coeff = series.e(l).shifted(-(l + 3)) * (scale * (l + 4));
    out.push_back({mpq_class(l + 3, 2), std::move(coeff)});
    out.back().exponent.canonicalize();
    scale *= root;
  }
  return out;
}

}  // namespace cuecrit
