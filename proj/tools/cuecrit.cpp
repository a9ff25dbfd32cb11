// Command-line experiments: every subcommand writes its tables plus a
// manifest.json into --out. Data files depend only on the parameters, so a
// rerun with the same manifest reproduces them byte for byte.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "cuecrit/critical.hpp"
#include "cuecrit/ensemble.hpp"
#include "cuecrit/errors.hpp"
#include "cuecrit/haar.hpp"
#include "cuecrit/spacing.hpp"
#include "cuecrit/stats.hpp"
#include "cuecrit/szego.hpp"

namespace {

using namespace cuecrit;
using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kUnexpected = 1, kUsage = 2, kNumeric = 3, kStatistics = 4 };

// ---------------------------------------------------------------- tables

using Cell = std::variant<std::monostate, long long, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table row width mismatch");
    rows.push_back(std::move(row));
  }
};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string out = "\"";
      for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
      }
      return out + "\"";
    }
  };
  return std::visit(Visitor{}, c);
}

Json json_cell(const Cell& c) {
  struct Visitor {
    Json operator()(std::monostate) const { return nullptr; }
    Json operator()(long long v) const { return v; }
    Json operator()(double v) const { return std::isfinite(v) ? Json(v) : Json(nullptr); }
    Json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

struct OutputOptions {
  std::string format = "csv";
  fs::path dir = ".";
  int threads = default_thread_count();
  bool quiet = false;
};

fs::path write_table(const Table& table, const OutputOptions& opt) {
  fs::create_directories(opt.dir);
  const fs::path path = opt.dir / (table.name + "." + opt.format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (opt.format == "csv") {
    for (std::size_t i = 0; i < table.columns.size(); ++i)
      out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
      out << '\n';
    }
  } else {
    Json rows = Json::array();
    for (const auto& row : table.rows) {
      Json obj = Json::object();
      for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = json_cell(row[i]);
      rows.push_back(std::move(obj));
    }
    out << rows.dump(1) << '\n';
  }
  return path;
}

// ---------------------------------------------------------------- run context

class Run {
 public:
  Run(std::string command, OutputOptions opt)
      : command_(std::move(command)), opt_(std::move(opt)), start_(std::chrono::steady_clock::now()) {
    if (opt_.threads < 1) throw PreconditionError("--threads must be at least 1");
  }

  Json& parameters() { return parameters_; }
  Json& summary() { return summary_; }
  const OutputOptions& options() const { return opt_; }

  void emit(const Table& table) { outputs_.push_back(write_table(table, opt_).filename().string()); }

  ProgressFn progress(const std::string& what) const {
    if (opt_.quiet) return {};
    return [cmd = command_, what](std::size_t done, std::size_t total) {
      const std::size_t step = std::max<std::size_t>(1, total / 100);
      if (done % step != 0 && done != total) return;
      std::cerr << '\r' << cmd << ": " << done << '/' << total << ' ' << what << std::flush;
      if (done == total) std::cerr << '\n';
    };
  }

  void finish() {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    Json manifest = Json::object();
    manifest["command"] = command_;
    manifest["version"] = CUECRIT_VERSION;
    manifest["parameters"] = parameters_;
    manifest["format"] = opt_.format;
    manifest["outputs"] = outputs_;
    if (!summary_.empty()) manifest["summary"] = summary_;
    manifest["duration_seconds"] = seconds;
    fs::create_directories(opt_.dir);
    std::ofstream(opt_.dir / "manifest.json", std::ios::binary) << manifest.dump(2) << '\n';
    if (!opt_.quiet) std::cerr << command_ << ": done in " << seconds << " s\n";
  }

 private:
  std::string command_;
  OutputOptions opt_;
  std::chrono::steady_clock::time_point start_;
  Json parameters_ = Json::object();
  Json summary_ = Json::object();
  std::vector<std::string> outputs_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

GapProbabilitySeries load_series(int l_max, const std::string& cache) {
  require(l_max >= 0, "--l-max must be nonnegative");
  const int order = l_max + 4;
  if (order > kMaxGapOrder) {
    throw CapabilityError("--l-max " + std::to_string(l_max) + " needs gap-series order " +
                          std::to_string(order) + " > " + std::to_string(kMaxGapOrder));
  }
  if (cache.empty()) return gap_series(std::max(order, 4));
  return gap_series_cached(std::max(order, 4), cache);
}

// ---------------------------------------------------------------- commands

struct SampleArgs {
  int n = 20;
  std::uint64_t seed = 0;
};

void cmd_sample(const SampleArgs& a, const OutputOptions& opt) {
  Run run("sample", opt);
  require(a.n >= 2, "--n must be at least 2 (Z' of a degree-1 polynomial has no roots)");
  run.parameters() = {{"n", a.n}, {"seed", a.seed}};

  const EigenPhaseSpectrum spectrum = sample_eigenphases(a.n, a.seed);
  const CriticalPointSet cps = critical_points(spectrum);

  Table phases{"eigenphases", {"index", "theta", "re", "im"}, {}};
  for (std::size_t j = 0; j < spectrum.n(); ++j) {
    const double t = spectrum[j];
    phases.add({static_cast<long long>(j), t, std::cos(t), std::sin(t)});
  }
  Table points{"critical_points",
               {"index", "re", "im", "modulus", "arg", "x", "residual", "multiplicity"},
               {}};
  for (std::size_t j = 0; j < cps.points.size(); ++j) {
    const Complex z = cps.points[j];
    points.add({static_cast<long long>(j), z.real(), z.imag(), std::abs(z), std::arg(z),
                (a.n - 1) * (1.0 - std::abs(z)), cps.residuals[j],
                static_cast<long long>(cps.multiplicity[j])});
  }
  run.emit(phases);
  run.emit(points);
  run.finish();
}

struct EnsembleArgs {
  int n = 400;
  int samples = 250;
  std::uint64_t seed = 0;
};

struct IpxArgs {
  EnsembleArgs ensemble;
  double x_min = 0.01;
  double x_max = 100.0;
  int x_points = 200;
  int l_max = kDefaultLMax;
  double beta = 0.5;
  std::string cache;
};

void cmd_ipx(const IpxArgs& a, const OutputOptions& opt) {
  Run run("ipx", opt);
  const auto& e = a.ensemble;
  require(e.n >= 2, "--n must be at least 2");
  require(e.samples >= 1, "--samples must be at least 1");
  require(a.x_min > 0.0 && a.x_max > a.x_min && a.x_points >= 2,
          "--x-min/--x-max/--x-points must describe 0 < x_min < x_max with at least 2 points");
  if (!(a.beta > 0.0)) throw DomainError("--beta must be positive");
  run.parameters() = {{"n", e.n},           {"samples", e.samples}, {"seed", e.seed},
                      {"x_min", a.x_min},   {"x_max", a.x_max},     {"x_points", a.x_points},
                      {"l_max", a.l_max},   {"beta", a.beta}};

  const GapProbabilitySeries series = load_series(a.l_max, a.cache);
  const double radius = trust_radius(series);
  const auto ensemble =
      sample_critical_ensemble({e.n, e.samples, e.seed}, opt.threads, run.progress("matrices"));
  std::vector<ScaledRadialSample> radial;
  radial.reserve(ensemble.size());
  for (const auto& m : ensemble) radial.push_back(scaled_distances(m.critical));
  const auto grid = geometric_grid(a.x_min, a.x_max, a.x_points);
  const IpxCurve curve = empirical_ipx(radial, grid);
  const auto errors = curve.std_errors();

  Table table{"ipx",
              {"x", "ipx", "std_error", "large_x", "small_x", "large_x_diff", "small_x_diff"},
              {}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    const double large = ipx_large_x(x);
    // The series in x is the spacing series at S = sqrt(2x/beta)/pi; past the
    // trust radius of the truncation it is noise and left blank.
    const double s = std::sqrt(2.0 * x / a.beta) / std::numbers::pi;
    Cell small, small_diff;
    if (s <= radius) {
      const double v = ipx_small_x(series, x, a.beta, a.l_max);
      small = v;
      small_diff = curve.values[i] - v;
    }
    table.add({x, curve.values[i], errors[i], large, small, curve.values[i] - large, small_diff});
  }
  run.summary() = {{"pooled_roots", curve.sample_count},
                   {"small_x_limit", a.beta * std::numbers::pi * std::numbers::pi * radius * radius / 2.0}};
  run.emit(table);
  run.finish();
}

struct CoeffArgs {
  int l_max = kDefaultLMax;
  double beta = 0.5;
  std::string cache;
};

void cmd_coeffs(const CoeffArgs& a, const OutputOptions& opt) {
  Run run("coeffs", opt);
  if (!(a.beta > 0.0)) throw DomainError("--beta must be positive");
  run.parameters() = {{"l_max", a.l_max}, {"beta", a.beta}};
  const GapProbabilitySeries series = load_series(a.l_max, a.cache);
  const auto terms = ipx_coefficients(series, a.beta, a.l_max);
  std::optional<std::vector<ExactIpxTerm>> exact;
  try {
    exact = exact_ipx_coefficients(series, mpq_class(a.beta), a.l_max);
  } catch (const CapabilityError&) {
    // beta without a rational square 2/beta: decimal coefficients only.
  }

  Table table{"coeffs",
              {"l", "order", "e_exact", "e_decimal", "ip_exponent", "ip_exact", "ip_coefficient"},
              {}};
  for (int l = 0; l <= a.l_max; ++l) {
    const auto& t = terms[l];
    std::string exponent = std::to_string(t.exponent_numerator);
    if (t.exponent_denominator != 1) exponent += "/" + std::to_string(t.exponent_denominator);
    Cell ip_exact;
    if (exact) ip_exact = (*exact)[l].coefficient.to_string();
    table.add({l, l + 4, series.e(l).to_string(), series.numeric()[l + 4], exponent, ip_exact,
               t.coefficient});
  }
  run.emit(table);
  run.finish();
}

struct SzegoArgs {
  double r = 0.5;
  double w = 1.0;
  double w_im = 0.0;
  double alpha = 0.0;
  std::vector<int> n_list{8, 16, 32, 64};
  std::string kind = "both";
  bool second_derivative = false;
  double delta = 1e-3;
};

void cmd_szego(const SzegoArgs& a, const OutputOptions& opt) {
  Run run("szego", opt);
  const SzegoParameters params{Complex(a.w, a.w_im), a.alpha, Complex(a.r, 0.0)};
  if (!(a.r >= 0.0)) throw DomainError("--r must be nonnegative");
  params.validate();
  require(!a.n_list.empty(), "--n-list must not be empty");
  for (int n : a.n_list) require(n >= 1, "--n-list entries must be positive");
  run.parameters() = {{"r", a.r},           {"w", a.w},       {"w_im", a.w_im},
                      {"alpha", a.alpha},   {"n_list", a.n_list}, {"kind", a.kind},
                      {"second_derivative", a.second_derivative}, {"delta_alpha", a.delta}};

  std::vector<std::pair<std::string, SymbolKind>> kinds;
  if (a.kind == "g" || a.kind == "both") kinds.emplace_back("g", SymbolKind::g);
  if (a.kind == "h" || a.kind == "both") kinds.emplace_back("h", SymbolKind::h);

  Table table{"szego", {"kind", "n", "det_re", "det_im", "szego_sum", "limit", "error"}, {}};
  for (const auto& [name, kind] : kinds) {
    const double e_sum = szego_sum(params, kind);
    for (int n : a.n_list) {
      const ToeplitzSymbol symbol = symbol_fourier(params, kind, default_grid_size(n, a.r));
      const Complex det = toeplitz_determinant(symbol, n);
      table.add({name, n, det.real(), det.imag(), e_sum, std::exp(-e_sum),
                 szego_limit_error(params, kind, n)});
    }
  }
  run.emit(table);

  if (a.second_derivative) {
    Table d2{"second_derivative", {"n", "delta_alpha", "finite_difference", "closed_form", "rel_diff"}, {}};
    for (int n : a.n_list) {
      const auto c = second_derivative_check(params.w, params.z, n, a.delta);
      d2.add({n, a.delta, c.finite_difference, c.closed_form,
              std::abs(c.finite_difference - c.closed_form) / std::abs(c.closed_form)});
    }
    run.emit(d2);
  }
  run.finish();
}

std::vector<std::vector<int>> parse_partitions(const std::string& text) {
  std::vector<std::vector<int>> out;
  std::stringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    std::vector<int> parts;
    std::stringstream items(group);
    std::string item;
    while (std::getline(items, item, ',')) {
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || v < 1) throw PreconditionError("--partitions: bad part '" + item + "'");
      parts.push_back(v);
    }
    if (parts.empty()) throw PreconditionError("--partitions: empty partition");
    out.push_back(std::move(parts));
  }
  if (out.empty()) throw PreconditionError("--partitions: nothing to evaluate");
  return out;
}

struct MomentArgs {
  std::string partitions = "1;2;1,1";
  int n = 8;
  int samples = 10000;
  std::uint64_t seed = 0;
};

void cmd_moments(const MomentArgs& a, const OutputOptions& opt) {
  Run run("moments", opt);
  require(a.n >= 1, "--n must be positive");
  require(a.samples >= 2, "--samples must be at least 2");
  const auto partitions = parse_partitions(a.partitions);
  run.parameters() = {{"partitions", a.partitions}, {"n", a.n}, {"samples", a.samples}, {"seed", a.seed}};

  Table table{"moments",
              {"partition", "weight", "n", "estimate", "std_error", "exact", "z_score", "exact_regime"},
              {}};
  for (const auto& p : partitions) {
    const auto m = ds_moment_mc(p, a.n, a.samples, a.seed, opt.threads);
    std::string label;
    long long weight = 0;
    for (int k : p) {
      label += (label.empty() ? "" : "+") + std::to_string(k);
      weight += k;
    }
    if (!m.exact_regime && !opt.quiet)
      std::cerr << "moments: partition " << label << " has weight " << weight << " > n = " << a.n
                << "; the product formula is only an upper regime there\n";
    const double z = m.std_error > 0.0 ? (m.estimate - m.exact) / m.std_error : 0.0;
    table.add({label, weight, a.n, m.estimate, m.std_error, m.exact, z,
               static_cast<long long>(m.exact_regime)});
  }
  run.emit(table);
  run.finish();
}

struct SpacingCorrArgs {
  EnsembleArgs ensemble;
  double x_fit_max = 1.0;
};

void cmd_spacing_corr(const SpacingCorrArgs& a, const OutputOptions& opt) {
  Run run("spacing-corr", opt);
  const auto& e = a.ensemble;
  require(e.n >= 2, "--n must be at least 2");
  require(e.samples >= 1, "--samples must be at least 1");
  require(a.x_fit_max > 0.0, "--x-fit-max must be positive");
  run.parameters() = {{"n", e.n}, {"samples", e.samples}, {"seed", e.seed}, {"x_fit_max", a.x_fit_max}};

  const auto ensemble =
      sample_critical_ensemble({e.n, e.samples, e.seed}, opt.threads, run.progress("matrices"));
  std::vector<SpacingPair> pairs;
  for (const auto& m : ensemble) {
    const auto sample = spacing_correlation(m.spectrum, m.critical);
    pairs.insert(pairs.end(), sample.pairs.begin(), sample.pairs.end());
  }
  Table scatter{"spacing_pairs", {"s", "x"}, {}};
  for (const auto& p : pairs) scatter.add({p.s, p.x});
  const BetaFit fit = fit_beta(pairs, a.x_fit_max);
  Table summary{"beta_fit", {"beta_hat", "std_error", "ci_low", "ci_high", "used", "x_fit_max"}, {}};
  summary.add({fit.beta_hat, fit.std_error, fit.beta_hat - 1.96 * fit.std_error,
               fit.beta_hat + 1.96 * fit.std_error, static_cast<long long>(fit.used), a.x_fit_max});
  run.emit(scatter);
  run.emit(summary);
  run.finish();
}

// ---------------------------------------------------------------- main

void add_output_options(CLI::App* app, OutputOptions& opt) {
  app->add_option("--format", opt.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--out", opt.dir, "Output directory");
  app->add_option("--threads", opt.threads, "Worker threads (default: available cores)");
  app->add_flag("--quiet", opt.quiet, "No progress on stderr");
}

void add_ensemble_options(CLI::App* app, EnsembleArgs& e) {
  app->add_option("--n", e.n, "Matrix dimension N");
  app->add_option("--samples", e.samples, "Number of matrices");
  app->add_option("--seed", e.seed, "Master seed");
}

int run_main(int argc, char** argv) {
  CLI::App app{"Critical points of characteristic polynomials of CUE matrices"};
  app.set_version_flag("--version", CUECRIT_VERSION);
  app.require_subcommand(1);

  OutputOptions opt;
  SampleArgs sample;
  IpxArgs ipx;
  CoeffArgs coeffs;
  SzegoArgs szego;
  MomentArgs moments;
  SpacingCorrArgs corr;

  auto* s = app.add_subcommand("sample", "Eigenphases and critical points of one matrix");
  s->add_option("--n", sample.n, "Matrix dimension N");
  s->add_option("--seed", sample.seed, "Seed");
  add_output_options(s, opt);

  auto* i = app.add_subcommand("ipx", "Empirical Ip(x) with the large-x law and small-x series");
  add_ensemble_options(i, ipx.ensemble);
  i->add_option("--x-min", ipx.x_min, "Smallest grid point");
  i->add_option("--x-max", ipx.x_max, "Largest grid point");
  i->add_option("--x-points", ipx.x_points, "Number of geometric grid points");
  i->add_option("--l-max", ipx.l_max, "Truncation of the small-x series");
  i->add_option("--beta", ipx.beta, "beta of the small-x series");
  i->add_option("--cache", ipx.cache, "Directory for the gap-series coefficient cache");
  add_output_options(i, opt);

  auto* c = app.add_subcommand("coeffs", "Exact E_l and small-x series coefficients");
  c->add_option("--l-max", coeffs.l_max, "Largest l");
  c->add_option("--beta", coeffs.beta, "beta of the small-x series");
  c->add_option("--cache", coeffs.cache, "Directory for the gap-series coefficient cache");
  add_output_options(c, opt);

  auto* z = app.add_subcommand("szego", "Toeplitz determinants against the strong Szego limit");
  z->add_option("--r", szego.r, "Pole modulus |z| (z = r)");
  z->add_option("--w", szego.w, "Real part of w");
  z->add_option("--w-im", szego.w_im, "Imaginary part of w");
  z->add_option("--alpha", szego.alpha, "alpha");
  z->add_option("--n-list", szego.n_list, "Determinant sizes")->delimiter(',');
  z->add_option("--kind", szego.kind, "Symbol")->check(CLI::IsMember({"g", "h", "both"}));
  z->add_flag("--second-derivative", szego.second_derivative,
              "Also compare d^2/dalpha^2 of the determinant sum with its closed form");
  z->add_option("--delta-alpha", szego.delta, "Finite-difference step in alpha");
  add_output_options(z, opt);

  auto* m = app.add_subcommand("moments", "Monte Carlo moments of traces of powers");
  m->add_option("--partitions", moments.partitions, "Partitions, e.g. \"1;2;1,1\"");
  m->add_option("--n", moments.n, "Matrix dimension");
  m->add_option("--samples", moments.samples, "Number of matrices");
  m->add_option("--seed", moments.seed, "Master seed");
  add_output_options(m, opt);

  auto* sc = app.add_subcommand("spacing-corr", "Spacing / scaled-distance pairs and the beta fit");
  add_ensemble_options(sc, corr.ensemble);
  sc->add_option("--x-fit-max", corr.x_fit_max, "Fit only pairs with x below this");
  add_output_options(sc, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s) cmd_sample(sample, opt);
    if (*i) cmd_ipx(ipx, opt);
    if (*c) cmd_coeffs(coeffs, opt);
    if (*z) cmd_szego(szego, opt);
    if (*m) cmd_moments(moments, opt);
    if (*sc) cmd_spacing_corr(corr, opt);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (worst " << e.worst() << " after " << e.iterations()
              << " iterations)\n";
    return kNumeric;
  } catch (const ResolutionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  } catch (const PoleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  } catch (const StatisticsError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kStatistics;
  } catch (const Error& e) {
    // dimension, precondition, domain, capability
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_main(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUnexpected;
  }
}
