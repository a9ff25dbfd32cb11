#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "cuecrit/critical.hpp"
#include "cuecrit/ensemble.hpp"
#include "cuecrit/errors.hpp"
#include "cuecrit/haar.hpp"
#include "cuecrit/spacing.hpp"
#include "cuecrit/stats.hpp"
#include "cuecrit/szego.hpp"

namespace py = pybind11;
using namespace cuecrit;

namespace {

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
  return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

template <class T>
py::array_t<T> to_array(std::span<const T> v) {
  return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw DimensionError("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

EigenPhaseSpectrum spectrum_from(const py::array_t<double, py::array::c_style | py::array::forcecast>& phases) {
  const auto v = to_vector(phases);
  return EigenPhaseSpectrum::from_angles(v);
}

py::array_t<Complex> matrix_to_array(const ComplexDenseMatrix& m) {
  py::array_t<Complex> out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  auto r = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
  return out;
}

SymbolKind kind_from(const std::string& s) {
  if (s == "g") return SymbolKind::g;
  if (s == "h") return SymbolKind::h;
  throw PreconditionError("symbol kind must be 'g' or 'h'");
}

SzegoParameters params_from(Complex w, double alpha, Complex z) {
  SzegoParameters p{w, alpha, z};
  p.validate();
  return p;
}

}  // namespace

PYBIND11_MODULE(_cuecrit, m) {
  m.doc() = "Critical points of characteristic polynomials of CUE matrices";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base);
  py::register_exception<PreconditionError>(m, "PreconditionError", base);
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<PoleError>(m, "PoleError", base);
  py::register_exception<CapabilityError>(m, "CapabilityError", base);
  py::register_exception<ResolutionError>(m, "ResolutionError", base);
  py::register_exception<StatisticsError>(m, "StatisticsError", base);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base);

  // haar
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("index"));
  m.def(
      "sample_haar_unitary", [](int n, std::uint64_t seed) { return matrix_to_array(sample_haar_unitary(n, seed)); },
      py::arg("n"), py::arg("seed"), "Haar-distributed n x n unitary matrix.");
  m.def(
      "sample_eigenphases", [](int n, std::uint64_t seed) { return to_array(sample_eigenphases(n, seed).phases()); },
      py::arg("n"), py::arg("seed"), "Sorted eigenphases in [0, 2 pi) of one Haar unitary.");

  // critical
  py::class_<CriticalPointSet>(m, "CriticalPointSet")
      .def_readonly("n", &CriticalPointSet::n)
      .def_property_readonly("points", [](const CriticalPointSet& c) { return to_array(c.points); })
      .def_property_readonly("residuals", [](const CriticalPointSet& c) { return to_array(c.residuals); })
      .def_property_readonly("multiplicity", [](const CriticalPointSet& c) { return to_array(c.multiplicity); })
      .def("__len__", [](const CriticalPointSet& c) { return c.points.size(); });
  m.def(
      "critical_points", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& phases) {
        return critical_points(spectrum_from(phases));
      },
      py::arg("phases"), "The n-1 roots of Z'(z) for the eigenphases `phases`.");
  m.def(
      "critical_points_oracle",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& phases) {
        return critical_points_oracle(spectrum_from(phases));
      },
      py::arg("phases"), "Companion-matrix route for n <= 64.");
  m.def(
      "matching_distance",
      [](const std::vector<Complex>& a, const std::vector<Complex>& b) { return matching_distance(a, b); },
      py::arg("a"), py::arg("b"));

  // stats
  m.def(
      "scaled_distances",
      [](const CriticalPointSet& c) { return to_array(scaled_distances(c).x_values); }, py::arg("cps"),
      "x = (n-1)(1 - |z|) for every critical point.");
  m.def(
      "ipx_ensemble",
      [](int n, int samples, std::uint64_t seed, const py::array_t<double, py::array::c_style | py::array::forcecast>& grid,
         int threads) {
        const auto g = to_vector(grid);
        std::vector<MatrixSample> ms;
        {
          py::gil_scoped_release release;
          ms = sample_critical_ensemble({n, samples, seed}, threads);
        }
        std::vector<ScaledRadialSample> radial;
        for (const auto& s : ms) radial.push_back(scaled_distances(s.critical));
        const auto c = empirical_ipx(radial, g);
        return py::make_tuple(to_array(c.values), to_array(c.std_errors()), c.sample_count);
      },
      py::arg("n"), py::arg("samples"), py::arg("seed"), py::arg("x_grid"), py::arg("threads") = 1,
      "Empirical Ip(x) over a seeded ensemble: (values, std_errors, pooled_roots).");
  m.def("ipx_large_x", &ipx_large_x, py::arg("x"));
  m.def("rho_asymptotic", &rho_asymptotic, py::arg("r"), py::arg("n"));
  m.def(
      "spacing_correlation",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& phases) {
        const auto s = spectrum_from(phases);
        const auto pairs = spacing_correlation(s, critical_points(s)).pairs;
        std::vector<double> sv, xv;
        for (const auto& p : pairs) {
          sv.push_back(p.s);
          xv.push_back(p.x);
        }
        return py::make_tuple(to_array(sv), to_array(xv));
      },
      py::arg("phases"), "(S, x) pairs: rescaled gap and scaled distance of its critical point.");
  m.def(
      "fit_beta",
      [](const std::vector<double>& s, const std::vector<double>& x, double x_max) {
        if (s.size() != x.size()) throw DimensionError("fit_beta: s and x differ in length");
        std::vector<SpacingPair> pairs;
        for (std::size_t i = 0; i < s.size(); ++i) pairs.push_back({s[i], x[i]});
        const auto f = fit_beta(pairs, x_max);
        return py::make_tuple(f.beta_hat, f.std_error, f.used);
      },
      py::arg("s"), py::arg("x"), py::arg("x_max") = 1.0, "(beta_hat, std_error, used).");

  // spacing
  py::class_<GapProbabilitySeries>(m, "GapProbabilitySeries")
      .def_property_readonly("max_order", &GapProbabilitySeries::max_order)
      .def("e", [](const GapProbabilitySeries& g, int l) { return g.e(l).to_string(); }, py::arg("l"),
           "Exact E_l as a string, e.g. '1/36*pi^2'.")
      .def("e_value", [](const GapProbabilitySeries& g, int l) { return g.e(l).value(); }, py::arg("l"))
      .def_property_readonly("numeric", [](const GapProbabilitySeries& g) { return to_array(g.numeric()); })
      .def("trust_radius", [](const GapProbabilitySeries& g) { return trust_radius(g); })
      .def("p_cue", [](const GapProbabilitySeries& g, double s) { return p_cue(g, s); }, py::arg("s"))
      .def(
          "ipx_small_x",
          [](const GapProbabilitySeries& g, double x, double beta, int l_max) { return ipx_small_x(g, x, beta, l_max); },
          py::arg("x"), py::arg("beta") = 0.5, py::arg("l_max") = kDefaultLMax)
      .def(
          "ipx_coefficients",
          [](const GapProbabilitySeries& g, double beta, int l_max) {
            std::vector<py::tuple> out;
            for (const auto& t : ipx_coefficients(g, beta, l_max))
              out.push_back(py::make_tuple(static_cast<double>(t.exponent_numerator) / t.exponent_denominator,
                                           t.coefficient));
            return out;
          },
          py::arg("beta") = 0.5, py::arg("l_max") = kDefaultLMax, "[(exponent, coefficient), ...]");
  m.def(
      "gap_series",
      [](int max_order, const std::string& cache_dir) {
        py::gil_scoped_release release;
        return cache_dir.empty() ? gap_series(max_order) : gap_series_cached(max_order, cache_dir);
      },
      py::arg("max_order") = 34, py::arg("cache_dir") = "",
      "Exact Taylor series of the sine-kernel gap probability.");

  // szego
  m.def(
      "g_hat", [](Complex w, double alpha, Complex z, int k) { return g_hat({w, alpha, z}, k); }, py::arg("w"),
      py::arg("alpha"), py::arg("z"), py::arg("k"));
  m.def(
      "h_hat", [](Complex w, double alpha, Complex z, int k) { return h_hat({w, alpha, z}, k); }, py::arg("w"),
      py::arg("alpha"), py::arg("z"), py::arg("k"));
  m.def(
      "szego_sum",
      [](Complex w, double alpha, Complex z, const std::string& kind) {
        return szego_sum(params_from(w, alpha, z), kind_from(kind));
      },
      py::arg("w"), py::arg("alpha"), py::arg("z"), py::arg("kind") = "g");
  m.def(
      "toeplitz_determinant",
      [](Complex w, double alpha, Complex z, int n, const std::string& kind) {
        const auto p = params_from(w, alpha, z);
        return toeplitz_determinant(symbol_fourier(p, kind_from(kind), default_grid_size(n, std::abs(z))), n);
      },
      py::arg("w"), py::arg("alpha"), py::arg("z"), py::arg("n"), py::arg("kind") = "g",
      "D_n[exp(i f)] for f = g or h.");
  m.def(
      "szego_limit_error",
      [](Complex w, double alpha, Complex z, int n, const std::string& kind) {
        return szego_limit_error(params_from(w, alpha, z), kind_from(kind), n);
      },
      py::arg("w"), py::arg("alpha"), py::arg("z"), py::arg("n"), py::arg("kind") = "g");
  m.def(
      "second_derivative_check",
      [](Complex w, Complex z, int n, double delta_alpha) {
        const auto c = second_derivative_check(w, z, n, delta_alpha);
        return py::make_tuple(c.finite_difference, c.closed_form);
      },
      py::arg("w"), py::arg("z"), py::arg("n"), py::arg("delta_alpha") = 1e-3,
      "(finite_difference, closed_form).");
  m.def("second_derivative_closed_form", &second_derivative_closed_form, py::arg("w"), py::arg("r"));
  m.def(
      "heine_szego_mc",
      [](Complex w, double alpha, Complex z, int n, int samples, std::uint64_t seed, const std::string& kind,
         int threads) {
        const auto p = params_from(w, alpha, z);
        const auto which = kind_from(kind);
        py::gil_scoped_release release;
        const auto e = heine_szego_mc(p, which, n, samples, seed, threads);
        py::gil_scoped_acquire acquire;
        return py::make_tuple(e.mean, e.std_error_re, e.std_error_im);
      },
      py::arg("w"), py::arg("alpha"), py::arg("z"), py::arg("n"), py::arg("samples"), py::arg("seed"),
      py::arg("kind") = "g", py::arg("threads") = 1, "(mean, std_error_re, std_error_im).");
  m.def(
      "ds_moment_mc",
      [](const std::vector<int>& partition, int n, int samples, std::uint64_t seed, int threads) {
        MomentEstimate e;
        {
          py::gil_scoped_release release;
          e = ds_moment_mc(partition, n, samples, seed, threads);
        }
        return py::dict(py::arg("estimate") = e.estimate, py::arg("std_error") = e.std_error,
                        py::arg("exact") = e.exact, py::arg("exact_regime") = e.exact_regime);
      },
      py::arg("partition"), py::arg("n"), py::arg("samples"), py::arg("seed"), py::arg("threads") = 1);
}
