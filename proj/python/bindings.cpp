#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "locdens/asymptotics.hpp"
#include "locdens/errors.hpp"
#include "locdens/estimators.hpp"
#include "locdens/hyvarinen.hpp"
#include "locdens/loglik.hpp"
#include "locdens/moment_matching.hpp"

namespace py = pybind11;
using namespace locdens;

namespace {

py::dict triple_dict(const EstimateTriple& e) {
  py::dict d;
  d["value"] = e.has_value ? py::cast(e.value) : py::none();
  d["gradient"] = e.gradient;
  d["hessian"] = e.hessian;
  d["scale"] = to_string(e.scale);
  d["warnings"] = e.warnings;
  return d;
}

py::tuple element_tuple(const HdsElement& v) { return py::make_tuple(v.c, v.b, v.A); }

}  // namespace

PYBIND11_MODULE(_locdens, m) {
  m.doc() = "Local density, log-density and derivative estimators";
  m.attr("__version__") = LOCDENS_VERSION;

  static py::exception<Error> error(m, "LocdensError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object code = py::str(to_string(e.code()));
      PyErr_SetObject(error.ptr(), py::make_tuple(py::str(e.what()), code).ptr());
    }
  });

  py::class_<KernelSpec>(m, "Kernel")
      .def_static("gaussian", &KernelSpec::gaussian, py::arg("d"))
      .def_static("triweight", &KernelSpec::triweight, py::arg("d"))
      .def_static("uniform_ball", &KernelSpec::uniform_ball, py::arg("d"), py::arg("standardize") = true)
      .def_static("rectangular", &KernelSpec::rectangular, py::arg("d"))
      .def_property_readonly("dimension", &KernelSpec::dimension)
      .def_property_readonly("name", &KernelSpec::name)
      .def("__call__", [](const KernelSpec& k, const Vec& z) { return k(z); })
      .def("moment", &KernelSpec::moment, py::arg("alpha"));

  py::class_<TestDensity>(m, "TestDensity")
      .def_static("standard_normal", &TestDensity::standard_normal, py::arg("d"))
      .def_static("gaussian", &TestDensity::gaussian, py::arg("mean"), py::arg("cov"))
      .def_static("mixture", &TestDensity::mixture, py::arg("weights"), py::arg("means"), py::arg("covs"))
      .def_property_readonly("dimension", &TestDensity::dimension)
      .def("pdf", &TestDensity::pdf)
      .def("log_pdf", &TestDensity::log_pdf)
      .def("truth", [](const TestDensity& f, const Vec& x, const std::string& scale) {
        return triple_dict(f.truth(x, parse_scale(scale)));
      }, py::arg("x"), py::arg("scale") = "density")
      .def("sample", [](const TestDensity& f, std::int64_t n, std::uint64_t seed) {
        Rng rng(seed);
        return f.sample(n, rng);
      }, py::arg("n"), py::arg("seed"));

  m.def("estimate", [](const std::string& paradigm, const RowMat& data, const KernelSpec& kernel, const Vec& x,
                       double h, const std::string& scale) {
    return triple_dict(estimate(parse_paradigm(paradigm), Dataset(data), kernel, x, h, parse_scale(scale)));
  }, py::arg("paradigm"), py::arg("data"), py::arg("kernel"), py::arg("x"), py::arg("h"), py::arg("scale") = "density");

  m.def("moment_triple", [](const RowMat& data, const KernelSpec& kernel, const Vec& x, double h) {
    return element_tuple(moment_triple(Dataset(data), kernel, x, h));
  }, py::arg("data"), py::arg("kernel"), py::arg("x"), py::arg("h"));

  m.def("apply_J", [](const KernelSpec& kernel, double c, const Vec& b, const Mat& A) {
    return element_tuple(MatchingPolynomials(kernel).apply_J(HdsElement(c, b, A)));
  }, py::arg("kernel"), py::arg("c"), py::arg("b"), py::arg("A"));
  m.def("invert_J", [](const KernelSpec& kernel, double c, const Vec& b, const Mat& A) {
    return element_tuple(MatchingPolynomials(kernel).invert_J(HdsElement(c, b, A)));
  }, py::arg("kernel"), py::arg("c"), py::arg("b"), py::arg("A"));

  m.def("sylvester_solve", &sylvester_solve, py::arg("sigma"), py::arg("B"));

  m.def("bias_constants", [](const std::string& paradigm, const TestDensity& f, const Vec& x0,
                             const KernelSpec& kernel) {
    const BiasProfile p = bias_constants(parse_paradigm(paradigm), f, x0, kernel);
    py::dict d;
    d["gamma0"] = p.gamma0;
    d["gamma1"] = p.gamma1;
    d["beta"] = p.beta;
    d["beta_vec"] = p.beta_vec;
    d["B"] = p.B_mat;
    return d;
  }, py::arg("paradigm"), py::arg("f"), py::arg("x0"), py::arg("kernel"));

  m.def("expected_estimate", [](const std::string& paradigm, const TestDensity& f, const Vec& x,
                                const KernelSpec& kernel, double h, const std::string& scale) {
    return triple_dict(expected_estimate(parse_paradigm(paradigm), f, x, kernel, h, parse_scale(scale)));
  }, py::arg("paradigm"), py::arg("f"), py::arg("x"), py::arg("kernel"), py::arg("h"), py::arg("scale") = "density");
}
