#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "boltzspec/analyses.hpp"
#include "boltzspec/validation.hpp"

namespace py = pybind11;
using namespace boltzspec;

namespace {

RunConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return RunConfig::from_json(j);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral analysis of the linearized hard-sphere Boltzmann operator";
  m.attr("SCHEMA_VERSION") = kSchemaVersion;

  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical_error, e.what());
    }
  });

  m.def("k_star", &k_star, "Smallest admissible polynomial weight exponent.");
  m.def("b_function", &b_function, py::arg("q"));
  m.def("collision_frequency", &compute_nu_speed, py::arg("dim"), py::arg("speed"));
  m.def("nu_csv", &nu_csv, py::arg("dim"), py::arg("speeds"));
  m.def("format_double", &format_double, py::arg("x"));

  py::class_<Session>(m, "Session")
      .def(py::init([](const std::string& config_json) { return std::make_unique<Session>(parse_config(config_json)); }),
           py::arg("config_json") = "{}")
      .def("config_json", [](const Session& s) { return dump_json(s.config().to_json()); })
      .def("basis_size", [](Session& s) { return s.basis().size(); })
      .def("collision_matrix", [](Session& s) { return CMatrix(s.L().values); })
      .def("cache_status", &Session::cache_status)
      .def("fourier_matrix",
           [](Session& s, const std::vector<double>& xi) {
             RVector x = frequency_vector(xi, s.config().dim);
             FrequencyPoint fp = FrequencyPoint::from_xi(x);
             RVector dir = fp.r > 0.0 ? fp.direction : s.config().unit_direction();
             return CMatrix(assemble_L_xi(s.L(), s.V(dir), fp).values);
           },
           py::arg("xi"))
      .def("a0", &Session::a0)
      .def("thresholds_json",
           [](Session& s) {
             const Thresholds& t = s.thresholds();
             return dump_json(Json{{"a0", t.a0}, {"a1", t.a1}, {"a", t.a}, {"contour_radius", t.contour_radius}});
           })
      .def("spectrum_json",
           [](Session& s, const std::vector<double>& xi) {
             return dump_json(spectrum_report(s, frequency_vector(xi, s.config().dim)));
           },
           py::arg("xi"))
      .def("branches_csv", &branches_csv, py::arg("r_grid"), py::arg("with_multiplicity") = true)
      .def("coeffs_json", [](Session& s) { return dump_json(coeffs_report(s)); })
      .def("projectors_json",
           [](Session& s, double r, bool with_matrices) { return dump_json(projectors_report(s, r, with_matrices)); },
           py::arg("r"), py::arg("with_matrices") = false)
      .def("semigroup_json",
           [](Session& s, const std::vector<double>& xi) {
             return dump_json(semigroup_report(s, frequency_vector(xi, s.config().dim)));
           },
           py::arg("xi"))
      .def("enlargement_json",
           [](Session& s, const std::vector<double>& xi) {
             return dump_json(enlargement_report(s, frequency_vector(xi, s.config().dim)));
           },
           py::arg("xi"))
      .def("validate_json",
           [](Session& s) {
             ValidationReport rep;
             {
               py::gil_scoped_release release;
               rep = run_validation(s);
             }
             return dump_json(rep.to_json(false));
           });
}
