#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "catsim/cli.hpp"

namespace py = pybind11;
using namespace catsim;

namespace {

SystemParams make_params(double lambda0, double eps_z, double eps_d, double q_factor, double temperature, int n_trunc) {
  SystemParams p;
  p.lambda0 = lambda0;
  p.eps_z = eps_z;
  p.eps_d = eps_d;
  p.q_factor = q_factor;
  p.temperature = temperature;
  p.n_trunc = n_trunc;
  p.validate();
  return p;
}

py::dict amplify(const AmplifyResult& r) {
  py::dict d;
  d["state"] = r.final_state.amplitudes();
  d["n_pulses"] = r.n_pulses;
  d["amplitude_up"] = r.conditional_amplitudes.first;
  d["amplitude_down"] = r.conditional_amplitudes.second;
  d["fidelity"] = r.fidelity_vs_ideal;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Qubit-oscillator cat-state amplification simulator";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<TruncationError>(m, "TruncationError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init(&make_params), py::arg("lambda0") = 0.2, py::arg("eps_z") = 0.0, py::arg("eps_d") = 1.9,
           py::arg("q_factor") = 1e4, py::arg("temperature") = 0.0, py::arg("n_trunc") = 64)
      .def_readwrite("omega0", &SystemParams::omega0)
      .def_readwrite("lambda0", &SystemParams::lambda0)
      .def_readwrite("eps_z", &SystemParams::eps_z)
      .def_readwrite("eps_perp", &SystemParams::eps_perp_amp)
      .def_readwrite("eps_d", &SystemParams::eps_d)
      .def_readwrite("omega_d", &SystemParams::omega_d)
      .def_readwrite("q_factor", &SystemParams::q_factor)
      .def_readwrite("temperature", &SystemParams::temperature)
      .def_readwrite("n_trunc", &SystemParams::n_trunc)
      .def_property_readonly("alpha0", &SystemParams::alpha0)
      .def_property_readonly("tau0", &SystemParams::tau0);

  m.def("coherent_state", [](cplx alpha, int n_trunc) { return coherent_state(alpha, FockSpace(n_trunc)).amplitudes(); },
        py::arg("alpha"), py::arg("n_trunc"));
  m.def("displacement", [](cplx alpha, int n_trunc) { return displacement(alpha, FockSpace(n_trunc)).entries(); },
        py::arg("alpha"), py::arg("n_trunc"));
  m.def("ideal_cat", [](int n, const SystemParams& p) { return ideal_cat(n, p).amplitudes(); }, py::arg("n"),
        py::arg("params"));

  m.def("amplify_ideal", [](int n, const SystemParams& p) { return amplify(amplify_ideal(n, p, standard_initial_state(p))); },
        py::arg("n"), py::arg("params"));
  m.def(
      "amplify_finite",
      [](int n, double eps_perp, const SystemParams& p, bool centered) {
        return amplify(amplify_finite(n, eps_perp, p, standard_initial_state(p),
                                      centered ? PulseAlignment::centered : PulseAlignment::leading));
      },
      py::arg("n"), py::arg("eps_perp"), py::arg("params"), py::arg("centered") = true);

  py::class_<DetectResult>(m, "DetectResult")
      .def_readonly("p_plus", &DetectResult::p_plus)
      .def_readonly("p_minus", &DetectResult::p_minus)
      .def_readonly("analytic_p_plus", &DetectResult::analytic_p_plus)
      .def_readonly("analytic_p_minus", &DetectResult::analytic_p_minus);

  m.def("detect", [](int n, const SystemParams& p) { return detect_spectroscopy(ideal_cat(n, p), p, n); },
        py::arg("n"), py::arg("params"));
  m.def("coherence_probe", [](int n, const SystemParams& p, bool coherent) { return coherence_probe(ideal_cat(n, p), p, n, coherent); },
        py::arg("n"), py::arg("params"), py::arg("coherent") = true);
  m.def(
      "detection_coefficients",
      [](double eps_d, double shift) {
        const auto c = detection_coefficients(eps_d, shift);
        return py::make_tuple(c.c_up, c.c_down, c.eps_bar);
      },
      py::arg("eps_d"), py::arg("shift"));

  m.def("qubit_entropy", [](const CVector& state) { return qubit_reduced(StateVector::normalized(state)).entropy; },
        py::arg("state"));

  m.def(
      "two_mode_cat",
      [](int n, double l1, double l2, const SystemParams& p) {
        const auto r = two_mode_cat(n, l1, l2, p);
        py::dict d;
        d["p_plus"] = r.p_plus;
        d["p_minus"] = r.p_minus;
        d["alpha1"] = r.alpha1;
        d["alpha2"] = r.alpha2;
        d["mode1_entropy_plus"] = r.mode1_entropy_plus;
        return d;
      },
      py::arg("n"), py::arg("lambda01"), py::arg("lambda02"), py::arg("params"));

  m.def(
      "saturation",
      [](const SystemParams& p, long max_kicks) {
        const auto r = saturation(p, max_kicks);
        return py::make_tuple(r.model.n_s, r.simulated_n_s, r.saturated);
      },
      py::arg("params"), py::arg("max_kicks") = 100'000'000L);

  m.def(
      "run_config",
      [](const std::string& text, int threads, const std::string& format) {
        const auto config = cli::parse_config(text);
        py::gil_scoped_release release;
        const auto result = cli::run(config, threads);
        return cli::render(result, format == "json" ? cli::Format::json : cli::Format::csv);
      },
      py::arg("text"), py::arg("threads") = 1, py::arg("format") = "csv",
      "Parses a config document, runs it and returns the rendered CSV or JSON text.");

#ifdef CATSIM_VERSION
  m.attr("__version__") = CATSIM_VERSION;
#endif
}
